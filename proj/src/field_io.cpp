#include "blab/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "blab/error.hpp"

namespace blab {
namespace {

static_assert(std::endian::native == std::endian::little,
              "field persistence assumes a little-endian host");

constexpr char kMagic[5] = {'B', 'L', 'A', 'B', '1'};

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw Error(ErrorKind::IoError, "truncated field stream");
  }
  return v;
}

}  // namespace

void write_field(std::ostream& out, const ComplexField& f) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().n()));
  put<double>(out, f.grid().half_width());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.tag().size()));
  out.write(f.tag().data(), static_cast<std::streamsize>(f.tag().size()));
  // Samples are row-major with interleaved (re, im), which is exactly the
  // on-disk layout.
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.values().size() * sizeof(cplx)));
  if (!out) throw Error(ErrorKind::IoError, "failed writing field");
}

ComplexField read_field(std::istream& in) {
  char magic[5];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::IoError, "bad field magic");
  }
  const auto n = get<std::uint32_t>(in);
  const auto s = get<double>(in);
  const auto tag_len = get<std::uint32_t>(in);
  if (tag_len > (1u << 20)) throw Error(ErrorKind::IoError, "implausible tag length");
  std::string tag(tag_len, '\0');
  if (!in.read(tag.data(), tag_len)) throw Error(ErrorKind::IoError, "truncated tag");
  const Grid grid = Grid::make(static_cast<int>(n), s);
  Samples values(grid.n(), grid.n());
  if (!in.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(cplx)))) {
    throw Error(ErrorKind::IoError, "truncated sample block");
  }
  ComplexField f(grid, std::move(values), std::move(tag));
  if (!f.all_finite()) throw Error(ErrorKind::IoError, "field contains non-finite samples");
  return f;
}

void save_field(const std::string& path, const ComplexField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path);
  write_field(out, f);
}

ComplexField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read_field(in);
}

}  // namespace blab
