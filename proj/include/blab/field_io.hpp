#pragma once

#include <iosfwd>
#include <string>

#include "blab/field.hpp"

namespace blab {

// Binary layout (little-endian):
//   "BLAB1"            5 bytes
//   N                  uint32
//   S                  float64
//   tag length         uint32
//   tag bytes
//   N*N x (re, im)     float64 pairs, row-major (j major, k minor)
void write_field(std::ostream& out, const ComplexField& f);
ComplexField read_field(std::istream& in);

void save_field(const std::string& path, const ComplexField& f);
ComplexField load_field(const std::string& path);

}  // namespace blab
