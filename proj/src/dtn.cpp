#include "blab/dtn.hpp"

#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "blab/error.hpp"
#include "blab/pool.hpp"

namespace blab {
namespace {

constexpr double kPi = Grid::kPi;

void require_bounds(double v, double K, const char* what) {
  if (!(v >= (1.0 / K) * (1 - 1e-12) && v <= K * (1 + 1e-12)))
    throw Error(ErrorKind::EllipticityViolation, std::string(what) + " outside [1/K, K]");
}

void check_layers(const RadialLayers& l, double K) {
  if (l.values.size() != l.radii.size() + 1) throw Error(ErrorKind::InvalidArgument, "layers need one more value than radii");
  double prev = 0.0;
  for (double r : l.radii) {
    if (!(r > prev && r < 1.0)) throw Error(ErrorKind::InvalidArgument, "layer radii must increase inside (0, 1)");
    prev = r;
  }
  for (double v : l.values) require_bounds(v, K, "layer conductivity");
}

}  // namespace

double RadialLayers::operator()(double r) const {
  const auto it = std::upper_bound(radii.begin(), radii.end(), r);
  return values[static_cast<std::size_t>(it - radii.begin())];
}

Conductivity::Conductivity(std::function<double(cplx)> eval, double K, std::optional<RadialLayers> layers)
    : eval_(std::move(eval)), K_(K), layers_(std::move(layers)) {}

Conductivity Conductivity::from_field(const ComplexField& gamma, double K) {
  if (!(K >= 1.0)) throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
  const Grid& g = gamma.grid();
  if (g.half_width() < 1.0) throw Error(ErrorKind::InvalidGrid, "grid does not cover the unit disk");
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) {
      const cplx v = gamma(j, k);
      if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
        throw Error(ErrorKind::EllipticityViolation, "conductivity is not real-valued");
      if (std::abs(g.z(j, k)) <= 1.0) require_bounds(v.real(), K, "conductivity");
    }
  return Conductivity([gamma](cplx z) { return interpolate_bilinear(gamma, z).real(); }, K, std::nullopt);
}

Conductivity Conductivity::radial(RadialLayers layers, double K) {
  if (!(K >= 1.0)) throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
  check_layers(layers, K);
  return Conductivity([layers](cplx z) { return layers(std::abs(z)); }, K, layers);
}

Conductivity Conductivity::from_function(std::function<double(cplx)> gamma, double K) {
  if (!(K >= 1.0)) throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
  return Conductivity(std::move(gamma), K, std::nullopt);
}

Conductivity Conductivity::restricted(double r) const {
  if (!(r > 0.0 && r <= 1.0)) throw Error(ErrorKind::InvalidArgument, "restriction radius must lie in (0, 1]");
  std::optional<RadialLayers> l;
  if (layers_) {
    l.emplace();
    std::size_t i = 0;
    for (; i < layers_->radii.size() && layers_->radii[i] < r; ++i) {
      l->radii.push_back(layers_->radii[i] / r);
      l->values.push_back(layers_->values[i]);
    }
    l->values.push_back(layers_->values[i]);
  }
  return Conductivity([e = eval_, r](cplx w) { return e(r * w); }, K_, std::move(l));
}

Conductivity Conductivity::extended(double r) const {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidArgument, "extension radius must lie in (0, 1)");
  std::optional<RadialLayers> l;
  if (layers_) {
    l.emplace();
    std::size_t i = 0;
    for (; i < layers_->radii.size() && layers_->radii[i] < r; ++i) {
      l->radii.push_back(layers_->radii[i]);
      l->values.push_back(layers_->values[i]);
    }
    l->radii.push_back(r);
    l->values.push_back(layers_->values[i]);
    l->values.push_back(1.0);
  }
  return Conductivity([e = eval_, r](cplx z) { return std::abs(z) < r ? e(z) : 1.0; }, std::max(K_, 1.0),
                      std::move(l));
}

DiskMesh ring_mesh(double h, const std::vector<double>& interfaces, int symmetry) {
  if (!(h > 0.0 && h <= 0.25)) throw Error(ErrorKind::MeshTooCoarse, "mesh_h must lie in (0, 0.25]");
  if (symmetry < 1) throw Error(ErrorKind::InvalidArgument, "symmetry must be >= 1");
  std::vector<double> breaks = {0.0};
  for (double r : interfaces) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidArgument, "interface radius outside (0, 1)");
    breaks.push_back(r);
  }
  std::sort(breaks.begin(), breaks.end());
  const double refine = 1.0 - 4.0 * h;
  if (refine > breaks.back() + h) breaks.push_back(refine);
  breaks.push_back(1.0);

  // ring radii and the local spacing used for their angular resolution
  std::vector<double> radii, spacing;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    const double hs = a >= refine - 1e-12 ? 0.5 * h : h;
    const int m = std::max(1, static_cast<int>(std::ceil((b - a) / hs - 1e-9)));
    for (int i = 1; i <= m; ++i) {
      radii.push_back(a + (b - a) * i / m);
      spacing.push_back(hs);
    }
  }

  // Node t of ring i sits at angle 2pi (2t + odd_i) / (2 n_i); positions are compared
  // exactly as fractions so the stitching repeats identically in every symmetry sector.
  struct Ring {
    std::vector<int> ids;
    long long odd = 0;
  };
  const auto position_less = [](long long ta, const Ring& A, long long tb, const Ring& B) {
    const long long na = static_cast<long long>(A.ids.size()), nb = static_cast<long long>(B.ids.size());
    return (2 * ta + A.odd) * nb < (2 * tb + B.odd) * na;
  };

  DiskMesh mesh;
  mesh.h = h;
  mesh.nodes.push_back(0.0);
  Ring prev{{0}, 0};
  for (std::size_t i = 0; i < radii.size(); ++i) {
    int n = std::max(6, static_cast<int>(std::ceil(2.0 * kPi * radii[i] / spacing[i])));
    n = (n + symmetry - 1) / symmetry * symmetry;
    Ring ring{std::vector<int>(n), static_cast<long long>(i % 2)};
    for (int t = 0; t < n; ++t) {
      ring.ids[t] = static_cast<int>(mesh.nodes.size());
      mesh.nodes.push_back(std::polar(radii[i], kPi * (2.0 * t + ring.odd) / n));
    }
    if (prev.ids.size() == 1) {
      for (int t = 0; t < n; ++t) mesh.triangles.push_back({0, ring.ids[t], ring.ids[(t + 1) % n]});
    } else {
      // start from the last outer node that precedes inner node 0 in the merged order,
      // a choice that is the same in every sector
      const int na = static_cast<int>(prev.ids.size());
      long long b0 = 0;
      while (!position_less(0, prev, b0 + 1, ring)) ++b0;
      while (position_less(0, prev, b0, ring)) --b0;
      const auto outer = [&](long long b) { return ring.ids[static_cast<std::size_t>(((b % n) + n) % n)]; };
      long long a = 0, b = b0;
      while (a < na || b < b0 + n) {
        const bool step_inner = b == b0 + n || (a < na && position_less(a + 1, prev, b + 1, ring));
        if (step_inner) {
          mesh.triangles.push_back({prev.ids[a % na], prev.ids[(a + 1) % na], outer(b)});
          ++a;
        } else {
          mesh.triangles.push_back({prev.ids[a % na], outer(b + 1), outer(b)});
          ++b;
        }
      }
    }
    prev = std::move(ring);
  }
  mesh.boundary = prev.ids;
  return mesh;
}

CsvTable DtnMatrix::diagonal_csv() const {
  CsvTable t({"n", "re", "im"});
  for (int n = -n_b; n <= n_b; ++n) t.add_row({static_cast<long long>(n), (*this)(n, n).real(), (*this)(n, n).imag()});
  return t;
}

DtnMatrix DtnMatrix::truncated(int n) const {
  if (n < 0 || n > n_b) throw Error(ErrorKind::DimensionMismatch, "truncation beyond N_b");
  DtnMatrix t = *this;
  t.n_b = n;
  t.entries = entries.block(n_b - n, n_b - n, 2 * n + 1, 2 * n + 1);
  return t;
}

DtnMatrix dtn_matrix(const Conductivity& c, int n_b, double mesh_h, int workers) {
  if (n_b < 0 || n_b > 64) throw Error(ErrorKind::InvalidArgument, "N_b must lie in [0, 64]");
  std::vector<double> interfaces;
  if (c.layers()) {
    interfaces = c.layers()->radii;
    double prev = 0.0, feature = 1.0;
    for (double r : interfaces) feature = std::min(feature, r - prev), prev = r;
    feature = std::min(feature, 1.0 - prev);
    if (mesh_h > feature / 4.0) throw Error(ErrorKind::MeshTooCoarse, "mesh_h exceeds a quarter of the thinnest layer");
  }
  const DiskMesh mesh = ring_mesh(mesh_h, interfaces, 2 * n_b + 1);
  const int nb_nodes = static_cast<int>(mesh.boundary.size());
  if (nb_nodes < 4 * n_b + 2) throw Error(ErrorKind::MeshTooCoarse, "too few boundary nodes for N_b modes");

  const int total = static_cast<int>(mesh.nodes.size());
  const int interior = total - nb_nodes;
  // mesh numbering puts the boundary ring last
  std::vector<Eigen::Triplet<double>> tii, tib, tbb;
  for (const auto& tri : mesh.triangles) {
    const cplx p[3] = {mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]};
    const double area2 = std::abs((p[1] - p[0]).real() * (p[2] - p[0]).imag() - (p[1] - p[0]).imag() * (p[2] - p[0]).real());
    const double gamma = c((p[0] + p[1] + p[2]) / 3.0);
    require_bounds(gamma, c.K(), "conductivity");
    double bx[3], cy[3];
    for (int i = 0; i < 3; ++i) {
      const cplx a = p[(i + 1) % 3], b = p[(i + 2) % 3];
      bx[i] = a.imag() - b.imag();
      cy[i] = b.real() - a.real();
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double v = gamma * (bx[i] * bx[j] + cy[i] * cy[j]) / (2.0 * area2);
        const int I = tri[i], J = tri[j];
        if (I < interior && J < interior) tii.emplace_back(I, J, v);
        else if (I < interior) tib.emplace_back(I, J - interior, v);
        else if (J >= interior) tbb.emplace_back(I - interior, J - interior, v);
      }
  }
  Eigen::SparseMatrix<double> Aii(interior, interior), Aib(interior, nb_nodes), Abb(nb_nodes, nb_nodes);
  Aii.setFromTriplets(tii.begin(), tii.end());
  Aib.setFromTriplets(tib.begin(), tib.end());
  Abb.setFromTriplets(tbb.begin(), tbb.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Aii);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "interior stiffness factorization failed");

  const int modes = 2 * n_b + 1;
  Eigen::MatrixXcd phi(nb_nodes, modes);
  for (int b = 0; b < nb_nodes; ++b) {
    const double th = std::arg(mesh.nodes[mesh.boundary[b]]);
    for (int n = -n_b; n <= n_b; ++n) phi(b, n + n_b) = std::polar(1.0, n * th);
  }
  // S phi = Abb phi - Aib^T Aii^{-1} Aib phi, column by column
  Eigen::MatrixXcd s_phi(nb_nodes, modes);
  std::vector<int> failed(modes, 0);
  parallel_for(static_cast<std::size_t>(modes), workers, [&](std::size_t col) {
    const Eigen::VectorXd re = phi.col(col).real(), im = phi.col(col).imag();
    const Eigen::VectorXd xr = solver.solve(Aib * re), xi = solver.solve(Aib * im);
    if (solver.info() != Eigen::Success) failed[col] = 1;
    const Eigen::VectorXd sr = Abb * re - Aib.transpose() * xr, si = Abb * im - Aib.transpose() * xi;
    s_phi.col(col) = sr.cast<cplx>() + cplx(0.0, 1.0) * si.cast<cplx>();
  });
  if (std::find(failed.begin(), failed.end(), 1) != failed.end())
    throw Error(ErrorKind::SolverFailure, "interior solve failed");

  DtnMatrix out;
  out.n_b = n_b;
  out.entries = phi.adjoint() * s_phi / (2.0 * kPi);
  out.mesh_h = mesh_h;
  out.tolerance = 1e-10;
  return out;
}

DtnMatrix radial_dtn_oracle(const RadialLayers& layers, int n_b) {
  check_layers(layers, std::max({1.0, *std::max_element(layers.values.begin(), layers.values.end()),
                                 1.0 / *std::min_element(layers.values.begin(), layers.values.end())}));
  if (n_b < 0) throw Error(ErrorKind::InvalidArgument, "N_b must be >= 0");
  DtnMatrix out;
  out.n_b = n_b;
  out.entries = Eigen::MatrixXcd::Zero(2 * n_b + 1, 2 * n_b + 1);
  for (int n = 1; n <= n_b; ++n) {
    // u = a r^n + b r^-n per annulus; t = b/a, zero in the core
    double t = 0.0;
    for (std::size_t i = 0; i < layers.radii.size(); ++i) {
      const double rho = layers.radii[i];
      const double p = std::pow(rho, 2.0 * n);
      const double x = p == 0.0 ? 0.0 : t / p;
      const double q = layers.values[i + 1] / layers.values[i] * (1.0 + x) / (1.0 - x);
      t = (q - 1.0) / (q + 1.0) * p;
    }
    const double lambda = layers.values.back() * n * (1.0 - t) / (1.0 + t);
    out.entries(n_b + n, n_b + n) = lambda;
    out.entries(n_b - n, n_b - n) = lambda;
  }
  return out;
}

double dtn_distance(const DtnMatrix& a, const DtnMatrix& b) {
  if (a.n_b != b.n_b) throw Error(ErrorKind::DimensionMismatch, "DtN matrices have different N_b");
  const int m = 2 * a.n_b + 1;
  Eigen::VectorXd w(m);
  for (int n = -a.n_b; n <= a.n_b; ++n) w(n + a.n_b) = std::pow(1.0 + double(n) * n, -0.25);
  const Eigen::MatrixXcd d = w.asDiagonal() * (a.entries - b.entries) * w.asDiagonal();
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(d).singularValues()(0);
}

ExtensionComparison extension_compare(const Conductivity& c1, const Conductivity& c2, double r, int n_b,
                                      double mesh_h, int workers) {
  ExtensionComparison out;
  out.rho_inner = dtn_distance(dtn_matrix(c1.restricted(r), n_b, mesh_h, workers),
                               dtn_matrix(c2.restricted(r), n_b, mesh_h, workers));
  out.rho_outer = dtn_distance(dtn_matrix(c1.extended(r), n_b, mesh_h, workers),
                               dtn_matrix(c2.extended(r), n_b, mesh_h, workers));
  return out;
}

void save_dtn(const DtnMatrix& m, const std::string& path) {
  static_assert(std::endian::native == std::endian::little, "binary DtN format is little-endian");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot open " + path);
  const nlohmann::ordered_json header = {{"format", "blab-dtn"}, {"version", 1},   {"n_b", m.n_b},
                                         {"mesh_h", m.mesh_h},   {"tolerance", m.tolerance}};
  os << header.dump() << '\n';
  const int dim = 2 * m.n_b + 1;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double v[2] = {m.entries(i, j).real(), m.entries(i, j).imag()};
      os.write(reinterpret_cast<const char*>(v), sizeof v);
    }
  if (!os) throw Error(ErrorKind::IoError, "write failed: " + path);
}

DtnMatrix load_dtn(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::string line;
  std::getline(is, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::IoError, "bad DtN header in " + path + ": " + e.what());
  }
  if (header.value("format", "") != "blab-dtn") throw Error(ErrorKind::IoError, path + " is not a DtN file");
  DtnMatrix m;
  m.n_b = header.at("n_b").get<int>();
  m.mesh_h = header.at("mesh_h").get<double>();
  m.tolerance = header.at("tolerance").get<double>();
  const int dim = 2 * m.n_b + 1;
  m.entries.resize(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double v[2];
      if (!is.read(reinterpret_cast<char*>(v), sizeof v)) throw Error(ErrorKind::IoError, "truncated DtN file " + path);
      m.entries(i, j) = {v[0], v[1]};
    }
  return m;
}

}  // namespace blab
