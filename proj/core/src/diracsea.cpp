#include "cfs/diracsea.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cfs/errors.hpp"
#include "cfs/parallel.hpp"

namespace cfs {
namespace {

using WaveMatrix = Eigen::Matrix<complex, 4, Eigen::Dynamic>;

std::array<SpinorMatrix, 4> make_dirac_matrices() {
  const complex i(0.0, 1.0);
  Eigen::Matrix2cd sigma[3];
  sigma[0] << 0.0, 1.0, 1.0, 0.0;
  sigma[1] << 0.0, -i, i, 0.0;
  sigma[2] << 1.0, 0.0, 0.0, -1.0;

  std::array<SpinorMatrix, 4> g;
  g[0] = SpinorMatrix::Zero();
  g[0].diagonal() << 1.0, 1.0, -1.0, -1.0;
  for (int a = 0; a < 3; ++a) {
    g[a + 1] = SpinorMatrix::Zero();
    g[a + 1].block<2, 2>(0, 2) = sigma[a];
    g[a + 1].block<2, 2>(2, 0) = -sigma[a];
  }
  return g;
}

std::string describe(const LatticePoint& p) {
  std::ostringstream os;
  os << "(t=" << p.t << ", x=" << p.x[0] << ", y=" << p.x[1] << ", z=" << p.x[2] << ")";
  return os.str();
}

bool same_lattice(const LatticeSpec& a, const LatticeSpec& b) {
  return a.eps == b.eps && a.n_t == b.n_t && a.n_s == b.n_s && a.mass == b.mass;
}

int wrap_index(int v, int n) {
  v %= n;
  return v < 0 ? v + n : v;
}

}  // namespace

double minkowski_square(const FourVector& v) {
  return v[0] * v[0] - v[1] * v[1] - v[2] * v[2] - v[3] * v[3];
}

const std::array<SpinorMatrix, 4>& dirac_matrices() {
  static const std::array<SpinorMatrix, 4> g = make_dirac_matrices();
  return g;
}

SpinorMatrix slash(const FourVector& k) {
  const auto& g = dirac_matrices();
  return k[0] * g[0] - k[1] * g[1] - k[2] * g[2] - k[3] * g[3];
}

complex spinor_product(const Spinor& psi, const Spinor& phi) {
  // gamma^0 = diag(1, 1, -1, -1)
  return std::conj(psi[0]) * phi[0] + std::conj(psi[1]) * phi[1] - std::conj(psi[2]) * phi[2] -
         std::conj(psi[3]) * phi[3];
}

void LatticeSpec::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::InvalidArgument, "lattice spacing must be positive");
  }
  if (n_t < 2 || n_s < 2) {
    throw Error(ErrorCode::InvalidArgument, "lattice extents must be at least 2");
  }
  if (!(mass >= 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::InvalidArgument, "mass must be non-negative");
  }
}

double LatticeSpec::momentum(int label) const {
  return 2.0 * M_PI * static_cast<double>(label) / (eps * static_cast<double>(n_s));
}

std::size_t point_index(const LatticeSpec& spec, const LatticePoint& p) {
  const auto ns = static_cast<std::size_t>(spec.n_s);
  return ((static_cast<std::size_t>(p.t) * ns + static_cast<std::size_t>(p.x[0])) * ns +
          static_cast<std::size_t>(p.x[1])) * ns + static_cast<std::size_t>(p.x[2]);
}

LatticePoint lattice_point(const LatticeSpec& spec, std::size_t index) {
  const auto ns = static_cast<std::size_t>(spec.n_s);
  LatticePoint p;
  p.x[2] = static_cast<int>(index % ns);
  index /= ns;
  p.x[1] = static_cast<int>(index % ns);
  index /= ns;
  p.x[0] = static_cast<int>(index % ns);
  p.t = static_cast<int>(index / ns);
  return p;
}

FourVector position(const LatticeSpec& spec, const LatticePoint& p) {
  return {spec.eps * p.t, spec.eps * p.x[0], spec.eps * p.x[1], spec.eps * p.x[2]};
}

FourVector separation(const LatticeSpec& spec, std::size_t from, std::size_t to) {
  const LatticePoint a = lattice_point(spec, from);
  const LatticePoint b = lattice_point(spec, to);
  FourVector xi{};
  xi[0] = spec.eps * (b.t - a.t);
  for (int c = 0; c < 3; ++c) {
    int d = wrap_index(b.x[c] - a.x[c], spec.n_s);
    if (2 * d > spec.n_s) d -= spec.n_s;
    xi[c + 1] = spec.eps * d;
  }
  return xi;
}

ModeLabel parse_mode_label(const std::string& text) {
  std::istringstream is(text);
  std::string item;
  std::vector<int> parts;
  while (std::getline(is, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "malformed mode label '" + text + "'");
    }
  }
  if (parts.size() != 4 || (parts[3] != 1 && parts[3] != 2)) {
    throw Error(ErrorCode::InvalidArgument,
                "mode label must read a1,a2,a3,s with spin s in {1,2}: '" + text + "'");
  }
  return ModeLabel{{parts[0], parts[1], parts[2]}, parts[3]};
}

std::string format_mode_label(const ModeLabel& label) {
  std::ostringstream os;
  os << label.momentum[0] << ',' << label.momentum[1] << ',' << label.momentum[2] << ','
     << label.spin;
  return os.str();
}

Mode make_mode(const LatticeSpec& spec, const ModeLabel& label, bool positive_energy) {
  for (int c = 0; c < 3; ++c) {
    if (label.momentum[c] < spec.lowest_label() || label.momentum[c] > spec.highest_label()) {
      throw Error(ErrorCode::InvalidArgument,
                  "momentum label " + format_mode_label(label) + " outside the Brillouin zone");
    }
  }
  if (label.spin != 1 && label.spin != 2) {
    throw Error(ErrorCode::InvalidArgument, "spin index must be 1 or 2");
  }

  Mode mode;
  mode.label = label;
  mode.positive_energy = positive_energy;
  double k2 = 0.0;
  for (int c = 0; c < 3; ++c) {
    mode.k[c + 1] = spec.momentum(label.momentum[c]);
    k2 += mode.k[c + 1] * mode.k[c + 1];
  }
  const double omega = std::sqrt(k2 + spec.mass * spec.mass);
  mode.k[0] = positive_energy ? omega : -omega;

  // Solutions of (k-slash - m) u = 0 span the range of (k-slash + m). Seeds
  // are the rest-frame spinors of the requested branch; at m = 0, k = 0 the
  // range collapses and the seeds themselves (spin along z) are used.
  const SpinorMatrix projector = slash(mode.k) + spec.mass * SpinorMatrix::Identity();
  const int offset = positive_energy ? 0 : 2;
  Spinor seeds[2];
  const bool degenerate = omega + spec.mass == 0.0;
  for (int s = 0; s < 2; ++s) {
    Spinor e = Spinor::Zero();
    e[offset + s] = 1.0;
    seeds[s] = degenerate ? e : Spinor(projector * e);
  }
  const double n0 = seeds[0].norm();
  if (!(n0 > 0.0)) throw Error(ErrorCode::MassShellFailure, "singular spinor seed at " + format_mode_label(label));
  seeds[0] /= n0;
  seeds[1] -= seeds[0] * seeds[0].dot(seeds[1]);
  const double n1 = seeds[1].norm();
  if (!(n1 > 1e-12 * (omega + spec.mass + 1.0))) {
    throw Error(ErrorCode::MassShellFailure, "degenerate spin pair at " + format_mode_label(label));
  }
  seeds[1] /= n1;
  mode.amplitude = seeds[label.spin - 1];

  const SpinorMatrix dirac = slash(mode.k) - spec.mass * SpinorMatrix::Identity();
  const double residual = (dirac * mode.amplitude).norm();
  if (residual > 1e-10 * (omega + spec.mass + 1.0)) {
    throw Error(ErrorCode::MassShellFailure,
                "amplitude violates the Dirac equation at " + format_mode_label(label));
  }
  return mode;
}

ModeTable build_sea_modes(const LatticeSpec& spec) {
  spec.validate();
  ModeTable table;
  table.modes.reserve(2 * spec.spatial_volume());
  for (int a = spec.lowest_label(); a <= spec.highest_label(); ++a) {
    for (int b = spec.lowest_label(); b <= spec.highest_label(); ++b) {
      for (int c = spec.lowest_label(); c <= spec.highest_label(); ++c) {
        for (int s = 1; s <= 2; ++s) {
          table.occupied.push_back(table.modes.size());
          table.modes.push_back(make_mode(spec, ModeLabel{{a, b, c}, s}, false));
        }
      }
    }
  }
  return table;
}

double plane_wave_normalization(const LatticeSpec& spec) {
  return 1.0 / std::sqrt(2.0 * M_PI * std::pow(spec.eps, 3) * static_cast<double>(spec.spatial_volume()));
}

Spinor mode_value(const LatticeSpec& spec, const Mode& mode, const LatticePoint& p) {
  const FourVector x = position(spec, p);
  const double phase = mode.k[0] * x[0] - mode.k[1] * x[1] - mode.k[2] * x[2] - mode.k[3] * x[3];
  return plane_wave_normalization(spec) * std::polar(1.0, -phase) * mode.amplitude;
}

LatticeField sample_mode(const LatticeSpec& spec, const Mode& mode) {
  LatticeField field{spec, {}};
  field.values.resize(spec.point_count());
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    field.values[i] = mode_value(spec, mode, lattice_point(spec, i));
  }
  return field;
}

complex dirac_scalar_product(const LatticeField& psi, const LatticeField& phi, int t) {
  if (!same_lattice(psi.spec, phi.spec) || psi.values.size() != psi.spec.point_count() ||
      phi.values.size() != phi.spec.point_count()) {
    throw Error(ErrorCode::SliceMismatch, "wave functions are sampled on different lattices");
  }
  if (t < 0 || t >= psi.spec.n_t) {
    throw Error(ErrorCode::SliceMismatch, "time slice " + std::to_string(t) + " out of range");
  }
  const std::size_t vol = psi.spec.spatial_volume();
  const std::size_t first = static_cast<std::size_t>(t) * vol;
  complex sum = 0.0;
  // psi-bar gamma^0 phi = psi^+ phi
  for (std::size_t i = first; i < first + vol; ++i) sum += psi.values[i].dot(phi.values[i]);
  return 2.0 * M_PI * std::pow(psi.spec.eps, 3) * sum;
}

WaveMatrix wave_matrix(const LatticeSpec& spec, const ModeTable& table, const LatticePoint& p) {
  WaveMatrix w(4, static_cast<Eigen::Index>(table.occupied.size()));
  for (std::size_t l = 0; l < table.occupied.size(); ++l) {
    w.col(static_cast<Eigen::Index>(l)) = mode_value(spec, table.modes[table.occupied[l]], p);
  }
  return w;
}

OperatorPoint local_correlation_operator(const WaveMatrix& wave) {
  constexpr int spin_dim = 2;
  const Eigen::Index f = wave.cols();
  if (f == 0) return OperatorPoint::zero(0, spin_dim);

  // F = -W^+ gamma^0 W. With W^+ = Q R (thin QR) the nonzero spectrum of F
  // is that of the small Hermitian matrix -R gamma^0 R^+ on span(Q).
  const CMatrix wt = wave.adjoint();
  Eigen::HouseholderQR<CMatrix> qr(wt);
  const Eigen::Index k = std::min<Eigen::Index>(f, 4);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(f, k);
  const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const CMatrix small = -r * dirac_matrices()[0] * r.adjoint();

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (small + small.adjoint()));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenSolverFailure, "local correlation eigensolver failed");
  }
  const RVector& nu = solver.eigenvalues();
  const double scale = nu.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index a = 0; a < nu.size(); ++a) {
    if (scale > 0.0 && std::abs(nu[a]) > kRankTolerance * scale) kept.push_back(a);
  }
  CMatrix factors(f, static_cast<Eigen::Index>(kept.size()));
  RVector spectrum(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    factors.col(col) = q * solver.eigenvectors().col(kept[c]);
    spectrum[col] = nu[kept[c]];
  }
  return OperatorPoint(std::move(factors), std::move(spectrum), spin_dim);
}

OperatorPoint local_correlation_operator(const LatticeSpec& spec, const ModeTable& table,
                                         const LatticePoint& p) {
  return local_correlation_operator(wave_matrix(spec, table, p));
}

std::string to_string(WeightConvention c) {
  switch (c) {
    case WeightConvention::Counting: return "counting";
    case WeightConvention::Eps4: return "eps4";
    case WeightConvention::Custom: return "custom";
  }
  return "unknown";
}

LatticeSeaSystem::LatticeSeaSystem(LatticeSpec spec, ModeTable modes, WeightConvention convention,
                                   double counting_weight, DiscreteMeasure measure,
                                   std::vector<std::size_t> atom_of_point)
    : spec_(spec),
      modes_(std::move(modes)),
      convention_(convention),
      counting_weight_(counting_weight),
      measure_(std::move(measure)),
      atom_of_point_(std::move(atom_of_point)) {}

WaveMatrix LatticeSeaSystem::wave_matrix(std::size_t point) const {
  return cfs::wave_matrix(spec_, modes_, lattice_point(spec_, point));
}

SpinorMatrix LatticeSeaSystem::spinor_kernel(std::size_t x, std::size_t y) const {
  const WaveMatrix wx = wave_matrix(x);
  const WaveMatrix wy = wave_matrix(y);
  return -(wx * wy.adjoint()) * dirac_matrices()[0];
}

LatticeSeaSystem build_system(const LatticeSpec& spec, const BuildOptions& opts) {
  spec.validate();
  ModeTable table = build_sea_modes(spec);

  for (const auto& label : opts.edits.removed) {
    auto it = std::find_if(table.occupied.begin(), table.occupied.end(),
                           [&](std::size_t m) { return table.modes[m].label == label; });
    if (it == table.occupied.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  "cannot remove sea mode " + format_mode_label(label) + ": not occupied");
    }
    table.occupied.erase(it);
  }
  for (const auto& label : opts.edits.added) {
    for (const auto& m : table.modes) {
      if (m.positive_energy && m.label == label) {
        throw Error(ErrorCode::InvalidArgument,
                    "particle mode " + format_mode_label(label) + " added twice");
      }
    }
    table.occupied.push_back(table.modes.size());
    table.modes.push_back(make_mode(spec, label, true));
  }

  double weight = 1.0;
  switch (opts.convention) {
    case WeightConvention::Counting: weight = 1.0; break;
    case WeightConvention::Eps4: weight = std::pow(spec.eps, 4); break;
    case WeightConvention::Custom:
      if (!(opts.custom_weight > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "counting weight must be positive");
      }
      weight = opts.custom_weight;
      break;
  }

  const std::size_t count = spec.point_count();
  std::vector<std::optional<OperatorPoint>> ops(count);
  parallel_for(count, opts.threads, [&](std::size_t i) {
    const LatticePoint p = lattice_point(spec, i);
    try {
      ops[i].emplace(local_correlation_operator(spec, table, p));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " at lattice point " + describe(p));
    }
  });

  std::vector<Atom> points;
  points.reserve(count);
  for (auto& op : ops) points.push_back({std::move(*op), weight});
  std::vector<std::size_t> atom_of_point;
  DiscreteMeasure measure = DiscreteMeasure::push_forward(std::move(points), &atom_of_point);
  return LatticeSeaSystem(spec, std::move(table), opts.convention, weight, std::move(measure),
                          std::move(atom_of_point));
}

}  // namespace cfs
