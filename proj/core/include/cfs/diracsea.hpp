#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfs/measure.hpp"

namespace cfs {

/// Contravariant components (x^0, x^1, x^2, x^3), signature (+,-,-,-).
using FourVector = std::array<double, 4>;
using Spinor = Eigen::Vector4cd;
using SpinorMatrix = Eigen::Matrix4cd;

double minkowski_square(const FourVector& v);

/// gamma^0..gamma^3 in the Dirac representation.
const std::array<SpinorMatrix, 4>& dirac_matrices();

/// k_j gamma^j for a contravariant k (indices lowered with diag(1,-1,-1,-1)).
SpinorMatrix slash(const FourVector& k);

/// Adjoint spinor pairing psi-bar phi = psi^+ gamma^0 phi.
complex spinor_product(const Spinor& psi, const Spinor& phi);

struct LatticeSpec {
  double eps = 1.0;
  int n_t = 2;
  int n_s = 2;
  double mass = 1.0;

  /// Throws InvalidArgument unless eps > 0, n_t, n_s >= 2 and mass >= 0.
  void validate() const;

  std::size_t spatial_volume() const { return static_cast<std::size_t>(n_s) * n_s * n_s; }
  std::size_t point_count() const { return static_cast<std::size_t>(n_t) * spatial_volume(); }

  /// Integer momentum label a in (-n_s/2, n_s/2], so that eps*k = 2 pi a / n_s
  /// lies in the first Brillouin zone (-pi, pi].
  int lowest_label() const { return -((n_s - 1) / 2); }
  int highest_label() const { return n_s / 2; }
  double momentum(int label) const;
};

struct LatticePoint {
  int t = 0;
  std::array<int, 3> x{};
};

/// Row-major point index ((t * n_s + x) * n_s + y) * n_s + z.
std::size_t point_index(const LatticeSpec& spec, const LatticePoint& p);
LatticePoint lattice_point(const LatticeSpec& spec, std::size_t index);
FourVector position(const LatticeSpec& spec, const LatticePoint& p);

/// xi = y - x. Spatial components are reduced to the symmetric range
/// (-n_s eps / 2, n_s eps / 2]; the time component is the plain difference
/// because mass-shell frequencies are not periodic in n_t.
FourVector separation(const LatticeSpec& spec, std::size_t from, std::size_t to);

/// Identifies a plane-wave mode: spatial momentum label and spin index 1 or 2.
struct ModeLabel {
  std::array<int, 3> momentum{};
  int spin = 1;
  bool operator==(const ModeLabel&) const = default;
};

/// Parses "a1,a2,a3,s".
ModeLabel parse_mode_label(const std::string& text);
std::string format_mode_label(const ModeLabel& label);

struct Mode {
  ModeLabel label;
  FourVector k{};  // on the mass shell; k^0 < 0 for sea modes
  Spinor amplitude = Spinor::Zero();  // unit Euclidean norm, (k-slash - m) u = 0
  bool positive_energy = false;
};

struct ModeTable {
  std::vector<Mode> modes;
  std::vector<std::size_t> occupied;  // indices into `modes`, in Hilbert-basis order
};

/// Plane-wave spinor amplitude on the given energy branch.
/// Throws MassShellFailure if the construction is singular or fails the
/// momentum-space Dirac equation check.
Mode make_mode(const LatticeSpec& spec, const ModeLabel& label, bool positive_energy);

/// All 2 n_s^3 negative-energy modes, every one occupied.
ModeTable build_sea_modes(const LatticeSpec& spec);

/// Normalization 1 / sqrt(2 pi eps^3 n_s^3) that gives unit Hilbert norm.
double plane_wave_normalization(const LatticeSpec& spec);

/// Value of the normalized plane-wave solution at a lattice point.
Spinor mode_value(const LatticeSpec& spec, const Mode& mode, const LatticePoint& p);

/// A spinor field sampled at every lattice point (point_index order).
struct LatticeField {
  LatticeSpec spec;
  std::vector<Spinor> values;
};

LatticeField sample_mode(const LatticeSpec& spec, const Mode& mode);

/// 2 pi eps^3 sum_x (psi-bar gamma^0 phi)(t, x) on time slice `t`.
/// Throws SliceMismatch for incompatible lattices or an out-of-range slice.
complex dirac_scalar_product(const LatticeField& psi, const LatticeField& phi, int t);

/// 4 x f matrix whose columns are the occupied wave functions at p.
Eigen::Matrix<complex, 4, Eigen::Dynamic> wave_matrix(const LatticeSpec& spec, const ModeTable& table,
                                                      const LatticePoint& p);

/// F(x) with (F(x))^i_j = -(psi_i-bar psi_j)(x), in factored form with n = 2.
/// A signature violation means a construction bug and is rethrown.
OperatorPoint local_correlation_operator(const Eigen::Matrix<complex, 4, Eigen::Dynamic>& wave);
OperatorPoint local_correlation_operator(const LatticeSpec& spec, const ModeTable& table,
                                         const LatticePoint& p);

struct OccupationEdits {
  std::vector<ModeLabel> added;    // positive-energy states to occupy
  std::vector<ModeLabel> removed;  // sea states to vacate
};

enum class WeightConvention { Counting, Eps4, Custom };

std::string to_string(WeightConvention c);

struct BuildOptions {
  OccupationEdits edits;
  WeightConvention convention = WeightConvention::Counting;
  double custom_weight = 1.0;  // used with WeightConvention::Custom
  int threads = 1;
};

/// Causal fermion system of a (possibly edited) lattice Dirac sea: one atom
/// per lattice point, operators F(x), weights from the counting measure.
class LatticeSeaSystem {
 public:
  LatticeSeaSystem(LatticeSpec spec, ModeTable modes, WeightConvention convention,
                   double counting_weight, DiscreteMeasure measure,
                   std::vector<std::size_t> atom_of_point);

  const LatticeSpec& spec() const noexcept { return spec_; }
  const ModeTable& modes() const noexcept { return modes_; }
  const DiscreteMeasure& measure() const noexcept { return measure_; }
  WeightConvention weight_convention() const noexcept { return convention_; }
  double counting_weight() const noexcept { return counting_weight_; }
  Eigen::Index hilbert_dim() const noexcept { return static_cast<Eigen::Index>(modes_.occupied.size()); }

  std::size_t point_count() const noexcept { return atom_of_point_.size(); }
  std::size_t atom_of_point(std::size_t point) const { return atom_of_point_.at(point); }
  const OperatorPoint& operator_at(std::size_t point) const { return measure_[atom_of_point(point)].point; }

  Eigen::Matrix<complex, 4, Eigen::Dynamic> wave_matrix(std::size_t point) const;

  /// Spinor-space kernel P(x,y) = -sum_l psi_l(x) psi_l-bar(y).
  SpinorMatrix spinor_kernel(std::size_t x, std::size_t y) const;

 private:
  LatticeSpec spec_;
  ModeTable modes_;
  WeightConvention convention_;
  double counting_weight_;
  DiscreteMeasure measure_;
  std::vector<std::size_t> atom_of_point_;
};

/// Builds the mode table with `opts.edits` applied and the push-forward
/// measure. Construction errors are rethrown with lattice coordinates.
LatticeSeaSystem build_system(const LatticeSpec& spec, const BuildOptions& opts = {});

}  // namespace cfs
