#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlt/grid.hpp"

namespace nlt {

enum class KernelFamily { kExponential, kUniform, kPiecewiseLinear, kCustom };

std::string to_string(KernelFamily f);

/// Look-ahead convolution kernel: a density on the negative half-line that
/// weighs downstream traffic. Immutable once built.
class KernelSpec {
 public:
  /// eta(x) = e^x on ]-inf, 0].
  static KernelSpec exponential();
  /// eta = indicator of ]-1, 0[.
  static KernelSpec uniform();
  /// Linear interpolation of (xi, eta) nodes, zero outside [xi_first, xi_last].
  /// Nodes must be sorted by xi.
  static KernelSpec piecewise_linear(std::vector<std::pair<double, double>> nodes,
                                     bool is_convex);
  /// Convex triangle eta(x) = 2(1 + x) on [-1, 0].
  static KernelSpec triangle();
  /// Sampled (xi, eta) table, linearly interpolated.
  static KernelSpec from_table(std::string name,
                               std::vector<std::pair<double, double>> samples,
                               bool is_convex);
  /// Arbitrary density. `support_radius` of nullopt means infinite support.
  static KernelSpec custom(std::string name, std::function<double(double)> density,
                           std::optional<double> support_radius, bool is_convex,
                           double left_limit_at_zero);

  KernelFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  std::optional<double> support_radius() const { return support_radius_; }
  bool is_convex() const { return is_convex_; }
  /// eta(0^-), stored rather than inferred from samples.
  double left_limit_at_zero() const { return left_limit_at_zero_; }
  const std::vector<std::pair<double, double>>& nodes() const { return nodes_; }

  double density(double xi) const { return density_(xi); }

  /// Mass of eta on ]-b, -a[ for 0 <= a <= b (b may be infinite).
  double mass_between(double a, double b) const;
  double total_mass() const;
  /// Integral of |xi| eta(xi).
  double first_moment() const;
  /// True when mass_between uses exact antiderivatives.
  bool has_closed_form_mass() const;

 private:
  KernelSpec() = default;

  KernelFamily family_ = KernelFamily::kCustom;
  std::string name_;
  std::function<double(double)> density_;
  std::optional<double> support_radius_;
  bool is_convex_ = false;
  double left_limit_at_zero_ = 0.0;
  std::vector<std::pair<double, double>> nodes_;  // piecewise-linear families
};

struct ConditionCheck {
  std::string name;
  bool pass = true;
  double worst_point = 0.0;  // sample location of the largest violation
  double worst_value = 0.0;  // size of that violation (0 when passing)
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;  // five admissibility conditions + convexity
  bool measured_convex = false;
  bool declared_convex = false;

  const ConditionCheck& check(const std::string& name) const;
  /// All conditions except convexity hold.
  bool admissible() const;
};

/// Samples the density on a lattice covering its support and checks
/// integrability/boundedness, support in ]-inf, 0], nonnegativity,
/// monotonicity on ]-inf, 0], unit mass and midpoint convexity.
/// Throws InvalidKernel if the density cannot be evaluated.
ValidationReport validate_kernel(const KernelSpec& spec);

/// Cell weights of eta_eps for look-ahead averaging on a uniform grid:
/// gamma_k is the mass of eta_eps over the k-th cell to the right of the
/// evaluation point. Weights are renormalized to unit sum.
class DiscreteKernel {
 public:
  DiscreteKernel(double epsilon, double cell_width, std::vector<double> weights,
                 double truncation_mass, double left_limit_at_zero);

  double epsilon() const { return epsilon_; }
  double cell_width() const { return cell_width_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double truncation_mass() const { return truncation_mass_; }
  double left_limit_at_zero() const { return left_limit_at_zero_; }
  /// Sum of weights from index k onward (0 past the end).
  double tail_sum(std::size_t k) const { return k < tail_.size() ? tail_[k] : 0.0; }
  /// Length of the look-ahead window.
  double support_length() const { return static_cast<double>(size()) * cell_width_; }

 private:
  double epsilon_;
  double cell_width_;
  std::vector<double> weights_;
  std::vector<double> tail_;
  double truncation_mass_;
  double left_limit_at_zero_;
};

inline constexpr int kDefaultMinCellsPerEps = 8;
inline constexpr double kDefaultTailTol = 1e-10;
inline constexpr std::size_t kMaxKernelCells = 1000000;

DiscreteKernel discretize(const KernelSpec& spec, double epsilon, double cell_width,
                          double tail_tol = kDefaultTailTol,
                          int min_cells_per_eps = kDefaultMinCellsPerEps);

/// Look-ahead average w at the first `count` grid nodes x_0, x_1, ...:
/// w(x_j) = sum_k gamma_k u_{j+k}, with u extended by its right boundary state.
std::vector<double> convolve_nodes(const Profile& u, const DiscreteKernel& dk,
                                   std::size_t count);

/// w = u * eta_eps sampled at the left edge of every cell (Anchor::kNodes).
/// The boundary states of the result are those of u.
Profile convolve(const Profile& u, const DiscreteKernel& dk);

/// Exact derivative of the uniform-kernel average on each cell,
/// (u(x + eps) - u(x)) / eps. Requires eps to be a multiple of the cell width.
Profile uniform_dx_w(const Profile& u, double epsilon);

}  // namespace nlt
