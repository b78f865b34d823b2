#include "nlt/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nlt/errors.hpp"

namespace nlt {

namespace {

// Effective radius used to sample and integrate infinite-support densities.
constexpr double kInfiniteSampleRadius = 60.0;
constexpr int kMidpointSubcells = 64;

double midpoint_integral(const std::function<double(double)>& f, double lo, double hi,
                         int n) {
  if (hi <= lo) return 0.0;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(lo + (i + 0.5) * h);
  return s * h;
}

double linear_at(const std::vector<std::pair<double, double>>& nodes, double x) {
  if (nodes.empty() || x < nodes.front().first || x > nodes.back().first) return 0.0;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x,
                             [](double v, const auto& n) { return v < n.first; });
  if (it == nodes.end()) return nodes.back().second;
  if (it == nodes.begin()) return nodes.front().second;
  const auto& [x1, y1] = *it;
  const auto& [x0, y0] = *(it - 1);
  if (x1 == x0) return y1;
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

// Exact integral of the linear interpolant over [lo, hi].
double linear_integral(const std::vector<std::pair<double, double>>& nodes, double lo,
                       double hi) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = std::max(lo, nodes[i].first);
    const double b = std::min(hi, nodes[i + 1].first);
    if (b <= a) continue;
    s += 0.5 * (b - a) * (linear_at(nodes, a) + linear_at(nodes, b));
  }
  return s;
}

void check_nodes(const std::vector<std::pair<double, double>>& nodes) {
  if (nodes.size() < 2) throw InvalidKernel("piecewise-linear kernel needs two nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i].first) || !std::isfinite(nodes[i].second)) {
      throw InvalidKernel("kernel table contains a non-finite entry");
    }
    if (i > 0 && !(nodes[i].first > nodes[i - 1].first)) {
      throw InvalidKernel("kernel table abscissae must be strictly increasing");
    }
  }
}

}  // namespace

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::kExponential: return "exponential";
    case KernelFamily::kUniform: return "uniform";
    case KernelFamily::kPiecewiseLinear: return "piecewise_linear";
    case KernelFamily::kCustom: return "custom";
  }
  return "custom";
}

KernelSpec KernelSpec::exponential() {
  KernelSpec k;
  k.family_ = KernelFamily::kExponential;
  k.name_ = "exponential";
  k.density_ = [](double x) { return x <= 0.0 ? std::exp(x) : 0.0; };
  k.is_convex_ = true;
  k.left_limit_at_zero_ = 1.0;
  return k;
}

KernelSpec KernelSpec::uniform() {
  KernelSpec k;
  k.family_ = KernelFamily::kUniform;
  k.name_ = "uniform";
  k.density_ = [](double x) { return (x > -1.0 && x < 0.0) ? 1.0 : 0.0; };
  k.support_radius_ = 1.0;
  k.is_convex_ = false;
  k.left_limit_at_zero_ = 1.0;
  return k;
}

KernelSpec KernelSpec::piecewise_linear(std::vector<std::pair<double, double>> nodes,
                                        bool is_convex) {
  check_nodes(nodes);
  KernelSpec k;
  k.family_ = KernelFamily::kPiecewiseLinear;
  k.name_ = "piecewise_linear";
  k.nodes_ = std::move(nodes);
  k.density_ = [n = k.nodes_](double x) { return linear_at(n, x); };
  k.support_radius_ = std::max(0.0, -k.nodes_.front().first);
  k.is_convex_ = is_convex;
  k.left_limit_at_zero_ = k.nodes_.back().first >= 0.0 ? linear_at(k.nodes_, 0.0) : 0.0;
  return k;
}

KernelSpec KernelSpec::triangle() {
  KernelSpec k = piecewise_linear({{-1.0, 0.0}, {0.0, 2.0}}, true);
  k.name_ = "triangle";
  return k;
}

KernelSpec KernelSpec::from_table(std::string name,
                                  std::vector<std::pair<double, double>> samples,
                                  bool is_convex) {
  KernelSpec k = piecewise_linear(std::move(samples), is_convex);
  k.family_ = KernelFamily::kCustom;
  k.name_ = std::move(name);
  return k;
}

KernelSpec KernelSpec::custom(std::string name, std::function<double(double)> density,
                              std::optional<double> support_radius, bool is_convex,
                              double left_limit_at_zero) {
  if (!density) throw InvalidKernel("custom kernel without a density");
  KernelSpec k;
  k.family_ = KernelFamily::kCustom;
  k.name_ = std::move(name);
  k.density_ = std::move(density);
  k.support_radius_ = support_radius;
  k.is_convex_ = is_convex;
  k.left_limit_at_zero_ = left_limit_at_zero;
  return k;
}

bool KernelSpec::has_closed_form_mass() const {
  return family_ == KernelFamily::kExponential || family_ == KernelFamily::kUniform ||
         !nodes_.empty();
}

double KernelSpec::mass_between(double a, double b) const {
  if (b <= a) return 0.0;
  switch (family_) {
    case KernelFamily::kExponential:
      return std::exp(-a) - (std::isinf(b) ? 0.0 : std::exp(-b));
    case KernelFamily::kUniform:
      return std::max(0.0, std::min(b, 1.0) - std::min(a, 1.0));
    default:
      break;
  }
  if (!nodes_.empty()) return linear_integral(nodes_, -b, -a);
  const double radius = support_radius_.value_or(kInfiniteSampleRadius);
  const double hi = std::min(b, radius);
  if (hi <= a) return 0.0;
  const int n = std::max(kMidpointSubcells,
                         static_cast<int>(std::ceil((hi - a) * 4096.0)));
  return midpoint_integral(density_, -hi, -a, n);
}

double KernelSpec::total_mass() const {
  return mass_between(0.0, std::numeric_limits<double>::infinity());
}

double KernelSpec::first_moment() const {
  switch (family_) {
    case KernelFamily::kExponential: return 1.0;
    case KernelFamily::kUniform: return 0.5;
    default: break;
  }
  const double radius = support_radius_.value_or(kInfiniteSampleRadius);
  return midpoint_integral([this](double x) { return std::abs(x) * density_(x); },
                           -radius, 0.0, 200000);
}

const ConditionCheck& ValidationReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no kernel condition named " + name);
}

bool ValidationReport::admissible() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ConditionCheck& c) { return c.name == "convex" || c.pass; });
}

ValidationReport validate_kernel(const KernelSpec& spec) {
  constexpr int kNeg = 2000;
  constexpr int kPos = 200;
  constexpr double kTol = 1e-12;
  const double radius = spec.support_radius().value_or(kInfiniteSampleRadius);

  const auto eval = [&](double x) {
    double v = 0.0;
    try {
      v = spec.density(x);
    } catch (const std::exception& e) {
      throw InvalidKernel(std::string("density not evaluable: ") + e.what());
    }
    if (!std::isfinite(v)) {
      throw InvalidKernel("density not evaluable at xi = " + std::to_string(x));
    }
    return v;
  };

  // Ascending lattice on ]-1.25 R, 0[; the point 0 itself is never sampled so
  // that open-interval kernels are judged by their left limit.
  std::vector<double> xs(kNeg), ys(kNeg);
  for (int i = 0; i < kNeg; ++i) {
    xs[i] = -1.25 * radius * (kNeg - i - 0.5) / kNeg;
    ys[i] = eval(xs[i]);
  }

  ValidationReport rep;
  rep.declared_convex = spec.is_convex();

  ConditionCheck bounded{"integrable_bounded"};
  {
    auto it = std::max_element(ys.begin(), ys.end());
    bounded.worst_point = xs[static_cast<std::size_t>(it - ys.begin())];
    const double mass = spec.total_mass();
    bounded.pass = std::isfinite(*it) && std::isfinite(mass);
    bounded.worst_value = bounded.pass ? 0.0 : std::numeric_limits<double>::infinity();
  }

  ConditionCheck support{"support_nonpositive"};
  for (int i = 0; i < kPos; ++i) {
    const double x = 0.25 * radius * (i + 0.5) / kPos;
    const double v = std::abs(eval(x));
    if (v > support.worst_value) {
      support.worst_value = v;
      support.worst_point = x;
    }
  }
  support.pass = support.worst_value == 0.0;

  ConditionCheck nonneg{"nonnegative"};
  for (int i = 0; i < kNeg; ++i) {
    if (-ys[i] > nonneg.worst_value) {
      nonneg.worst_value = -ys[i];
      nonneg.worst_point = xs[i];
    }
  }
  nonneg.pass = nonneg.worst_value == 0.0;

  ConditionCheck monotone{"nondecreasing"};
  for (int i = 0; i + 1 < kNeg; ++i) {
    const double drop = ys[i] - ys[i + 1];
    if (drop > monotone.worst_value) {
      monotone.worst_value = drop;
      monotone.worst_point = xs[i + 1];
    }
  }
  monotone.pass = monotone.worst_value <= kTol;

  ConditionCheck unit{"unit_mass"};
  unit.worst_value = std::abs(spec.total_mass() - 1.0);
  unit.pass = unit.worst_value <= kTol;

  ConditionCheck convex{"convex"};
  for (int s = 1; s < kNeg / 2; ++s) {
    for (int i = s; i + s < kNeg; ++i) {
      const double excess = ys[i] - 0.5 * (ys[i - s] + ys[i + s]);
      if (excess > convex.worst_value) {
        convex.worst_value = excess;
        convex.worst_point = xs[i];
      }
    }
  }
  convex.pass = convex.worst_value <= kTol * std::max(1.0, spec.left_limit_at_zero());
  rep.measured_convex = convex.pass;

  rep.checks = {bounded, support, nonneg, monotone, unit, convex};
  return rep;
}

DiscreteKernel::DiscreteKernel(double epsilon, double cell_width,
                               std::vector<double> weights, double truncation_mass,
                               double left_limit_at_zero)
    : epsilon_(epsilon),
      cell_width_(cell_width),
      weights_(std::move(weights)),
      truncation_mass_(truncation_mass),
      left_limit_at_zero_(left_limit_at_zero) {
  if (weights_.empty()) throw InvalidKernel("discrete kernel without weights");
  tail_.assign(weights_.size() + 1, 0.0);
  for (std::size_t k = weights_.size(); k-- > 0;) tail_[k] = tail_[k + 1] + weights_[k];
}

DiscreteKernel discretize(const KernelSpec& spec, double epsilon, double cell_width,
                          double tail_tol, int min_cells_per_eps) {
  if (!(epsilon > 0.0) || !(cell_width > 0.0)) {
    throw ResolutionError("epsilon and cell width must be positive");
  }
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ConfigError("tail_tol must lie in (0, 1)");
  if (epsilon < min_cells_per_eps * cell_width * (1.0 - 1e-12)) {
    throw ResolutionError("epsilon = " + std::to_string(epsilon) + " spans fewer than " +
                          std::to_string(min_cells_per_eps) + " cells of width " +
                          std::to_string(cell_width));
  }
  const double h = cell_width / epsilon;  // cell width in kernel units
  const double total = spec.total_mass();

  std::vector<double> w;
  double tail = total;
  if (const auto radius = spec.support_radius()) {
    const auto m = static_cast<std::size_t>(std::ceil(*radius / h - 1e-9));
    if (m > kMaxKernelCells) throw TruncationError("kernel support exceeds the cell cap");
    w.resize(std::max<std::size_t>(m, 1));
    for (std::size_t k = 0; k < w.size(); ++k) {
      w[k] = spec.mass_between(static_cast<double>(k) * h, static_cast<double>(k + 1) * h);
    }
    tail = 0.0;
  } else {
    // quadrature stops at the sampling radius R; R * eta(-R) estimates what lies beyond
    if (!spec.has_closed_form_mass() &&
        kInfiniteSampleRadius * spec.density(-kInfiniteSampleRadius) > tail_tol) {
      throw TruncationError("kernel tail beyond the sampling radius exceeds tail_tol");
    }
    double acc = 0.0;
    while (true) {
      if (w.size() >= kMaxKernelCells) {
        throw TruncationError("kernel tail mass did not fall below tail_tol within the cap");
      }
      const auto k = static_cast<double>(w.size());
      w.push_back(spec.mass_between(k * h, (k + 1.0) * h));
      acc += w.back();
      tail = spec.has_closed_form_mass() && spec.family() == KernelFamily::kExponential
                 ? std::exp(-(k + 1.0) * h)
                 : total - acc;
      if (tail <= tail_tol) break;
    }
  }
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(sum > 0.0)) throw InvalidKernel("kernel has no mass on the grid");
  for (double& x : w) x /= sum;
  return DiscreteKernel(epsilon, cell_width, std::move(w), std::max(0.0, tail),
                        spec.left_limit_at_zero());
}

std::vector<double> convolve_nodes(const Profile& u, const DiscreteKernel& dk,
                                   std::size_t count) {
  const Grid1D& g = u.grid();
  if (std::abs(g.cell_width - dk.cell_width()) > 1e-12 * g.cell_width) {
    throw GridError("convolve: kernel was discretized for a different cell width");
  }
  const auto vals = u.values();
  const std::size_t n = vals.size();
  const std::size_t m = dk.size();
  const double* gamma = dk.weights().data();
  const double br = g.boundary_right;

  // w is a convex combination, keep rounding from leaving the hull
  const auto [lo_it, hi_it] = std::minmax_element(vals.begin(), vals.end());
  const double lo = n > 0 ? std::min(*lo_it, br) : br;
  const double hi = n > 0 ? std::max(*hi_it, br) : br;

  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t inside = j < n ? std::min(m, n - j) : 0;
    const double* uj = vals.data() + std::min(j, n);
    // Four independent partial sums; the order is fixed, so results are
    // reproducible bit for bit.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t k = 0;
    for (; k + 4 <= inside; k += 4) {
      s0 += gamma[k] * uj[k];
      s1 += gamma[k + 1] * uj[k + 1];
      s2 += gamma[k + 2] * uj[k + 2];
      s3 += gamma[k + 3] * uj[k + 3];
    }
    for (; k < inside; ++k) s0 += gamma[k] * uj[k];
    out[j] = std::clamp(((s0 + s1) + (s2 + s3)) + br * dk.tail_sum(inside), lo, hi);
  }
  return out;
}

Profile convolve(const Profile& u, const DiscreteKernel& dk) {
  return Profile(u.grid(), convolve_nodes(u, dk, u.size()));
}

Profile uniform_dx_w(const Profile& u, double epsilon) {
  const Grid1D& g = u.grid();
  const double ratio = epsilon / g.cell_width;
  const auto m = static_cast<std::ptrdiff_t>(std::llround(ratio));
  if (m < 1 || std::abs(static_cast<double>(m) - ratio) > 1e-9 * ratio) {
    throw GridError("uniform_dx_w: epsilon must be an integer multiple of the cell width");
  }
  std::vector<double> d(g.n_cells);
  for (std::size_t j = 0; j < g.n_cells; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    d[j] = (u.extended(jj + m) - u.extended(jj)) / epsilon;
  }
  Grid1D dg = g;
  dg.boundary_left = 0.0;
  dg.boundary_right = 0.0;
  return Profile(dg, std::move(d));
}

}  // namespace nlt
