#include "nlt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nlt/errors.hpp"
#include "nlt/grid.hpp"
#include "nlt/velocity.hpp"

namespace nlt {

TVSeries tv_series(const Trajectory& traj) {
  TVSeries s;
  for (const auto& snap : traj.snapshots) {
    s.times.push_back(snap.t);
    s.tv_w.push_back(total_variation(snap.w));
    s.tv_u.push_back(total_variation(snap.u));
    s.negative_part.push_back(tv_decomposition(snap.w).negative_part);
  }
  return s;
}

MonotonicityVerdict monotonicity_verdict(const TVSeries& s, double tol) {
  MonotonicityVerdict v;
  v.tol = tol;
  double running_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.tv_w.size(); ++i) {
    running_min = std::min(running_min, s.tv_w[i]);
    const double excess = s.tv_w[i] - running_min;
    if (excess > v.worst_violation) {
      v.worst_violation = excess;
      v.worst_time = s.times[i];
    }
  }
  v.pass = v.worst_violation <= tol;
  return v;
}

double increase_interval(const TVSeries& s, double margin) {
  if (s.tv_w.empty()) return 0.0;
  const double base = s.tv_w.front();
  double t_star = 0.0;
  for (std::size_t i = 1; i < s.tv_w.size(); ++i) {
    if (s.tv_w[i] - base <= margin) break;
    t_star = s.times[i];
  }
  return t_star;
}

double initial_growth_rate(const TVSeries& s, double t_max) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (s.times[i] > t_max * (1.0 + 1e-12)) break;
    st += s.times[i];
    sy += s.tv_w[i];
    stt += s.times[i] * s.times[i];
    sty += s.times[i] * s.tv_w[i];
    ++n;
  }
  if (n < 2) throw FitError("need at least two snapshots to fit a growth rate");
  const double dn = static_cast<double>(n);
  return (dn * sty - st * sy) / (dn * stt - st * st);
}

namespace {

double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return q * q * q;
}

double bump_prime(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return -6.0 * s * q * q;
}

// int b = 32/35 on [-1, 1]; max |b'| is attained at s = 1/sqrt(5).
constexpr double kBumpIntegral = 32.0 / 35.0;
const double kBumpSlope = 6.0 / std::sqrt(5.0) * (16.0 / 25.0);

}  // namespace

double TestFunction::value(double t, double x) const {
  return bump((t - tc) / ht) * bump((x - xc) / hx);
}

double TestFunction::dt(double t, double x) const {
  return bump_prime((t - tc) / ht) / ht * bump((x - xc) / hx);
}

double TestFunction::dx(double t, double x) const {
  return bump((t - tc) / ht) * bump_prime((x - xc) / hx) / hx;
}

double TestFunction::dx_norm() const { return kBumpIntegral * ht * kBumpSlope / hx; }

double entropy_residual(const Trajectory& traj, double c, const TestFunction& phi) {
  if (traj.snapshots.empty()) throw SnapshotError("trajectory has no snapshots");
  const Grid1D& g = traj.grid();
  constexpr double tol = 1e-12;
  if (!(phi.ht > 0.0 && phi.hx > 0.0)) throw SupportError("test function widths must be positive");
  if (phi.tc - phi.ht < std::max(0.0, traj.t_first()) - tol ||
      phi.tc + phi.ht > traj.t_last() + tol || phi.xc - phi.hx < g.x_left - tol ||
      phi.xc + phi.hx > g.x_right() + tol) {
    throw SupportError("test function support leaves the trajectory box");
  }

  const KruzkovPair pair = kruzkov(traj.velocity, c);
  const auto& snaps = traj.snapshots;
  const double h = g.cell_width;
  const auto j_lo = static_cast<std::size_t>(
      std::max(0.0, std::floor((phi.xc - phi.hx - g.x_left) / h)));
  const auto j_hi = std::min(
      g.n_cells, static_cast<std::size_t>(std::ceil((phi.xc + phi.hx - g.x_left) / h)) + 1);

  // Snapshot k stands for the time cell between the midpoints to its
  // neighbours.
  double total = 0.0;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const double t = snaps[k].t;
    if (t <= phi.tc - phi.ht || t >= phi.tc + phi.ht) continue;
    const double lo = k == 0 ? t : 0.5 * (snaps[k - 1].t + t);
    const double hi = k + 1 == snaps.size() ? t : 0.5 * (t + snaps[k + 1].t);
    const double weight = hi - lo;
    const Profile& w = snaps[k].w;
    double row = 0.0;
    for (std::size_t j = j_lo; j < j_hi; ++j) {
      const auto jj = static_cast<std::ptrdiff_t>(j);
      const double x = g.center(jj);
      const double wv = traj.w_anchor == Anchor::kNodes
                            ? 0.5 * (w.extended(jj) + w.extended(jj + 1))
                            : w[j];
      const double u = std::clamp(wv, 0.0, 1.0);
      row += pair.alpha(u) * phi.dt(t, x) + pair.beta(u) * phi.dx(t, x);
    }
    total += weight * row * h;
  }
  return total;
}

std::vector<double> default_c_grid() {
  std::vector<double> cs;
  for (int k = 0; k < 8; ++k) cs.push_back((k + 0.5) / 8.0);
  return cs;
}

std::vector<TestFunction> default_phi_family(const Trajectory& traj, double length_scale) {
  if (traj.snapshots.empty()) throw SnapshotError("trajectory has no snapshots");
  const Grid1D& g = traj.grid();
  const Profile& w = traj.snapshots[traj.snapshots.size() / 2].w;
  const double T = traj.t_last();

  // Cumulative variation of w between consecutive samples.
  std::vector<double> cum(w.size(), 0.0);
  for (std::size_t j = 1; j < w.size(); ++j) cum[j] = cum[j - 1] + std::abs(w[j] - w[j - 1]);
  const double total = cum.back();
  const auto quantile = [&](double q) {
    if (total <= 0.0) return 0.5 * (g.x_left + g.x_right());
    const auto it = std::lower_bound(cum.begin(), cum.end(), q * total);
    return anchor_position(g, it - cum.begin(), traj.w_anchor);
  };
  const double spread = quantile(0.95) - quantile(0.05);
  const double floor = 8.0 * length_scale;
  const double widths[] = {2.0 * length_scale, std::max(floor, 0.25 * spread),
                           std::max(floor, spread)};

  std::vector<TestFunction> family;
  for (double hx : widths) {
    for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double xc = std::clamp(quantile(q), g.x_left + hx, g.x_right() - hx);
      family.push_back({0.5 * T, 0.4 * T, xc, hx});
    }
  }
  return family;
}

EntropyReport dissipation_bound_fit(const Trajectory& traj, const std::vector<double>& c_grid,
                                    const std::vector<TestFunction>& phi_family) {
  EntropyReport r;
  r.epsilon = traj.echo.epsilon;
  r.c_values = c_grid;
  r.test_functions = phi_family;
  for (const auto& snap : traj.snapshots) r.tv_w.push_back(total_variation(snap.w));
  r.sup_tv_w = r.tv_w.empty() ? 0.0 : *std::max_element(r.tv_w.begin(), r.tv_w.end());

  r.min_normalized = std::numeric_limits<double>::infinity();
  for (double c : c_grid) {
    auto& row = r.residuals.emplace_back();
    for (const auto& phi : phi_family) {
      const double d = entropy_residual(traj, c, phi);
      row.push_back(d);
      r.min_normalized = std::min(r.min_normalized, d / phi.dx_norm());
    }
  }
  if (!std::isfinite(r.min_normalized)) r.min_normalized = 0.0;
  const double scale = r.epsilon * r.sup_tv_w;
  r.k_hat = r.min_normalized < 0.0 && scale > 0.0 ? -r.min_normalized / scale : 0.0;
  return r;
}

RateReport rate_fit(std::vector<RatePoint> points) {
  if (points.size() < 4) throw FitError("rate fit needs at least 4 epsilons");
  std::sort(points.begin(), points.end(),
            [](const RatePoint& a, const RatePoint& b) { return a.epsilon > b.epsilon; });
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].epsilon > 0.0)) throw FitError("epsilons must be positive");
    if (!(points[i].error > 0.0) || !std::isfinite(points[i].error)) {
      throw FitError("errors must be positive and finite");
    }
    if (i > 0 && points[i].epsilon == points[i - 1].epsilon) {
      throw FitError("repeated epsilon in rate fit");
    }
  }
  if (points.front().epsilon / points.back().epsilon < 4.0 * (1.0 - 1e-12)) {
    throw FitError("epsilons must span at least two octaves");
  }

  RateReport r;
  std::vector<double> lx, ly;
  for (const auto& p : points) {
    r.epsilons.push_back(p.epsilon);
    r.errors.push_back(p.error);
    lx.push_back(std::log(p.epsilon));
    ly.push_back(std::log(p.error));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (r.intercept + r.slope * lx[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  return r;
}

double rate_constant(double epsilon, double error, double t, double tv0) {
  return error / ((epsilon + std::sqrt(epsilon * t)) * tv0);
}

double l1_error_to(const Profile& p, Anchor anchor, const std::function<double(double)>& ref,
                   int subsamples) {
  const Grid1D& g = p.grid();
  const double h = g.cell_width;
  const double sub = h / subsamples;
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    double cell = 0.0;
    for (int m = 0; m < subsamples; ++m) {
      const double x = g.node(jj) + (m + 0.5) * sub;
      const double v = anchor == Anchor::kNodes ? p.interpolate(x, anchor) : p[j];
      cell += std::abs(v - ref(x));
    }
    total += cell * sub;
  }
  return total;
}

}  // namespace nlt
