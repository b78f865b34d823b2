#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nlt/trajectory.hpp"

namespace nlt {

struct TVSeries {
  std::vector<double> times;
  std::vector<double> tv_w;
  std::vector<double> tv_u;
  std::vector<double> negative_part;  // of w
};

TVSeries tv_series(const Trajectory& traj);

struct MonotonicityVerdict {
  bool pass = true;
  double tol = 0.0;
  double worst_violation = 0.0;  // max_t tv_w(t) - min_{s<=t} tv_w(s)
  double worst_time = 0.0;
};

MonotonicityVerdict monotonicity_verdict(const TVSeries& s, double tol);

/// Largest time t* such that tv_w exceeds tv_w(0) by more than `margin` at
/// every snapshot in ]0, t*]; 0 when the first later snapshot does not.
double increase_interval(const TVSeries& s, double margin = 0.0);

/// Least-squares slope of tv_w against t over snapshots with t <= t_max.
double initial_growth_rate(const TVSeries& s, double t_max);

/// phi(t, x) = b((t - tc)/ht) b((x - xc)/hx), b(s) = (1 - s^2)^3 on [-1, 1].
struct TestFunction {
  double tc, ht, xc, hx;

  double value(double t, double x) const;
  double dt(double t, double x) const;
  double dx(double t, double x) const;
  /// int_t sup_x |d_x phi| dt.
  double dx_norm() const;
};

/// Space-time quadrature of
///   D_c(phi) = iint alpha_c(w) d_t phi + beta_c(w) d_x phi
/// over the trajectory. Throws SupportError unless supp phi lies inside the
/// trajectory's space-time box with phi(0, .) = 0.
double entropy_residual(const Trajectory& traj, double c, const TestFunction& phi);

struct EntropyReport {
  double epsilon = 0.0;
  std::vector<double> c_values;
  std::vector<TestFunction> test_functions;
  std::vector<std::vector<double>> residuals;  // [c][phi]
  std::vector<double> tv_w;                    // per snapshot
  double sup_tv_w = 0.0;
  double min_normalized = 0.0;  // min over (c, phi) of D / ||d_x phi||
  double k_hat = 0.0;           // |min_normalized| / (epsilon sup_t TV w), 0 if nonnegative
};

std::vector<double> default_c_grid();

/// 3 widths x 5 centres, all read off w at the middle snapshot. Centres are
/// the 10/30/50/70/90 % quantiles of its variation. Half-widths are
/// 2 * length_scale and max(8 * length_scale, k * spread) for k = 1/4, 1,
/// where spread is the distance between the 5 % and 95 % quantiles. The time
/// bump covers [0.1, 0.9] of the run.
std::vector<TestFunction> default_phi_family(const Trajectory& traj, double length_scale);

EntropyReport dissipation_bound_fit(const Trajectory& traj, const std::vector<double>& c_grid,
                                    const std::vector<TestFunction>& phi_family);

struct RatePoint {
  double epsilon;
  double error;
};

struct RateReport {
  std::vector<double> epsilons;  // strictly decreasing
  std::vector<double> errors;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual of the log-log fit
};

/// Throws FitError with fewer than 4 points, less than two octaves of range,
/// repeated epsilons or non-positive errors.
RateReport rate_fit(std::vector<RatePoint> points);

/// error / ((eps + sqrt(eps t)) tv0).
double rate_constant(double epsilon, double error, double t, double tv0);

/// int |p(x) - ref(x)| dx over the grid with `subsamples` midpoint points
/// per cell. Node-anchored profiles are linear between samples,
/// centre-anchored ones are cell-constant.
double l1_error_to(const Profile& p, Anchor anchor, const std::function<double(double)>& ref,
                   int subsamples = 8);

}  // namespace nlt
