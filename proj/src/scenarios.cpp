#include "nlt/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nlt/errors.hpp"

namespace nlt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform double in [0, 1) from the top 53 bits; the standard distributions
// are not bit-reproducible across library implementations.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Grid1D with_boundaries(Grid1D g, double left, double right) {
  g.boundary_left = left;
  g.boundary_right = right;
  return g;
}

}  // namespace

void BuildingBlock::validate() const {
  if (!(h > 0.0 && h <= 1.0)) throw ScaleError("block height must lie in ]0, 1]");
  if (!(ell > 0.0 && ell < 1.0)) throw ScaleError("block length must lie in ]0, 1[");
}

PiecewiseConstant BuildingBlock::function() const { return building_block(h, ell); }

PiecewiseConstant building_block(double h, double ell) {
  return {{{-7.0 * ell, -6.0 * ell, h}, {-3.0 * ell, -2.0 * ell, h}}};
}

PiecewiseConstant unit_step(double x0) { return {{{x0, kInf, 1.0}}}; }

void CounterexampleSpec::validate() const {
  if (n_blocks == 0) throw ConfigError("counter-example needs at least one block");
  if (eps_seq.size() < n_blocks || h_seq.size() < n_blocks) {
    throw ConfigError("eps_seq and h_seq must have at least n_blocks entries");
  }
  for (std::size_t i = 0; i < eps_seq.size(); ++i) {
    if (!(eps_seq[i] > 0.0)) throw ScaleError("epsilons must be positive");
    if (i > 0 && eps_seq[i] > eps_seq[i - 1] / 16.0 * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "eps_" << i + 1 << " = " << eps_seq[i] << " exceeds eps_" << i << " / 16";
      throw ScaleError(os.str());
    }
  }
  double sum = 0.0;
  for (double h : h_seq) {
    if (!(h >= 0.0 && h <= 1.0)) throw ScaleError("heights must lie in [0, 1]");
    sum += h;
  }
  if (!std::isfinite(sum)) throw ScaleError("heights must be summable");
}

CounterexampleSpec default_counterexample(double eps1, std::size_t n_blocks) {
  CounterexampleSpec spec;
  spec.n_blocks = n_blocks;
  for (std::size_t n = 1; n <= n_blocks; ++n) {
    spec.eps_seq.push_back(eps1 * std::pow(16.0, 1.0 - static_cast<double>(n)));
    spec.h_seq.push_back(std::pow(2.0, -static_cast<double>(n)));
  }
  return spec;
}

PiecewiseConstant counterexample_function(const CounterexampleSpec& spec) {
  spec.validate();
  PiecewiseConstant f = unit_step();
  for (std::size_t n = 1; n <= spec.n_blocks; ++n) {
    f.add(building_block(spec.h_seq[n - 1], spec.ell(n)));
  }
  return f;
}

Profile counterexample_datum(const CounterexampleSpec& spec, const Grid1D& grid) {
  spec.validate();
  grid.validate();
  std::vector<std::size_t> bad;
  for (std::size_t n = 1; n <= spec.n_blocks; ++n) {
    if (grid.cell_width > spec.ell(n) / 16.0 * (1.0 + 1e-12)) bad.push_back(n);
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "grid does not resolve block(s)";
    for (auto n : bad) os << ' ' << n;
    os << " (need dx <= ell_n / 16)";
    throw ResolutionError(os.str());
  }
  if (grid.x_left > -8.0 * spec.ell(1) || grid.x_right() <= 0.0) {
    throw GridError("grid must cover [-8 ell_1, 0]");
  }
  return sample_cell_averages(with_boundaries(grid, 0.0, 1.0), counterexample_function(spec));
}

double counterexample_tv(const CounterexampleSpec& spec) {
  double s = 0.0;
  for (std::size_t n = 0; n < spec.n_blocks; ++n) s += spec.h_seq[n];
  return 4.0 * s + 1.0;
}

Datum standard_datum(const DatumSpec& spec, const Grid1D& grid) {
  grid.validate();
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  switch (spec.kind) {
    case DatumKind::kRiemann: {
      if (!in_unit(spec.u_left) || !in_unit(spec.u_right)) {
        throw DomainError("Riemann states must lie in [0, 1]");
      }
      PiecewiseConstant f{{{-kInf, spec.x0, spec.u_left}, {spec.x0, kInf, spec.u_right}}};
      Profile u = sample_cell_averages(with_boundaries(grid, spec.u_left, spec.u_right), f);
      std::ostringstream os;
      os << "riemann(" << spec.u_left << ", " << spec.u_right << ") at " << spec.x0;
      return {u, total_variation(u), os.str()};
    }
    case DatumKind::kMonotoneRamp: {
      if (!in_unit(spec.u_left) || !in_unit(spec.u_right)) {
        throw DomainError("ramp states must lie in [0, 1]");
      }
      if (!(spec.x1 > spec.x0)) throw ConfigError("ramp needs x1 > x0");
      const Grid1D g = with_boundaries(grid, spec.u_left, spec.u_right);
      // Exact cell averages of the continuous ramp.
      const auto F = [&](double x) {
        // antiderivative of the ramp, relative to x0
        const double slope = (spec.u_right - spec.u_left) / (spec.x1 - spec.x0);
        if (x <= spec.x0) return spec.u_left * (x - spec.x0);
        if (x <= spec.x1) {
          const double d = x - spec.x0;
          return spec.u_left * d + 0.5 * slope * d * d;
        }
        const double len = spec.x1 - spec.x0;
        return 0.5 * (spec.u_left + spec.u_right) * len + spec.u_right * (x - spec.x1);
      };
      std::vector<double> v(g.n_cells);
      for (std::size_t j = 0; j < g.n_cells; ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        const double a = g.node(jj), b = g.node(jj + 1);
        if (b <= spec.x0) { v[j] = spec.u_left; continue; }
        if (a >= spec.x1) { v[j] = spec.u_right; continue; }
        v[j] = std::clamp((F(b) - F(a)) / (b - a),
                          std::min(spec.u_left, spec.u_right),
                          std::max(spec.u_left, spec.u_right));
      }
      Profile u(g, std::move(v));
      return {u, total_variation(u), "monotone_ramp"};
    }
    case DatumKind::kRandomBV: {
      if (!(spec.support_right > spec.support_left)) {
        throw ConfigError("random datum needs a non-empty support window");
      }
      // The datum is a function of (seed, n_jumps, window) only, so refined
      // grids see the same initial state.
      std::mt19937_64 rng(spec.seed);
      const double width = spec.support_right - spec.support_left;
      std::vector<double> jumps(spec.n_jumps);
      for (auto& x : jumps) x = spec.support_left + width * unit_draw(rng);
      std::sort(jumps.begin(), jumps.end());
      std::vector<double> levels(spec.n_jumps + 1);
      for (auto& l : levels) l = unit_draw(rng);
      PiecewiseConstant f;
      double a = -kInf;
      for (std::size_t i = 0; i <= spec.n_jumps; ++i) {
        const double b = i < spec.n_jumps ? jumps[i] : kInf;
        if (b > a) f.pieces.push_back({a, b, levels[i]});
        a = b;
      }
      Profile u = sample_cell_averages(with_boundaries(grid, levels.front(), levels.back()), f);
      std::ostringstream os;
      os << "random_bv(seed=" << spec.seed << ", jumps=" << spec.n_jumps << ")";
      return {u, total_variation(u), os.str()};
    }
  }
  throw ConfigError("unknown datum kind");
}

Profile persistence_datum(double h, double ell, double eps, double delta, const Grid1D& grid,
                      const std::optional<PiecewiseConstant>& s) {
  if (!(ell > std::max(eps + delta, 2.0 * eps))) {
    throw ScaleError("need ell > max(eps + delta, 2 eps)");
  }
  if (!(delta >= 0.0 && delta < 2.0 * ell)) throw ScaleError("need 0 <= delta < 2 ell");
  BuildingBlock{h, ell}.validate();
  PiecewiseConstant f = building_block(h, ell);
  f.add(unit_step());
  if (s) {
    for (const auto& p : s->pieces) {
      if (p.a < -delta - 1e-15 || p.b > 1e-15 || p.value < 0.0 || p.value > 1.0) {
        throw ScaleError("perturbation must take values in [0, 1] on ]-delta, 0[");
      }
    }
    f.add(*s);
  }
  return sample_cell_averages(with_boundaries(grid, 0.0, 1.0), f);
}

}  // namespace nlt
