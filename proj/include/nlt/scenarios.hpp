#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlt/grid.hpp"

namespace nlt {

/// Two rectangles of height h on ]-7l, -6l[ and ]-3l, -2l[.
struct BuildingBlock {
  double h;
  double ell;

  /// Throws ScaleError unless 0 < h <= 1 and 0 < ell < 1.
  void validate() const;
  /// True when h = 1, the closed end of the admissible range.
  bool boundary_height() const { return h == 1.0; }
  PiecewiseConstant function() const;
};

PiecewiseConstant building_block(double h, double ell);

/// Unit step 1 on ]x0, +inf[.
PiecewiseConstant unit_step(double x0 = 0.0);

struct CounterexampleSpec {
  std::vector<double> eps_seq;  // eps_1 > eps_2 > ...
  std::vector<double> h_seq;
  std::size_t n_blocks = 1;

  /// eps_{n+1} <= eps_n / 16, 0 <= h_n <= 1, enough entries for n_blocks.
  void validate() const;
  double ell(std::size_t n) const { return eps_seq.at(n - 1) / 4.0; }  // 1-based
};

/// eps_n = 16^{1-n} eps_1, h_n = 2^{-n}.
CounterexampleSpec default_counterexample(double eps1, std::size_t n_blocks);

/// Sum of the retained blocks plus the unit step, as an exact function.
PiecewiseConstant counterexample_function(const CounterexampleSpec& spec);

/// Cell averages of the counter-example datum on a grid with the geometry of
/// `grid` and boundary states 0 (left) and 1 (right). Throws ResolutionError
/// naming every block with dx > ell_n / 16 and GridError if the grid does
/// not cover [-8 ell_1, 0].
Profile counterexample_datum(const CounterexampleSpec& spec, const Grid1D& grid);

/// 4 sum_n h_n + 1.
double counterexample_tv(const CounterexampleSpec& spec);

enum class DatumKind { kRiemann, kMonotoneRamp, kRandomBV };

struct DatumSpec {
  DatumKind kind = DatumKind::kRiemann;
  double u_left = 0.0;
  double u_right = 1.0;
  double x0 = 0.0;              // Riemann jump / ramp start
  double x1 = 1.0;              // ramp end
  std::uint64_t seed = 0;       // RandomBV
  std::size_t n_jumps = 10;     // RandomBV
  double support_left = -1.0;   // RandomBV jump window
  double support_right = 1.0;
};

struct Datum {
  Profile u0;
  double tv;  // exact total variation of u0
  std::string description;
};

/// Riemann step at x0; linear ramp u_left -> u_right on [x0, x1] (cell
/// averages, so monotone with TV |u_right - u_left|); random piecewise
/// constant with n_jumps jumps drawn in the support window, cell-averaged.
Datum standard_datum(const DatumSpec& spec, const Grid1D& grid);

/// Block plus unit step plus an optional perturbation s supported in
/// ]-delta, 0[ with values in [0, 1]. Throws ScaleError unless
/// ell > max(eps + delta, 2 eps).
Profile persistence_datum(double h, double ell, double eps, double delta, const Grid1D& grid,
                      const std::optional<PiecewiseConstant>& s = std::nullopt);

}  // namespace nlt
