#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace nlt {

enum class VelocityFamily { kGreenshields, kCustom };

/// Speed law V on [0, 1] together with the derived flux f(u) = u V(u).
class VelocityModel {
 public:
  /// V(w) = 1 - w.
  static VelocityModel greenshields();
  /// Monotone table of (w, V) pairs covering [0, 1], linearly interpolated.
  static VelocityModel from_table(std::vector<std::pair<double, double>> samples);
  /// Arbitrary law with its a.e. derivative.
  static VelocityModel custom(std::string name, std::function<double(double)> v,
                              std::function<double(double)> v_prime);

  VelocityFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  const std::vector<std::pair<double, double>>& table() const { return table_; }

  double V(double w) const { return v_(w); }
  double V_prime(double w) const { return vp_(w); }
  double lip_const() const { return lip_; }
  double max_abs_V() const { return max_abs_v_; }
  /// max over [0, 1] of |f'(u)| = |V + u V'|.
  double max_abs_flux_slope() const { return max_flux_slope_; }
  /// V >= 0 on [0, 1]; required by the upwind schemes.
  bool nonnegative() const { return nonnegative_; }

 private:
  VelocityModel() = default;
  void measure();

  VelocityFamily family_ = VelocityFamily::kCustom;
  std::string name_;
  std::function<double(double)> v_;
  std::function<double(double)> vp_;
  std::vector<std::pair<double, double>> table_;
  double lip_ = 0.0;
  double max_abs_v_ = 0.0;
  double max_flux_slope_ = 0.0;
  bool nonnegative_ = true;
};

/// u V(u); throws DomainError for u outside [0, 1].
double flux(const VelocityModel& vm, double u);

/// Kruzkov entropy pair alpha_c(u) = |u - c|,
/// beta_c(u) = sign(u - c) (u V(u) - c V(c)).
class KruzkovPair {
 public:
  KruzkovPair(VelocityModel vm, double c);

  double c() const { return c_; }
  double alpha(double u) const;
  double beta(double u) const;

 private:
  VelocityModel vm_;
  double c_;
  double fc_;
};

KruzkovPair kruzkov(const VelocityModel& vm, double c);

/// q(a, b) = sign(a - b) (a V(a) - b V(b)); symmetric in its arguments.
double kruzkov_flux(const VelocityModel& vm, double a, double b);

}  // namespace nlt
