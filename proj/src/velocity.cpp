#include "nlt/velocity.hpp"

#include <algorithm>
#include <cmath>

#include "nlt/errors.hpp"

namespace nlt {

namespace {

constexpr double kRangeTol = 1e-12;
constexpr int kSamples = 4096;

double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

VelocityModel VelocityModel::greenshields() {
  VelocityModel m;
  m.family_ = VelocityFamily::kGreenshields;
  m.name_ = "greenshields";
  m.v_ = [](double w) { return 1.0 - w; };
  m.vp_ = [](double) { return -1.0; };
  m.measure();
  return m;
}

VelocityModel VelocityModel::from_table(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw DomainError("velocity table needs at least two rows");
  std::sort(samples.begin(), samples.end());
  if (samples.front().first > 0.0 || samples.back().first < 1.0) {
    throw DomainError("velocity table must cover [0, 1]");
  }
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (!(samples[i + 1].first > samples[i].first)) {
      throw DomainError("velocity table abscissae must be distinct");
    }
    if (samples[i + 1].second > samples[i].second) {
      throw DomainError("velocity table must be non-increasing");
    }
  }
  VelocityModel m;
  m.family_ = VelocityFamily::kCustom;
  m.name_ = "table";
  m.table_ = samples;
  const auto segment = [t = samples](double w) {
    auto it = std::upper_bound(t.begin(), t.end(), w,
                               [](double x, const auto& p) { return x < p.first; });
    std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    return std::min(i, t.size() - 2);
  };
  m.v_ = [t = samples, segment](double w) {
    if (w <= t.front().first) return t.front().second;
    if (w >= t.back().first) return t.back().second;
    const std::size_t i = segment(w);
    const auto& [x0, y0] = t[i];
    const auto& [x1, y1] = t[i + 1];
    return y0 + (y1 - y0) * (w - x0) / (x1 - x0);
  };
  m.vp_ = [t = samples, segment](double w) {
    if (w < t.front().first || w > t.back().first) return 0.0;
    const std::size_t i = segment(w);
    return (t[i + 1].second - t[i].second) / (t[i + 1].first - t[i].first);
  };
  m.measure();
  return m;
}

VelocityModel VelocityModel::custom(std::string name, std::function<double(double)> v,
                                    std::function<double(double)> v_prime) {
  if (!v || !v_prime) throw DomainError("custom velocity needs V and V'");
  VelocityModel m;
  m.family_ = VelocityFamily::kCustom;
  m.name_ = std::move(name);
  m.v_ = std::move(v);
  m.vp_ = std::move(v_prime);
  m.measure();
  return m;
}

void VelocityModel::measure() {
  lip_ = 0.0;
  max_abs_v_ = 0.0;
  max_flux_slope_ = 0.0;
  nonnegative_ = true;
  for (int i = 0; i <= kSamples; ++i) {
    const double w = static_cast<double>(i) / kSamples;
    const double v = v_(w);
    const double vp = vp_(w);
    if (!std::isfinite(v) || !std::isfinite(vp)) {
      throw DomainError("velocity law is not finite on [0, 1]");
    }
    if (vp > kRangeTol) throw DomainError("velocity law must satisfy V' <= 0 on [0, 1]");
    max_abs_v_ = std::max(max_abs_v_, std::abs(v));
    lip_ = std::max(lip_, std::abs(vp));
    max_flux_slope_ = std::max(max_flux_slope_, std::abs(v + w * vp));
    if (v < -kRangeTol) nonnegative_ = false;
  }
}

double flux(const VelocityModel& vm, double u) {
  if (!(u >= -kRangeTol && u <= 1.0 + kRangeTol)) {
    throw DomainError("flux: density " + std::to_string(u) + " outside [0, 1]");
  }
  return u * vm.V(u);
}

KruzkovPair::KruzkovPair(VelocityModel vm, double c)
    : vm_(std::move(vm)), c_(c), fc_(c * vm_.V(c)) {}

double KruzkovPair::alpha(double u) const { return std::abs(u - c_); }

double KruzkovPair::beta(double u) const { return sign(u - c_) * (u * vm_.V(u) - fc_); }

KruzkovPair kruzkov(const VelocityModel& vm, double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw DomainError("Kruzkov constant must lie in [0, 1]");
  return KruzkovPair(vm, c);
}

double kruzkov_flux(const VelocityModel& vm, double a, double b) {
  return sign(a - b) * (a * vm.V(a) - b * vm.V(b));
}

}  // namespace nlt
