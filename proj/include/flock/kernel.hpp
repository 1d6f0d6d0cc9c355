#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace flock {

enum class KernelFamily { Indicator, Triangular, PowerCap, Tabulated };

// Radial interaction weight f(x): positive and non-increasing on [0, r),
// zero at and beyond r. A nonnegative shift delta turns f into its shifted
// variant: f_shift(x) = f(0) for x <= delta*r and f(x - delta*r) beyond,
// so the effective support ends at (1+delta)*r.
//
// Immutable after construction; safe to share across threads.
class Kernel {
 public:
  static Kernel indicator(double amplitude, double radius);
  static Kernel triangular(double amplitude, double radius);
  static Kernel power_cap(double amplitude, double radius, double gamma);
  // Non-increasing nonnegative samples at equal spacing on [0, radius];
  // the final sample must be 0. Linear interpolation in between.
  static Kernel tabulated(std::vector<double> samples, double radius);

  KernelFamily family() const { return family_; }
  double radius() const { return radius_; }
  double amplitude() const { return amplitude_; }
  double gamma() const { return gamma_; }
  double shift() const { return shift_; }
  const std::vector<double>& samples() const { return samples_; }

  // f(0); also the plateau value of a shifted kernel.
  double peak() const;
  // End of the support: eval(x) == 0 for x >= support_end().
  double support_end() const { return (1.0 + shift_) * radius_; }

  double eval(double x) const {
    if (shift_ > 0.0) {
      double s = shift_ * radius_;
      return x <= s ? eval_base(0.0) : eval_base(x - s);
    }
    return eval_base(x);
  }

  // Same kernel translated outward by delta*radius. Requires shift() == 0.
  Kernel shifted(double delta) const;

  // Normalized radial mass (1/f(0)) * int_0^1 f(r*y) y^{d-1} dy, the
  // constant c0 used by the corollary checker. Requires an unshifted
  // kernel and d >= 2.
  double c0_integral(int d) const;

  std::string family_name() const;

 private:
  Kernel() = default;

  double eval_base(double x) const {
    if (x >= radius_) return 0.0;
    switch (family_) {
      case KernelFamily::Indicator:
        return amplitude_;
      case KernelFamily::Triangular:
        return amplitude_ * (1.0 - x / radius_);
      case KernelFamily::PowerCap:
        return amplitude_ * (1.0 - std::pow(x / radius_, gamma_));
      case KernelFamily::Tabulated: {
        double pos = x / radius_ * static_cast<double>(samples_.size() - 1);
        auto idx = static_cast<std::size_t>(pos);
        if (idx + 1 >= samples_.size()) return samples_.back();
        double frac = pos - static_cast<double>(idx);
        return samples_[idx] * (1.0 - frac) + samples_[idx + 1] * frac;
      }
    }
    return 0.0;
  }

  KernelFamily family_ = KernelFamily::Indicator;
  double radius_ = 0.0;
  double amplitude_ = 0.0;
  double gamma_ = 1.0;
  double shift_ = 0.0;
  std::vector<double> samples_;
};

}  // namespace flock
