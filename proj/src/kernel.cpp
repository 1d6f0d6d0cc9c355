#include "flock/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "flock/quadrature.hpp"

namespace flock {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

Kernel Kernel::indicator(double amplitude, double radius) {
  require_positive(amplitude, "amplitude");
  require_positive(radius, "radius");
  Kernel k;
  k.family_ = KernelFamily::Indicator;
  k.amplitude_ = amplitude;
  k.radius_ = radius;
  return k;
}

Kernel Kernel::triangular(double amplitude, double radius) {
  require_positive(amplitude, "amplitude");
  require_positive(radius, "radius");
  Kernel k;
  k.family_ = KernelFamily::Triangular;
  k.amplitude_ = amplitude;
  k.radius_ = radius;
  return k;
}

Kernel Kernel::power_cap(double amplitude, double radius, double gamma) {
  require_positive(amplitude, "amplitude");
  require_positive(radius, "radius");
  require_positive(gamma, "gamma");
  Kernel k;
  k.family_ = KernelFamily::PowerCap;
  k.amplitude_ = amplitude;
  k.radius_ = radius;
  k.gamma_ = gamma;
  return k;
}

Kernel Kernel::tabulated(std::vector<double> samples, double radius) {
  require_positive(radius, "radius");
  if (samples.size() < 2)
    throw std::invalid_argument("tabulated kernel needs at least 2 samples");
  if (!(samples.front() > 0.0))
    throw std::invalid_argument("tabulated kernel: first sample must be positive");
  if (samples.back() != 0.0)
    throw std::invalid_argument("tabulated kernel: final sample must be 0");
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] < 0.0)
      throw std::invalid_argument("tabulated kernel: negative sample");
    if (i > 0 && samples[i] > samples[i - 1])
      throw std::invalid_argument("tabulated kernel: samples must be non-increasing");
  }
  Kernel k;
  k.family_ = KernelFamily::Tabulated;
  k.radius_ = radius;
  k.amplitude_ = samples.front();
  k.samples_ = std::move(samples);
  return k;
}

double Kernel::peak() const { return eval_base(0.0); }

Kernel Kernel::shifted(double delta) const {
  if (delta < 0.0) throw std::invalid_argument("shift must be nonnegative");
  if (shift_ != 0.0)
    throw std::invalid_argument("shifted() requires an unshifted kernel");
  Kernel k = *this;
  k.shift_ = delta;
  return k;
}

double Kernel::c0_integral(int d) const {
  if (shift_ != 0.0)
    throw std::invalid_argument("c0_integral requires an unshifted kernel");
  if (d < 2) throw std::invalid_argument("c0_integral requires d >= 2");
  double f0 = peak();
  if (!(f0 > 0.0)) throw std::invalid_argument("degenerate kernel: f(0) = 0");
  double integral = integrate(
      [&](double y) { return eval_base(radius_ * y) * std::pow(y, d - 1); },
      0.0, 1.0);
  return integral / f0;
}

std::string Kernel::family_name() const {
  switch (family_) {
    case KernelFamily::Indicator: return "indicator";
    case KernelFamily::Triangular: return "triangular";
    case KernelFamily::PowerCap: return "powercap";
    case KernelFamily::Tabulated: return "tabulated";
  }
  return "?";
}

}  // namespace flock
