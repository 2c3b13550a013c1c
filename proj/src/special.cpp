#include "bigamp/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bga {

namespace {

constexpr int kMaxIter = 10000;
constexpr double kEps = 1e-15;

/// log of the common prefactor x^a e^{-x} / Gamma(a).
double log_prefactor(double a, double x) {
  return a * std::log(x) - x - std::lgamma(a);
}

/// P(a,x) via the power series gamma(a,x) = x^a e^{-x} sum x^k / (a)_{k+1}.
double lower_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps)
      return sum * std::exp(log_prefactor(a, x));
  }
  throw std::runtime_error("regularized_gamma: series did not converge");
}

/// Q(a,x) via the Lentz continued fraction for Gamma(a,x).
double upper_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps)
      return h * std::exp(log_prefactor(a, x));
  }
  throw std::runtime_error("regularized_gamma: continued fraction did not converge");
}

}  // namespace

double regularized_gamma_lower(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("regularized_gamma: a must be > 0");
  if (x < 0.0) throw std::domain_error("regularized_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return lower_series(a, x);
  return 1.0 - upper_cf(a, x);
}

double regularized_gamma_upper(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("regularized_gamma: a must be > 0");
  if (x < 0.0) throw std::domain_error("regularized_gamma: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_cf(a, x);
}

}  // namespace bga
