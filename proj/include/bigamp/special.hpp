#pragma once

namespace bga {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
/// a > 0, x >= 0. Series expansion for x < a + 1, continued fraction
/// otherwise, both evaluated in the log domain. Relative error below 1e-10
/// for a up to 1e4.
double regularized_gamma_lower(double a, double x);

/// Q(a, x) = 1 - P(a, x), computed directly on the branch where it is the
/// small tail so the complement never cancels.
double regularized_gamma_upper(double a, double x);

}  // namespace bga
