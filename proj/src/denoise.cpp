#include "bigamp/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bga {

VectorMoments output_posterior_awgn(const VecC& y, const VecC& p_hat, double vp,
                                    double sigma2) {
  if (vp < 0.0) throw std::domain_error("output_posterior_awgn: vp < 0");
  if (!(sigma2 > 0.0)) throw std::domain_error("output_posterior_awgn: sigma2 <= 0");
  VectorMoments out;
  double denom = sigma2 + vp;
  out.mean = (vp * y + sigma2 * p_hat) / denom;
  out.var = sigma2 * vp / denom;
  return out;
}

void scaled_residual(const VecC& z_hat, const VecC& p_hat, double vp, double vz,
                     VecC& s_hat, double& vs) {
  if (vp <= kNumericFloor) throw std::domain_error("scaled_residual: degenerate vp");
  s_hat = (z_hat - p_hat) / vp;
  vs = (1.0 - vz / vp) / vp;
}

XDenoised denoise_x_bg(const VecC& r_hat, double vr, double beta, double eps, int M) {
  if (vr <= kNumericFloor) throw std::domain_error("denoise_x_bg: degenerate vr");
  if (!(beta > 0.0)) throw std::domain_error("denoise_x_bg: beta <= 0");

  XDenoised out;
  double r2 = r_hat.squaredNorm();
  double gain = beta / (beta + vr);
  double psi = (1.0 / vr - 1.0 / (beta + vr)) * r2 / M - std::log1p(beta / vr);
  out.belief.psi = psi;

  double phi, one_minus_phi;
  if (eps <= 0.0) {
    out.belief.log_odds = -std::numeric_limits<double>::infinity();
    phi = 0.0;
    one_minus_phi = 1.0;
  } else if (eps >= 1.0) {
    out.belief.log_odds = std::numeric_limits<double>::infinity();
    phi = 1.0;
    one_minus_phi = 0.0;
  } else {
    double lo = std::log(eps / (1.0 - eps)) + M * psi;
    out.belief.log_odds = lo;
    // logistic in both directions, saturating instead of overflowing
    phi = (lo > 0.0) ? 1.0 / (1.0 + std::exp(-lo)) : std::exp(lo) / (1.0 + std::exp(lo));
    one_minus_phi = (lo > 0.0) ? std::exp(-lo) / (1.0 + std::exp(-lo))
                               : 1.0 / (1.0 + std::exp(lo));
  }
  out.belief.phi = phi;

  out.mean = phi * gain * r_hat;
  // phi*(1-phi) equals ((1-eps)/eps)*phi^2*exp(-M*psi); this form cannot overflow
  out.var = phi * one_minus_phi * gain * gain * r2 / M + gain * vr * phi;
  return out;
}

ScalarMoments denoise_a_gaussian(cplx q_hat, double vq, int L) {
  if (vq < 0.0) throw std::domain_error("denoise_a_gaussian: vq < 0");
  double denom = 1.0 + L * vq;
  return {q_hat / denom, vq / denom};
}

ScalarMoments denoise_a_pilot(cplx c) { return {c, 0.0}; }

ScalarMoments denoise_a_discrete(cplx q_hat, double vq, std::span<const cplx> alphabet,
                                 std::span<const double> priors) {
  if (alphabet.empty()) throw std::domain_error("denoise_a_discrete: empty alphabet");
  if (vq <= kNumericFloor) {
    // concentration limit: nearest alphabet point, lowest index on ties
    size_t best = 0;
    double best_d = std::norm(q_hat - alphabet[0]);
    for (size_t i = 1; i < alphabet.size(); ++i) {
      double d = std::norm(q_hat - alphabet[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return {alphabet[best], 0.0};
  }

  std::vector<double> logw(alphabet.size());
  double max_lw = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < alphabet.size(); ++i) {
    double prior = priors.empty() ? 1.0 / alphabet.size() : priors[i];
    logw[i] = std::log(prior) - std::norm(q_hat - alphabet[i]) / vq;
    max_lw = std::max(max_lw, logw[i]);
  }
  double z = 0.0;
  for (double lw : logw) z += std::exp(lw - max_lw);

  cplx mean{0.0, 0.0};
  for (size_t i = 0; i < alphabet.size(); ++i)
    mean += std::exp(logw[i] - max_lw) / z * alphabet[i];
  double var = 0.0;
  for (size_t i = 0; i < alphabet.size(); ++i)
    var += std::exp(logw[i] - max_lw) / z * std::norm(alphabet[i] - mean);
  return {mean, var};
}

}  // namespace bga
