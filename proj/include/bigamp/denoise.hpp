#pragma once

#include <span>

#include "bigamp/types.hpp"

namespace bga {

/// Variances below this are clamped before any division.
inline constexpr double kNumericFloor = 1e-12;

/// A vector estimate with one shared per-entry variance.
struct VectorMoments {
  VecC mean;
  double var = 0.0;
};

struct ScalarMoments {
  cplx mean{0.0, 0.0};
  double var = 0.0;
};

/// Posterior activity probability of one device, kept in log-odds form so
/// it evaluates without overflow for |M*psi| up to ~1e4.
struct ActivityBelief {
  double phi = 0.0;
  double log_odds = 0.0;
  double psi = 0.0;
};

struct XDenoised {
  VecC mean;
  double var = 0.0;
  ActivityBelief belief;
};

/// Posterior moments of z under an AWGN observation y = z + CN(0, sigma2)
/// and prior z ~ CN(p_hat, vp I).
VectorMoments output_posterior_awgn(const VecC& y, const VecC& p_hat, double vp,
                                    double sigma2);

/// Scaled residual s = (z_hat - p_hat)/vp with vs = (1 - vz/vp)/vp.
/// Throws std::domain_error when vp is at or below the numeric floor.
void scaled_residual(const VecC& z_hat, const VecC& p_hat, double vp, double vz,
                     VecC& s_hat, double& vs);

/// MMSE denoiser for a Bernoulli-Gaussian row prior: the row is zero with
/// probability 1-eps and CN(0, beta I) otherwise, observed through
/// r = x + CN(0, vr I). M is the row length.
XDenoised denoise_x_bg(const VecC& r_hat, double vr, double beta, double eps, int M);

/// MMSE estimate of a CN(0, 1/L) symbol from q = a + CN(0, vq).
ScalarMoments denoise_a_gaussian(cplx q_hat, double vq, int L);

/// Pilot entries are known: mean c, variance 0, every iteration.
ScalarMoments denoise_a_pilot(cplx c);

/// Posterior moments of a finite-alphabet symbol under q = a + CN(0, vq),
/// weights w_s ∝ prior_s * exp(-|q-s|^2/vq) computed with log-sum-exp.
/// Ties at vq -> 0 resolve to the lowest alphabet index.
ScalarMoments denoise_a_discrete(cplx q_hat, double vq, std::span<const cplx> alphabet,
                                 std::span<const double> priors);

}  // namespace bga
