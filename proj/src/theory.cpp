#include "bigamp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bigamp/denoise.hpp"
#include "bigamp/special.hpp"

namespace bga {

SeState se_step(double vr, double vq, const SeParams& params) {
  const double K = params.K_eff;
  const double L = static_cast<double>(params.L);
  const double g_r = params.beta_bar * vr / (params.beta_bar + vr);
  const double g_q = vq / (1.0 + L * vq);

  SeState next;
  next.vp = (K / L) * g_r + K * g_q + K * g_r * g_q;
  next.vr = params.sigma2 + next.vp;
  next.vq = next.vr / params.M;
  return next;
}

SeState default_se_init(const SeParams& params) {
  SeState init;
  init.vr = params.sigma2 + params.K_eff * params.beta_bar;
  init.vq = init.vr / params.M;
  init.vp = init.vr - params.sigma2;
  return init;
}

SeTrace run_se(const SeParams& params, const SeState& init, int t_max, double tol) {
  SeTrace trace;
  double vr = init.vr;
  double vq = init.vq;
  double tau_prev = init.vr;  // tau(0) = vp(0) + sigma2 = vr(0)

  trace.records.push_back({0, init.vr - params.sigma2, vr, vq, tau_prev});
  for (int t = 1; t <= t_max; ++t) {
    const SeState s = se_step(vr, vq, params);
    const double tau = s.vp + params.sigma2;
    trace.records.push_back({t, s.vp, s.vr, s.vq, tau});
    vr = s.vr;
    vq = s.vq;
    if (std::abs(tau - tau_prev) < tol) {
      trace.fixed_point = true;
      break;
    }
    tau_prev = tau;
  }

  const ConvergenceCondition cc = convergence_condition(params, vr, vq);
  trace.c1 = cc.c1;
  trace.c2 = cc.c2;
  return trace;
}

ConvergenceCondition convergence_condition(const SeParams& params, double vr,
                                           double vq) {
  const double L = static_cast<double>(params.L);
  const double bb = params.beta_bar;
  const double g_q = L * vq / (1.0 + L * vq);

  ConvergenceCondition cc;
  cc.c1 = bb * bb / ((bb + vr) * (bb + vr)) * (1.0 + g_q);
  cc.c2 = 1.0 / ((1.0 + L * vq) * (1.0 + L * vq)) * (1.0 + bb * vr / (bb + vr));
  const double c1_eff = std::clamp(cc.c1, 0.25, 2.0);
  const double c2_eff = std::clamp(cc.c2, 0.25, 2.0);
  cc.L_ok = L > c1_eff * params.K_eff;
  cc.M_ok = params.M > c2_eff * params.K_eff;
  return cc;
}

double dad_error_prob(int M, double vr, double beta, double eps) {
  if (!(vr > 0.0) || !(beta > 0.0)) throw std::domain_error("dad_error_prob: vr, beta must be > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("dad_error_prob: eps must be in (0,1)");
  const double lg = std::log((beta + vr) / vr);
  const double b = (beta + vr) / beta * lg;
  const double c = vr / beta * lg;
  const double a = static_cast<double>(M);
  return (1.0 - eps) * regularized_gamma_upper(a, a * b) +
         eps * regularized_gamma_lower(a, a * c);
}

double ce_mse_limit(double beta, double vr) { return beta * vr / (beta + vr); }

double ce_mse_finite(double beta, double vr, int M, double eps, int n_samples,
                     Rng& rng) {
  if (n_samples < 1) throw std::domain_error("ce_mse_finite: n_samples must be >= 1");
  if (vr <= kNumericFloor) return 0.0;

  const double gain = beta / (beta + vr);
  double acc = 0.0;
  VecC h(M), r(M);
  for (int s = 0; s < n_samples; ++s) {
    for (int m = 0; m < M; ++m) {
      h[m] = rng.cnormal(beta);
      r[m] = h[m] + rng.cnormal(vr);
    }
    const XDenoised xd = denoise_x_bg(r, vr, beta, eps, M);
    const double phi = xd.belief.phi;
    acc += phi * phi * (gain * r - h).squaredNorm();
  }
  return acc / (static_cast<double>(n_samples) * M);
}

double ser_bound(double rho, int J, int D, int L, double va) {
  if (!(va > 0.0)) throw std::domain_error("ser_bound: va must be > 0");
  const double log_bound = -rho * std::log(static_cast<double>(D - 1)) -
                           J * rho * std::log1p(1.0 / (L * va * (1.0 + rho)));
  return std::min(std::exp(log_bound), 1.0);
}

}  // namespace bga
