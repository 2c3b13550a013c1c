#pragma once

#include <vector>

#include "bigamp/rng.hpp"

namespace bga {

/// Asymptotic operating point for the scalar recursion: K_eff active
/// devices out of N, sequence length L, M antennas, mean channel power
/// beta_bar, noise variance sigma2.
struct SeParams {
  double K_eff = 50.0;
  int L = 140;
  int M = 64;
  double beta_bar = 1.0;
  double sigma2 = 0.0357;
};

struct SeState {
  double vp = 0.0;
  double vr = 0.0;
  double vq = 0.0;
};

struct SeRecord {
  int t = 0;
  double vp = 0.0;
  double vr = 0.0;
  double vq = 0.0;
  double tau = 0.0;  // vp + sigma2
};

struct SeTrace {
  std::vector<SeRecord> records;
  bool fixed_point = false;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// One recursion update: vp' from (vr, vq), then vr' = sigma2 + vp' and
/// vq' = vr'/M.
SeState se_step(double vr, double vq, const SeParams& params);

/// Worst-case start: all prior channel uncertainty lands on the
/// pseudo-observation. The fixed point is insensitive to this choice
/// whenever the convergence condition holds.
SeState default_se_init(const SeParams& params);

SeTrace run_se(const SeParams& params, const SeState& init, int t_max = 500,
               double tol = 1e-6);

struct ConvergenceCondition {
  double c1 = 0.0;
  double c2 = 0.0;
  bool L_ok = false;
  bool M_ok = false;
};

/// Convergence check L > c1*K and M > c2*K at a fixed point (vr, vq).
/// The analysis pins c1, c2 inside (1/4, 2); outside its small-vq regime
/// the raw values can leave that interval, so the flags use the values
/// clamped to [1/4, 2] while c1, c2 report the raw formulas.
ConvergenceCondition convergence_condition(const SeParams& params, double vr,
                                           double vq);

/// Error probability of the likelihood-ratio activity test with M antennas
/// at pseudo-observation variance vr and channel power beta.
double dad_error_prob(int M, double vr, double beta, double eps);

/// Large-M channel MSE per antenna: beta*vr/(beta+vr).
double ce_mse_limit(double beta, double vr);

/// Finite-M channel MSE by Monte Carlo over active devices, with the
/// activity belief phi entering squared.
double ce_mse_finite(double beta, double vr, int M, double eps, int n_samples,
                     Rng& rng);

/// Gallager-style SER bound for a size-D codebook of length-J codewords at
/// symbol estimation variance va, clamped to at most 1.
double ser_bound(double rho, int J, int D, int L, double va);

}  // namespace bga
