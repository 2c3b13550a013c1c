#pragma once

#include <vector>

#include "bigamp/denoise.hpp"
#include "bigamp/types.hpp"

namespace bga {

/// Prior information the iteration needs about one scenario family.
struct Priors {
  double epsilon = 0.05;        // row activity probability
  VecD beta;                    // per-device channel power, length N
  double sigma2 = 1.0;          // per-entry noise variance
  SignalPrior signal_prior = SignalPrior::Gaussian;
  std::vector<cplx> alphabet;   // scaled points (power 1/L) for Discrete
  std::vector<double> weights;  // optional prior weights for Discrete
  int pilot_len = 0;            // L_p
};

struct BigampConfig {
  int t_max = 200;
  double kappa = 1e-4;          // relative stopping threshold on P_bar
  double damp_init = 0.3;       // step size eta in (0,1]
  double damp_min = 1.0 / 64;
  double damp_shrink = 0.5;
  double damp_grow = 1.0;
  int cost_window = 8;          // steps are accepted against the recent max cost
  double numeric_floor = 1e-12;
};

/// Everything one iteration reads and writes. Variances are scalars per row
/// (or per entry for the symbol matrix), never full covariance matrices.
struct BigampState {
  MatC A_hat;   // L x N symbol means; pilot rows pinned to the pilot matrix
  MatD va;      // L x N symbol variances; zero on pilot rows
  MatC X_hat;   // N x M channel-row means
  VecD vx;      // per-row channel variances, length N
  MatC S_hat;   // L x M scaled residual entering the next Onsager term
  VecD vs;      // per-row residual precision, length L
  MatC P_bar;   // L x M plug-in product estimate
  VecD vbar_p;  // length L
  MatC P_hat;   // L x M Onsager-corrected product estimate
  VecD vp;      // length L
  VecD phi;     // activity beliefs, length N
  VecD vr;      // last pseudo-observation variances, length N
  MatD vq;      // last symbol pseudo-observation variances, L x N
  int iter = 0;
  double eta = 1.0;      // current damping step
  double cost = 0.0;     // ||Y - A_hat X_hat||_F^2 of the current state
  std::vector<double> cost_history;  // recent costs, newest last
};

struct StepStatus {
  bool accepted = true;   // false when damping hit its minimum step
  bool finite = true;     // false on non-finite values (divergence)
  double eta_used = 1.0;
};

struct BigampResult {
  MatC X_hat;
  MatC A_hat;
  VecD phi;
  VecD vr_final;     // length N
  double vq_final = 0.0;  // mean over data-row entries
  double va_final = 0.0;  // mean posterior symbol variance over data rows
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  std::vector<double> residual_trace;  // ||Y - P_bar||_F^2 / (L*M) per iteration
};

/// Algorithm state at t=1: s(0)=0, pilot symbol means pinned, data symbol
/// means zero, channel means zero, va=1 off-pilot, vx_n = beta_n.
BigampState init_state(const MatC& Y, const MatC& pilots, const Priors& priors);

/// Plug-in product, its variance, and the Onsager-corrected estimate.
/// Uses state.S_hat as s(t-1).
void forward_pass(BigampState& st, const BigampConfig& cfg);

struct BackwardPass {
  MatC Q_hat;  // L x N
  MatD vq;     // L x N
  MatC R_hat;  // N x M
  VecD vr;     // N
};

/// Pseudo-observations for the two denoisers; requires S_hat/vs of the
/// current iteration.
BackwardPass backward_pass(const BigampState& st, const BigampConfig& cfg);

/// One full iteration with adaptive damping: rejected steps rewind and
/// shrink the step; accepted steps grow it toward 1.
StepStatus bigamp_step(BigampState& st, const MatC& Y, const Priors& priors,
                       const BigampConfig& cfg);

BigampResult run_bigamp(const MatC& Y, const MatC& pilots, const Priors& priors,
                        const BigampConfig& cfg);

/// alpha_hat_n = 1 iff phi_n > eps.
VecI detect_activity(const VecD& phi, double eps);

struct DeviceEstimate {
  int device = 0;
  VecC channel;  // length M
  VecC data;     // length L_d
};

/// Channel and data estimates for every detected-active device.
std::vector<DeviceEstimate> extract_estimates(const BigampResult& res,
                                              const VecI& alpha_hat, int pilot_len);

}  // namespace bga
