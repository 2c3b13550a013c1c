#include "bigamp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bga {

namespace {

bool all_finite(const MatC& m) { return m.allFinite(); }
bool all_finite(const VecD& v) { return v.allFinite(); }

}  // namespace

BigampState init_state(const MatC& Y, const MatC& pilots, const Priors& priors) {
  const int L = static_cast<int>(Y.rows());
  const int M = static_cast<int>(Y.cols());
  const int N = static_cast<int>(pilots.cols());
  const int Lp = static_cast<int>(pilots.rows());
  if (Lp != priors.pilot_len) throw std::invalid_argument("pilot row count mismatch");
  if (Lp > L) throw std::invalid_argument("more pilot rows than observations");
  if (static_cast<int>(priors.beta.size()) != N)
    throw std::invalid_argument("beta length must equal device count");

  BigampState st;
  st.A_hat = MatC::Zero(L, N);
  st.A_hat.topRows(Lp) = pilots;
  st.va = MatD::Ones(L, N);
  st.va.topRows(Lp).setZero();
  st.X_hat = MatC::Zero(N, M);
  st.vx = priors.beta;
  st.S_hat = MatC::Zero(L, M);
  st.vs = VecD::Zero(L);
  st.P_bar = MatC::Zero(L, M);
  st.vbar_p = VecD::Zero(L);
  st.P_hat = MatC::Zero(L, M);
  st.vp = VecD::Zero(L);
  st.phi = VecD::Constant(N, priors.epsilon);
  st.vr = VecD::Zero(N);
  st.vq = MatD::Zero(L, N);
  st.iter = 0;
  st.eta = 1.0;
  st.cost = Y.squaredNorm();
  return st;
}

void forward_pass(BigampState& st, const BigampConfig& cfg) {
  (void)cfg;
  const int M = static_cast<int>(st.X_hat.cols());
  const VecD x2 = st.X_hat.rowwise().squaredNorm();
  const MatD a2 = st.A_hat.cwiseAbs2();

  st.P_bar = st.A_hat * st.X_hat;
  st.vbar_p = a2 * st.vx + (st.va * x2) / M;
  st.P_hat = st.P_bar - st.vbar_p.asDiagonal() * st.S_hat;
  st.vp = st.vbar_p + st.va * st.vx;
}

BackwardPass backward_pass(const BigampState& st, const BigampConfig& cfg) {
  const int L = static_cast<int>(st.A_hat.rows());
  const int N = static_cast<int>(st.A_hat.cols());
  const int M = static_cast<int>(st.X_hat.cols());
  const double floor = cfg.numeric_floor;

  BackwardPass bp;
  const MatD a2 = st.A_hat.cwiseAbs2();
  const VecD x2 = st.X_hat.rowwise().squaredNorm();

  const VecD prec_r = a2.transpose() * st.vs;
  bp.vr = prec_r.cwiseMax(floor).cwiseInverse();

  const VecD gain_r = st.va.transpose() * st.vs;
  const MatC corr = st.A_hat.adjoint() * st.S_hat;
  bp.R_hat.resize(N, M);
  for (int n = 0; n < N; ++n)
    bp.R_hat.row(n) =
        bp.vr[n] * corr.row(n) + (1.0 - bp.vr[n] * gain_r[n]) * st.X_hat.row(n);

  bp.vq.resize(L, N);
  for (int l = 0; l < L; ++l)
    for (int n = 0; n < N; ++n) bp.vq(l, n) = 1.0 / std::max(st.vs[l] * x2[n], floor);

  const MatC sx = st.S_hat * st.X_hat.conjugate().transpose();
  bp.Q_hat.resize(L, N);
  for (int l = 0; l < L; ++l)
    for (int n = 0; n < N; ++n)
      bp.Q_hat(l, n) = bp.vq(l, n) * sx(l, n) +
                       (1.0 - bp.vq(l, n) * M * st.vx[n] * st.vs[l]) * st.A_hat(l, n);
  return bp;
}

StepStatus bigamp_step(BigampState& st, const MatC& Y, const Priors& priors,
                       const BigampConfig& cfg) {
  const int L = static_cast<int>(Y.rows());
  const int M = static_cast<int>(Y.cols());
  const int N = static_cast<int>(st.X_hat.rows());
  const int Lp = priors.pilot_len;

  const MatC A_old = st.A_hat;
  const MatD va_old = st.va;
  const MatC X_old = st.X_hat;
  const VecD vx_old = st.vx;
  const MatC S_old = st.S_hat;
  const VecD vs_old = st.vs;
  const MatC P_old = st.P_bar;
  const double cost_old = st.cost;

  // the forward pass and output posterior depend only on the entering
  // state, so they are shared by every damping retry
  forward_pass(st, cfg);
  const MatC P_raw = st.P_bar;
  MatC S_new(L, M);
  VecD vs_new(L);
  for (int l = 0; l < L; ++l) {
    const double vp = std::max(st.vp[l], cfg.numeric_floor);
    const VectorMoments z = output_posterior_awgn(
        Y.row(l).transpose(), st.P_hat.row(l).transpose(), vp, priors.sigma2);
    VecC s_row;
    double vs = 0.0;
    scaled_residual(z.mean, st.P_hat.row(l).transpose(), vp, z.var, s_row, vs);
    S_new.row(l) = s_row.transpose();
    vs_new[l] = vs;
  }

  // one damped half-iteration: the residual is damped before it feeds the
  // pseudo-observations, then the denoised factors are damped in turn. The
  // variance trajectories are blended along with the means; they set the
  // effective step of everything downstream and are what oscillates when
  // the update overshoots.
  auto apply_damp = [&](double eta) -> double {
    st.S_hat = eta * S_new + (1.0 - eta) * S_old;
    st.vs = eta * vs_new + (1.0 - eta) * vs_old;

    const BackwardPass bp = backward_pass(st, cfg);
    st.vr = bp.vr;
    st.vq = bp.vq;

    MatC A_new(L, N);
    MatD va_new(L, N);
    A_new.topRows(Lp) = A_old.topRows(Lp);
    va_new.topRows(Lp).setZero();
    for (int l = Lp; l < L; ++l) {
      for (int n = 0; n < N; ++n) {
        ScalarMoments am;
        if (priors.signal_prior == SignalPrior::Discrete) {
          am = denoise_a_discrete(bp.Q_hat(l, n), bp.vq(l, n), priors.alphabet,
                                  priors.weights);
        } else {
          am = denoise_a_gaussian(bp.Q_hat(l, n), bp.vq(l, n), L);
        }
        A_new(l, n) = am.mean;
        va_new(l, n) = am.var;
      }
    }

    MatC X_new(N, M);
    VecD vx_new(N);
    for (int n = 0; n < N; ++n) {
      const double vr = std::max(bp.vr[n], cfg.numeric_floor);
      const XDenoised xd = denoise_x_bg(bp.R_hat.row(n).transpose(), vr,
                                        priors.beta[n], priors.epsilon, M);
      X_new.row(n) = xd.mean.transpose();
      vx_new[n] = xd.var;
      st.phi[n] = xd.belief.phi;
    }

    st.A_hat = eta * A_new + (1.0 - eta) * A_old;
    st.va = eta * va_new + (1.0 - eta) * va_old;
    // the blend of two identical pilot rows must not pick up rounding
    st.A_hat.topRows(Lp) = A_old.topRows(Lp);
    st.va.topRows(Lp).setZero();
    st.X_hat = eta * X_new + (1.0 - eta) * X_old;
    st.vx = eta * vx_new + (1.0 - eta) * vx_old;
    st.P_bar = eta * P_raw + (1.0 - eta) * P_old;

    if (!all_finite(st.A_hat) || !all_finite(st.X_hat) || !all_finite(st.vx) ||
        !all_finite(st.phi))
      return std::numeric_limits<double>::infinity();
    return (Y - st.A_hat * st.X_hat).squaredNorm();
  };

  // non-monotone acceptance: a step passes if it does not exceed the worst
  // recent cost, which lets the iteration climb out of the sharp early
  // transient without running away later
  double cost_ref = cost_old;
  for (double c : st.cost_history) cost_ref = std::max(cost_ref, c);

  StepStatus status;
  double eta = st.eta;
  double cost = apply_damp(eta);
  while (cost > cost_ref && eta > cfg.damp_min) {
    eta = std::max(eta * cfg.damp_shrink, cfg.damp_min);
    cost = apply_damp(eta);
  }
  if (!std::isfinite(cost)) {
    status.finite = false;
    st.A_hat = A_old;
    st.va = va_old;
    st.X_hat = X_old;
    st.vx = vx_old;
    st.S_hat = S_old;
    st.vs = vs_old;
    st.P_bar = P_old;
    st.cost = cost_old;
    return status;
  }
  if (cost > cost_ref) {
    // the minimum step still moves the state, just flagged as rejected
    status.accepted = false;
    st.eta = cfg.damp_min;
  } else {
    st.eta = std::min(eta * cfg.damp_grow, 1.0);
  }
  status.eta_used = eta;
  st.cost = cost;
  st.cost_history.push_back(cost);
  if (static_cast<int>(st.cost_history.size()) > cfg.cost_window)
    st.cost_history.erase(st.cost_history.begin());
  st.iter += 1;
  return status;
}

BigampResult run_bigamp(const MatC& Y, const MatC& pilots, const Priors& priors,
                        const BigampConfig& cfg) {
  const double lm = static_cast<double>(Y.rows()) * static_cast<double>(Y.cols());

  BigampState st = init_state(Y, pilots, priors);
  st.eta = cfg.damp_init;

  BigampResult res;
  res.residual_trace.reserve(static_cast<size_t>(cfg.t_max));

  for (int t = 0; t < cfg.t_max; ++t) {
    const MatC P_prev = st.P_bar;
    const StepStatus status = bigamp_step(st, Y, priors, cfg);
    if (!status.finite) {
      res.diverged = true;
      break;
    }
    res.residual_trace.push_back((Y - st.P_bar).squaredNorm() / lm);
    const double ref = P_prev.squaredNorm();
    if ((st.P_bar - P_prev).squaredNorm() <= cfg.kappa * ref && ref > 0.0) {
      res.converged = true;
      break;
    }
  }

  res.X_hat = st.X_hat;
  res.A_hat = st.A_hat;
  res.phi = st.phi;
  res.vr_final = st.vr;
  res.iterations = st.iter;

  const int L = static_cast<int>(Y.rows());
  const int Lp = priors.pilot_len;
  if (L > Lp) {
    res.vq_final = st.vq.bottomRows(L - Lp).mean();
    res.va_final = st.va.bottomRows(L - Lp).mean();
  }
  return res;
}

VecI detect_activity(const VecD& phi, double eps) {
  VecI alpha(phi.size());
  for (Eigen::Index n = 0; n < phi.size(); ++n) alpha[n] = phi[n] > eps ? 1 : 0;
  return alpha;
}

std::vector<DeviceEstimate> extract_estimates(const BigampResult& res,
                                              const VecI& alpha_hat, int pilot_len) {
  const int L = static_cast<int>(res.A_hat.rows());
  std::vector<DeviceEstimate> out;
  for (Eigen::Index n = 0; n < alpha_hat.size(); ++n) {
    if (!alpha_hat[n]) continue;
    DeviceEstimate de;
    de.device = static_cast<int>(n);
    de.channel = res.X_hat.row(n).transpose();
    de.data = res.A_hat.col(n).segment(pilot_len, L - pilot_len);
    out.push_back(std::move(de));
  }
  return out;
}

}  // namespace bga
