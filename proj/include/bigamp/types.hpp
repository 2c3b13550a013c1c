#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace bga {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatD = Eigen::MatrixXd;
using VecD = Eigen::VectorXd;
using VecI = Eigen::VectorXi;

enum class SignalPrior {
  Gaussian,          // unstructured i.i.d. CN(0, 1/L) data symbols
  GaussianCodebook,  // blocks of length J drawn uniformly from a CN codebook
  Discrete,          // i.i.d. symbols from a finite constellation, power 1/L
};

SignalPrior signal_prior_from_string(const std::string& s);
std::string to_string(SignalPrior p);

/// Named constellations for SignalPrior::Discrete, unit average power.
std::vector<cplx> make_constellation(const std::string& name);

/// All scenario parameters for one operating point.
struct SystemConfig {
  int n_devices = 1000;   // N
  int n_antennas = 64;    // M
  int pilot_len = 40;     // L_p
  int data_len = 100;     // L_d
  double activity_prob = 0.05;
  double snr_db = 10.0;
  std::vector<double> path_loss;  // per-device beta_n; empty means all 1
  int codeword_len = 5;   // J
  int codebook_size = 64; // D
  SignalPrior signal_prior = SignalPrior::GaussianCodebook;
  std::vector<cplx> alphabet;  // unit-power constellation (Discrete only)
  std::uint64_t seed = 0;

  int seq_len() const { return pilot_len + data_len; }
  double path_loss_of(int n) const {
    return path_loss.empty() ? 1.0 : path_loss[static_cast<size_t>(n)];
  }
  double mean_path_loss() const;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// One synthetic ground-truth realization of the linear model Y = AX + W.
struct Scenario {
  MatC transmit;     // A, L x N (pilot rows then data rows)
  MatC channels;     // X, N x M; row n is zero iff device n inactive
  VecI activity;     // alpha, length N, entries 0/1
  MatC noise;        // W, L x M
  MatC observation;  // Y, L x M
  std::vector<VecC> codebook;  // D codewords of length J (codebook prior only)
  double sigma2 = 0.0;
};

}  // namespace bga
