#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bigamp/types.hpp"

namespace bga {

/// Everything measured on one Monte Carlo trial. ce_mse and ser are absent
/// when no active device was detected correctly.
struct TrialRecord {
  double dad_error = 0.0;
  int n_false_alarm = 0;
  int n_miss = 0;
  std::optional<double> ce_mse;
  std::optional<double> ser;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;
};

struct DadErrors {
  double rate = 0.0;
  int n_false_alarm = 0;
  int n_miss = 0;
};

DadErrors dad_error_rate(const VecI& alpha, const VecI& alpha_hat);

/// Devices that are active and detected active.
std::vector<int> correct_detections(const VecI& alpha, const VecI& alpha_hat);

/// Mean per-antenna squared channel error over the given devices; absent
/// when the set is empty.
std::optional<double> ce_mse_empirical(const MatC& H_true, const MatC& H_hat,
                                       const std::vector<int>& correct_set);

/// Index of the Euclidean-nearest codeword, lowest index on ties.
int nearest_codeword(const VecC& block, const std::vector<VecC>& codebook);

/// Fraction of wrongly decoded length-J blocks over devices in correct_set.
/// Columns of A hold each device's full transmit sequence; only the data
/// rows (below pilot_len) are decoded.
std::optional<double> ser(const MatC& A_true, const MatC& A_hat,
                          const std::vector<VecC>& codebook, int pilot_len,
                          const std::vector<int>& correct_set);

}  // namespace bga
