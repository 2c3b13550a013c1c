#include "bigamp/metrics.hpp"

#include <stdexcept>

namespace bga {

DadErrors dad_error_rate(const VecI& alpha, const VecI& alpha_hat) {
  if (alpha.size() != alpha_hat.size())
    throw std::invalid_argument("dad_error_rate: length mismatch");
  DadErrors e;
  for (Eigen::Index n = 0; n < alpha.size(); ++n) {
    if (alpha[n] == 0 && alpha_hat[n] == 1) ++e.n_false_alarm;
    if (alpha[n] == 1 && alpha_hat[n] == 0) ++e.n_miss;
  }
  e.rate = static_cast<double>(e.n_false_alarm + e.n_miss) /
           static_cast<double>(alpha.size());
  return e;
}

std::vector<int> correct_detections(const VecI& alpha, const VecI& alpha_hat) {
  std::vector<int> out;
  for (Eigen::Index n = 0; n < alpha.size(); ++n)
    if (alpha[n] == 1 && alpha_hat[n] == 1) out.push_back(static_cast<int>(n));
  return out;
}

std::optional<double> ce_mse_empirical(const MatC& H_true, const MatC& H_hat,
                                       const std::vector<int>& correct_set) {
  if (correct_set.empty()) return std::nullopt;
  const double M = static_cast<double>(H_true.cols());
  double acc = 0.0;
  for (int k : correct_set) acc += (H_hat.row(k) - H_true.row(k)).squaredNorm() / M;
  return acc / static_cast<double>(correct_set.size());
}

int nearest_codeword(const VecC& block, const std::vector<VecC>& codebook) {
  if (codebook.empty()) throw std::invalid_argument("nearest_codeword: empty codebook");
  int best = 0;
  double best_d = (block - codebook[0]).squaredNorm();
  for (size_t i = 1; i < codebook.size(); ++i) {
    double d = (block - codebook[i]).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::optional<double> ser(const MatC& A_true, const MatC& A_hat,
                          const std::vector<VecC>& codebook, int pilot_len,
                          const std::vector<int>& correct_set) {
  if (correct_set.empty()) return std::nullopt;
  const int L = static_cast<int>(A_true.rows());
  const int Ld = L - pilot_len;
  const int J = static_cast<int>(codebook.front().size());
  if (Ld % J != 0) throw std::invalid_argument("ser: data length not a block multiple");
  const int n_blocks = Ld / J;

  long errors = 0;
  for (int k : correct_set) {
    for (int b = 0; b < n_blocks; ++b) {
      const VecC sent = A_true.col(k).segment(pilot_len + b * J, J);
      const VecC est = A_hat.col(k).segment(pilot_len + b * J, J);
      const int truth = nearest_codeword(sent, codebook);
      if (nearest_codeword(est, codebook) != truth) ++errors;
    }
  }
  return static_cast<double>(errors) /
         (static_cast<double>(correct_set.size()) * n_blocks);
}

}  // namespace bga
