#include "bigamp/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bga {

SignalPrior signal_prior_from_string(const std::string& s) {
  if (s == "gaussian") return SignalPrior::Gaussian;
  if (s == "gaussian_codebook") return SignalPrior::GaussianCodebook;
  if (s == "qpsk" || s == "8psk" || s == "16qam") return SignalPrior::Discrete;
  throw std::invalid_argument("unknown signal_prior: " + s);
}

std::string to_string(SignalPrior p) {
  switch (p) {
    case SignalPrior::Gaussian: return "gaussian";
    case SignalPrior::GaussianCodebook: return "gaussian_codebook";
    case SignalPrior::Discrete: return "discrete";
  }
  return "?";
}

std::vector<cplx> make_constellation(const std::string& name) {
  using std::numbers::pi;
  std::vector<cplx> pts;
  if (name == "qpsk" || name == "8psk") {
    int m = (name == "qpsk") ? 4 : 8;
    double off = pi / m;  // rotate off the axes
    for (int k = 0; k < m; ++k) {
      pts.emplace_back(std::cos(2 * pi * k / m + off),
                       std::sin(2 * pi * k / m + off));
    }
  } else if (name == "16qam") {
    const double lv[4] = {-3, -1, 1, 3};
    for (double re : lv)
      for (double im : lv) pts.emplace_back(re, im);
    // normalize to unit average power (E|s|^2 = 10 for the +-1,+-3 grid)
    for (auto& s : pts) s /= std::sqrt(10.0);
  } else {
    throw std::invalid_argument("unknown constellation: " + name);
  }
  return pts;
}

double SystemConfig::mean_path_loss() const {
  if (path_loss.empty()) return 1.0;
  double s = 0.0;
  for (double b : path_loss) s += b;
  return s / static_cast<double>(path_loss.size());
}

void SystemConfig::validate() const {
  if (n_devices < 1) throw std::invalid_argument("n_devices must be >= 1");
  if (n_antennas < 1) throw std::invalid_argument("n_antennas must be >= 1");
  if (pilot_len < 1) throw std::invalid_argument("pilot_len must be >= 1");
  if (data_len < 0) throw std::invalid_argument("data_len must be >= 0");
  if (!(activity_prob > 0.0 && activity_prob < 1.0))
    throw std::invalid_argument("activity_prob must be in (0,1)");
  if (!path_loss.empty()) {
    if (static_cast<int>(path_loss.size()) != n_devices)
      throw std::invalid_argument("path_loss length must equal n_devices");
    for (double b : path_loss)
      if (!(b > 0.0)) throw std::invalid_argument("path_loss entries must be > 0");
  }
  if (signal_prior == SignalPrior::GaussianCodebook) {
    if (codeword_len < 1) throw std::invalid_argument("codeword_len must be >= 1");
    if (codebook_size < 2) throw std::invalid_argument("codebook_size must be >= 2");
    if (data_len % codeword_len != 0)
      throw std::invalid_argument("data_len must be a multiple of codeword_len");
  }
  if (signal_prior == SignalPrior::Discrete && alphabet.empty())
    throw std::invalid_argument("discrete prior requires an alphabet");
}

double sigma2_from_snr(const SystemConfig& cfg) {
  double signal_power = cfg.activity_prob * cfg.n_devices * cfg.mean_path_loss() /
                        static_cast<double>(cfg.seq_len());
  return signal_power / std::pow(10.0, cfg.snr_db / 10.0);
}

std::vector<VecC> generate_codebook(int J, int D, int L, Rng& rng) {
  std::vector<VecC> book(static_cast<size_t>(D));
  for (auto& cw : book) {
    cw.resize(J);
    for (int j = 0; j < J; ++j) cw[j] = rng.cnormal(1.0 / L);
  }
  for (size_t i = 0; i < book.size(); ++i)
    for (size_t k = i + 1; k < book.size(); ++k)
      if ((book[i] - book[k]).norm() == 0.0)
        throw std::runtime_error("duplicate codewords generated");
  return book;
}

Scenario generate_scenario(const SystemConfig& cfg, Rng& rng) {
  cfg.validate();
  const int N = cfg.n_devices, M = cfg.n_antennas;
  const int Lp = cfg.pilot_len, Ld = cfg.data_len, L = cfg.seq_len();

  Scenario sc;
  sc.sigma2 = sigma2_from_snr(cfg);

  sc.activity.resize(N);
  for (int n = 0; n < N; ++n) sc.activity[n] = rng.bernoulli(cfg.activity_prob) ? 1 : 0;

  sc.channels = MatC::Zero(N, M);
  for (int n = 0; n < N; ++n) {
    if (!sc.activity[n]) continue;
    double beta = cfg.path_loss_of(n);
    for (int m = 0; m < M; ++m) sc.channels(n, m) = rng.cnormal(beta);
  }

  sc.transmit.resize(L, N);
  for (int n = 0; n < N; ++n)
    for (int l = 0; l < Lp; ++l) sc.transmit(l, n) = rng.cnormal(1.0 / L);

  switch (cfg.signal_prior) {
    case SignalPrior::Gaussian:
      for (int n = 0; n < N; ++n)
        for (int l = Lp; l < L; ++l) sc.transmit(l, n) = rng.cnormal(1.0 / L);
      break;
    case SignalPrior::GaussianCodebook: {
      sc.codebook = generate_codebook(cfg.codeword_len, cfg.codebook_size, L, rng);
      const int Ns = Ld / cfg.codeword_len;
      for (int n = 0; n < N; ++n) {
        for (int b = 0; b < Ns; ++b) {
          const VecC& cw = sc.codebook[rng.below(static_cast<size_t>(cfg.codebook_size))];
          sc.transmit.block(Lp + b * cfg.codeword_len, n, cfg.codeword_len, 1) = cw;
        }
      }
      break;
    }
    case SignalPrior::Discrete: {
      // constellation scaled so each symbol has power 1/L; the same scaled
      // points serve as the length-1 "codebook" for nearest-symbol decoding
      double scale = 1.0 / std::sqrt(static_cast<double>(L));
      sc.codebook.reserve(cfg.alphabet.size());
      for (const cplx& s : cfg.alphabet) {
        VecC cw(1);
        cw[0] = s * scale;
        sc.codebook.push_back(cw);
      }
      for (int n = 0; n < N; ++n)
        for (int l = Lp; l < L; ++l)
          sc.transmit(l, n) = sc.codebook[rng.below(cfg.alphabet.size())][0];
      break;
    }
  }

  sc.noise.resize(L, M);
  for (int l = 0; l < L; ++l)
    for (int m = 0; m < M; ++m) sc.noise(l, m) = rng.cnormal(sc.sigma2);

  sc.observation = sc.transmit * sc.channels + sc.noise;
  return sc;
}

}  // namespace bga
