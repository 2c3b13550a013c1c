#include <doctest.h>

#include <cmath>
#include <complex>

#include "bigamp/model.hpp"

using namespace bga;

namespace {

SystemConfig base_cfg() {
  SystemConfig cfg;
  cfg.n_devices = 1000;
  cfg.n_antennas = 64;
  cfg.pilot_len = 40;
  cfg.data_len = 100;
  cfg.activity_prob = 0.05;
  cfg.snr_db = 10.0;
  cfg.codeword_len = 5;
  cfg.codebook_size = 64;
  cfg.signal_prior = SignalPrior::GaussianCodebook;
  return cfg;
}

}  // namespace

TEST_CASE("noise variance from snr definition") {
  SystemConfig cfg = base_cfg();
  cfg.pilot_len = 30;  // L = 130
  CHECK(cfg.seq_len() == 130);
  CHECK(sigma2_from_snr(cfg) == doctest::Approx((50.0 / 130.0) / 10.0).epsilon(1e-12));

  SystemConfig c2 = base_cfg();
  c2.snr_db = 0.0;
  double sig = c2.activity_prob * c2.n_devices * c2.mean_path_loss() / c2.seq_len();
  CHECK(sigma2_from_snr(c2) == doctest::Approx(sig).epsilon(1e-12));

  SystemConfig c3 = base_cfg();
  c3.snr_db = 300.0;
  CHECK(sigma2_from_snr(c3) < 1e-28);
}

TEST_CASE("codebook generation moments and determinism") {
  Rng rng(42);
  auto book = generate_codebook(5, 64, 130, rng);
  REQUIRE(book.size() == 64);
  double acc = 0.0;
  int n = 0;
  for (const auto& cw : book) {
    REQUIRE(cw.size() == 5);
    acc += cw.squaredNorm();
    n += static_cast<int>(cw.size());
  }
  CHECK(acc / n == doctest::Approx(1.0 / 130.0).epsilon(0.05));

  Rng r2(7);
  auto small = generate_codebook(1, 2, 10, r2);
  REQUIRE(small.size() == 2);
  CHECK((small[0] - small[1]).norm() > 0.0);

  Rng ra(99), rb(99);
  auto ba = generate_codebook(3, 8, 50, ra);
  auto bb = generate_codebook(3, 8, 50, rb);
  for (size_t i = 0; i < ba.size(); ++i) CHECK((ba[i] - bb[i]).norm() == 0.0);
}

TEST_CASE("scenario support consistency and linear model") {
  SystemConfig cfg = base_cfg();
  cfg.n_devices = 200;
  cfg.n_antennas = 8;
  Rng rng(123);
  Scenario sc = generate_scenario(cfg, rng);

  for (int n = 0; n < cfg.n_devices; ++n) {
    bool has_channel = sc.channels.row(n).norm() > 0.0;
    CHECK(has_channel == (sc.activity[n] == 1));
  }
  double resid = (sc.observation - sc.transmit * sc.channels - sc.noise).norm();
  CHECK(resid <= 1e-10 * sc.observation.norm());
}

TEST_CASE("scenario activity count matches binomial mean") {
  SystemConfig cfg = base_cfg();
  cfg.n_antennas = 2;
  cfg.data_len = 10;
  long total = 0;
  const int draws = 200;
  for (int d = 0; d < draws; ++d) {
    Rng rng(1000 + d);
    Scenario sc = generate_scenario(cfg, rng);
    total += sc.activity.sum();
  }
  const double mean = static_cast<double>(total) / draws;
  // 3 sigma band for the mean of `draws` Binomial(1000, 0.05) draws
  const double sd = std::sqrt(1000 * 0.05 * 0.95 / draws);
  CHECK(mean > 50.0 - 3.0 * sd);
  CHECK(mean < 50.0 + 3.0 * sd);
}

TEST_CASE("scenario power calibration") {
  SystemConfig cfg = base_cfg();
  cfg.n_devices = 2000;
  cfg.n_antennas = 32;
  Rng rng(5);
  Scenario sc = generate_scenario(cfg, rng);
  const int L = cfg.seq_len();

  double pilot_acc = 0.0;
  for (int l = 0; l < cfg.pilot_len; ++l)
    for (int n = 0; n < cfg.n_devices; ++n) pilot_acc += std::norm(sc.transmit(l, n));
  const double n_pilot = double(cfg.pilot_len) * cfg.n_devices;
  CHECK(pilot_acc / n_pilot ==
        doctest::Approx(1.0 / L).epsilon(3.0 / std::sqrt(n_pilot)));

  double ch_acc = 0.0;
  long ch_n = 0;
  for (int n = 0; n < cfg.n_devices; ++n) {
    if (!sc.activity[n]) continue;
    ch_acc += sc.channels.row(n).squaredNorm();
    ch_n += cfg.n_antennas;
  }
  CHECK(ch_acc / ch_n == doctest::Approx(1.0).epsilon(3.0 / std::sqrt(double(ch_n))));
}

TEST_CASE("scenario determinism") {
  SystemConfig cfg = base_cfg();
  cfg.n_devices = 100;
  cfg.n_antennas = 4;
  Rng ra(77), rb(77);
  Scenario a = generate_scenario(cfg, ra);
  Scenario b = generate_scenario(cfg, rb);
  CHECK((a.observation - b.observation).norm() == 0.0);
  CHECK((a.transmit - b.transmit).norm() == 0.0);
  CHECK((a.activity - b.activity).cwiseAbs().sum() == 0);
}

TEST_CASE("discrete transmit symbols come from the scaled constellation") {
  SystemConfig cfg = base_cfg();
  cfg.n_devices = 50;
  cfg.n_antennas = 4;
  cfg.signal_prior = SignalPrior::Discrete;
  cfg.alphabet = make_constellation("qpsk");
  Rng rng(11);
  Scenario sc = generate_scenario(cfg, rng);
  const int L = cfg.seq_len();
  const double scale = 1.0 / std::sqrt(double(L));
  for (int l = cfg.pilot_len; l < L; ++l) {
    double best = 1e9;
    for (const cplx& s : cfg.alphabet)
      best = std::min(best, std::abs(sc.transmit(l, 0) - s * scale));
    CHECK(best < 1e-14);
  }
}

TEST_CASE("constellations have unit average power") {
  for (const char* name : {"qpsk", "8psk", "16qam"}) {
    auto pts = make_constellation(name);
    double p = 0.0;
    for (const cplx& s : pts) p += std::norm(s);
    CHECK(p / pts.size() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS(make_constellation("64apsk"));
}

TEST_CASE("config validation rejects bad inputs") {
  SystemConfig cfg = base_cfg();
  cfg.activity_prob = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = base_cfg();
  cfg.data_len = 7;  // not a codeword multiple
  CHECK_THROWS(cfg.validate());
  cfg = base_cfg();
  cfg.path_loss = {1.0, 2.0};  // wrong length
  CHECK_THROWS(cfg.validate());
  cfg = base_cfg();
  cfg.signal_prior = SignalPrior::Discrete;
  cfg.alphabet.clear();
  CHECK_THROWS(cfg.validate());
}
