#include "bigamp/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "bigamp/model.hpp"

namespace bga {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int as_int(const ordered_json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw std::invalid_argument("config key '" + key + "' must be an integer");
  return v.get<int>();
}

double as_double(const ordered_json& v, const std::string& key) {
  if (!v.is_number())
    throw std::invalid_argument("config key '" + key + "' must be a number");
  return v.get<double>();
}

void apply_axis(SystemConfig& cfg, const std::string& name, double value) {
  auto as_whole = [&](int lo) {
    if (value != std::floor(value) || value < lo)
      throw std::invalid_argument("sweep axis '" + name + "': invalid value");
    return static_cast<int>(value);
  };
  if (name == "pilot_len") cfg.pilot_len = as_whole(1);
  else if (name == "data_len") cfg.data_len = as_whole(0);
  else if (name == "n_antennas") cfg.n_antennas = as_whole(1);
  else if (name == "n_devices") cfg.n_devices = as_whole(1);
  else if (name == "codeword_len") cfg.codeword_len = as_whole(1);
  else if (name == "codebook_size") cfg.codebook_size = as_whole(2);
  else if (name == "activity_prob") cfg.activity_prob = value;
  else if (name == "snr_db") cfg.snr_db = value;
  else throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

const char* kResultColumns =
    "trial,seed,converged,iterations,runtime_ms,dad_error,n_false_alarm,"
    "n_miss,ce_mse,ser,theory_dad_error,theory_mse_limit,theory_ser_bound,"
    "theory_tau_star";

std::string na_or(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("NA");
}

std::string result_header(const ExperimentSpec& spec) {
  std::string h;
  for (const auto& ax : spec.axes) h += ax.name + ",";
  return h + kResultColumns;
}

std::string result_row(const SweepPoint& pt, int trial, const TrialRecord& rec,
                       const TheoryPoint& th) {
  std::ostringstream os;
  for (const auto& [name, value] : pt.params) os << format_double(value) << ',';
  os << trial << ',' << rec.seed << ',' << (rec.converged ? 1 : 0) << ','
     << rec.iterations << ',' << format_double(rec.runtime_ms) << ','
     << format_double(rec.dad_error) << ',' << rec.n_false_alarm << ','
     << rec.n_miss << ',' << na_or(rec.ce_mse) << ',' << na_or(rec.ser) << ','
     << na_or(th.dad_error) << ',' << na_or(th.mse_limit) << ','
     << na_or(th.ser_bound_value) << ','
     << (th.fixed_point ? format_double(th.tau_star) : std::string("NA"));
  return os.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "simulate") return RunMode::Simulate;
  if (s == "sweep") return RunMode::Sweep;
  if (s == "theory") return RunMode::Theory;
  if (s == "compare") return RunMode::Compare;
  throw std::invalid_argument("unknown mode: " + s);
}

ExperimentSpec parse_experiment_spec(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config root must be an object");

  ExperimentSpec spec;
  std::string prior_name = "gaussian_codebook";
  for (const auto& [key, value] : j.items()) {
    if (key == "n_devices") spec.base.n_devices = as_int(value, key);
    else if (key == "n_antennas") spec.base.n_antennas = as_int(value, key);
    else if (key == "pilot_len") spec.base.pilot_len = as_int(value, key);
    else if (key == "data_len") spec.base.data_len = as_int(value, key);
    else if (key == "activity_prob") spec.base.activity_prob = as_double(value, key);
    else if (key == "snr_db") spec.base.snr_db = as_double(value, key);
    else if (key == "path_loss") spec.base.path_loss = value.get<std::vector<double>>();
    else if (key == "codeword_len") spec.base.codeword_len = as_int(value, key);
    else if (key == "codebook_size") spec.base.codebook_size = as_int(value, key);
    else if (key == "signal_prior") prior_name = value.get<std::string>();
    else if (key == "seed") spec.base_seed = value.get<std::uint64_t>();
    else if (key == "n_trials") spec.n_trials = as_int(value, key);
    else if (key == "mode") spec.mode = run_mode_from_string(value.get<std::string>());
    else if (key == "sweep") {
      if (!value.is_object())
        throw std::invalid_argument("config key 'sweep' must be an object");
      for (const auto& [axis, vals] : value.items()) {
        if (!vals.is_array() || vals.empty())
          throw std::invalid_argument("sweep axis '" + axis +
                                      "' must be a nonempty array");
        SweepAxis ax{axis, vals.get<std::vector<double>>()};
        spec.axes.push_back(std::move(ax));
      }
    } else if (key == "algorithm") {
      if (!value.is_object())
        throw std::invalid_argument("config key 'algorithm' must be an object");
      for (const auto& [ak, av] : value.items()) {
        if (ak == "t_max") spec.algo.t_max = as_int(av, ak);
        else if (ak == "kappa") spec.algo.kappa = as_double(av, ak);
        else if (ak == "damp_init") spec.algo.damp_init = as_double(av, ak);
        else if (ak == "damp_min") spec.algo.damp_min = as_double(av, ak);
        else if (ak == "damp_shrink") spec.algo.damp_shrink = as_double(av, ak);
        else if (ak == "damp_grow") spec.algo.damp_grow = as_double(av, ak);
        else throw std::invalid_argument("unknown algorithm key '" + ak + "'");
      }
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }

  spec.base.signal_prior = signal_prior_from_string(prior_name);
  if (spec.base.signal_prior == SignalPrior::Discrete)
    spec.base.alphabet = make_constellation(prior_name);
  if (spec.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  spec.base.seed = spec.base_seed;

  // fail fast on an invalid grid instead of midway through a sweep
  for (const auto& pt : enumerate_points(spec)) pt.cfg.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_spec(ss.str());
}

std::vector<SweepPoint> enumerate_points(const ExperimentSpec& spec) {
  std::vector<SweepPoint> points;
  SweepPoint base;
  base.cfg = spec.base;
  points.push_back(base);
  for (const auto& ax : spec.axes) {
    std::vector<SweepPoint> grown;
    grown.reserve(points.size() * ax.values.size());
    for (const auto& pt : points) {
      for (double v : ax.values) {
        SweepPoint next = pt;
        next.params.emplace_back(ax.name, v);
        apply_axis(next.cfg, ax.name, v);
        grown.push_back(std::move(next));
      }
    }
    points = std::move(grown);
  }
  return points;
}

std::uint64_t point_hash(const SweepPoint& pt) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& [name, value] : pt.params) {
    h = mix_seed(h, fnv1a(name));
    h = mix_seed(h, hash_double(value));
  }
  return h;
}

std::uint64_t trial_seed(std::uint64_t base_seed, const SweepPoint& pt, int trial) {
  return mix_seed(mix_seed(base_seed, point_hash(pt)),
                  static_cast<std::uint64_t>(trial));
}

Priors priors_from_config(const SystemConfig& cfg, double sigma2) {
  Priors p;
  p.epsilon = cfg.activity_prob;
  p.beta.resize(cfg.n_devices);
  for (int n = 0; n < cfg.n_devices; ++n) p.beta[n] = cfg.path_loss_of(n);
  p.sigma2 = sigma2;
  p.signal_prior = cfg.signal_prior;
  p.pilot_len = cfg.pilot_len;
  if (cfg.signal_prior == SignalPrior::Discrete) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.seq_len()));
    p.alphabet.reserve(cfg.alphabet.size());
    for (const cplx& s : cfg.alphabet) p.alphabet.push_back(s * scale);
  }
  return p;
}

TheoryPoint compute_theory(const SystemConfig& cfg) {
  SeParams params;
  params.K_eff = cfg.activity_prob * cfg.n_devices;
  params.L = cfg.seq_len();
  params.M = cfg.n_antennas;
  params.beta_bar = cfg.mean_path_loss();
  params.sigma2 = sigma2_from_snr(cfg);

  TheoryPoint tp;
  tp.trace = run_se(params, default_se_init(params));
  tp.fixed_point = tp.trace.fixed_point;
  const SeRecord& last = tp.trace.records.back();
  tp.tau_star = last.tau;
  tp.vr_star = last.vr;
  tp.vq_star = last.vq;
  const ConvergenceCondition cc = convergence_condition(params, last.vr, last.vq);
  tp.c1 = cc.c1;
  tp.c2 = cc.c2;
  tp.L_ok = cc.L_ok;
  tp.M_ok = cc.M_ok;

  if (tp.fixed_point) {
    tp.dad_error = dad_error_prob(params.M, last.vr, params.beta_bar,
                                  cfg.activity_prob);
    tp.mse_limit = ce_mse_limit(params.beta_bar, last.vr);
    const double va_star = last.vq / (1.0 + params.L * last.vq);
    if (cfg.signal_prior == SignalPrior::GaussianCodebook) {
      tp.ser_bound_value =
          ser_bound(0.5, cfg.codeword_len, cfg.codebook_size, params.L, va_star);
    } else if (cfg.signal_prior == SignalPrior::Discrete) {
      tp.ser_bound_value =
          ser_bound(0.5, 1, static_cast<int>(cfg.alphabet.size()), params.L, va_star);
    }
  }
  return tp;
}

TrialRecord run_trial(const SystemConfig& cfg, const BigampConfig& algo,
                      std::uint64_t seed, bool timing) {
  Rng rng(seed);
  const Scenario sc = generate_scenario(cfg, rng);
  const Priors priors = priors_from_config(cfg, sc.sigma2);
  const MatC pilots = sc.transmit.topRows(cfg.pilot_len);

  const auto t0 = std::chrono::steady_clock::now();
  const BigampResult res = run_bigamp(sc.observation, pilots, priors, algo);
  const auto t1 = std::chrono::steady_clock::now();

  const VecI alpha_hat = detect_activity(res.phi, cfg.activity_prob);
  const DadErrors dad = dad_error_rate(sc.activity, alpha_hat);
  const std::vector<int> correct = correct_detections(sc.activity, alpha_hat);

  TrialRecord rec;
  rec.dad_error = dad.rate;
  rec.n_false_alarm = dad.n_false_alarm;
  rec.n_miss = dad.n_miss;
  rec.ce_mse = ce_mse_empirical(sc.channels, res.X_hat, correct);
  if (cfg.signal_prior != SignalPrior::Gaussian && cfg.data_len > 0)
    rec.ser = ser(sc.transmit, res.A_hat, sc.codebook, cfg.pilot_len, correct);
  rec.iterations = res.iterations;
  rec.converged = res.converged && !res.diverged;
  rec.seed = seed;
  if (timing)
    rec.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rec;
}

TrialRecord genie_mmse_baseline(const Scenario& sc, int pilot_len, const VecD& beta) {
  const int L = static_cast<int>(sc.observation.rows());
  const int M = static_cast<int>(sc.observation.cols());
  const int N = static_cast<int>(sc.activity.size());
  const int Ld = L - pilot_len;

  std::vector<int> active;
  for (int n = 0; n < N; ++n)
    if (sc.activity[n]) active.push_back(n);

  TrialRecord rec;
  rec.converged = true;
  if (active.empty()) return rec;
  const int K = static_cast<int>(active.size());

  MatC A_K(L, K);
  MatC X_K(K, M);
  VecD inv_beta(K);
  for (int k = 0; k < K; ++k) {
    A_K.col(k) = sc.transmit.col(active[k]);
    X_K.row(k) = sc.channels.row(active[k]);
    inv_beta[k] = 1.0 / beta[active[k]];
  }

  MatC gram = A_K.adjoint() * A_K;
  gram.diagonal() += (sc.sigma2 * inv_beta).cast<cplx>();
  const MatC X_hat_K = gram.ldlt().solve(A_K.adjoint() * sc.observation);

  double mse = 0.0;
  for (int k = 0; k < K; ++k) mse += (X_hat_K.row(k) - X_K.row(k)).squaredNorm() / M;
  rec.ce_mse = mse / K;

  if (!sc.codebook.empty() && Ld > 0) {
    MatC gram_a = X_K.conjugate() * X_K.transpose();
    gram_a.diagonal().array() += sc.sigma2 * L;
    const MatC A_data =
        gram_a.ldlt()
            .solve(X_K.conjugate() * sc.observation.bottomRows(Ld).transpose())
            .transpose();  // Ld x K

    MatC A_full = MatC::Zero(L, N);
    for (int k = 0; k < K; ++k)
      A_full.col(active[k]).segment(pilot_len, Ld) = A_data.col(k);
    rec.ser = ser(sc.transmit, A_full, sc.codebook, pilot_len, active);
  }
  return rec;
}

int run_sweep(const ExperimentSpec& spec, const std::string& out_path,
              const SweepOptions& opts) {
  const std::vector<SweepPoint> points = enumerate_points(spec);
  std::vector<TheoryPoint> theory(points.size());
  for (size_t p = 0; p < points.size(); ++p) theory[p] = compute_theory(points[p].cfg);

  const std::string header = result_header(spec);
  const size_t total = points.size() * static_cast<size_t>(spec.n_trials);

  size_t done = 0;
  std::ofstream out;
  if (opts.resume) {
    std::ifstream existing(out_path);
    if (existing) {
      std::string line;
      if (std::getline(existing, line)) {
        if (line != header)
          throw std::runtime_error("resume: existing header does not match");
        while (std::getline(existing, line))
          if (!line.empty()) ++done;
      }
      if (done > total) throw std::runtime_error("resume: file has extra rows");
    }
    out.open(out_path, done > 0 ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    if (done == 0) out << header << '\n' << std::flush;
  } else {
    out.open(out_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << header << '\n' << std::flush;
  }

  int workers = opts.workers > 0
                    ? opts.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;

  std::vector<std::string> rows(total);
  std::vector<char> ready(total, 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<size_t> next_job{done};

  auto worker = [&] {
    for (;;) {
      const size_t j = next_job.fetch_add(1);
      if (j >= total) return;
      const size_t p = j / static_cast<size_t>(spec.n_trials);
      const int trial = static_cast<int>(j % static_cast<size_t>(spec.n_trials));
      const std::uint64_t seed = trial_seed(spec.base_seed, points[p], trial);
      const TrialRecord rec = run_trial(points[p].cfg, spec.algo, seed, opts.timing);
      std::string row = result_row(points[p], trial, rec, theory[p]);
      {
        std::lock_guard lock(mu);
        rows[j] = std::move(row);
        ready[j] = 1;
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);

  int written = 0;
  for (size_t j = done; j < total; ++j) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return ready[j] != 0; });
    std::string row = std::move(rows[j]);
    lock.unlock();
    out << row << '\n' << std::flush;
    ++written;
  }
  for (auto& th : pool) th.join();
  return written;
}

int theory_command(const ExperimentSpec& spec, const std::string& out_path) {
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);

  std::string header;
  for (const auto& ax : spec.axes) header += ax.name + ",";
  header +=
      "t,tau,vp,vr,vq,fixed_point,tau_star,vr_star,vq_star,c1,c2,L_ok,M_ok,"
      "theory_dad_error,theory_mse_limit,theory_ser_bound";
  out << header << '\n';

  int written = 0;
  for (const SweepPoint& pt : enumerate_points(spec)) {
    const TheoryPoint tp = compute_theory(pt.cfg);
    for (const SeRecord& r : tp.trace.records) {
      for (const auto& [name, value] : pt.params) out << format_double(value) << ',';
      out << r.t << ',' << format_double(r.tau) << ',' << format_double(r.vp) << ','
          << format_double(r.vr) << ',' << format_double(r.vq) << ','
          << (tp.fixed_point ? 1 : 0) << ','
          << (tp.fixed_point ? format_double(tp.tau_star) : std::string("NA")) << ','
          << format_double(tp.vr_star) << ',' << format_double(tp.vq_star) << ','
          << format_double(tp.c1) << ',' << format_double(tp.c2) << ','
          << (tp.L_ok ? 1 : 0) << ',' << (tp.M_ok ? 1 : 0) << ','
          << na_or(tp.dad_error) << ',' << na_or(tp.mse_limit) << ','
          << na_or(tp.ser_bound_value) << '\n';
      ++written;
    }
  }
  return written;
}

}  // namespace bga
