#pragma once

#include "bigamp/rng.hpp"
#include "bigamp/types.hpp"

namespace bga {

/// Per-entry complex noise variance from the configured SNR. SNR is the
/// ratio of expected per-antenna received signal power eps*N*beta_bar/L to
/// sigma^2, which keeps the definition independent of M.
double sigma2_from_snr(const SystemConfig& cfg);

/// D codewords of length J with i.i.d. CN(0, 1/L) entries.
std::vector<VecC> generate_codebook(int J, int D, int L, Rng& rng);

Scenario generate_scenario(const SystemConfig& cfg, Rng& rng);

}  // namespace bga
