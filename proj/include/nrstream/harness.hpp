#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nrstream/channel.hpp"
#include "nrstream/dec_common.hpp"
#include "nrstream/enc.hpp"
#include "nrstream/rational.hpp"
#include "nrstream/stream_model.hpp"

namespace nrstream {

// Ground-truth-aware diagnostic: +conf when the verdict matches the truth,
// -conf when it does not. Only meaningful where an oracle exists.
Rational signed_confidence(std::uint64_t value, std::uint64_t truth,
                           const Rational& conf);

// One corruption channel to sweep. Geometry fields left at zero (copy_len,
// inner_len) are filled in from the stream parameters before use.
struct ChannelDesc {
  ChannelKind kind = ChannelKind::random;
  PatternExtras extras;
};

// Everything one experiment needs: the stream shape, the algorithm under
// decode, the channel sweep, and the seed plan. Seeds are split so the
// codeword (a pure function of x) never depends on them: trial t decodes
// with decoder_seed + t*decoder_stride and corrupts with
// channel_seed + t*channel_stride, the same pair in every (channel, rho)
// cell so sweeps are coupled.
struct ExperimentConfig {
  StreamParams sp;
  std::string algorithm = "parity";  // parity | dot | sum | count | index | dfa
  BitVec x;
  BitVec y;                    // dot weights, length n
  std::uint64_t modulus = 2;   // sum
  unsigned idx_bits = 3;       // index record = idx_bits + 1 bits
  std::uint64_t target = 0;    // index
  std::vector<ChannelDesc> channels;
  std::vector<Rational> rhos;
  std::uint64_t trials = 1;
  std::uint64_t decoder_seed = 1;
  std::uint64_t decoder_stride = 1;
  std::uint64_t channel_seed = 1;
  std::uint64_t channel_stride = 1;
  bool allow_over_budget = false;  // explore past the channel budget
  unsigned jobs = 1;

  void validate() const;
};

// The algorithm an id resolves to. Linear ids carry both forms: the native
// linear one and its lifted general twin, so the same config can drive
// either decoder.
struct ResolvedAlgorithm {
  bool has_linear = false;
  LinearStreamingAlgorithm linear;
  StreamingAlgorithm general;
};

ResolvedAlgorithm make_algorithm(const ExperimentConfig& cfg);

// What the trials are scored against: the noiseless answer for cfg's mode.
std::uint64_t experiment_oracle(const ExperimentConfig& cfg,
                                const ResolvedAlgorithm& alg);

struct TrialRecord {
  ChannelKind channel = ChannelKind::random;
  Rational rho{0};
  std::uint64_t trial = 0;
  bool success = false;
  bool infra = false;  // trial aborted by infrastructure, not a decode miss
  std::string note;    // infrastructure diagnostic when infra is set
  Rational conf{0};
  Rational signed_conf{0};
  std::uint64_t peak_registers = 0;
  std::uint64_t peak_collected = 0;
  std::uint64_t bits_read = 0;
  double wall_time = 0.0;  // seconds; never part of the CSV
};

// One CSV row: the fold of every completed (non-infra) trial in a
// (channel, rho) cell.
struct AggregateRow {
  ChannelKind channel = ChannelKind::random;
  Rational rho{0};
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  Rational mean_conf{0};
  std::uint64_t peak_registers_max = 0;
  std::uint64_t bits_read = 0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;      // (channel, rho, trial) order
  std::vector<AggregateRow> aggregates;  // one row per (channel, rho)
  std::uint64_t oracle = 0;
};

// Encode once, then decode trials per (channel, rho) cell: corrupt with the
// trial's channel seed, decode with its decoder seed, score against the
// noiseless oracle. Trials run on up to cfg.jobs threads; results land in
// fixed slots so the output never depends on scheduling.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// channel,rho_num,rho_den,trials,successes,mean_conf_num,mean_conf_den,
// peak_registers_max,bits_read — one line per aggregate row.
void write_csv(std::ostream& os, const std::vector<AggregateRow>& rows);
std::string csv_string(const std::vector<AggregateRow>& rows);

}  // namespace nrstream
