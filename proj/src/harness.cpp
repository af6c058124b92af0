#include "nrstream/harness.hpp"

#include <atomic>
#include <chrono>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "nrstream/dec_general.hpp"
#include "nrstream/dec_linear.hpp"
#include "nrstream/errors.hpp"
#include "nrstream/rm_ldc.hpp"

namespace nrstream {

Rational signed_confidence(std::uint64_t value, std::uint64_t truth,
                           const Rational& conf) {
  return value == truth ? conf : -conf;
}

ResolvedAlgorithm make_algorithm(const ExperimentConfig& cfg) {
  const std::uint64_t n = cfg.sp.n;
  ResolvedAlgorithm out;
  if (cfg.algorithm == "parity") {
    out.has_linear = true;
    out.linear = parity_linear(n);
  } else if (cfg.algorithm == "dot") {
    if (cfg.y.size() != n) {
      throw usage_error("dot weights must match the input length");
    }
    out.has_linear = true;
    out.linear = dot_product_linear(cfg.y);
  } else if (cfg.algorithm == "sum") {
    if (cfg.modulus < 2) throw usage_error("sum needs a modulus of at least 2");
    out.has_linear = true;
    out.linear = sum_linear(n, cfg.modulus);
  } else if (cfg.algorithm == "count") {
    out.general = counter_algorithm(n);
  } else if (cfg.algorithm == "index") {
    if (cfg.idx_bits < 1 || cfg.idx_bits > 32) {
      throw usage_error("index needs between 1 and 32 index bits");
    }
    out.general = index_algorithm(cfg.idx_bits, cfg.target);
  } else if (cfg.algorithm == "dfa") {
    out.general = dfa_algorithm();
  } else {
    throw usage_error("unknown algorithm id: " + cfg.algorithm);
  }
  if (out.has_linear) out.general = lift_linear(out.linear);
  return out;
}

std::uint64_t experiment_oracle(const ExperimentConfig& cfg,
                                const ResolvedAlgorithm& alg) {
  if (cfg.sp.mode == Mode::linear) {
    return partial_sum(alg.linear, 0, cfg.sp.n, cfg.x);
  }
  return run_noiseless(alg.general, cfg.x);
}

void ExperimentConfig::validate() const {
  sp.validate();
  if (x.size() != sp.n) throw usage_error("input length must equal n");
  if (trials < 1) throw usage_error("an experiment needs at least one trial");
  if (channels.empty()) throw usage_error("an experiment needs a channel");
  if (rhos.empty()) throw usage_error("an experiment needs a rho sweep");
  if (jobs < 1) throw usage_error("jobs must be at least 1");
  for (const ChannelDesc& ch : channels) {
    const Rational cap = Rational(1, 4) - ch.extras.eps_budget;
    for (const Rational& rho : rhos) {
      if (rho.negative() || Rational(1) < rho) {
        throw usage_error("rho must lie in [0, 1]");
      }
      if (cap < rho && !allow_over_budget) {
        throw config_error("rho " + rho.str() +
                           " exceeds the channel budget; pass the over-budget "
                           "flag to explore failure curves");
      }
    }
  }
  // The resolved algorithm must exist in the requested mode.
  ResolvedAlgorithm alg = make_algorithm(*this);
  if (sp.mode == Mode::linear && !alg.has_linear) {
    throw config_error("algorithm " + algorithm + " has no linear form");
  }
}

namespace {

// Geometry defaults a channel descriptor may leave to the stream shape.
PatternExtras fill_extras(const ChannelDesc& ch, const ExperimentConfig& cfg,
                          const Ldc& ldc) {
  PatternExtras ex = ch.extras;
  if (ex.copy_len == 0) ex.copy_len = ldc.codeword_bits();
  if (ex.inner_len == 0) ex.inner_len = cfg.sp.ldc.inner_len();
  if (cfg.allow_over_budget) ex.budget_check = false;
  return ex;
}

struct TrialTask {
  std::size_t slot;
  std::size_t channel;
  std::size_t rho;
  std::uint64_t trial;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ResolvedAlgorithm alg = make_algorithm(cfg);

  Ldc master(cfg.sp.ldc);
  const BitVec word = master.encode(cfg.x);
  const std::uint64_t copies = cfg.sp.copies();
  const std::uint64_t m_len = cfg.sp.m_len();

  ExperimentResult result;
  result.oracle = experiment_oracle(cfg, alg);

  std::vector<TrialTask> tasks;
  tasks.reserve(cfg.channels.size() * cfg.rhos.size() * cfg.trials);
  for (std::size_t c = 0; c < cfg.channels.size(); ++c) {
    for (std::size_t ri = 0; ri < cfg.rhos.size(); ++ri) {
      for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        tasks.push_back({tasks.size(), c, ri, t});
      }
    }
  }
  result.records.resize(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    // Each worker gets its own decoder tables; the codeword is shared.
    Ldc ldc(cfg.sp.ldc);
    for (;;) {
      const std::size_t at = next.fetch_add(1);
      if (at >= tasks.size()) return;
      const TrialTask& task = tasks[at];
      const ChannelDesc& ch = cfg.channels[task.channel];
      const Rational rho = cfg.rhos[task.rho];

      TrialRecord rec;
      rec.channel = ch.kind;
      rec.rho = rho;
      rec.trial = task.trial;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        auto pattern =
            make_pattern(ch.kind, rho, m_len,
                         cfg.channel_seed + task.trial * cfg.channel_stride,
                         fill_extras(ch, cfg, ldc));
        auto base = std::make_unique<RepeatedStream>(word, copies);
        CorruptedStream bs(std::move(base), std::move(pattern));
        Rng rng(cfg.decoder_seed + task.trial * cfg.decoder_stride);
        RunReport rep = cfg.sp.mode == Mode::linear
                            ? run_linear(alg.linear, bs, cfg.sp, ldc, rng)
                            : run_general(alg.general, bs, cfg.sp, ldc, rng);
        rec.success = rep.value == result.oracle;
        rec.conf = rep.conf;
        rec.signed_conf = signed_confidence(rep.value, result.oracle, rep.conf);
        rec.peak_registers = rep.peak_registers;
        rec.peak_collected = rep.peak_collected;
        rec.bits_read = rep.bits_read;
      } catch (const infra_error& e) {
        rec.infra = true;
        rec.note = e.what();
      }
      rec.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      result.records[task.slot] = std::move(rec);
    }
  };

  const unsigned nworkers =
      unsigned(std::min<std::size_t>(cfg.jobs, tasks.size()));
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nworkers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  // Pure fold over the fixed record order: one row per (channel, rho).
  for (std::size_t c = 0; c < cfg.channels.size(); ++c) {
    for (std::size_t ri = 0; ri < cfg.rhos.size(); ++ri) {
      AggregateRow row;
      row.channel = cfg.channels[c].kind;
      row.rho = cfg.rhos[ri];
      Rational conf_sum{0};
      const std::size_t base = (c * cfg.rhos.size() + ri) * cfg.trials;
      for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        const TrialRecord& rec = result.records[base + t];
        if (rec.infra) continue;
        row.trials += 1;
        row.successes += rec.success ? 1 : 0;
        conf_sum += rec.conf;
        if (rec.peak_registers > row.peak_registers_max) {
          row.peak_registers_max = rec.peak_registers;
        }
        if (rec.bits_read > row.bits_read) row.bits_read = rec.bits_read;
      }
      if (row.trials > 0) {
        row.mean_conf = conf_sum / Rational(std::int64_t(row.trials));
      }
      result.aggregates.push_back(std::move(row));
    }
  }
  return result;
}

void write_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << "channel,rho_num,rho_den,trials,successes,mean_conf_num,mean_conf_den,"
        "peak_registers_max,bits_read\n";
  for (const AggregateRow& row : rows) {
    os << channel_kind_name(row.channel) << ',' << row.rho.num << ','
       << row.rho.den << ',' << row.trials << ',' << row.successes << ','
       << row.mean_conf.num << ',' << row.mean_conf.den << ','
       << row.peak_registers_max << ',' << row.bits_read << '\n';
  }
}

std::string csv_string(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

}  // namespace nrstream
