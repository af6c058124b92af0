// Command-line front end: encode / corrupt / decode / experiment workflows
// plus a parameter echo and a build selftest. Every run prints the fully
// resolved parameter set so any output can be reproduced from its log.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nrstream/channel.hpp"
#include "nrstream/dec_general.hpp"
#include "nrstream/dec_linear.hpp"
#include "nrstream/enc.hpp"
#include "nrstream/errors.hpp"
#include "nrstream/harness.hpp"
#include "nrstream/rm_ldc.hpp"
#include "nrstream/selftest.hpp"

using namespace nrstream;

namespace {

// ---- small parsers ---------------------------------------------------------

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw usage_error("empty rational");
  auto bad = [&] { throw usage_error("cannot parse rational: " + s); };
  auto digits = [&](const std::string& t) -> std::int64_t {
    if (t.empty() || t.size() > 18) bad();
    std::int64_t v = 0;
    for (char c : t) {
      if (c < '0' || c > '9') bad();
      v = v * 10 + (c - '0');
    }
    return v;
  };
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    return Rational(digits(s.substr(0, slash)), digits(s.substr(slash + 1)));
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    const std::string frac = s.substr(dot + 1);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    return Rational(digits(s.substr(0, dot)) * den + digits(frac), den);
  }
  return Rational(digits(s));
}

// Hex literal -> n bits, most significant bit first (0x5 at n=3 is 101).
BitVec parse_hex_bits(std::string s, std::uint64_t n) {
  if (n > 64) {
    throw usage_error("hex literals cover up to 64 bits; use a bits file");
  }
  if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) s = s.substr(2);
  if (s.empty() || s.size() > 16) throw usage_error("bad hex literal");
  std::uint64_t v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else throw usage_error("bad hex literal");
    v = (v << 4) | std::uint64_t(d);
  }
  if (n < 64 && (v >> n) != 0) {
    throw usage_error("hex literal has more than n significant bits");
  }
  BitVec x(n);
  for (std::uint64_t i = 0; i < n; ++i) x.set(i, (v >> (n - 1 - i)) & 1);
  return x;
}

// Text file of 0/1 characters, whitespace ignored.
BitVec parse_bits_file(const std::string& path, std::uint64_t n) {
  std::ifstream in(path);
  if (!in) throw infra_error("cannot open bits file: " + path);
  BitVec x(n);
  std::uint64_t at = 0;
  char c;
  while (in.get(c)) {
    if (c == '0' || c == '1') {
      if (at >= n) throw usage_error("bits file longer than n");
      x.set(at++, c == '1');
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw format_error("bits file holds a character besides 0/1/whitespace");
    }
  }
  if (at != n) throw usage_error("bits file shorter than n");
  return x;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s.size() > 19) throw usage_error("cannot parse integer: " + s);
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw usage_error("cannot parse integer: " + s);
    v = v * 10 + std::uint64_t(c - '0');
  }
  return v;
}

// ---- key=value files -------------------------------------------------------

class KeyValues {
 public:
  KeyValues() = default;

  static KeyValues load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw infra_error("cannot open parameter file: " + path);
    KeyValues kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      auto trim = [](std::string t) {
        auto b = t.find_first_not_of(" \t\r");
        auto e = t.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw format_error(path + ":" + std::to_string(lineno) +
                           ": expected key=value");
      }
      kv.map_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  void finish() const {
    for (const auto& [key, value] : map_) {
      if (!used_.count(key)) {
        throw usage_error("unknown parameter file key: " + key);
      }
    }
  }

 private:
  std::map<std::string, std::string> map_;
  std::set<std::string> used_;
};

// ---- resolved parameters ---------------------------------------------------

// Raw option state: CLI11 writes into the strings, the parameter file fills
// whatever the command line left untouched, and resolve() turns the result
// into validated library types. Keeping everything textual until then makes
// "flags override file values" a one-liner.
struct ParamOpts {
  std::string n, r = "4", ell = "16", T = "4", mode = "linear";
  std::string d, nvars, w, k;
  std::string eps = "1/2", eps_budget = "1/8";
  std::string seed = "1", jobs = "1";
  std::string params_file;

  std::set<std::string> filled;  // slots already taken by an earlier file
  CLI::Option* n_opt = nullptr;

  void add_flags(CLI::App* cmd) {
    n_opt = cmd->add_option("--n", n, "input length (must be r^D)");
    cmd->add_option("--r", r, "recursion branching factor");
    cmd->add_option("--ell", ell, "chunks per recursion level");
    cmd->add_option("--T", T, "amplification rounds");
    cmd->add_option("--mode", mode, "decoder mode: linear|general");
    cmd->add_option("--d", d, "code degree bound override");
    cmd->add_option("--nvars", nvars, "code variable count override");
    cmd->add_option("--w", w, "field width override");
    cmd->add_option("--k", k, "curves per decoded bit");
    cmd->add_option("--eps", eps, "code distance slack (rational)");
    cmd->add_option("--eps-budget", eps_budget,
                    "corruption budget is (1/4 - eps_budget) * stream bits");
    cmd->add_option("--seed", seed, "base seed for all run randomness");
    cmd->add_option("--jobs", jobs, "worker threads for experiments");
    cmd->add_option("--params-file", params_file,
                    "key=value parameter file; flags win");
  }

  // file value only where the command line (or an earlier file) stayed silent
  void merge_file(CLI::App* cmd, KeyValues& kv) {
    auto fill = [&](const char* flag, const char* key, std::string& slot) {
      auto v = kv.take(key);
      if (v && !cmd->count(flag) && !filled.count(flag)) {
        slot = *v;
        filled.insert(flag);
      }
    };
    fill("--n", "n", n);
    fill("--r", "r", r);
    fill("--ell", "ell", ell);
    fill("--T", "T", T);
    fill("--mode", "mode", mode);
    fill("--d", "d", d);
    fill("--nvars", "nvars", nvars);
    fill("--w", "w", w);
    fill("--k", "k", k);
    fill("--eps", "eps", eps);
    fill("--eps-budget", "eps_budget", eps_budget);
    fill("--seed", "seed", seed);
    fill("--jobs", "jobs", jobs);
  }
};

struct Resolved {
  StreamParams sp;
  Rational eps_ldc{1, 2};
  Rational eps_budget{1, 8};
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

Resolved resolve(CLI::App* cmd, ParamOpts& po) {
  if (!po.params_file.empty()) {
    KeyValues kv = KeyValues::load(po.params_file);
    po.merge_file(cmd, kv);
    kv.finish();
  }
  if (po.n.empty()) throw usage_error("--n is required (flag or parameter file)");

  Resolved rv;
  rv.sp.n = std::uint32_t(parse_u64(po.n));
  rv.sp.r = unsigned(parse_u64(po.r));
  rv.sp.ell = unsigned(parse_u64(po.ell));
  rv.sp.T = unsigned(parse_u64(po.T));
  auto mode = mode_from_name(po.mode);
  if (!mode) throw usage_error("mode must be linear or general");
  rv.sp.mode = *mode;
  rv.eps_ldc = parse_rational(po.eps);
  rv.eps_budget = parse_rational(po.eps_budget);
  rv.seed = parse_u64(po.seed);
  rv.jobs = unsigned(parse_u64(po.jobs));

  // depth follows from n = r^D
  if (rv.sp.r < 2) throw config_error("branching factor must be at least 2");
  std::uint64_t span = 1;
  unsigned depth = 0;
  while (span < rv.sp.n) {
    span *= rv.sp.r;
    ++depth;
  }
  rv.sp.D = depth;

  LdcOverrides ov;
  if (!po.d.empty()) ov.d = unsigned(parse_u64(po.d));
  if (!po.nvars.empty()) ov.nvars = unsigned(parse_u64(po.nvars));
  if (!po.w.empty()) ov.w = unsigned(parse_u64(po.w));
  if (!po.k.empty()) ov.k = unsigned(parse_u64(po.k));
  rv.sp.ldc = ldc_setup(rv.sp.n, rv.eps_ldc, ov);
  rv.sp.validate();
  return rv;
}

void echo_params(std::ostream& os, const Resolved& rv) {
  const StreamParams& sp = rv.sp;
  os << "n = " << sp.n << "\n"
     << "r = " << sp.r << "\n"
     << "D = " << sp.D << "\n"
     << "ell = " << sp.ell << "\n"
     << "T = " << sp.T << "\n"
     << "mode = " << mode_name(sp.mode) << "\n"
     << "copies = " << sp.copies() << "\n"
     << "m_len = " << sp.m_len() << "\n"
     << "q = " << sp.ldc.q() << "\n"
     << "w = " << sp.ldc.w() << "\n"
     << "d = " << sp.ldc.d << "\n"
     << "nvars = " << sp.ldc.nvars << "\n"
     << "k = " << sp.ldc.k << "\n"
     << "inner_len = " << sp.ldc.inner_len() << "\n"
     << "codeword_bits = " << sp.ldc.codeword_bits() << "\n"
     << "capacity = " << sp.ldc.capacity() << "\n"
     << "eps = " << rv.eps_ldc.str() << "\n"
     << "eps_budget = " << rv.eps_budget.str() << "\n"
     << "seed = " << rv.seed << "\n";
}

// ---- algorithm flags (decode / experiment) ---------------------------------

struct AlgOpts {
  std::string algorithm = "parity";
  std::string y, modulus = "2", idx_bits = "3", target = "0";

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--algorithm", algorithm,
                    "parity | dot | sum | count | index | dfa");
    cmd->add_option("--y", y, "dot weights as a hex literal");
    cmd->add_option("--modulus", modulus, "sum modulus");
    cmd->add_option("--idx-bits", idx_bits, "index bits per record");
    cmd->add_option("--target", target, "index record to report");
  }

  std::set<std::string> filled;

  void merge_file(CLI::App* cmd, KeyValues& kv) {
    auto fill = [&](const char* flag, const char* key, std::string& slot) {
      auto v = kv.take(key);
      if (v && !cmd->count(flag) && !filled.count(flag)) {
        slot = *v;
        filled.insert(flag);
      }
    };
    fill("--algorithm", "algorithm", algorithm);
    fill("--y", "y", y);
    fill("--modulus", "modulus", modulus);
    fill("--idx-bits", "idx_bits", idx_bits);
    fill("--target", "target", target);
  }

  void apply(ExperimentConfig& cfg) const {
    cfg.algorithm = algorithm;
    if (!y.empty()) cfg.y = parse_hex_bits(y, cfg.sp.n);
    cfg.modulus = parse_u64(modulus);
    cfg.idx_bits = unsigned(parse_u64(idx_bits));
    cfg.target = parse_u64(target);
  }
};

// ---- subcommands -----------------------------------------------------------

int cmd_params(const Resolved& rv) {
  echo_params(std::cout, rv);
  return 0;
}

int cmd_encode(const Resolved& rv, const std::string& x_hex,
               const std::string& x_file, const std::string& out) {
  if (out.empty()) throw usage_error("encode needs --out");
  if (x_hex.empty() == x_file.empty()) {
    throw usage_error("encode needs exactly one of --x / --x-file");
  }
  echo_params(std::cout, rv);
  BitVec x = x_hex.empty() ? parse_bits_file(x_file, rv.sp.n)
                           : parse_hex_bits(x_hex, rv.sp.n);
  StoredStream s{rv.sp, encode_stream(x, rv.sp)};
  write_stream_file(out, s);
  std::printf("stream_bits = %llu\n", (unsigned long long)s.bits.size());
  std::printf("payload_crc32 = %08x\n",
              crc32(reinterpret_cast<const std::uint8_t*>(s.bits.words()),
                    s.bits.num_words() * 8));
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_corrupt(const std::string& in, const std::string& out,
                const std::string& pattern_out, const std::string& channel,
                const std::string& rho_s, std::uint64_t seed,
                const std::string& eps_budget_s,
                const std::string& target_symbol,
                const std::vector<std::uint64_t>& target_copies,
                const std::vector<std::uint64_t>& flips) {
  if (in.empty() || out.empty()) throw usage_error("corrupt needs --in and --out");
  auto kind = channel_kind_from_name(channel);
  if (!kind) throw usage_error("unknown channel: " + channel);

  StoredStream s = read_stream_file(in);
  Rational rho = parse_rational(rho_s);

  PatternExtras ex;
  ex.eps_budget = parse_rational(eps_budget_s);
  ex.copy_len = s.params.ldc.codeword_bits();
  ex.inner_len = unsigned(s.params.ldc.inner_len());
  if (!target_symbol.empty()) ex.target_symbol = parse_u64(target_symbol);
  ex.target_copies = target_copies;
  ex.flips = flips;

  CorruptionPattern pattern =
      make_pattern(*kind, rho, s.bits.size(), seed, ex);
  StoredStream corrupted{s.params, apply_pattern(s.bits, pattern)};
  write_stream_file(out, corrupted);
  if (!pattern_out.empty()) write_pattern_file(pattern_out, pattern);

  std::printf("channel = %s\n", channel_kind_name(*kind));
  std::printf("rho = %s\n", rho.str().c_str());
  std::printf("seed = %llu\n", (unsigned long long)seed);
  std::printf("weight = %llu\n", (unsigned long long)pattern.weight());
  std::printf("weight_fraction = %s\n", pattern.weight_fraction().str().c_str());
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_decode(const std::string& in, const AlgOpts& ao, std::uint64_t seed) {
  if (in.empty()) throw usage_error("decode needs --in");
  StoredStream s = read_stream_file(in);

  ExperimentConfig cfg;  // borrowed as the algorithm-flag carrier
  cfg.sp = s.params;
  ao.apply(cfg);
  ResolvedAlgorithm alg = make_algorithm(cfg);
  if (cfg.sp.mode == Mode::linear && !alg.has_linear) {
    throw config_error("algorithm " + cfg.algorithm + " has no linear form");
  }

  Resolved rv;
  rv.sp = cfg.sp;
  rv.seed = seed;
  echo_params(std::cout, rv);
  std::printf("algorithm = %s\n", cfg.algorithm.c_str());

  BufferBitStream bs(s.bits);
  Rng rng(seed);
  RunReport rep = cfg.sp.mode == Mode::linear
                      ? run_linear(alg.linear, bs, cfg.sp, rng)
                      : run_general(alg.general, bs, cfg.sp, rng);

  std::printf("value = %llu\n", (unsigned long long)rep.value);
  std::printf("conf = %s\n", rep.conf.str().c_str());
  std::printf("bits_read = %llu\n", (unsigned long long)rep.bits_read);
  std::printf("copies_decoded = %llu\n", (unsigned long long)rep.copies_decoded);
  std::printf("peak_registers = %llu\n", (unsigned long long)rep.peak_registers);
  std::printf("peak_collected = %llu\n", (unsigned long long)rep.peak_collected);
  return 0;  // completion, not correctness: the decoder never sees the truth
}

int cmd_experiment(const std::string& config_path, CLI::App* cmd,
                   ParamOpts& po, AlgOpts& ao, const std::string& trials_s,
                   const std::string& out, const std::string& records_out) {
  if (config_path.empty()) throw usage_error("experiment needs --config");
  if (!po.params_file.empty()) {
    // a separate parameter file outranks the experiment config
    KeyValues pf = KeyValues::load(po.params_file);
    po.merge_file(cmd, pf);
    pf.finish();
    po.params_file.clear();
  }
  KeyValues kv = KeyValues::load(config_path);
  po.merge_file(cmd, kv);
  ao.merge_file(cmd, kv);

  // experiment-only keys
  auto x_hex = kv.take("x");
  auto channels_s = kv.take("channels");
  auto rhos_s = kv.take("rhos");
  auto trials_file = kv.take("trials");
  auto dec_seed = kv.take("decoder_seed");
  auto dec_stride = kv.take("decoder_stride");
  auto ch_seed = kv.take("channel_seed");
  auto ch_stride = kv.take("channel_stride");
  auto over_budget = kv.take("allow_over_budget");
  auto target_symbol = kv.take("target_symbol");
  auto target_copies = kv.take("target_copies");
  kv.finish();

  Resolved rv = resolve(cmd, po);

  ExperimentConfig cfg;
  cfg.sp = rv.sp;
  ao.apply(cfg);
  if (!x_hex) throw usage_error("experiment config needs x (hex literal)");
  cfg.x = parse_hex_bits(*x_hex, cfg.sp.n);

  if (!channels_s) throw usage_error("experiment config needs channels");
  for (const std::string& name : split_list(*channels_s)) {
    auto kind = channel_kind_from_name(name);
    if (!kind) throw usage_error("unknown channel: " + name);
    ChannelDesc desc;
    desc.kind = *kind;
    desc.extras.eps_budget = rv.eps_budget;
    if (target_symbol) desc.extras.target_symbol = parse_u64(*target_symbol);
    if (target_copies) {
      for (const std::string& c : split_list(*target_copies)) {
        desc.extras.target_copies.push_back(parse_u64(c));
      }
    }
    cfg.channels.push_back(std::move(desc));
  }

  if (!rhos_s) throw usage_error("experiment config needs rhos");
  for (const std::string& r : split_list(*rhos_s)) {
    cfg.rhos.push_back(parse_rational(r));
  }

  cfg.trials = cmd->count("--trials") ? parse_u64(trials_s)
               : trials_file          ? parse_u64(*trials_file)
                                      : parse_u64(trials_s);
  cfg.decoder_seed = cmd->count("--seed") ? rv.seed
                     : dec_seed           ? parse_u64(*dec_seed)
                                          : rv.seed;
  if (dec_stride) cfg.decoder_stride = parse_u64(*dec_stride);
  if (ch_seed) cfg.channel_seed = parse_u64(*ch_seed);
  if (ch_stride) cfg.channel_stride = parse_u64(*ch_stride);
  if (over_budget) {
    cfg.allow_over_budget = *over_budget == "1" || *over_budget == "true";
  }
  cfg.jobs = rv.jobs;

  echo_params(std::cerr, rv);
  std::fprintf(stderr, "algorithm = %s\n", cfg.algorithm.c_str());
  std::fprintf(stderr, "trials = %llu\n", (unsigned long long)cfg.trials);

  ExperimentResult res = run_experiment(cfg);
  std::fprintf(stderr, "oracle = %llu\n", (unsigned long long)res.oracle);

  const std::string csv = csv_string(res.aggregates);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw infra_error("cannot open output file: " + out);
    os << csv;
  }

  if (!records_out.empty()) {
    std::ofstream os(records_out, std::ios::binary);
    if (!os) throw infra_error("cannot open records file: " + records_out);
    os << "channel,rho_num,rho_den,trial,success,infra,conf_num,conf_den,"
          "signed_conf_num,signed_conf_den,peak_registers,bits_read\n";
    for (const TrialRecord& rec : res.records) {
      os << channel_kind_name(rec.channel) << ',' << rec.rho.num << ','
         << rec.rho.den << ',' << rec.trial << ',' << (rec.success ? 1 : 0)
         << ',' << (rec.infra ? 1 : 0) << ',' << rec.conf.num << ','
         << rec.conf.den << ',' << rec.signed_conf.num << ','
         << rec.signed_conf.den << ',' << rec.peak_registers << ','
         << rec.bits_read << '\n';
    }
  }
  return 0;
}

int cmd_selftest(std::uint64_t mutation_seed) {
  SelftestReport rep = run_selftest(mutation_seed);
  for (const SelftestCheck& c : rep.checks) {
    if (c.ok) {
      std::printf("[ ok ] %s\n", c.name.c_str());
    } else {
      std::printf("[FAIL] %s: %s\n", c.name.c_str(), c.detail.c_str());
    }
  }
  std::printf(rep.ok() ? "selftest passed\n" : "selftest FAILED\n");
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noise-resilient streaming transform"};
  app.require_subcommand(1);

  auto* params = app.add_subcommand("params", "echo the resolved parameter set");
  ParamOpts params_po;
  params_po.add_flags(params);

  auto* encode = app.add_subcommand("encode", "encode an input into a stream file");
  ParamOpts encode_po;
  encode_po.add_flags(encode);
  std::string enc_x, enc_x_file, enc_out;
  encode->add_option("--x", enc_x, "input bits as a hex literal");
  encode->add_option("--x-file", enc_x_file, "input bits file (0/1 text)");
  encode->add_option("--out", enc_out, "stream file to write");

  auto* corrupt = app.add_subcommand("corrupt", "apply a corruption pattern");
  std::string cor_in, cor_out, cor_pattern, cor_channel = "random";
  std::string cor_rho = "0", cor_eps_budget = "1/8", cor_target_symbol;
  std::uint64_t cor_seed = 1;
  std::vector<std::uint64_t> cor_copies, cor_flips;
  corrupt->add_option("--in", cor_in, "stream file to corrupt");
  corrupt->add_option("--out", cor_out, "corrupted stream file");
  corrupt->add_option("--pattern-out", cor_pattern, "pattern descriptor file");
  corrupt->add_option("--channel", cor_channel,
                      "random | prefix_burst | copy_targeted | symbol_targeted "
                      "| periodic | explicit_list");
  corrupt->add_option("--rho", cor_rho, "corruption rate (rational)");
  corrupt->add_option("--seed", cor_seed, "channel seed");
  corrupt->add_option("--eps-budget", cor_eps_budget,
                      "budget is (1/4 - eps_budget) * stream bits");
  corrupt->add_option("--target-symbol", cor_target_symbol,
                      "outer symbol for symbol_targeted");
  corrupt->add_option("--target-copy", cor_copies,
                      "codeword copy index for copy_targeted (repeatable)");
  corrupt->add_option("--flip", cor_flips,
                      "explicit bit position for explicit_list (repeatable)");

  auto* decode = app.add_subcommand("decode", "decode a stream file");
  std::string dec_in;
  std::uint64_t dec_seed = 1;
  AlgOpts dec_ao;
  decode->add_option("--in", dec_in, "stream file to decode");
  decode->add_option("--seed", dec_seed, "decoder seed");
  dec_ao.add_flags(decode);

  auto* experiment = app.add_subcommand("experiment", "run a channel sweep, CSV out");
  ParamOpts exp_po;
  exp_po.add_flags(experiment);
  AlgOpts exp_ao;
  exp_ao.add_flags(experiment);
  std::string exp_config, exp_trials = "1", exp_out, exp_records;
  experiment->add_option("--config", exp_config, "experiment config (key=value)");
  experiment->add_option("--trials", exp_trials, "trials per (channel, rho)");
  experiment->add_option("--out", exp_out, "CSV file (default stdout)");
  experiment->add_option("--records", exp_records, "per-trial records CSV");

  auto* selftest = app.add_subcommand("selftest", "run the build sanity suites");
  std::uint64_t mutate_seed = 0;
  selftest->add_option("--mutate", mutate_seed,
                       "corrupt one field product to prove the checks bite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // flag mistakes are usage errors
  }

  try {
    if (params->parsed()) return cmd_params(resolve(params, params_po));
    if (encode->parsed()) {
      return cmd_encode(resolve(encode, encode_po), enc_x, enc_x_file, enc_out);
    }
    if (corrupt->parsed()) {
      return cmd_corrupt(cor_in, cor_out, cor_pattern, cor_channel, cor_rho,
                         cor_seed, cor_eps_budget, cor_target_symbol,
                         cor_copies, cor_flips);
    }
    if (decode->parsed()) return cmd_decode(dec_in, dec_ao, dec_seed);
    if (experiment->parsed()) {
      return cmd_experiment(exp_config, experiment, exp_po, exp_ao, exp_trials,
                            exp_out, exp_records);
    }
    if (selftest->parsed()) return cmd_selftest(mutate_seed);
  } catch (const usage_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const format_error& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return 3;
  } catch (const config_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 4;
  } catch (const infra_error& e) {
    std::fprintf(stderr, "infrastructure error: %s\n", e.what());
    return 5;
  }
  return 0;
}
