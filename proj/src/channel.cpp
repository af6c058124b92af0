#include "nrstream/channel.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "nrstream/errors.hpp"
#include "nrstream/rng.hpp"

namespace nrstream {

namespace {

constexpr std::uint64_t kEagerScanCap = std::uint64_t(1) << 26;
constexpr std::uint64_t kMaterializeCap = std::uint64_t(1) << 28;

std::uint64_t budget_of(std::uint64_t m_len, const Rational& eps_budget) {
  Rational frac = Rational(1, 4) - eps_budget;
  if (frac.negative()) {
    return 0;
  }
  return std::uint64_t((unsigned __int128)frac.num * m_len / frac.den);
}

std::uint64_t rho_threshold(const Rational& rho) {
  // flip iff hash < floor(rho * 2^64); rho = 1 would need 2^64 itself, but
  // the budget cap keeps admissible rho well below that
  if (rho.num >= rho.den) {
    throw config_error("flip probability of 1 is not representable");
  }
  return std::uint64_t(((unsigned __int128)rho.num << 64) / rho.den);
}

}  // namespace

const char* channel_kind_name(ChannelKind k) {
  switch (k) {
    case ChannelKind::random: return "random";
    case ChannelKind::prefix_burst: return "prefix_burst";
    case ChannelKind::copy_targeted: return "copy_targeted";
    case ChannelKind::symbol_targeted: return "symbol_targeted";
    case ChannelKind::periodic: return "periodic";
    case ChannelKind::explicit_list: return "explicit";
  }
  return "?";
}

std::optional<ChannelKind> channel_kind_from_name(std::string_view s) {
  for (ChannelKind k : {ChannelKind::random, ChannelKind::prefix_burst,
                        ChannelKind::copy_targeted, ChannelKind::symbol_targeted,
                        ChannelKind::periodic, ChannelKind::explicit_list}) {
    if (s == channel_kind_name(k)) return k;
  }
  return std::nullopt;
}

CorruptionPattern make_pattern(ChannelKind kind, Rational rho, std::uint64_t m_len,
                               std::uint64_t seed, const PatternExtras& extras) {
  if (m_len < 1) {
    throw usage_error("pattern needs a positive stream length");
  }
  if (rho.negative() || Rational(1) < rho) {
    throw usage_error("flip rate must lie in [0, 1]");
  }
  CorruptionPattern p;
  p.kind_ = kind;
  p.m_len_ = m_len;
  p.seed_ = seed;
  p.rho_ = rho;
  p.extras_ = extras;

  const std::uint64_t budget = budget_of(m_len, extras.eps_budget);
  const bool rho_driven = kind == ChannelKind::random ||
                          kind == ChannelKind::prefix_burst ||
                          kind == ChannelKind::periodic;
  if (extras.budget_check && rho_driven && Rational(1, 4) - extras.eps_budget < rho) {
    throw config_error("flip rate exceeds the corruption budget");
  }

  auto require_copy_len = [&] {
    if (extras.copy_len == 0 || m_len % extras.copy_len != 0) {
      throw usage_error("targeted patterns need a copy length dividing the stream");
    }
  };

  switch (kind) {
    case ChannelKind::random: {
      if (rho.num == 0) break;
      p.hash_threshold_ = rho_threshold(rho);
      if (m_len <= kEagerScanCap) {
        // small enough to settle the weight and the truncation rule exactly
        std::vector<std::uint64_t> hits;
        for (std::uint64_t i = 0; i < m_len; ++i)
          if (hash_u64(seed, i) < p.hash_threshold_) hits.push_back(i);
        if (extras.budget_check && hits.size() > budget) {
          // drop a uniform subset under the pattern's own seed
          Rng drop(seed ^ 0xb10cba11u);
          for (std::size_t i = hits.size(); i-- > 1;)
            std::swap(hits[i], hits[drop.next_below(i + 1)]);
          hits.resize(budget);
          std::sort(hits.begin(), hits.end());
          p.use_list_ = true;
          p.list_ = std::move(hits);
        } else {
          p.weight_ = hits.size();
        }
      } else if (extras.budget_check) {
        // Too big to scan eagerly. Overrunning the budget from rate rho needs
        // a deviation of gap*m_len; for the sizes and gaps ever used here a
        // Hoeffding bound puts that beyond 2^-100, so the truncation path is
        // unreachable and membership stays the pure hash test.
        Rational gap = Rational(1, 4) - extras.eps_budget - rho;
        if (gap < Rational(1, 1024)) {
          throw config_error("flip rate too close to the budget to certify at this size");
        }
      }
      break;
    }
    case ChannelKind::prefix_burst:
      p.prefix_ = std::uint64_t((unsigned __int128)rho.num * m_len / rho.den);
      break;
    case ChannelKind::periodic:
      if (rho.num == 0) break;
      p.period_ = std::uint64_t(rho.den / rho.num);  // floor(1/rho)
      if (p.period_ == 0) throw usage_error("periodic flip rate above 1 bit per bit");
      break;
    case ChannelKind::copy_targeted: {
      require_copy_len();
      p.copy_list_ = extras.target_copies;
      std::sort(p.copy_list_.begin(), p.copy_list_.end());
      p.copy_list_.erase(std::unique(p.copy_list_.begin(), p.copy_list_.end()),
                         p.copy_list_.end());
      std::uint64_t n_copies = m_len / extras.copy_len;
      for (auto c : p.copy_list_)
        if (c >= n_copies) throw usage_error("targeted copy index out of range");
      break;
    }
    case ChannelKind::symbol_targeted: {
      require_copy_len();
      if (extras.inner_len == 0 || extras.copy_len % extras.inner_len != 0) {
        throw usage_error("symbol targeting needs the inner block length");
      }
      if (extras.target_symbol >= extras.copy_len / extras.inner_len) {
        throw usage_error("targeted symbol index out of range");
      }
      break;
    }
    case ChannelKind::explicit_list: {
      p.list_ = extras.flips;
      std::sort(p.list_.begin(), p.list_.end());
      p.list_.erase(std::unique(p.list_.begin(), p.list_.end()), p.list_.end());
      for (auto f : p.list_)
        if (f >= m_len) throw usage_error("flip position past the stream length");
      p.use_list_ = true;
      break;
    }
  }

  if (extras.budget_check && kind != ChannelKind::random) {
    if (p.weight() > budget) {
      throw config_error("pattern weight exceeds the corruption budget");
    }
  }
  return p;
}

std::uint64_t CorruptionPattern::weight() const {
  if (use_list_) return list_.size();
  switch (kind_) {
    case ChannelKind::random: {
      if (rho_.num == 0) return 0;
      if (!weight_) {
        std::uint64_t c = 0;
        for (std::uint64_t i = 0; i < m_len_; ++i)
          c += hash_u64(seed_, i) < hash_threshold_;
        weight_ = c;
      }
      return *weight_;
    }
    case ChannelKind::prefix_burst:
      return prefix_;
    case ChannelKind::periodic:
      return period_ ? (m_len_ - 1) / period_ + 1 : 0;
    case ChannelKind::copy_targeted:
      return copy_list_.size() * extras_.copy_len;
    case ChannelKind::symbol_targeted:
      return (m_len_ / extras_.copy_len) * extras_.inner_len;
    case ChannelKind::explicit_list:
      return list_.size();
  }
  return 0;
}

Rational CorruptionPattern::weight_fraction() const {
  return Rational::make(weight(), m_len_);
}

bool CorruptionPattern::flipped(std::uint64_t pos) const {
  if (pos >= m_len_) {
    throw usage_error("position past the stream length");
  }
  if (use_list_) {
    return std::binary_search(list_.begin(), list_.end(), pos);
  }
  switch (kind_) {
    case ChannelKind::random:
      return rho_.num != 0 && hash_u64(seed_, pos) < hash_threshold_;
    case ChannelKind::prefix_burst:
      return pos < prefix_;
    case ChannelKind::periodic:
      return period_ != 0 && pos % period_ == 0;
    case ChannelKind::copy_targeted:
      return std::binary_search(copy_list_.begin(), copy_list_.end(),
                                pos / extras_.copy_len);
    case ChannelKind::symbol_targeted:
      return (pos % extras_.copy_len) / extras_.inner_len == extras_.target_symbol;
    case ChannelKind::explicit_list:
      return false;  // handled by use_list_
  }
  return false;
}

void CorruptionPattern::xor_range(std::uint64_t pos, std::uint64_t nbits,
                                  std::uint64_t* words) const {
  if (nbits == 0) return;
  if (pos + nbits > m_len_) {
    throw usage_error("range past the stream length");
  }
  auto flip_rel = [&](std::uint64_t rel) { words[rel >> 6] ^= 1ull << (rel & 63); };
  if (use_list_) {
    auto it = std::lower_bound(list_.begin(), list_.end(), pos);
    for (; it != list_.end() && *it < pos + nbits; ++it) flip_rel(*it - pos);
    return;
  }
  switch (kind_) {
    case ChannelKind::random: {
      if (rho_.num == 0) return;
      for (std::uint64_t i = 0; i < nbits; ++i)
        if (hash_u64(seed_, pos + i) < hash_threshold_) flip_rel(i);
      return;
    }
    case ChannelKind::prefix_burst: {
      if (pos >= prefix_) return;
      std::uint64_t hit = std::min(nbits, prefix_ - pos);
      for (std::uint64_t w = 0; w * 64 < hit; ++w) {
        std::uint64_t take = std::min<std::uint64_t>(64, hit - w * 64);
        words[w] ^= take == 64 ? ~0ull : (1ull << take) - 1;
      }
      return;
    }
    case ChannelKind::periodic: {
      if (period_ == 0) return;
      std::uint64_t first = (pos + period_ - 1) / period_ * period_;
      for (std::uint64_t f = first; f < pos + nbits; f += period_) flip_rel(f - pos);
      return;
    }
    case ChannelKind::copy_targeted:
    case ChannelKind::symbol_targeted: {
      // reads are tiny next to a copy, so walk the few spans it touches
      std::uint64_t i = 0;
      while (i < nbits) {
        std::uint64_t p = pos + i;
        std::uint64_t unit = kind_ == ChannelKind::copy_targeted
                                 ? extras_.copy_len
                                 : extras_.inner_len;
        std::uint64_t span = std::min(nbits - i, unit - p % unit);
        if (flipped(p)) {
          for (std::uint64_t b = 0; b < span; ++b) flip_rel(i + b);
        }
        i += span;
      }
      return;
    }
    case ChannelKind::explicit_list:
      return;
  }
}

void CorruptionPattern::for_each_flip(
    const std::function<void(std::uint64_t)>& fn) const {
  if (use_list_) {
    for (auto f : list_) fn(f);
    return;
  }
  switch (kind_) {
    case ChannelKind::random:
      if (rho_.num == 0) return;
      for (std::uint64_t i = 0; i < m_len_; ++i)
        if (hash_u64(seed_, i) < hash_threshold_) fn(i);
      return;
    case ChannelKind::prefix_burst:
      for (std::uint64_t i = 0; i < prefix_; ++i) fn(i);
      return;
    case ChannelKind::periodic:
      if (period_ == 0) return;
      for (std::uint64_t i = 0; i < m_len_; i += period_) fn(i);
      return;
    case ChannelKind::copy_targeted:
      for (auto c : copy_list_)
        for (std::uint64_t b = 0; b < extras_.copy_len; ++b)
          fn(c * extras_.copy_len + b);
      return;
    case ChannelKind::symbol_targeted: {
      std::uint64_t start = extras_.target_symbol * extras_.inner_len;
      for (std::uint64_t c = 0; c < m_len_ / extras_.copy_len; ++c)
        for (unsigned b = 0; b < extras_.inner_len; ++b)
          fn(c * extras_.copy_len + start + b);
      return;
    }
    case ChannelKind::explicit_list:
      return;
  }
}

std::vector<std::uint64_t> CorruptionPattern::flip_positions() const {
  if (weight() > kMaterializeCap) {
    throw usage_error("pattern too heavy to materialize");
  }
  std::vector<std::uint64_t> out;
  out.reserve(weight());
  for_each_flip([&](std::uint64_t f) { out.push_back(f); });
  return out;
}

BitVec apply_pattern(const BitVec& z, const CorruptionPattern& p) {
  if (z.size() != p.length()) {
    throw usage_error("word length does not match the pattern");
  }
  BitVec out = z;
  p.for_each_flip([&](std::uint64_t f) { out.flip(f); });
  return out;
}

// --- pattern files -----------------------------------------------------------

void write_pattern_file(const std::string& path, const CorruptionPattern& p) {
  nlohmann::json j;
  j["kind"] = channel_kind_name(p.kind());
  j["seed"] = p.seed();
  j["rho"] = {p.rho().num, p.rho().den};
  j["m_len"] = p.length();
  const auto& ex = p.extras();
  j["eps_budget"] = {ex.eps_budget.num, ex.eps_budget.den};
  j["budget_check"] = ex.budget_check;
  if (ex.copy_len) j["copy_len"] = ex.copy_len;
  if (ex.inner_len) j["inner_len"] = ex.inner_len;
  if (p.kind() == ChannelKind::copy_targeted) j["target_copies"] = ex.target_copies;
  if (p.kind() == ChannelKind::symbol_targeted) j["target_symbol"] = ex.target_symbol;
  if (p.kind() == ChannelKind::explicit_list) j["flips"] = ex.flips;
  std::ofstream f(path, std::ios::trunc);
  if (!f) {
    throw infra_error("cannot open for writing: " + path);
  }
  f << j.dump(2) << "\n";
  if (!f) {
    throw infra_error("write failed: " + path);
  }
}

CorruptionPattern read_pattern_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw infra_error("cannot open for reading: " + path);
  }
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("pattern file is not valid JSON: ") + e.what());
  }
  try {
    auto kind = channel_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) {
      throw format_error("unknown channel kind in pattern file");
    }
    auto rat = [&](const nlohmann::json& v) {
      return Rational(v.at(0).get<std::int64_t>(), v.at(1).get<std::int64_t>());
    };
    PatternExtras ex;
    if (j.contains("eps_budget")) ex.eps_budget = rat(j["eps_budget"]);
    if (j.contains("budget_check")) ex.budget_check = j["budget_check"].get<bool>();
    if (j.contains("copy_len")) ex.copy_len = j["copy_len"].get<std::uint64_t>();
    if (j.contains("inner_len")) ex.inner_len = j["inner_len"].get<unsigned>();
    if (j.contains("target_copies"))
      ex.target_copies = j["target_copies"].get<std::vector<std::uint64_t>>();
    if (j.contains("target_symbol"))
      ex.target_symbol = j["target_symbol"].get<std::uint64_t>();
    if (j.contains("flips"))
      ex.flips = j["flips"].get<std::vector<std::uint64_t>>();
    return make_pattern(*kind, rat(j.at("rho")), j.at("m_len").get<std::uint64_t>(),
                        j.at("seed").get<std::uint64_t>(), ex);
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("pattern file is missing fields: ") + e.what());
  }
}

// --- corrupted stream --------------------------------------------------------

CorruptedStream::CorruptedStream(std::unique_ptr<BitStream> inner,
                                 CorruptionPattern pattern)
    : BitStream(inner->length()), inner_(std::move(inner)),
      pattern_(std::move(pattern)) {
  if (length() != pattern_.length()) {
    throw usage_error("pattern length does not match the stream");
  }
}

void CorruptedStream::produce(std::uint64_t pos, std::uint64_t nbits,
                              std::uint64_t* out) {
  produce_into(*inner_, pos, nbits, out);
  pattern_.xor_range(pos, nbits, out);
}

}  // namespace nrstream
