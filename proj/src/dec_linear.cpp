#include "nrstream/dec_linear.hpp"

#include <bit>

#include "nrstream/errors.hpp"

namespace nrstream {

namespace {

bool power_span(std::uint64_t span, unsigned r) {
  if (span == 0) return false;
  while (span % r == 0) span /= r;
  return span == 1;
}

}  // namespace

GuessConf weighted_update(const GuessConf& gc, std::uint64_t q_hat,
                          const Rational& c_hat) {
  if (c_hat.negative() || Rational(1) < c_hat) {
    throw usage_error("confidence must lie in [0, 1]");
  }
  GuessConf out = gc;
  if (!out.value || *out.value == q_hat) {
    out.value = q_hat;
    out.conf += c_hat;
    return out;
  }
  out.conf -= c_hat;
  if (out.conf.negative()) {
    out.value = q_hat;
    out.conf = -out.conf;
  }
  return out;
}

Estimate est_a_linear(std::uint64_t i, std::uint64_t j, DecodeRun& run,
                      const LinearStreamingAlgorithm& L, const StreamParams& sp) {
  if (sp.r < 2 || j <= i || j > sp.n || !power_span(j - i, sp.r) ||
      i % (j - i) != 0) {
    throw usage_error("estimate interval must be an aligned power of r");
  }

  Estimate est;
  if (j == i + 1) {
    DecodeVerdict v = run.leaf.decode_copy(run.bs, std::uint32_t(i), run.rng,
                                           &run.probe);
    est.value = L.g(i, v.bit) % L.modulus;
    est.conf = v.conf;
  } else {
    const unsigned r = sp.r;
    const std::uint64_t sub = (j - i) / r;
    const unsigned value_bits = std::bit_width(L.modulus - 1);
    const std::uint64_t frame_bits =
        std::uint64_t(r) * (value_bits + kConfBits) +
        std::uint64_t(r) * std::bit_width(unsigned(r - 1)) + kFrameOverheadBits;
    run.probe.acquire(frame_bits);

    std::vector<GuessConf> slots(r);
    std::vector<std::uint8_t> perm;
    for (unsigned chunk = 0; chunk < sp.ell; ++chunk) {
      sample_permutation(r, run.rng, perm);
      for (unsigned a = 0; a < r; ++a) {
        const unsigned p = perm[a];
        Estimate sub_est =
            est_a_linear(i + p * sub, i + (p + 1) * sub, run, L, sp);
        slots[p] = weighted_update(slots[p], sub_est.value, sub_est.conf);
      }
    }

    std::uint64_t sum = 0;
    Rational min_conf = slots[0].conf;
    for (const GuessConf& s : slots) {
      if (s.value) sum = (sum + *s.value) % L.modulus;
      if (s.conf < min_conf) min_conf = s.conf;
    }
    est.value = sum;
    est.conf = min_conf / Rational(std::int64_t(sp.ell));
    run.probe.release(frame_bits);
  }

  if (run.audit) run.audit->on_conf(j - i, est.conf);
  return est;
}

RunReport run_linear(const LinearStreamingAlgorithm& L, BitStream& bs,
                     const StreamParams& sp, const Ldc& ldc, Rng& rng,
                     ConfAudit* audit) {
  sp.validate();
  if (L.n != sp.n) {
    throw usage_error("algorithm length does not match the stream parameters");
  }
  if (L.modulus < 2) {
    throw usage_error("summand modulus must be at least 2");
  }

  DecodeRun run(ldc, bs, rng);
  run.audit = audit;
  const std::uint64_t start_cursor = bs.cursor();
  const unsigned value_bits = std::bit_width(L.modulus - 1);
  run.probe.acquire(value_bits + kConfBits);  // the amplification slot

  GuessConf best;
  for (unsigned t = 0; t < sp.T; ++t) {
    Estimate est = est_a_linear(0, sp.n, run, L, sp);
    best = weighted_update(best, est.value, est.conf);
  }
  run.probe.release(value_bits + kConfBits);

  RunReport rep;
  rep.value = *best.value;
  rep.conf = best.conf;
  rep.bits_read = bs.cursor() - start_cursor;
  rep.copies_decoded = run.leaf.copies_decoded();
  rep.peak_registers = run.probe.peak_registers;
  rep.peak_collected = run.probe.peak_collected;
  return rep;
}

RunReport run_linear(const LinearStreamingAlgorithm& L, BitStream& bs,
                     const StreamParams& sp, Rng& rng) {
  Ldc ldc(sp.ldc);
  return run_linear(L, bs, sp, ldc, rng, nullptr);
}

}  // namespace nrstream
