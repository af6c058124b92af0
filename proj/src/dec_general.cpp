#include "nrstream/dec_general.hpp"

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

void general_slot_update(StateGuess& live, const StateGuess& snap,
                         const Estimate& res) {
  if (res.conf.negative() || Rational(1) < res.conf) {
    throw usage_error("confidence must lie in [0, 1]");
  }
  if (snap.state && *snap.state == res.value) {
    live.state = snap.state;
    live.conf = snap.conf + res.conf;
    return;
  }
  Rational c = snap.conf - res.conf;
  if (c.negative()) {
    live.state = res.value;
    live.conf = -c;
  } else {
    live.state = snap.state;
    live.conf = c;
  }
}

void general_chunk_reset(std::vector<StateGuess>& slots,
                         const std::vector<StateGuess>& snapshot) {
  if (slots.size() != snapshot.size()) {
    throw usage_error("slot and snapshot counts differ");
  }
  for (std::size_t a = 0; a < slots.size(); ++a) {
    if (slots[a].state != snapshot[a].state) {
      for (std::size_t b = a + 1; b < slots.size(); ++b) {
        slots[b] = StateGuess{};
      }
      return;
    }
  }
}

Estimate est_a_general(std::uint64_t i, std::uint64_t j, std::uint64_t q_start,
                       DecodeRun& run, const StreamingAlgorithm& A,
                       const StreamParams& sp) {
  if (sp.r < 2 || j <= i || j > sp.n || !power_span(j - i, sp.r) ||
      i % (j - i) != 0) {
    throw usage_error("estimate interval must be an aligned power of r");
  }

  Estimate est;
  if (j == i + 1) {
    DecodeVerdict v = run.leaf.decode_copy(run.bs, std::uint32_t(i), run.rng,
                                           &run.probe);
    est.value = A.step(q_start, v.bit);
    est.conf = v.conf;
  } else {
    const unsigned r = sp.r;
    const std::uint64_t sub = (j - i) / r;
    const std::uint64_t frame_bits =
        2 * std::uint64_t(r) * (A.state_bits + kConfBits) +
        std::uint64_t(r) * std::bit_width(unsigned(r - 1)) + kFrameOverheadBits;
    run.probe.acquire(frame_bits);

    std::vector<StateGuess> slots(r);
    std::vector<StateGuess> snapshot(r);
    std::vector<std::uint8_t> perm;
    for (unsigned chunk = 0; chunk < sp.ell; ++chunk) {
      snapshot = slots;
      sample_permutation(r, run.rng, perm);
      for (unsigned a = 0; a < r; ++a) {
        const unsigned p = perm[a];
        std::uint64_t prev = q_start;
        if (p > 0) {
          prev = snapshot[p - 1].state ? *snapshot[p - 1].state : A.init_state;
        }
        Estimate res =
            est_a_general(i + p * sub, i + (p + 1) * sub, prev, run, A, sp);
        general_slot_update(slots[p], snapshot[p], res);
      }
      general_chunk_reset(slots, snapshot);
    }

    Rational min_conf = slots[0].conf;
    for (const StateGuess& s : slots) {
      if (s.conf < min_conf) min_conf = s.conf;
    }
    est.value = slots[r - 1].state ? *slots[r - 1].state : A.init_state;
    est.conf = min_conf / Rational(std::int64_t(sp.ell));
    run.probe.release(frame_bits);
  }

  if (run.audit) run.audit->on_conf(j - i, est.conf);
  return est;
}

RunReport run_general(const StreamingAlgorithm& A, BitStream& bs,
                      const StreamParams& sp, const Ldc& ldc, Rng& rng,
                      ConfAudit* audit) {
  sp.validate();
  if (A.state_bits < 1 || A.state_bits > 64) {
    throw usage_error("algorithm state must fit one register");
  }
  if (!A.step || !A.output) {
    throw usage_error("algorithm is missing its step or output map");
  }

  DecodeRun run(ldc, bs, rng);
  run.audit = audit;
  const std::uint64_t start_cursor = bs.cursor();
  run.probe.acquire(A.state_bits + kConfBits);  // the amplification slot

  GuessConf best;
  for (unsigned t = 0; t < sp.T; ++t) {
    Estimate est = est_a_general(0, sp.n, A.init_state, run, A, sp);
    best = weighted_update(best, est.value, est.conf);
  }
  run.probe.release(A.state_bits + kConfBits);

  RunReport rep;
  rep.value = A.output(*best.value);
  rep.conf = best.conf;
  rep.bits_read = bs.cursor() - start_cursor;
  rep.copies_decoded = run.leaf.copies_decoded();
  rep.peak_registers = run.probe.peak_registers;
  rep.peak_collected = run.probe.peak_collected;
  return rep;
}

RunReport run_general(const StreamingAlgorithm& A, BitStream& bs,
                      const StreamParams& sp, Rng& rng) {
  Ldc ldc(sp.ldc);
  return run_general(A, bs, sp, ldc, rng, nullptr);
}

}  // namespace nrstream
