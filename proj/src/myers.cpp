#include "myers.hpp"

#include <algorithm>
#include <chrono>
#include <optional>

namespace myers {

using seqcore::PackedSeq;

int edit_distance_dp(const PackedSeq& query, const PackedSeq& candidate) {
  const size_t m = query.size(), n = candidate.size();
  if (m == 0 || n == 0) throw EmptySequence();

  std::vector<int> prev(n + 1, 0), cur(n + 1, 0);
  for (size_t i = 1; i <= m; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= n; ++j) {
      int sub = prev[j - 1] + (query.at(i - 1) != candidate.at(j - 1));
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return *std::min_element(prev.begin(), prev.end());
}

int myers_cpu(const PackedSeq& query, const PackedSeq& candidate,
              unsigned width) {
  if (width != 16 && width != 32 && width != 64)
    throw std::invalid_argument("width must be 16, 32 or 64");
  const size_t m = query.size(), n = candidate.size();
  if (m == 0 || n == 0) throw EmptySequence();

  const size_t w = width;
  const size_t chunks = (m + w - 1) / w;
  const uint64_t wmask = (w == 64) ? ~0ull : ((1ull << w) - 1);

  std::vector<std::array<uint64_t, 4>> peq(chunks, {0, 0, 0, 0});
  for (size_t i = 0; i < m; ++i)
    peq[i / w][static_cast<size_t>(query.at(i))] |= 1ull << (i % w);

  // Pv covers the valid query bits only; padding stays zero and, because
  // peq padding is zero too, never feeds back into a live bit.
  std::vector<uint64_t> pv(chunks), mv(chunks, 0);
  for (size_t k = 0; k < chunks; ++k) {
    size_t valid = std::min(w, m - k * w);
    pv[k] = (valid == 64) ? ~0ull : ((1ull << valid) - 1);
  }

  int score = static_cast<int>(m);
  int best = score;
  const uint64_t last = 1ull << ((m - 1) % w);

  for (size_t j = 0; j < n; ++j) {
    const size_t b = static_cast<size_t>(candidate.at(j));
    uint64_t add_c = 0, ph_c = 0, mh_c = 0;
    for (size_t k = 0; k < chunks; ++k) {
      const uint64_t eq = peq[k][b];
      const uint64_t x = eq & pv[k];

      uint64_t sum, carry;
      if (w == 64) {
        uint64_t s1 = x + pv[k];
        uint64_t c1 = s1 < x;
        sum = s1 + add_c;
        carry = c1 | (sum < s1);
      } else {
        uint64_t full = x + pv[k] + add_c;
        carry = full >> w;
        sum = full & wmask;
      }
      add_c = carry;

      const uint64_t xv = eq | mv[k];
      const uint64_t xh = ((sum ^ pv[k]) | eq) & wmask;
      uint64_t ph = mv[k] | (~(xh | pv[k]) & wmask);
      uint64_t mh = pv[k] & xh;

      if (k == chunks - 1) {
        if (ph & last) ++score;
        if (mh & last) --score;
        best = std::min(best, score);
      }

      const uint64_t ph_out = (ph >> (w - 1)) & 1;
      const uint64_t mh_out = (mh >> (w - 1)) & 1;
      ph = ((ph << 1) | ph_c) & wmask;
      mh = ((mh << 1) | mh_c) & wmask;
      ph_c = ph_out;
      mh_c = mh_out;

      pv[k] = mh | (~(xv | ph) & wmask);
      mv[k] = ph & xv;
    }
  }
  return best;
}

PeqTable compute_peq(const PackedSeq& query) {
  const size_t m = query.size();
  if (m == 0) throw EmptySequence();
  PeqTable t;
  t.m = m;
  t.chunks = (m + 15) / 16;
  for (auto& v : t.table) v.assign(t.chunks, 0);
  for (size_t i = 0; i < m; ++i)
    t.table[static_cast<size_t>(query.at(i))][i / 16] |=
        uint16_t(1u << (i % 16));
  return t;
}

DeviceCandidates stage_candidates(apusim::CoreState& core,
                                  std::span<const uint16_t> layout,
                                  size_t count, size_t n) {
  if (n == 0) throw EmptySequence();
  if (count > apusim::kColumns) throw TooManyCandidates(count);
  const size_t words_per = (n + 7) / 8;
  if (layout.size() != words_per * count)
    throw LengthMismatch("layout holds " + std::to_string(layout.size()) +
                         " words, expected " +
                         std::to_string(words_per * count));

  DeviceCandidates dev;
  dev.count = count;
  dev.n = n;
  dev.words_per = words_per;
  dev.handle = core.alloc(words_per * apusim::kColumns);
  for (size_t g = 0; g < words_per; ++g)
    core.stage_to_device(dev.handle, g * apusim::kColumns * 2,
                         layout.subspan(g * count, count));
  return dev;
}

namespace {

using apusim::CoreState;
using apusim::SectionScope;
using ucode::AdderKind;
using ucode::AddFlags;
using ucode::BitwiseOp;
using ucode::Lane;

// Register and mask-lane assignments for the scoring loop. r12 upward is
// free for the fragment library's own temporaries.
constexpr uint8_t kEq = 0, kPv = 1, kMv = 2, kXv = 3, kXh = 4, kPh = 5,
                  kMh = 6, kScore = 7, kMin = 8, kBase = 9, kT0 = 10,
                  kT1 = 11;
constexpr Lane kLanePhBit = 8, kLaneMhBit = 9, kLaneLt = 10,
               kLaneShuttle = 11, kLaneAdd = 12, kLanePhCarry = 13,
               kLaneMhCarry = 14;

struct KernelCtx {
  CoreState& core;
  const PackedSeq& query;
  const DeviceCandidates& dev;
  AdderKind adder;

  size_t m, chunks;
  uint16_t last_bit;
  PeqTable peq;

  KernelCtx(CoreState& core_, const PackedSeq& query_,
            const DeviceCandidates& dev_, AdderKind adder_)
      : core(core_), query(query_), dev(dev_), adder(adder_) {
    m = query.size();
    if (m == 0 || dev.n == 0) throw EmptySequence();
    chunks = (m + 15) / 16;
    if (chunks > 23) throw QueryTooLong(m);
    last_bit = uint16_t((m - 1) % 16);
  }

  void build_peq() { peq = compute_peq(query); }

  uint16_t pv_init(size_t k) const {
    size_t valid = std::min<size_t>(16, m - k * 16);
    return (valid == 16) ? 0xFFFF : uint16_t((1u << valid) - 1);
  }

  // Register state ahead of the loop. Cycles land in the sections the
  // values belong to, so section totals cover the whole query.
  void init_state() {
    {
      SectionScope s(core, "computing scores");
      ucode::vmv_vx(core, kScore, uint16_t(m));
      ucode::vmv_vx(core, kMin, uint16_t(m));
    }
    for (size_t k = 0; k < chunks; ++k) {
      {
        SectionScope s(core, "computing Pv");
        ucode::vmv_vx(core, kPv, pv_init(k));
      }
      {
        SectionScope s(core, "computing Mv");
        ucode::vmv_vx(core, kMv, 0);
      }
      if (chunks > 1) {
        SectionScope s(core, "storing Pv and Mv");
        core.vmrf_store(uint8_t(2 * k), kPv);
        core.vmrf_store(uint8_t(2 * k + 1), kMv);
      }
    }
  }

  void column(size_t j) {
    const size_t off = j % 8;
    if (off == 0) {
      SectionScope s(core, "computing eq");
      core.dram_load_vr(kBase, dev.handle, (j / 8) * apusim::kColumns);
    }
    for (size_t k = 0; k < chunks; ++k) {
      if (chunks > 1) {
        SectionScope s(core, "loading saved Pv and Mv");
        core.vmrf_load(kPv, uint8_t(2 * k));
        core.vmrf_load(kMv, uint8_t(2 * k + 1));
      }
      {
        SectionScope s(core, "computing eq");
        ucode::vmv_vx(core, kEq, 0);
        const uint16_t pair = uint16_t(0b11u << (2 * off));
        for (uint16_t b = 0; b < 4; ++b) {
          ucode::vmseq(core, kBase, uint16_t(b << (2 * off)), kLaneShuttle,
                       pair);
          ucode::or_scalar_where(core, kEq, peq.table[b][k], kLaneShuttle);
        }
      }
      {
        SectionScope s(core, "computing Xv");
        ucode::bitwise(core, BitwiseOp::Or, kXv, kEq, kMv);
      }
      {
        SectionScope s(core, "computing Xh");
        ucode::bitwise(core, BitwiseOp::And, kT0, kEq, kPv);
        AddFlags flags;
        if (k > 0) flags.cin = kLaneAdd;
        if (k + 1 < chunks) flags.cout = kLaneAdd;
        ucode::vadd(core, adder, kXh, kT0, kPv, flags);
        ucode::bitwise(core, BitwiseOp::Xor, kXh, kXh, kPv);
        ucode::bitwise(core, BitwiseOp::Or, kXh, kXh, kEq);
      }
      {
        SectionScope s(core, "computing Ph");
        ucode::bitwise(core, BitwiseOp::Or, kT0, kXh, kPv);
        ucode::bitwise(core, BitwiseOp::OrNot, kPh, kMv, kT0);
      }
      {
        SectionScope s(core, "computing Mh");
        ucode::bitwise(core, BitwiseOp::And, kMh, kPv, kXh);
      }
      if (k == chunks - 1) {
        SectionScope s(core, "computing scores");
        ucode::extract_bit(core, kPh, last_bit, kLanePhBit);
        ucode::extract_bit(core, kMh, last_bit, kLaneMhBit);
        ucode::mask_to_01(core, kLanePhBit, kT1);
        ucode::vadd(core, adder, kScore, kScore, kT1, {});
        ucode::mask_to_01(core, kLaneMhBit, kT1);
        ucode::vsub(core, adder, kScore, kScore, kT1, std::nullopt);
        ucode::vlt(core, adder, kScore, kMin, kLaneLt);
        ucode::vcopy_masked(core, kMin, kScore, kLaneLt);
      }
      {
        SectionScope s(core, "shift and save Ph");
        ucode::lsl_with_carry(
            core, kPh,
            k > 0 ? std::optional<Lane>(kLanePhCarry) : std::nullopt,
            kLanePhCarry);
      }
      {
        SectionScope s(core, "shift and save Mh");
        ucode::lsl_with_carry(
            core, kMh,
            k > 0 ? std::optional<Lane>(kLaneMhCarry) : std::nullopt,
            kLaneMhCarry);
      }
      {
        SectionScope s(core, "computing Pv");
        ucode::bitwise(core, BitwiseOp::Or, kT0, kXv, kPh);
        ucode::bitwise(core, BitwiseOp::OrNot, kPv, kMh, kT0);
      }
      {
        SectionScope s(core, "computing Mv");
        ucode::bitwise(core, BitwiseOp::And, kMv, kPh, kXv);
      }
      if (chunks > 1) {
        SectionScope s(core, "storing Pv and Mv");
        core.vmrf_store(uint8_t(2 * k), kPv);
        core.vmrf_store(uint8_t(2 * k + 1), kMv);
      }
    }
  }

  void loop() {
    for (size_t j = 0; j < dev.n; ++j) column(j);
  }

  std::vector<uint16_t> readback() {
    return core.read_vr_to_host(kMin, dev.count);
  }
};

int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::vector<uint16_t> myers_apu_kernel(apusim::CoreState& core,
                                       const PackedSeq& query,
                                       const DeviceCandidates& dev,
                                       ucode::AdderKind adder) {
  KernelCtx ctx(core, query, dev, adder);
  ctx.build_peq();
  ctx.init_state();
  ctx.loop();
  return ctx.readback();
}

ApuQueryRun run_apu_query(apusim::CoreState& core, const PackedSeq& query,
                          std::span<const uint16_t> layout, size_t count,
                          size_t n, ucode::AdderKind adder) {
  ApuQueryRun run;
  int64_t t0 = now_ns();

  // initialize read params
  if (query.empty() || n == 0) throw EmptySequence();
  if (count > apusim::kColumns) throw TooManyCandidates(count);
  const size_t chunks = (query.size() + 15) / 16;
  if (chunks > 23) throw QueryTooLong(query.size());
  const size_t words_per = (n + 7) / 8;
  if (layout.size() != words_per * count)
    throw LengthMismatch("layout holds " + std::to_string(layout.size()) +
                         " words, expected " +
                         std::to_string(words_per * count));
  int64_t t1 = now_ns();
  run.phase_ns[0] = t1 - t0;

  // allocate on shared DRAM
  DeviceCandidates dev;
  dev.count = count;
  dev.n = n;
  dev.words_per = words_per;
  dev.handle = core.alloc(words_per * apusim::kColumns);
  int64_t t2 = now_ns();
  run.phase_ns[1] = t2 - t1;

  KernelCtx ctx(core, query, dev, adder);

  // initialize parameters
  ctx.init_state();
  int64_t t3 = now_ns();
  run.phase_ns[2] = t3 - t2;

  // initialize peq array
  ctx.build_peq();
  int64_t t4 = now_ns();
  run.phase_ns[3] = t4 - t3;

  // copy data host to device
  for (size_t g = 0; g < words_per; ++g)
    core.stage_to_device(dev.handle, g * apusim::kColumns * 2,
                         layout.subspan(g * count, count));
  int64_t t5 = now_ns();
  run.phase_ns[4] = t5 - t4;

  // kernel
  ctx.loop();
  int64_t t6 = now_ns();
  run.phase_ns[5] = t6 - t5;

  // copy data device to host
  run.scores = ctx.readback();
  int64_t t7 = now_ns();
  run.phase_ns[6] = t7 - t6;

  // free allocated memory
  core.free(dev.handle);
  run.phase_ns[7] = now_ns() - t7;
  return run;
}

std::vector<FilterVerdict> filter_candidates(
    uint32_t query_id, std::span<const uint16_t> scores,
    std::span<const uint32_t> ref_starts, int threshold) {
  if (scores.size() != ref_starts.size())
    throw LengthMismatch("scores and ref_starts differ in length");
  std::vector<FilterVerdict> out;
  out.reserve(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    FilterVerdict v;
    v.query_id = query_id;
    v.candidate_id = static_cast<uint32_t>(i);
    v.ref_start = ref_starts[i];
    v.score = scores[i];
    v.kept = scores[i] <= threshold;
    out.push_back(v);
  }
  return out;
}

}  // namespace myers
