#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "apusim.hpp"
#include "seqcore.hpp"
#include "ucode.hpp"

// Semi-global edit distance (Myers/Hyyro bit-parallel recurrence), three
// ways: a plain DP matrix as the reference answer, a blocked scalar CPU
// version, and the column-parallel device kernel that scores up to 32768
// candidate windows at once. All three agree bit for bit; the DP version
// is the one the other two are judged against.
//
// Conventions shared by all three:
//   - query gap at the left edge costs: C[i][0] = i
//   - candidate prefix is free: C[0][j] = 0
//   - result is min over the bottom row, column 0 included
//   - chunk 0 shifts in a 0 each column step (no forced 1)

namespace myers {

struct EmptySequence : std::runtime_error {
  EmptySequence() : std::runtime_error("empty sequence") {}
};

struct TooManyCandidates : std::runtime_error {
  explicit TooManyCandidates(size_t count)
      : std::runtime_error("candidate count " + std::to_string(count) +
                           " exceeds " + std::to_string(apusim::kColumns)) {}
};

struct QueryTooLong : std::runtime_error {
  explicit QueryTooLong(size_t m)
      : std::runtime_error("query length " + std::to_string(m) +
                           " needs more chunk state than the VMRF holds") {}
};

struct LengthMismatch : std::runtime_error {
  explicit LengthMismatch(const std::string& what)
      : std::runtime_error(what) {}
};

// Reference DP, O(m*n) cells. Throws EmptySequence if either side is empty.
int edit_distance_dp(const seqcore::PackedSeq& query,
                     const seqcore::PackedSeq& candidate);

// Blocked scalar version. width must be 16, 32 or 64.
int myers_cpu(const seqcore::PackedSeq& query,
              const seqcore::PackedSeq& candidate, unsigned width = 64);

// peq at the device word width: peq[base][k] bit b set iff query base
// 16*k + b equals `base`. Padding bits past m - 1 stay zero.
struct PeqTable {
  size_t m = 0;
  size_t chunks = 0;
  std::array<std::vector<uint16_t>, 4> table;
};
PeqTable compute_peq(const seqcore::PackedSeq& query);

// Device-side layout of a candidate batch: word g of candidate c lives at
// layout word g * count + c, so one dram_load_vr pulls word g of 32768
// candidates into a register (8 bases per candidate per load).
struct DeviceCandidates {
  apusim::MemHandle handle;
  size_t count = 0;
  size_t n = 0;           // candidate length in bases
  size_t words_per = 0;   // ceil(n / 8)
};

// Allocates and stages `layout` (size words_per * count, already
// transposed). Rows are padded to kColumns words; padding stays zero and
// never counts as staged bytes.
DeviceCandidates stage_candidates(apusim::CoreState& core,
                                  std::span<const uint16_t> layout,
                                  size_t count, size_t n);

// Runs the scoring loop against already-staged candidates and reads the
// running minima back. Every cycle lands in one of the twelve kernel
// sections (see kKernelSections).
std::vector<uint16_t> myers_apu_kernel(
    apusim::CoreState& core, const seqcore::PackedSeq& query,
    const DeviceCandidates& dev,
    ucode::AdderKind adder = ucode::AdderKind::CarrySelect);

inline constexpr std::array<const char*, 12> kKernelSections = {
    "loading saved Pv and Mv",
    "computing eq",
    "computing Xv",
    "computing Xh",
    "computing Ph",
    "computing Mh",
    "computing scores",
    "shift and save Ph",
    "shift and save Mh",
    "computing Pv",
    "computing Mv",
    "storing Pv and Mv",
};

inline constexpr std::array<const char*, 8> kRunPhases = {
    "initialize read params",
    "allocate on shared DRAM",
    "initialize parameters",
    "initialize peq array",
    "copy data host to device",
    "kernel",
    "copy data device to host",
    "free allocated memory",
};

// Full round trip: validate, allocate, stage, score, read back, free.
// phase_ns records host wall time per phase in kRunPhases order.
struct ApuQueryRun {
  std::vector<uint16_t> scores;
  std::array<int64_t, 8> phase_ns{};
};
ApuQueryRun run_apu_query(apusim::CoreState& core,
                          const seqcore::PackedSeq& query,
                          std::span<const uint16_t> layout, size_t count,
                          size_t n,
                          ucode::AdderKind adder = ucode::AdderKind::CarrySelect);

struct FilterVerdict {
  uint32_t query_id = 0;
  uint32_t candidate_id = 0;
  uint32_t ref_start = 0;
  uint16_t score = 0;
  bool kept = false;
};

// One verdict per score, candidate_id = index, input order preserved.
// ref_starts must match scores in length.
std::vector<FilterVerdict> filter_candidates(
    uint32_t query_id, std::span<const uint16_t> scores,
    std::span<const uint32_t> ref_starts, int threshold);

// Default keep threshold for a length-m query.
inline int default_threshold(size_t m) {
  return static_cast<int>((m + 9) / 10);
}

}  // namespace myers
