#ifndef APUSIM_HPP
#define APUSIM_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

// Bit-accurate model of one associative-processing core with a cycle and
// data-movement cost account.
//
// Geometry: 24 vector registers (VRF), each 16 bit-slices wide and 32768
// columns long. A column is one 16-bit SIMD lane; an operation touches the
// same slice subset of every column at once. Around the register file sit:
//
//   RL   read latch, 16 x 32768. Every read-style op lands here.
//   GVL  global vertical latch, 1 x 32768. Assigned as the AND of RL over
//        the op's slice mask, per column; read back as a broadcast to every
//        selected slice.
//   GHL  global horizontal latch, 16 x 1. Assigned per slice as the OR of
//        RL over all columns; read back as a per-slice constant row.
//   VMRF 48 background planes of 16 x 32768 for register spills.
//   DRAM shared off-array pool, addressed in rows of 32768 16-bit words.
//
// Micro-op shape: one slice mask, one kind, at most one VRF operand (a
// single register, or two registers whose rows are AND-combined on the read
// wires), at most one latch operand (optionally complemented), and a single
// boolean op that serves both as the VRF/latch combiner and as the
// accumulation op. Mixed forms needing two different operators in one op
// (e.g. RL |= VRF & GVL) are rejected. Writes take only a latch operand.
// CONST0/CONST1 are read-side latch operands only.
//
// Neighbor reads (RL_N/RL_S shift across slices, RL_E/RL_W across columns)
// observe the latch as it was before the op began. RL_N at slice 0 and RL_S
// at slice 15 read zero; RL_E/RL_W wrap mod 32768.
//
// Costs: every micro-op is one cycle, mask 0x0000 included (it is a no-op
// that still occupies the issue slot). Running a fragment adds a fixed
// per-fragment overhead. VMRF plane moves and DRAM row loads have their own
// configurable cycle prices. Host staging moves no cycles, only bytes.

namespace apusim {

constexpr size_t kColumns = 32768;
constexpr size_t kSlices = 16;
constexpr size_t kRegs = 24;
constexpr size_t kVmrfSlots = 48;
constexpr size_t kWordsPerRow = kColumns / 64;  // uint64 words per bit row

constexpr uint8_t kNoReg = 0xFF;

using BitRow = std::array<uint64_t, kWordsPerRow>;

enum class OpKind : uint8_t { ReadAssign, ReadAccum, Write, GvlAssign, GhlAssign };
enum class BoolOp : uint8_t { And, Or, Xor };
enum class LatchSrc : uint8_t {
  None, Rl, RlN, RlS, RlE, RlW, Gvl, Ghl, Const0, Const1
};

struct MicroOp {
  uint16_t mask = 0;
  OpKind kind = OpKind::ReadAssign;
  BoolOp op = BoolOp::Or;
  uint8_t vrf0 = kNoReg;  // first VRF operand, kNoReg if absent
  uint8_t vrf1 = kNoReg;  // second VRF operand; rows AND with vrf0's
  LatchSrc latch = LatchSrc::None;
  bool negate_latch = false;
  uint8_t dst = kNoReg;  // Write destination
};

// Factories cover every op shape the fragment library uses.
MicroOp op_read(uint16_t mask, uint8_t vrf);
MicroOp op_read(uint16_t mask, uint8_t vrf0, uint8_t vrf1);
MicroOp op_read(uint16_t mask, LatchSrc latch, bool negate = false);
MicroOp op_read_comb(uint16_t mask, uint8_t vrf, BoolOp op, LatchSrc latch,
                     bool negate = false);
MicroOp op_accum(uint16_t mask, BoolOp op, uint8_t vrf);
MicroOp op_accum(uint16_t mask, BoolOp op, uint8_t vrf0, uint8_t vrf1);
MicroOp op_accum(uint16_t mask, BoolOp op, LatchSrc latch, bool negate = false);
MicroOp op_write(uint16_t mask, uint8_t dst, LatchSrc latch,
                 bool negate = false);
MicroOp op_gvl(uint16_t mask);
MicroOp op_ghl(uint16_t mask);

struct Fragment {
  std::string label;  // attribution section; empty = caller's ambient section
  std::vector<MicroOp> ops;
};

struct CostConfig {
  uint32_t vmrf_cost = 16;      // cycles per VMRF plane load or store
  uint32_t dram_vr_cost = 64;   // cycles per DRAM row -> register load
  uint32_t fragment_overhead = 3;  // issue cost per fragment
};

struct MemHandle {
  uint32_t id = 0;
  size_t words = 0;  // requested size; capacity is padded to whole rows
  bool valid() const { return id != 0; }
};

struct MalformedOp : std::runtime_error {
  explicit MalformedOp(const std::string& what) : std::runtime_error(what) {}
};

class CoreState {
 public:
  explicit CoreState(CostConfig cfg = {});

  const CostConfig& config() const { return cfg_; }

  // One micro-op: one cycle, popcount(mask) * kColumns bit touches.
  void exec(const MicroOp& op);

  // fragment_overhead cycles, then each op in order. RL and the global
  // latches persist across fragments; several fragments rely on that.
  void run(const Fragment& frag);

  // DRAM pool. Allocation is zero-filled and padded to whole rows.
  MemHandle alloc(size_t words);
  void free(MemHandle h);

  // Host -> DRAM at a byte offset (must be even). Counts 2 * data.size()
  // staged bytes, no cycles.
  void stage_to_device(MemHandle h, size_t byte_offset,
                       std::span<const uint16_t> data);

  // DRAM -> register, transposing the 32768 16-bit words starting at
  // word_offset into bit slices (bit s of word c lands in slice s,
  // column c). dram_vr_cost cycles.
  void dram_load_vr(uint8_t reg, MemHandle h, size_t word_offset);

  // Register -> host, un-transposing the first `count` columns. Counts
  // 2 * count staged bytes, no cycles.
  std::vector<uint16_t> read_vr_to_host(uint8_t reg, size_t count = kColumns);

  void vmrf_store(uint8_t slot, uint8_t reg);
  void vmrf_load(uint8_t reg, uint8_t slot);

  // Cycle attribution. Every cycle lands in the active section, so the
  // section totals always sum to cycles().
  void set_section(std::string_view label);
  const std::string& current_section() const;

  uint64_t cycles() const { return cycles_; }
  uint64_t bit_touches() const { return bit_touches_; }
  uint64_t staged_bytes_in() const { return staged_in_; }
  uint64_t staged_bytes_out() const { return staged_out_; }

  // (label, cycles) in first-touch order.
  std::vector<std::pair<std::string, uint64_t>> sections() const;

  void reset_counters();

  // Direct state access for tests and debugging; moves no cycles or bytes.
  uint16_t peek_vr(uint8_t reg, size_t col) const;
  void poke_vr(uint8_t reg, size_t col, uint16_t value);
  uint16_t peek_rl(size_t col) const;
  void poke_rl(size_t col, uint16_t value);
  bool peek_gvl(size_t col) const;
  bool peek_ghl(size_t slice) const;
  uint16_t peek_dram(MemHandle h, size_t word) const;

 private:
  struct Section {
    std::string label;
    uint64_t cycles = 0;
  };

  BitRow& vrf_row(uint8_t reg, size_t slice) {
    return vrf_[reg * kSlices + slice];
  }
  const BitRow& vrf_row(uint8_t reg, size_t slice) const {
    return vrf_[reg * kSlices + slice];
  }

  void validate(const MicroOp& op) const;
  void add_cycles(uint64_t n);
  size_t section_index(std::string_view label);
  std::vector<uint16_t>& dram_of(MemHandle h);
  const std::vector<uint16_t>& dram_of(MemHandle h) const;

  CostConfig cfg_;
  std::unique_ptr<BitRow[]> vrf_;   // kRegs * kSlices rows
  std::unique_ptr<BitRow[]> vmrf_;  // kVmrfSlots * kSlices rows
  std::array<BitRow, kSlices> rl_{};
  std::array<BitRow, kSlices> rl_snap_{};  // pre-op copy for hazardous reads
  BitRow gvl_{};
  std::array<bool, kSlices> ghl_{};

  std::unordered_map<uint32_t, std::vector<uint16_t>> dram_;
  uint32_t next_handle_ = 1;

  uint64_t cycles_ = 0;
  uint64_t bit_touches_ = 0;
  uint64_t staged_in_ = 0;
  uint64_t staged_out_ = 0;
  std::vector<Section> sections_;
  std::unordered_map<std::string, size_t> section_index_;
  size_t current_section_ = 0;
};

// Scoped section switch.
class SectionScope {
 public:
  SectionScope(CoreState& core, std::string_view label)
      : core_(core), saved_(core.current_section()) {
    core_.set_section(label);
  }
  ~SectionScope() { core_.set_section(saved_); }
  SectionScope(const SectionScope&) = delete;
  SectionScope& operator=(const SectionScope&) = delete;

 private:
  CoreState& core_;
  std::string saved_;
};

}  // namespace apusim

#endif
