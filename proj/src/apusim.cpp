#include "apusim.hpp"

#include <bit>
#include <cstring>

namespace apusim {

namespace {

const BitRow kZeroRow{};
const BitRow kOnesRow = [] {
  BitRow r;
  r.fill(~0ull);
  return r;
}();

inline uint64_t comb(BoolOp op, uint64_t a, uint64_t b) {
  switch (op) {
    case BoolOp::And: return a & b;
    case BoolOp::Or: return a | b;
    case BoolOp::Xor: return a ^ b;
  }
  return 0;
}

// Column shift with wraparound: east reads column c+1, west reads c-1.
void shift_east(const BitRow& in, BitRow& out) {
  for (size_t w = 0; w < kWordsPerRow; ++w)
    out[w] = (in[w] >> 1) | (in[(w + 1) % kWordsPerRow] << 63);
}
void shift_west(const BitRow& in, BitRow& out) {
  for (size_t w = 0; w < kWordsPerRow; ++w)
    out[w] = (in[w] << 1) | (in[(w + kWordsPerRow - 1) % kWordsPerRow] >> 63);
}

}  // namespace

MicroOp op_read(uint16_t mask, uint8_t vrf) {
  MicroOp o;
  o.mask = mask;
  o.kind = OpKind::ReadAssign;
  o.vrf0 = vrf;
  return o;
}

MicroOp op_read(uint16_t mask, uint8_t vrf0, uint8_t vrf1) {
  MicroOp o = op_read(mask, vrf0);
  o.vrf1 = vrf1;
  o.op = BoolOp::And;  // row pair is AND-combined by construction
  return o;
}

MicroOp op_read(uint16_t mask, LatchSrc latch, bool negate) {
  MicroOp o;
  o.mask = mask;
  o.kind = OpKind::ReadAssign;
  o.latch = latch;
  o.negate_latch = negate;
  return o;
}

MicroOp op_read_comb(uint16_t mask, uint8_t vrf, BoolOp op, LatchSrc latch,
                     bool negate) {
  MicroOp o;
  o.mask = mask;
  o.kind = OpKind::ReadAssign;
  o.op = op;
  o.vrf0 = vrf;
  o.latch = latch;
  o.negate_latch = negate;
  return o;
}

MicroOp op_accum(uint16_t mask, BoolOp op, uint8_t vrf) {
  MicroOp o;
  o.mask = mask;
  o.kind = OpKind::ReadAccum;
  o.op = op;
  o.vrf0 = vrf;
  return o;
}

MicroOp op_accum(uint16_t mask, BoolOp op, uint8_t vrf0, uint8_t vrf1) {
  MicroOp o = op_accum(mask, op, vrf0);
  o.vrf1 = vrf1;
  return o;
}

MicroOp op_accum(uint16_t mask, BoolOp op, LatchSrc latch, bool negate) {
  MicroOp o;
  o.mask = mask;
  o.kind = OpKind::ReadAccum;
  o.op = op;
  o.latch = latch;
  o.negate_latch = negate;
  return o;
}

MicroOp op_write(uint16_t mask, uint8_t dst, LatchSrc latch, bool negate) {
  MicroOp o;
  o.mask = mask;
  o.kind = OpKind::Write;
  o.dst = dst;
  o.latch = latch;
  o.negate_latch = negate;
  return o;
}

MicroOp op_gvl(uint16_t mask) {
  MicroOp o;
  o.mask = mask;
  o.kind = OpKind::GvlAssign;
  return o;
}

MicroOp op_ghl(uint16_t mask) {
  MicroOp o;
  o.mask = mask;
  o.kind = OpKind::GhlAssign;
  return o;
}

CoreState::CoreState(CostConfig cfg)
    : cfg_(cfg),
      vrf_(std::make_unique<BitRow[]>(kRegs * kSlices)),
      vmrf_(std::make_unique<BitRow[]>(kVmrfSlots * kSlices)) {
  current_section_ = section_index("unattributed");
}

void CoreState::validate(const MicroOp& op) const {
  const bool has_vrf = op.vrf0 != kNoReg;
  const bool has_latch = op.latch != LatchSrc::None;
  if (has_vrf && op.vrf0 >= kRegs) throw MalformedOp("vrf0 out of range");
  if (op.vrf1 != kNoReg) {
    if (!has_vrf) throw MalformedOp("vrf1 without vrf0");
    if (op.vrf1 >= kRegs) throw MalformedOp("vrf1 out of range");
  }
  if (op.negate_latch && !has_latch)
    throw MalformedOp("negate without a latch operand");
  const bool is_const =
      op.latch == LatchSrc::Const0 || op.latch == LatchSrc::Const1;
  if (is_const && op.negate_latch)
    throw MalformedOp("negated constant source");
  switch (op.kind) {
    case OpKind::ReadAssign:
    case OpKind::ReadAccum:
      if (!has_vrf && !has_latch)
        throw MalformedOp("read with no source");
      if (op.dst != kNoReg) throw MalformedOp("read with a destination");
      break;
    case OpKind::Write:
      if (op.dst >= kRegs) throw MalformedOp("write destination out of range");
      if (has_vrf) throw MalformedOp("write from a register source");
      if (!has_latch) throw MalformedOp("write with no latch source");
      if (is_const) throw MalformedOp("write from a constant");
      break;
    case OpKind::GvlAssign:
    case OpKind::GhlAssign:
      if (has_vrf || has_latch || op.dst != kNoReg)
        throw MalformedOp("latch assign takes no operands");
      break;
  }
}

void CoreState::exec(const MicroOp& op) {
  validate(op);
  add_cycles(1);
  bit_touches_ += uint64_t(std::popcount(op.mask)) * kColumns;
  if (op.mask == 0) return;  // occupies the slot, changes nothing

  const bool is_read =
      op.kind == OpKind::ReadAssign || op.kind == OpKind::ReadAccum;

  // Neighbor sources must observe the pre-op latch. A same-slice or
  // non-overlapping neighbor read never sees its own output, so the copy is
  // only taken when the mask actually creates a dependency.
  const std::array<BitRow, kSlices>* latch_base = &rl_;
  if (is_read) {
    bool hazard = false;
    switch (op.latch) {
      case LatchSrc::RlE:
      case LatchSrc::RlW:
        hazard = true;
        break;
      case LatchSrc::RlN:
      case LatchSrc::RlS:
        hazard = (op.mask & uint32_t(op.mask) << 1) != 0;
        break;
      default:
        break;
    }
    if (hazard) {
      rl_snap_ = rl_;
      latch_base = &rl_snap_;
    }
  }

  const uint64_t lx = op.negate_latch ? ~0ull : 0;
  const bool has_vrf = op.vrf0 != kNoReg;
  const bool has_pair = op.vrf1 != kNoReg;
  const bool has_latch = op.latch != LatchSrc::None;
  BitRow shift_tmp;

  auto latch_row = [&](size_t s) -> const uint64_t* {
    switch (op.latch) {
      case LatchSrc::Rl: return (*latch_base)[s].data();
      case LatchSrc::RlN:
        return s == 0 ? kZeroRow.data() : (*latch_base)[s - 1].data();
      case LatchSrc::RlS:
        return s == kSlices - 1 ? kZeroRow.data()
                                : (*latch_base)[s + 1].data();
      case LatchSrc::RlE:
        shift_east((*latch_base)[s], shift_tmp);
        return shift_tmp.data();
      case LatchSrc::RlW:
        shift_west((*latch_base)[s], shift_tmp);
        return shift_tmp.data();
      case LatchSrc::Gvl: return gvl_.data();
      case LatchSrc::Ghl: return ghl_[s] ? kOnesRow.data() : kZeroRow.data();
      case LatchSrc::Const0: return kZeroRow.data();
      case LatchSrc::Const1: return kOnesRow.data();
      case LatchSrc::None: return nullptr;
    }
    return nullptr;
  };

  switch (op.kind) {
    case OpKind::ReadAssign:
    case OpKind::ReadAccum: {
      for (size_t s = 0; s < kSlices; ++s) {
        if (!(op.mask >> s & 1)) continue;
        const uint64_t* lp = has_latch ? latch_row(s) : nullptr;
        const uint64_t* a0 = has_vrf ? vrf_row(op.vrf0, s).data() : nullptr;
        const uint64_t* a1 = has_pair ? vrf_row(op.vrf1, s).data() : nullptr;
        uint64_t* out = rl_[s].data();
        for (size_t w = 0; w < kWordsPerRow; ++w) {
          uint64_t v;
          if (has_vrf) {
            v = a0[w];
            if (has_pair) v &= a1[w];
            if (has_latch) v = comb(op.op, v, lp[w] ^ lx);
          } else {
            v = lp[w] ^ lx;
          }
          out[w] = op.kind == OpKind::ReadAssign ? v : comb(op.op, out[w], v);
        }
      }
      break;
    }
    case OpKind::Write: {
      for (size_t s = 0; s < kSlices; ++s) {
        if (!(op.mask >> s & 1)) continue;
        const uint64_t* lp = latch_row(s);
        uint64_t* out = vrf_row(op.dst, s).data();
        for (size_t w = 0; w < kWordsPerRow; ++w) out[w] = lp[w] ^ lx;
      }
      break;
    }
    case OpKind::GvlAssign: {
      bool first = true;
      for (size_t s = 0; s < kSlices; ++s) {
        if (!(op.mask >> s & 1)) continue;
        if (first) {
          gvl_ = rl_[s];
          first = false;
        } else {
          for (size_t w = 0; w < kWordsPerRow; ++w) gvl_[w] &= rl_[s][w];
        }
      }
      break;
    }
    case OpKind::GhlAssign: {
      for (size_t s = 0; s < kSlices; ++s) {
        if (!(op.mask >> s & 1)) continue;
        bool any = false;
        for (size_t w = 0; w < kWordsPerRow && !any; ++w)
          any = rl_[s][w] != 0;
        ghl_[s] = any;
      }
      break;
    }
  }
}

void CoreState::run(const Fragment& frag) {
  size_t saved = current_section_;
  if (!frag.label.empty()) current_section_ = section_index(frag.label);
  add_cycles(cfg_.fragment_overhead);
  for (const MicroOp& op : frag.ops) exec(op);
  current_section_ = saved;
}

MemHandle CoreState::alloc(size_t words) {
  size_t capacity = (words + kColumns - 1) / kColumns * kColumns;
  if (capacity == 0) capacity = kColumns;
  MemHandle h{next_handle_++, words};
  dram_.emplace(h.id, std::vector<uint16_t>(capacity, 0));
  return h;
}

void CoreState::free(MemHandle h) {
  if (dram_.erase(h.id) == 0)
    throw std::runtime_error("free of unknown handle");
}

std::vector<uint16_t>& CoreState::dram_of(MemHandle h) {
  auto it = dram_.find(h.id);
  if (it == dram_.end()) throw std::runtime_error("unknown handle");
  return it->second;
}

const std::vector<uint16_t>& CoreState::dram_of(MemHandle h) const {
  auto it = dram_.find(h.id);
  if (it == dram_.end()) throw std::runtime_error("unknown handle");
  return it->second;
}

void CoreState::stage_to_device(MemHandle h, size_t byte_offset,
                                std::span<const uint16_t> data) {
  auto& mem = dram_of(h);
  if (byte_offset % 2 != 0)
    throw std::out_of_range("stage offset must be word-aligned");
  size_t word_offset = byte_offset / 2;
  if (word_offset + data.size() > mem.size())
    throw std::out_of_range("stage beyond allocation");
  std::memcpy(mem.data() + word_offset, data.data(),
              data.size() * sizeof(uint16_t));
  staged_in_ += 2 * data.size();
}

void CoreState::dram_load_vr(uint8_t reg, MemHandle h, size_t word_offset) {
  if (reg >= kRegs) throw std::out_of_range("register out of range");
  const auto& mem = dram_of(h);
  if (word_offset + kColumns > mem.size())
    throw std::out_of_range("load beyond allocation");
  add_cycles(cfg_.dram_vr_cost);

  uint64_t* rows[kSlices];
  for (size_t s = 0; s < kSlices; ++s) {
    BitRow& r = vrf_row(reg, s);
    r.fill(0);
    rows[s] = r.data();
  }
  const uint16_t* src = mem.data() + word_offset;
  for (size_t c = 0; c < kColumns; ++c) {
    uint32_t v = src[c];
    while (v) {
      int s = std::countr_zero(v);
      v &= v - 1;
      rows[s][c >> 6] |= 1ull << (c & 63);
    }
  }
}

std::vector<uint16_t> CoreState::read_vr_to_host(uint8_t reg, size_t count) {
  if (reg >= kRegs) throw std::out_of_range("register out of range");
  if (count > kColumns) throw std::out_of_range("count beyond columns");
  std::vector<uint16_t> out(count, 0);
  for (size_t s = 0; s < kSlices; ++s) {
    const BitRow& r = vrf_row(reg, s);
    for (size_t c = 0; c < count; ++c)
      out[c] |= uint16_t((r[c >> 6] >> (c & 63) & 1) << s);
  }
  staged_out_ += 2 * count;
  return out;
}

void CoreState::vmrf_store(uint8_t slot, uint8_t reg) {
  if (slot >= kVmrfSlots) throw std::out_of_range("vmrf slot out of range");
  if (reg >= kRegs) throw std::out_of_range("register out of range");
  add_cycles(cfg_.vmrf_cost);
  for (size_t s = 0; s < kSlices; ++s)
    vmrf_[slot * kSlices + s] = vrf_row(reg, s);
}

void CoreState::vmrf_load(uint8_t reg, uint8_t slot) {
  if (slot >= kVmrfSlots) throw std::out_of_range("vmrf slot out of range");
  if (reg >= kRegs) throw std::out_of_range("register out of range");
  add_cycles(cfg_.vmrf_cost);
  for (size_t s = 0; s < kSlices; ++s)
    vrf_row(reg, s) = vmrf_[slot * kSlices + s];
}

void CoreState::set_section(std::string_view label) {
  current_section_ = section_index(label);
}

const std::string& CoreState::current_section() const {
  return sections_[current_section_].label;
}

size_t CoreState::section_index(std::string_view label) {
  auto it = section_index_.find(std::string(label));
  if (it != section_index_.end()) return it->second;
  sections_.push_back({std::string(label), 0});
  section_index_.emplace(std::string(label), sections_.size() - 1);
  return sections_.size() - 1;
}

void CoreState::add_cycles(uint64_t n) {
  cycles_ += n;
  sections_[current_section_].cycles += n;
}

std::vector<std::pair<std::string, uint64_t>> CoreState::sections() const {
  std::vector<std::pair<std::string, uint64_t>> out;
  out.reserve(sections_.size());
  for (const auto& s : sections_) out.emplace_back(s.label, s.cycles);
  return out;
}

void CoreState::reset_counters() {
  std::string ambient = sections_[current_section_].label;
  cycles_ = 0;
  bit_touches_ = 0;
  staged_in_ = 0;
  staged_out_ = 0;
  sections_.clear();
  section_index_.clear();
  current_section_ = section_index(ambient);
}

uint16_t CoreState::peek_vr(uint8_t reg, size_t col) const {
  uint16_t v = 0;
  for (size_t s = 0; s < kSlices; ++s)
    v |= uint16_t((vrf_row(reg, s)[col >> 6] >> (col & 63) & 1) << s);
  return v;
}

void CoreState::poke_vr(uint8_t reg, size_t col, uint16_t value) {
  for (size_t s = 0; s < kSlices; ++s) {
    uint64_t bit = 1ull << (col & 63);
    BitRow& r = vrf_row(reg, s);
    if (value >> s & 1)
      r[col >> 6] |= bit;
    else
      r[col >> 6] &= ~bit;
  }
}

uint16_t CoreState::peek_rl(size_t col) const {
  uint16_t v = 0;
  for (size_t s = 0; s < kSlices; ++s)
    v |= uint16_t((rl_[s][col >> 6] >> (col & 63) & 1) << s);
  return v;
}

void CoreState::poke_rl(size_t col, uint16_t value) {
  for (size_t s = 0; s < kSlices; ++s) {
    uint64_t bit = 1ull << (col & 63);
    if (value >> s & 1)
      rl_[s][col >> 6] |= bit;
    else
      rl_[s][col >> 6] &= ~bit;
  }
}

bool CoreState::peek_gvl(size_t col) const {
  return gvl_[col >> 6] >> (col & 63) & 1;
}

bool CoreState::peek_ghl(size_t slice) const { return ghl_[slice]; }

uint16_t CoreState::peek_dram(MemHandle h, size_t word) const {
  const auto& mem = dram_of(h);
  if (word >= mem.size()) throw std::out_of_range("word beyond allocation");
  return mem[word];
}

}  // namespace apusim
