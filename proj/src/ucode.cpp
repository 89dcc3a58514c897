#include "ucode.hpp"

#include <stdexcept>

namespace ucode {

using apusim::BoolOp;
using apusim::Fragment;
using apusim::kNoReg;
using apusim::LatchSrc;
using apusim::MicroOp;
using apusim::op_accum;
using apusim::op_ghl;
using apusim::op_gvl;
using apusim::op_read;
using apusim::op_read_comb;
using apusim::op_write;

namespace {

uint16_t lane_bit(Lane l) {
  if (l > 15) throw std::invalid_argument("lane out of range");
  return uint16_t(1u << l);
}

void check_user_reg(uint8_t r) {
  if (r >= apusim::kRegs) throw std::invalid_argument("register out of range");
  if (r == kMaskReg) throw std::invalid_argument("MASK_REG as data operand");
}

// Loads lane `l` of MASK_REG onto GVL so later reads broadcast it.
void emit_lane_to_gvl(Fragment& f, Lane l) {
  f.ops.push_back(op_read(lane_bit(l), kMaskReg));
  f.ops.push_back(op_gvl(lane_bit(l)));
}

// Per-group carry chains of the carry-select adder. head_mask selects the
// lowest slice of each 4-bit group; three chained steps walk the remaining
// slices via the north latch.
void emit_generate_chain(Fragment& f, uint8_t a, uint8_t b) {
  f.ops.push_back(op_read(0x1111, a, b));
  for (uint16_t m : {uint16_t(0x2222), uint16_t(0x4444), uint16_t(0x8888)}) {
    f.ops.push_back(op_read_comb(m, kTmpP, BoolOp::And, LatchSrc::RlN));
    f.ops.push_back(op_accum(m, BoolOp::Or, a, b));
  }
}

void emit_propagate_chain(Fragment& f) {
  f.ops.push_back(op_read(0x1111, kTmpP));
  for (uint16_t m : {uint16_t(0x2222), uint16_t(0x4444), uint16_t(0x8888)})
    f.ops.push_back(op_read_comb(m, kTmpP, BoolOp::And, LatchSrc::RlN));
}

enum class CinKind { None, Lane, ConstOne };

// Carry-select core shared by add and subtract. Leaves the per-slice actual
// carry-in on RL, XORs with the propagate bits and writes the sum; the
// optional epilogue recovers the bit-15 carry-out as p & ~sum | g.
void emit_select_adder(Fragment& f, uint8_t dst, uint8_t a, uint8_t b,
                       CinKind cin, std::optional<Lane> cin_lane,
                       std::optional<Lane> cout, bool negate_cout) {
  // tP = a ^ b; per-group generate chain with zero group carry-in, parked in
  // tC shifted up one slice; prefix-propagate chain parked in tQ likewise.
  f.ops.push_back(op_read(0xFFFF, a));
  f.ops.push_back(op_accum(0xFFFF, BoolOp::Xor, b));
  f.ops.push_back(op_write(0xFFFF, kTmpP, LatchSrc::Rl));
  emit_generate_chain(f, a, b);
  f.ops.push_back(op_write(0xFFFF, kTmpC, LatchSrc::RlN));
  emit_propagate_chain(f);
  f.ops.push_back(op_write(0xFFFF, kTmpQ, LatchSrc::RlN));

  // Group 0: slice 0 takes the carry-in itself; slices 1..3 take
  // tC | cin & tQ. With no carry-in the propagate term vanishes.
  switch (cin) {
    case CinKind::Lane:
      emit_lane_to_gvl(f, *cin_lane);
      f.ops.push_back(op_read(0x0001, LatchSrc::Gvl));
      f.ops.push_back(op_read_comb(0x000E, kTmpQ, BoolOp::And, LatchSrc::Gvl));
      f.ops.push_back(op_accum(0x000E, BoolOp::Or, kTmpC));
      break;
    case CinKind::None:
      f.ops.push_back(op_read(0x0001, LatchSrc::Const0));
      f.ops.push_back(op_read(0x000E, kTmpC));
      break;
    case CinKind::ConstOne:
      f.ops.push_back(op_read(0x0001, LatchSrc::Const1));
      f.ops.push_back(op_read(0x000E, kTmpQ));
      f.ops.push_back(op_accum(0x000E, BoolOp::Or, kTmpC));
      break;
  }

  // Groups 1..3: compute the group carry gc into the head slice, broadcast
  // it through GVL, then resolve the group's upper slices.
  const uint16_t heads[3] = {0x0010, 0x0100, 0x1000};
  const uint16_t uppers[3] = {0x00E0, 0x0E00, 0xE000};
  for (int g = 0; g < 3; ++g) {
    if (g == 0 && cin == CinKind::None) {
      f.ops.push_back(op_read(heads[g], kTmpC));  // gc1 = G0, no propagate
    } else if (g == 0 && cin == CinKind::ConstOne) {
      f.ops.push_back(op_read(heads[g], kTmpQ));  // gc1 = G0 | P0
      f.ops.push_back(op_accum(heads[g], BoolOp::Or, kTmpC));
    } else {
      f.ops.push_back(
          op_read_comb(heads[g], kTmpQ, BoolOp::And, LatchSrc::Gvl));
      f.ops.push_back(op_accum(heads[g], BoolOp::Or, kTmpC));
    }
    f.ops.push_back(op_gvl(heads[g]));
    f.ops.push_back(op_read_comb(uppers[g], kTmpQ, BoolOp::And, LatchSrc::Gvl));
    f.ops.push_back(op_accum(uppers[g], BoolOp::Or, kTmpC));
  }

  // RL now holds the actual carry into every slice.
  f.ops.push_back(op_accum(0xFFFF, BoolOp::Xor, kTmpP));
  f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl));

  if (cout) {
    f.ops.push_back(
        op_read_comb(0x8000, kTmpP, BoolOp::And, LatchSrc::Rl, true));
    f.ops.push_back(op_accum(0x8000, BoolOp::Or, a, b));
    f.ops.push_back(op_gvl(0x8000));
    f.ops.push_back(op_write(lane_bit(*cout), kMaskReg, LatchSrc::Gvl,
                             negate_cout));
  }
}

// Ripple core: the published per-bit pattern, sum then carry-out, the carry
// riding the previous slice of RL. Bit 0 takes its carry from GVL (lane
// carry-in), from nothing, or from a constant 1 (subtraction).
void emit_ripple_adder(Fragment& f, uint8_t dst, uint8_t a, uint8_t b,
                       CinKind cin, std::optional<Lane> cin_lane,
                       std::optional<Lane> cout, bool negate_cout) {
  switch (cin) {
    case CinKind::Lane:
      emit_lane_to_gvl(f, *cin_lane);
      f.ops.push_back(op_read(0x0001, a));
      f.ops.push_back(op_accum(0x0001, BoolOp::Xor, b));
      f.ops.push_back(op_accum(0x0001, BoolOp::Xor, LatchSrc::Gvl));
      f.ops.push_back(op_write(0x0001, dst, LatchSrc::Rl));
      f.ops.push_back(op_read(0x0001, a, b));
      f.ops.push_back(op_write(0x0001, kTmpP, LatchSrc::Rl));
      f.ops.push_back(op_read(0x0001, b));
      f.ops.push_back(op_accum(0x0001, BoolOp::And, LatchSrc::Gvl));
      f.ops.push_back(op_write(0x0001, kTmpC, LatchSrc::Rl));
      f.ops.push_back(op_read(0x0001, a));
      f.ops.push_back(op_accum(0x0001, BoolOp::And, LatchSrc::Gvl));
      f.ops.push_back(op_accum(0x0001, BoolOp::Or, kTmpP));
      f.ops.push_back(op_accum(0x0001, BoolOp::Or, kTmpC));
      break;
    case CinKind::None:
      f.ops.push_back(op_read(0x0001, a));
      f.ops.push_back(op_accum(0x0001, BoolOp::Xor, b));
      f.ops.push_back(op_write(0x0001, dst, LatchSrc::Rl));
      f.ops.push_back(op_read(0x0001, a, b));
      break;
    case CinKind::ConstOne:
      // sum0 = a ^ b' ^ 1 via a negated write; cout0 = a | b'.
      f.ops.push_back(op_read(0x0001, a));
      f.ops.push_back(op_accum(0x0001, BoolOp::Xor, b));
      f.ops.push_back(op_write(0x0001, dst, LatchSrc::Rl, true));
      f.ops.push_back(op_read(0x0001, a));
      f.ops.push_back(op_accum(0x0001, BoolOp::Or, b));
      break;
  }
  for (int s = 1; s < 16; ++s) {
    const uint16_t m = uint16_t(1u << s);
    f.ops.push_back(op_read(m, a));
    f.ops.push_back(op_accum(m, BoolOp::Xor, b));
    f.ops.push_back(op_accum(m, BoolOp::Xor, LatchSrc::RlN));
    f.ops.push_back(op_write(m, dst, LatchSrc::Rl));
    f.ops.push_back(op_read(m, a, b));
    f.ops.push_back(op_write(m, kTmpP, LatchSrc::Rl));
    f.ops.push_back(op_read(m, b));
    f.ops.push_back(op_accum(m, BoolOp::And, LatchSrc::RlN));
    f.ops.push_back(op_write(m, kTmpC, LatchSrc::Rl));
    f.ops.push_back(op_read(m, a));
    f.ops.push_back(op_accum(m, BoolOp::And, LatchSrc::RlN));
    f.ops.push_back(op_accum(m, BoolOp::Or, kTmpP));
    f.ops.push_back(op_accum(m, BoolOp::Or, kTmpC));
  }
  if (cout) {
    f.ops.push_back(op_gvl(0x8000));
    f.ops.push_back(op_write(lane_bit(*cout), kMaskReg, LatchSrc::Gvl,
                             negate_cout));
  }
}

void emit_adder(Fragment& f, AdderKind kind, uint8_t dst, uint8_t a,
                uint8_t b, CinKind cin, std::optional<Lane> cin_lane,
                std::optional<Lane> cout, bool negate_cout) {
  if (kind == AdderKind::CarrySelect)
    emit_select_adder(f, dst, a, b, cin, cin_lane, cout, negate_cout);
  else
    emit_ripple_adder(f, dst, a, b, cin, cin_lane, cout, negate_cout);
}

}  // namespace

Fragment frag_bitwise(BitwiseOp op, uint8_t dst, uint8_t a, uint8_t b) {
  check_user_reg(dst);
  check_user_reg(a);
  if (op != BitwiseOp::Not) check_user_reg(b);
  Fragment f;
  switch (op) {
    case BitwiseOp::And:
      f.ops.push_back(op_read(0xFFFF, a, b));
      f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl));
      break;
    case BitwiseOp::Or:
      f.ops.push_back(op_read(0xFFFF, a));
      f.ops.push_back(op_accum(0xFFFF, BoolOp::Or, b));
      f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl));
      break;
    case BitwiseOp::Xor:
      f.ops.push_back(op_read(0xFFFF, a));
      f.ops.push_back(op_accum(0xFFFF, BoolOp::Xor, b));
      f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl));
      break;
    case BitwiseOp::Not:
      f.ops.push_back(op_read(0xFFFF, a));
      f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl, true));
      break;
    case BitwiseOp::OrNot:
      f.ops.push_back(op_read(0xFFFF, b));
      f.ops.push_back(op_read_comb(0xFFFF, a, BoolOp::Or, LatchSrc::Rl, true));
      f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl));
      break;
    case BitwiseOp::AndNot:
      f.ops.push_back(op_read(0xFFFF, b));
      f.ops.push_back(
          op_read_comb(0xFFFF, a, BoolOp::And, LatchSrc::Rl, true));
      f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl));
      break;
  }
  return f;
}

Fragment frag_vcopy(uint8_t dst, uint8_t src) {
  check_user_reg(dst);
  check_user_reg(src);
  Fragment f;
  f.ops.push_back(op_read(0xFFFF, src));
  f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl));
  return f;
}

Fragment frag_vmv_vx(uint8_t dst, uint16_t value) {
  check_user_reg(dst);
  Fragment f;
  f.ops.push_back(op_read(0xFFFF, LatchSrc::Const0));
  f.ops.push_back(op_read(value, LatchSrc::Const1));
  f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl));
  return f;
}

Fragment frag_vmseq(uint8_t src, uint16_t scalar, Lane out,
                    uint16_t slice_mask) {
  check_user_reg(src);
  if (out > 11) throw std::invalid_argument("vmseq into a flag lane");
  Fragment f;
  f.ops.push_back(op_read(slice_mask, src));
  f.ops.push_back(
      op_read(uint16_t(~scalar & slice_mask), LatchSrc::Rl, true));
  f.ops.push_back(op_gvl(slice_mask));
  f.ops.push_back(op_write(lane_bit(out), kMaskReg, LatchSrc::Gvl));
  return f;
}

Fragment frag_or_scalar_where(uint8_t dst, uint16_t scalar_slices,
                              Lane where) {
  check_user_reg(dst);
  Fragment f;
  emit_lane_to_gvl(f, where);
  f.ops.push_back(
      op_read_comb(scalar_slices, dst, BoolOp::Or, LatchSrc::Gvl));
  f.ops.push_back(op_write(scalar_slices, dst, LatchSrc::Rl));
  return f;
}

Fragment frag_extract_bit(uint8_t vr, unsigned bit, Lane out) {
  check_user_reg(vr);
  if (bit > 15) throw std::invalid_argument("bit out of range");
  Fragment f;
  f.ops.push_back(op_read(uint16_t(1u << bit), vr));
  f.ops.push_back(op_gvl(uint16_t(1u << bit)));
  f.ops.push_back(op_write(lane_bit(out), kMaskReg, LatchSrc::Gvl));
  return f;
}

Fragment frag_mask_to_01(Lane m, uint8_t dst) {
  check_user_reg(dst);
  Fragment f;
  emit_lane_to_gvl(f, m);
  f.ops.push_back(op_read(0xFFFF, LatchSrc::Const0));
  f.ops.push_back(op_read(0x0001, LatchSrc::Gvl));
  f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl));
  return f;
}

Fragment frag_vcopy_masked(uint8_t dst, uint8_t src, Lane m) {
  check_user_reg(dst);
  check_user_reg(src);
  Fragment f;
  emit_lane_to_gvl(f, m);
  f.ops.push_back(op_read_comb(0xFFFF, src, BoolOp::And, LatchSrc::Gvl));
  f.ops.push_back(op_write(0xFFFF, kTmpBlend, LatchSrc::Rl));
  f.ops.push_back(op_read_comb(0xFFFF, dst, BoolOp::And, LatchSrc::Gvl, true));
  f.ops.push_back(op_accum(0xFFFF, BoolOp::Or, kTmpBlend));
  f.ops.push_back(op_write(0xFFFF, dst, LatchSrc::Rl));
  return f;
}

Fragment frag_lsl_with_carry(uint8_t vr, std::optional<Lane> shift_in,
                             Lane shifted_out) {
  check_user_reg(vr);
  Fragment f;
  if (shift_in) emit_lane_to_gvl(f, *shift_in);
  f.ops.push_back(op_read(0xFFFF, vr));
  f.ops.push_back(op_write(0xFFFF, vr, LatchSrc::RlN));  // slice 0 gets 0
  if (shift_in) f.ops.push_back(op_write(0x0001, vr, LatchSrc::Gvl));
  f.ops.push_back(op_gvl(0x8000));  // RL still holds the pre-shift value
  f.ops.push_back(op_write(lane_bit(shifted_out), kMaskReg, LatchSrc::Gvl));
  return f;
}

Fragment frag_vadd(AdderKind kind, uint8_t dst, uint8_t a, uint8_t b,
                   AddFlags flags) {
  check_user_reg(a);
  check_user_reg(b);
  if (dst == kMaskReg || dst >= apusim::kRegs)
    throw std::invalid_argument("bad add destination");
  if (dst == a || dst == b)
    throw std::invalid_argument("vadd fragment needs a distinct destination");
  Fragment f;
  emit_adder(f, kind, dst, a, b,
             flags.cin ? CinKind::Lane : CinKind::None, flags.cin, flags.cout,
             false);
  return f;
}

Fragment frag_vsub(AdderKind kind, uint8_t dst, uint8_t a, uint8_t b,
                   std::optional<Lane> borrow) {
  check_user_reg(a);
  check_user_reg(b);
  if (dst == kMaskReg || dst >= apusim::kRegs)
    throw std::invalid_argument("bad sub destination");
  if (dst == a)
    throw std::invalid_argument("vsub fragment needs dst distinct from a");
  Fragment f;
  f.ops.push_back(op_read(0xFFFF, b));
  f.ops.push_back(op_write(0xFFFF, kTmpNeg, LatchSrc::Rl, true));
  emit_adder(f, kind, dst, a, kTmpNeg, CinKind::ConstOne, {}, borrow, true);
  return f;
}

Fragment frag_vlt(AdderKind kind, uint8_t a, uint8_t b, Lane out) {
  return frag_vsub(kind, kTmpLt, a, b, out);
}

void bitwise(apusim::CoreState& core, BitwiseOp op, uint8_t dst, uint8_t a,
             uint8_t b) {
  core.run(frag_bitwise(op, dst, a, b));
}

void vmv_vx(apusim::CoreState& core, uint8_t dst, uint16_t value) {
  core.run(frag_vmv_vx(dst, value));
}

void vmseq(apusim::CoreState& core, uint8_t src, uint16_t scalar, Lane out,
           uint16_t slice_mask) {
  core.run(frag_vmseq(src, scalar, out, slice_mask));
}

void or_scalar_where(apusim::CoreState& core, uint8_t dst,
                     uint16_t scalar_slices, Lane where) {
  core.run(frag_or_scalar_where(dst, scalar_slices, where));
}

void extract_bit(apusim::CoreState& core, uint8_t vr, unsigned bit,
                 Lane out) {
  core.run(frag_extract_bit(vr, bit, out));
}

void mask_to_01(apusim::CoreState& core, Lane m, uint8_t dst) {
  core.run(frag_mask_to_01(m, dst));
}

void vcopy_masked(apusim::CoreState& core, uint8_t dst, uint8_t src, Lane m) {
  core.run(frag_vcopy_masked(dst, src, m));
}

void lsl_with_carry(apusim::CoreState& core, uint8_t vr,
                    std::optional<Lane> shift_in, Lane shifted_out) {
  core.run(frag_lsl_with_carry(vr, shift_in, shifted_out));
}

void vadd(apusim::CoreState& core, AdderKind kind, uint8_t dst, uint8_t a,
          uint8_t b, AddFlags flags) {
  if (dst == a || dst == b) {
    core.run(frag_vadd(kind, kTmpStage, a, b, flags));
    core.run(frag_vcopy(dst, kTmpStage));
  } else {
    core.run(frag_vadd(kind, dst, a, b, flags));
  }
}

void vsub(apusim::CoreState& core, AdderKind kind, uint8_t dst, uint8_t a,
          uint8_t b, std::optional<Lane> borrow) {
  if (dst == a) {
    core.run(frag_vsub(kind, kTmpStage, a, b, borrow));
    core.run(frag_vcopy(dst, kTmpStage));
  } else {
    core.run(frag_vsub(kind, dst, a, b, borrow));
  }
}

void vlt(apusim::CoreState& core, AdderKind kind, uint8_t a, uint8_t b,
         Lane out) {
  core.run(frag_vlt(kind, a, b, out));
}

}  // namespace ucode
