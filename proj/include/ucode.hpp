#ifndef UCODE_HPP
#define UCODE_HPP

#include <cstdint>
#include <optional>

#include "apusim.hpp"

// Named microcode fragments for the vector operations the kernel needs.
// Each builder returns a fully bound Fragment; exec helpers run it on a core
// and take care of operand staging where a fragment forbids aliasing.
//
// Register convention: registers 0..14 belong to callers. Registers 15..22
// are fragment scratch and may be clobbered by any fragment. Register 23
// (MASK_REG) packs 16 single-bit element masks, one per slice ("lane"):
// lanes 0..7 are caller masks, 8..11 fragment temporaries, 12..15 arithmetic
// flags. Fragments write only their named output lanes.

namespace ucode {

constexpr uint8_t kMaskReg = 23;
constexpr uint8_t kUserRegs = 15;  // 0..14 caller-owned

// Scratch register roles (15..22).
constexpr uint8_t kTmpP = 15;      // adder propagate; ripple sum temp
constexpr uint8_t kTmpC = 16;      // adder group generate; ripple carry temp
constexpr uint8_t kTmpQ = 17;      // adder group propagate
constexpr uint8_t kTmpStage = 18;  // aliased-destination staging
constexpr uint8_t kTmpLt = 19;     // discarded difference in vlt
constexpr uint8_t kTmpBlend = 20;  // vcopy_masked blend term
constexpr uint8_t kTmpNeg = 21;    // ~b in subtraction

using Lane = uint8_t;  // 0..15, slice index within MASK_REG

enum class BitwiseOp : uint8_t { Or, And, Xor, Not, OrNot, AndNot };

enum class AdderKind : uint8_t { Ripple, CarrySelect };

struct AddFlags {
  std::optional<Lane> cin;
  std::optional<Lane> cout;
};

// dst = a op b elementwise; Not ignores b; OrNot/AndNot are a | ~b, a & ~b.
apusim::Fragment frag_bitwise(BitwiseOp op, uint8_t dst, uint8_t a,
                              uint8_t b = apusim::kNoReg);

apusim::Fragment frag_vcopy(uint8_t dst, uint8_t src);

// Every element of dst = value. Core cost 3 ops.
apusim::Fragment frag_vmv_vx(uint8_t dst, uint16_t value);

// out[c] = 1 iff src element c equals scalar on the slices in slice_mask.
// Core cost 4 ops for any slice_mask. out must be a lane in 0..11.
apusim::Fragment frag_vmseq(uint8_t src, uint16_t scalar, Lane out,
                            uint16_t slice_mask = 0xFFFF);

// dst[c] |= scalar_slices for elements where the lane is set; the scalar
// doubles as the slice mask of the read-modify-write. Core cost 4 ops.
apusim::Fragment frag_or_scalar_where(uint8_t dst, uint16_t scalar_slices,
                                      Lane where);

// out[c] = bit `bit` of element c.
apusim::Fragment frag_extract_bit(uint8_t vr, unsigned bit, Lane out);

// dst[c] = m[c] ? 1 : 0 as a 16-bit value.
apusim::Fragment frag_mask_to_01(Lane m, uint8_t dst);

// dst[c] = src[c] where m[c], else unchanged.
apusim::Fragment frag_vcopy_masked(uint8_t dst, uint8_t src, Lane m);

// Element left shift by one. Bit 15 is captured into shifted_out before the
// shift; bit 0 becomes shift_in (0 when absent). shift_in == shifted_out is
// supported: the in lane is read before the out lane is written.
apusim::Fragment frag_lsl_with_carry(uint8_t vr, std::optional<Lane> shift_in,
                                     Lane shifted_out);

// dst = (a + b + cin) mod 2^16 with optional carry-out of bit 15.
// a == b is fine; dst aliasing a source is not (use the vadd helper, which
// stages through kTmpStage). Ripple follows the replicated per-bit listing;
// carry-select precomputes per-group generate/propagate chains once and
// resolves the four group carries through GVL broadcasts.
apusim::Fragment frag_vadd(AdderKind kind, uint8_t dst, uint8_t a, uint8_t b,
                           AddFlags flags = {});

// dst = (a - b) mod 2^16 via a + ~b + 1; borrow = NOT carry-out.
// dst == b is fine (b is consumed first); dst == a is not.
apusim::Fragment frag_vsub(AdderKind kind, uint8_t dst, uint8_t a, uint8_t b,
                           std::optional<Lane> borrow = {});

// out[c] = 1 iff a[c] < b[c] (unsigned); difference lands in kTmpLt.
apusim::Fragment frag_vlt(AdderKind kind, uint8_t a, uint8_t b, Lane out);

// Run-on-core helpers. vadd/vsub stage aliased destinations through
// kTmpStage as a separate copy fragment.
void bitwise(apusim::CoreState& core, BitwiseOp op, uint8_t dst, uint8_t a,
             uint8_t b = apusim::kNoReg);
void vmv_vx(apusim::CoreState& core, uint8_t dst, uint16_t value);
void vmseq(apusim::CoreState& core, uint8_t src, uint16_t scalar, Lane out,
           uint16_t slice_mask = 0xFFFF);
void or_scalar_where(apusim::CoreState& core, uint8_t dst,
                     uint16_t scalar_slices, Lane where);
void extract_bit(apusim::CoreState& core, uint8_t vr, unsigned bit, Lane out);
void mask_to_01(apusim::CoreState& core, Lane m, uint8_t dst);
void vcopy_masked(apusim::CoreState& core, uint8_t dst, uint8_t src, Lane m);
void lsl_with_carry(apusim::CoreState& core, uint8_t vr,
                    std::optional<Lane> shift_in, Lane shifted_out);
void vadd(apusim::CoreState& core, AdderKind kind, uint8_t dst, uint8_t a,
          uint8_t b, AddFlags flags = {});
void vsub(apusim::CoreState& core, AdderKind kind, uint8_t dst, uint8_t a,
          uint8_t b, std::optional<Lane> borrow = {});
void vlt(apusim::CoreState& core, AdderKind kind, uint8_t a, uint8_t b,
         Lane out);

}  // namespace ucode

#endif
