#ifndef TEST_ORACLES_HPP
#define TEST_ORACLES_HPP

// Reference implementations used only by tests. Everything here is written
// directly from first principles (plain loops over characters / integers) so
// that a bug in the library cannot hide inside its own oracle.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace oracles {

// Semi-global edit distance: the query must align end to end, the candidate
// window may be entered and left anywhere. Full dynamic program:
//   C[i][0] = i, C[0][j] = 0, answer = min_j C[m][j].
inline int edit_distance_semiglobal(const std::string& query,
                                    const std::string& window) {
  const size_t m = query.size(), n = window.size();
  std::vector<int> prev(n + 1), cur(n + 1);
  for (size_t j = 0; j <= n; ++j) prev[j] = 0;
  for (size_t i = 1; i <= m; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= n; ++j) {
      int sub = prev[j - 1] + (query[i - 1] == window[j - 1] ? 0 : 1);
      int del = prev[j] + 1;
      int ins = cur[j - 1] + 1;
      cur[j] = std::min({sub, del, ins});
    }
    std::swap(prev, cur);
  }
  int best = prev[0];
  for (size_t j = 1; j <= n; ++j) best = std::min(best, prev[j]);
  return best;
}

// Expected 2-bit packing, assembled word by word with explicit arithmetic.
inline std::vector<uint16_t> pack_words_expected(const std::string& text) {
  auto code = [](char c) -> uint16_t {
    switch (c) {
      case 'A': case 'a': return 0;
      case 'C': case 'c': return 1;
      case 'G': case 'g': return 2;
      case 'T': case 't': return 3;
    }
    assert(false && "oracle fed a non-ACGT char");
    return 0;
  };
  std::vector<uint16_t> words((text.size() + 7) / 8, 0);
  for (size_t i = 0; i < text.size(); ++i)
    words[i / 8] = static_cast<uint16_t>(words[i / 8] |
                                         (code(text[i]) << (2 * (i % 8))));
  return words;
}

// Per-column 16-bit arithmetic the bit-sliced fragments must reproduce.
struct AddResult {
  uint16_t sum;
  bool carry_out;
};
inline AddResult add16(uint16_t a, uint16_t b, bool carry_in) {
  uint32_t s = uint32_t(a) + uint32_t(b) + (carry_in ? 1u : 0u);
  return {static_cast<uint16_t>(s & 0xFFFFu), (s >> 16) != 0};
}
struct SubResult {
  uint16_t diff;
  bool borrow_out;
};
inline SubResult sub16(uint16_t a, uint16_t b) {
  uint32_t d = uint32_t(a) - uint32_t(b);
  return {static_cast<uint16_t>(d & 0xFFFFu), a < b};
}

// Logical shift left by one across chunk boundaries, per column.
inline uint16_t lsl16(uint16_t v, bool shift_in, bool* shifted_out) {
  if (shifted_out) *shifted_out = (v & 0x8000u) != 0;
  return static_cast<uint16_t>((v << 1) | (shift_in ? 1u : 0u));
}

struct Rng {
  explicit Rng(uint64_t seed) : eng(seed) {}
  std::mt19937_64 eng;
  uint64_t next(uint64_t bound) {  // uniform in [0, bound)
    return std::uniform_int_distribution<uint64_t>(0, bound - 1)(eng);
  }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng); }
  char base() { return "ACGT"[next(4)]; }
  std::string dna(size_t len) {
    std::string s(len, 'A');
    for (auto& c : s) c = base();
    return s;
  }
};

// Applies exactly `edits` random point edits (substitution, insertion or
// deletion) to `s`. The true edit distance to the original is at most
// `edits`; it can be less if edits cancel.
inline std::string plant_edits(const std::string& s, int edits, Rng& rng) {
  std::string out = s;
  for (int e = 0; e < edits; ++e) {
    uint64_t kind = rng.next(3);
    if (out.empty()) kind = 1;
    uint64_t pos = rng.next(out.size() + (kind == 1 ? 1 : 0));
    switch (kind) {
      case 0: {  // substitution, forced to actually change the letter
        char c = rng.base();
        while (c == out[pos]) c = rng.base();
        out[pos] = c;
        break;
      }
      case 1:
        out.insert(out.begin() + static_cast<ptrdiff_t>(pos), rng.base());
        break;
      case 2:
        out.erase(out.begin() + static_cast<ptrdiff_t>(pos));
        break;
    }
  }
  return out;
}

// Inverse of the device candidate layout: given the flat word-major array
// (word g of candidate c at layout[g*count + c]), reconstruct candidate c's
// word sequence.
inline std::vector<uint16_t> gather_candidate(const std::vector<uint16_t>& layout,
                                              size_t count, size_t words_per,
                                              size_t c) {
  std::vector<uint16_t> out(words_per);
  for (size_t g = 0; g < words_per; ++g) out[g] = layout[g * count + c];
  return out;
}

}  // namespace oracles

#endif
