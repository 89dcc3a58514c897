#ifndef SEQCORE_HPP
#define SEQCORE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// 2-bit packed DNA sequences and FASTA input.
//
// Encoding: A=0, C=1, G=2, T=3. Eight bases per 16-bit word, base i occupies
// bits [2*(i%8), 2*(i%8)+1] of word i/8 (lowest-index base in the least
// significant bits). Padding bits of a partial final word are zero.

namespace seqcore {

enum class Base : uint8_t { A = 0, C = 1, G = 2, T = 3 };

constexpr unsigned kBasesPerWord = 8;

char base_to_char(Base b);

// Accepts upper and lower case. Returns nullopt for anything else.
std::optional<Base> base_from_char(char c);

struct InvalidBase : std::runtime_error {
  InvalidBase(char c, size_t position);
  char letter;
  size_t position;  // 0-based offset in the input text
};

struct MalformedFasta : std::runtime_error {
  MalformedFasta(const std::string& what, size_t line);
  size_t line;  // 1-based line number
};

class PackedSeq {
 public:
  PackedSeq() = default;

  size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }
  size_t word_count() const { return words_.size(); }
  const std::vector<uint16_t>& words() const { return words_; }
  uint16_t word(size_t w) const { return words_[w]; }

  Base at(size_t i) const;
  void push_back(Base b);

  bool operator==(const PackedSeq& o) const {
    return len_ == o.len_ && words_ == o.words_;
  }

 private:
  size_t len_ = 0;
  std::vector<uint16_t> words_;
};

// How to treat non-ACGT letters (typically N) in input text.
enum class NPolicy { Reject, MapToA };

// Throws InvalidBase under NPolicy::Reject.
PackedSeq pack_seq(std::string_view text, NPolicy policy = NPolicy::Reject);

std::string unpack_seq(const PackedSeq& seq);

// Contiguous slice [start, start+count) of an existing sequence.
PackedSeq subseq(const PackedSeq& seq, size_t start, size_t count);

struct FastaRecord {
  std::string id;    // header up to the first whitespace
  std::string desc;  // rest of the header line, may be empty
  PackedSeq seq;
};

// Multi-record FASTA. Sequence lines of a record are concatenated.
// Blank lines are permitted between records. Header-less leading sequence
// data is malformed.
std::vector<FastaRecord> parse_fasta(std::istream& in,
                                     NPolicy policy = NPolicy::Reject);
std::vector<FastaRecord> parse_fasta_file(const std::string& path,
                                          NPolicy policy = NPolicy::Reject);

void write_fasta(std::ostream& out, const std::vector<FastaRecord>& records,
                 size_t wrap = 70);

}  // namespace seqcore

#endif
