#include "seqcore.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace seqcore {

char base_to_char(Base b) {
  static constexpr std::array<char, 4> table = {'A', 'C', 'G', 'T'};
  return table[static_cast<uint8_t>(b)];
}

std::optional<Base> base_from_char(char c) {
  switch (c) {
    case 'A': case 'a': return Base::A;
    case 'C': case 'c': return Base::C;
    case 'G': case 'g': return Base::G;
    case 'T': case 't': return Base::T;
    default: return std::nullopt;
  }
}

InvalidBase::InvalidBase(char c, size_t pos)
    : std::runtime_error("invalid base '" + std::string(1, c) +
                         "' at position " + std::to_string(pos)),
      letter(c),
      position(pos) {}

MalformedFasta::MalformedFasta(const std::string& what, size_t ln)
    : std::runtime_error("malformed fasta at line " + std::to_string(ln) +
                         ": " + what),
      line(ln) {}

Base PackedSeq::at(size_t i) const {
  unsigned shift = 2 * (i % kBasesPerWord);
  return static_cast<Base>((words_[i / kBasesPerWord] >> shift) & 0x3u);
}

void PackedSeq::push_back(Base b) {
  if (len_ % kBasesPerWord == 0) words_.push_back(0);
  unsigned shift = 2 * (len_ % kBasesPerWord);
  words_.back() |= static_cast<uint16_t>(static_cast<uint16_t>(b) << shift);
  ++len_;
}

PackedSeq pack_seq(std::string_view text, NPolicy policy) {
  PackedSeq out;
  for (size_t i = 0; i < text.size(); ++i) {
    auto b = base_from_char(text[i]);
    if (!b) {
      if (policy == NPolicy::Reject) throw InvalidBase(text[i], i);
      b = Base::A;
    }
    out.push_back(*b);
  }
  return out;
}

std::string unpack_seq(const PackedSeq& seq) {
  std::string out;
  out.reserve(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) out.push_back(base_to_char(seq.at(i)));
  return out;
}

PackedSeq subseq(const PackedSeq& seq, size_t start, size_t count) {
  if (count > seq.size() || start > seq.size() - count)
    throw std::out_of_range("subseq [" + std::to_string(start) + ", " +
                            std::to_string(start + count) + ") of " +
                            std::to_string(seq.size()) + " bases");
  PackedSeq out;
  for (size_t i = 0; i < count; ++i) out.push_back(seq.at(start + i));
  return out;
}

std::vector<FastaRecord> parse_fasta(std::istream& in, NPolicy policy) {
  std::vector<FastaRecord> records;
  std::string line;
  std::string pending_seq;
  std::string pending_id;
  std::string pending_desc;
  bool have_record = false;
  size_t line_no = 0;

  auto flush = [&]() {
    if (!have_record) return;
    records.push_back(
        {pending_id, pending_desc, pack_seq(pending_seq, policy)});
    pending_seq.clear();
    pending_id.clear();
    pending_desc.clear();
    have_record = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '>') {
      flush();
      have_record = true;
      size_t id_end = line.find_first_of(" \t", 1);
      if (id_end == std::string::npos) {
        pending_id = line.substr(1);
      } else {
        pending_id = line.substr(1, id_end - 1);
        size_t desc_begin = line.find_first_not_of(" \t", id_end);
        if (desc_begin != std::string::npos)
          pending_desc = line.substr(desc_begin);
      }
      if (pending_id.empty())
        throw MalformedFasta("empty record id", line_no);
    } else {
      if (!have_record)
        throw MalformedFasta("sequence data before first header", line_no);
      // Validate here rather than in flush() so the message can carry the
      // offending line, not just the record.
      if (policy == NPolicy::Reject) {
        for (char c : line)
          if (!base_from_char(c))
            throw MalformedFasta(std::string("invalid base '") + c +
                                     "' in record " + pending_id,
                                 line_no);
      }
      pending_seq += line;
    }
  }
  flush();
  return records;
}

std::vector<FastaRecord> parse_fasta_file(const std::string& path,
                                          NPolicy policy) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fasta file: " + path);
  return parse_fasta(in, policy);
}

void write_fasta(std::ostream& out, const std::vector<FastaRecord>& records,
                 size_t wrap) {
  for (const auto& r : records) {
    out << '>' << r.id;
    if (!r.desc.empty()) out << ' ' << r.desc;
    out << '\n';
    std::string s = unpack_seq(r.seq);
    for (size_t i = 0; i < s.size(); i += wrap)
      out << s.substr(i, wrap) << '\n';
  }
}

}  // namespace seqcore
