#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqcore.hpp"

// Seed-location candidate generation: a k-mer occurrence index over the
// reference, a read simulator for measuring recall, and window extraction
// that turns seed hits into fixed-length candidate windows laid out for
// the device (word g of candidate c at layout word g * count + c).

namespace candgen {

struct MalformedIndex : std::runtime_error {
  explicit MalformedIndex(const std::string& what)
      : std::runtime_error(what) {}
};

// Code of the k-mer at `pos`: base pos+i contributes 2 bits at 2*i.
// k must be at most 15 so the code fits 30 bits.
uint32_t kmer_code(const seqcore::PackedSeq& seq, size_t pos, unsigned k);

class KmerIndex {
 public:
  // Occurrence lists over every k-mer of ref. A k-mer occurring more than
  // max_occ times is dropped entirely, not truncated; dropped() counts
  // how many distinct k-mers that removed.
  static KmerIndex build(const seqcore::PackedSeq& ref, unsigned k = 10,
                         uint32_t max_occ = 100000);

  unsigned k() const { return k_; }
  uint32_t max_occ() const { return max_occ_; }
  uint64_t dropped() const { return dropped_; }
  size_t distinct_kmers() const { return entries_.size(); }

  // Ascending start positions, or nullptr when absent (never indexed or
  // dropped for exceeding max_occ).
  const std::vector<uint32_t>* lookup(uint32_t code) const;

  // Binary round trip. save() writes entries in ascending code order, so
  // save -> load -> save reproduces the bytes exactly.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static KmerIndex load(std::istream& in);
  static KmerIndex load_file(const std::string& path);

 private:
  unsigned k_ = 0;
  uint32_t max_occ_ = 0;
  uint64_t dropped_ = 0;
  std::unordered_map<uint32_t, std::vector<uint32_t>> entries_;
};

struct SimulatedRead {
  std::string id;
  seqcore::PackedSeq seq;
  uint32_t true_start = 0;      // window origin in the reference
  uint32_t edits_applied = 0;   // error events planted during the walk
};

// Reads of exactly `length` bases drawn from uniform reference windows,
// with substitution and indel errors at the given per-base rates. A
// deletion consumes reference without emitting; an insertion emits a
// random base without consuming. Deterministic in `seed`.
std::vector<SimulatedRead> simulate_reads(const seqcore::PackedSeq& ref,
                                          size_t count, size_t length,
                                          double sub_rate = 0.005,
                                          double indel_rate = 0.001,
                                          uint64_t seed = 1);

struct CandidateEntry {
  uint32_t ref_start = 0;
  seqcore::PackedSeq window;
};

struct CandidateSet {
  uint32_t query_id = 0;
  size_t m = 0;  // read length
  size_t n = 0;  // window length, m + ceil(0.15 m)
  std::vector<CandidateEntry> entries;    // ascending ref_start, unique
  std::vector<uint16_t> device_layout;    // entries transposed for staging
};

// Every seed hit is widened to a length-n window: a hit of read offset o
// at reference position p is assumed to sit o bases plus a proportional
// share of the slack into the window, so the window starts at
// p - (o + floor(slack * o / (m - k))), clamped to the reference. Starts
// are deduplicated; when more than `cap` remain, the lowest `cap` win.
// Reads shorter than k, or references shorter than n, give an empty set.
CandidateSet generate_candidates(const seqcore::PackedSeq& read,
                                 const KmerIndex& index,
                                 const seqcore::PackedSeq& ref,
                                 uint32_t query_id = 0, size_t cap = 32768);

// Device layout for a batch of equal-length windows.
std::vector<uint16_t> transpose_candidates(
    std::span<const CandidateEntry> entries, size_t n);

}  // namespace candgen
