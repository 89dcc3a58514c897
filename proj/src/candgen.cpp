#include "candgen.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <unordered_set>

namespace candgen {

using seqcore::Base;
using seqcore::PackedSeq;

uint32_t kmer_code(const PackedSeq& seq, size_t pos, unsigned k) {
  uint32_t code = 0;
  for (unsigned i = 0; i < k; ++i)
    code |= uint32_t(seq.at(pos + i)) << (2 * i);
  return code;
}

KmerIndex KmerIndex::build(const PackedSeq& ref, unsigned k,
                           uint32_t max_occ) {
  if (k == 0 || k > 15) throw std::invalid_argument("k must be in 1..15");
  KmerIndex idx;
  idx.k_ = k;
  idx.max_occ_ = max_occ;

  if (ref.size() >= k) {
    const uint32_t top_shift = 2 * (k - 1);
    uint32_t code = kmer_code(ref, 0, k);
    idx.entries_[code].push_back(0);
    for (size_t p = 1; p + k <= ref.size(); ++p) {
      code = (code >> 2) | (uint32_t(ref.at(p + k - 1)) << top_shift);
      idx.entries_[code].push_back(uint32_t(p));
    }
  }

  for (auto it = idx.entries_.begin(); it != idx.entries_.end();) {
    if (it->second.size() > max_occ) {
      it = idx.entries_.erase(it);
      ++idx.dropped_;
    } else {
      ++it;
    }
  }
  return idx;
}

const std::vector<uint32_t>* KmerIndex::lookup(uint32_t code) const {
  auto it = entries_.find(code);
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

constexpr char kIndexMagic[4] = {'K', 'I', 'X', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw MalformedIndex("truncated index");
  return v;
}

}  // namespace

void KmerIndex::save(std::ostream& out) const {
  out.write(kIndexMagic, 4);
  put<uint32_t>(out, k_);
  put<uint32_t>(out, max_occ_);
  put<uint64_t>(out, dropped_);
  put<uint64_t>(out, entries_.size());

  std::vector<uint32_t> codes;
  codes.reserve(entries_.size());
  for (const auto& [code, _] : entries_) codes.push_back(code);
  std::sort(codes.begin(), codes.end());
  for (uint32_t code : codes) {
    const auto& positions = entries_.at(code);
    put<uint32_t>(out, code);
    put<uint32_t>(out, uint32_t(positions.size()));
    out.write(reinterpret_cast<const char*>(positions.data()),
              std::streamsize(positions.size() * sizeof(uint32_t)));
  }
  if (!out) throw std::runtime_error("index write failed");
}

void KmerIndex::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  save(out);
}

KmerIndex KmerIndex::load(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kIndexMagic, 4) != 0)
    throw MalformedIndex("bad index magic");

  KmerIndex idx;
  idx.k_ = get<uint32_t>(in);
  if (idx.k_ == 0 || idx.k_ > 15) throw MalformedIndex("bad k");
  idx.max_occ_ = get<uint32_t>(in);
  idx.dropped_ = get<uint64_t>(in);
  uint64_t count = get<uint64_t>(in);
  idx.entries_.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    uint32_t code = get<uint32_t>(in);
    uint32_t len = get<uint32_t>(in);
    if (len > idx.max_occ_) throw MalformedIndex("entry beyond max_occ");
    std::vector<uint32_t> positions(len);
    in.read(reinterpret_cast<char*>(positions.data()),
            std::streamsize(size_t(len) * sizeof(uint32_t)));
    if (!in) throw MalformedIndex("truncated index");
    idx.entries_.emplace(code, std::move(positions));
  }
  return idx;
}

KmerIndex KmerIndex::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open index: " + path);
  return load(in);
}

namespace {

// Deliberately avoids std::uniform_*_distribution: their outputs differ
// between standard library implementations, and read simulation must be
// reproducible from the seed alone.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed) {}
  uint64_t next(uint64_t bound) { return gen() % bound; }
  double unit() { return double(gen() >> 11) * 0x1.0p-53; }
  Base base() { return Base(gen() % 4); }
};

}  // namespace

std::vector<SimulatedRead> simulate_reads(const PackedSeq& ref, size_t count,
                                          size_t length, double sub_rate,
                                          double indel_rate, uint64_t seed) {
  if (length == 0) throw std::invalid_argument("read length must be > 0");
  if (ref.size() < length)
    throw std::invalid_argument("reference shorter than read length");

  Rng rng(seed);
  std::vector<SimulatedRead> reads;
  reads.reserve(count);
  for (size_t r = 0; r < count; ++r) {
    SimulatedRead read;
    read.id = "read" + std::to_string(r);
    read.true_start = uint32_t(rng.next(ref.size() - length + 1));

    size_t i = read.true_start;
    while (read.seq.size() < length) {
      if (i >= ref.size()) {
        // Deletions pushed the walk off the reference; pad randomly and
        // keep counting so edits_applied stays an upper bound.
        read.seq.push_back(rng.base());
        ++read.edits_applied;
        continue;
      }
      double roll = rng.unit();
      if (roll < indel_rate / 2) {
        read.seq.push_back(rng.base());  // insertion
        ++read.edits_applied;
      } else if (roll < indel_rate) {
        ++i;  // deletion
        ++read.edits_applied;
      } else if (roll < indel_rate + sub_rate) {
        auto b = uint32_t(ref.at(i));
        read.seq.push_back(Base((b + 1 + rng.next(3)) % 4));
        ++i;
        ++read.edits_applied;
      } else {
        read.seq.push_back(ref.at(i));
        ++i;
      }
    }
    reads.push_back(std::move(read));
  }
  return reads;
}

CandidateSet generate_candidates(const PackedSeq& read, const KmerIndex& index,
                                 const PackedSeq& ref, uint32_t query_id,
                                 size_t cap) {
  const size_t m = read.size();
  const unsigned k = index.k();
  const size_t slack = (3 * m + 19) / 20;  // ceil(0.15 m)
  const size_t n = m + slack;

  CandidateSet set;
  set.query_id = query_id;
  set.m = m;
  set.n = n;
  if (m < k || ref.size() < n) return set;

  const size_t span = m - k;  // proportional-placement denominator
  std::unordered_set<uint32_t> starts;
  for (size_t o = 0; o + k <= m; ++o) {
    const auto* hits = index.lookup(kmer_code(read, o, k));
    if (!hits) continue;
    const size_t before = o + (span == 0 ? 0 : slack * o / span);
    for (uint32_t p : *hits) {
      size_t start = p > before ? p - before : 0;
      start = std::min(start, ref.size() - n);
      starts.insert(uint32_t(start));
    }
  }

  std::vector<uint32_t> ordered(starts.begin(), starts.end());
  std::sort(ordered.begin(), ordered.end());
  if (ordered.size() > cap) ordered.resize(cap);

  set.entries.reserve(ordered.size());
  for (uint32_t start : ordered)
    set.entries.push_back({start, seqcore::subseq(ref, start, n)});
  set.device_layout = transpose_candidates(set.entries, n);
  return set;
}

std::vector<uint16_t> transpose_candidates(
    std::span<const CandidateEntry> entries, size_t n) {
  const size_t words_per = (n + 7) / 8;
  const size_t count = entries.size();
  std::vector<uint16_t> layout(words_per * count, 0);
  for (size_t c = 0; c < count; ++c) {
    if (entries[c].window.size() != n)
      throw std::invalid_argument("window length mismatch in transpose");
    for (size_t g = 0; g < words_per; ++g)
      layout[g * count + c] = entries[c].window.word(g);
  }
  return layout;
}

}  // namespace candgen
