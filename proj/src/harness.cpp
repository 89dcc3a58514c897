#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace harness {

namespace fs = std::filesystem;
using json = nlohmann::json;
using seqcore::PackedSeq;

Backend parse_backend(const std::string& name) {
  if (name == "oracle") return Backend::Oracle;
  if (name == "cpu") return Backend::Cpu;
  if (name == "apu-sim") return Backend::ApuSim;
  throw std::invalid_argument("unknown backend: " + name);
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::Oracle: return "oracle";
    case Backend::Cpu: return "cpu";
    case Backend::ApuSim: return "apu-sim";
  }
  return "?";
}

std::string RunConfig::to_kv() const {
  std::ostringstream out;
  out << "reference=" << reference << "\n"
      << "reads=" << reads << "\n"
      << "index=" << index << "\n"
      << "out_dir=" << out_dir << "\n"
      << "backend=" << backend << "\n"
      << "n_policy=" << n_policy << "\n"
      << "k=" << k << "\n"
      << "max_occ=" << max_occ << "\n"
      << "read_len=" << read_len << "\n"
      << "num_reads=" << num_reads << "\n"
      << "threshold=" << threshold << "\n"
      << "cap=" << cap << "\n"
      << "vmrf_cost=" << vmrf_cost << "\n"
      << "dram_cost=" << dram_cost << "\n"
      << "fragment_overhead=" << fragment_overhead << "\n"
      << "seed=" << seed << "\n"
      << "repeats=" << repeats << "\n"
      << "sweep=" << (sweep ? 1 : 0) << "\n";
  return out.str();
}

RunConfig RunConfig::from_kv(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad config line: " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "reference") cfg.reference = value;
    else if (key == "reads") cfg.reads = value;
    else if (key == "index") cfg.index = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "backend") cfg.backend = value;
    else if (key == "n_policy") cfg.n_policy = value;
    else if (key == "k") cfg.k = unsigned(std::stoul(value));
    else if (key == "max_occ") cfg.max_occ = uint32_t(std::stoul(value));
    else if (key == "read_len") cfg.read_len = std::stoull(value);
    else if (key == "num_reads") cfg.num_reads = std::stoull(value);
    else if (key == "threshold") cfg.threshold = std::stoi(value);
    else if (key == "cap") cfg.cap = std::stoull(value);
    else if (key == "vmrf_cost") cfg.vmrf_cost = unsigned(std::stoul(value));
    else if (key == "dram_cost") cfg.dram_cost = unsigned(std::stoul(value));
    else if (key == "fragment_overhead")
      cfg.fragment_overhead = unsigned(std::stoul(value));
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "repeats") cfg.repeats = unsigned(std::stoul(value));
    else if (key == "sweep") cfg.sweep = value != "0";
    else throw std::invalid_argument("unknown config key: " + key);
  }
  return cfg;
}

apusim::CostConfig RunConfig::cost_config() const {
  apusim::CostConfig c;
  c.vmrf_cost = vmrf_cost;
  c.dram_vr_cost = dram_cost;
  c.fragment_overhead = fragment_overhead;
  return c;
}

seqcore::NPolicy RunConfig::npolicy() const {
  if (n_policy == "reject") return seqcore::NPolicy::Reject;
  if (n_policy == "map-to-a") return seqcore::NPolicy::MapToA;
  throw std::invalid_argument("unknown n-policy: " + n_policy);
}

namespace {

int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

uint64_t median(std::vector<uint64_t> v) {
  if (v.empty()) return 0;
  std::nth_element(v.begin(), v.begin() + long(v.size() / 2), v.end());
  return v[v.size() / 2];
}

PackedSeq load_reference(const RunConfig& cfg) {
  if (cfg.reference.empty())
    throw std::runtime_error("no reference given (--reference)");
  auto records = seqcore::parse_fasta_file(cfg.reference, cfg.npolicy());
  if (records.empty())
    throw std::runtime_error("reference has no records: " + cfg.reference);
  if (records.size() > 1)
    std::cerr << "note: reference has " << records.size()
              << " records, using the first\n";
  return std::move(records[0].seq);
}

std::vector<PackedSeq> load_or_simulate_reads(const RunConfig& cfg,
                                              const PackedSeq& ref) {
  std::vector<PackedSeq> reads;
  if (!cfg.reads.empty()) {
    for (auto& rec : seqcore::parse_fasta_file(cfg.reads, cfg.npolicy()))
      reads.push_back(std::move(rec.seq));
  } else {
    for (auto& sim : candgen::simulate_reads(ref, cfg.num_reads, cfg.read_len,
                                             0.005, 0.001, cfg.seed))
      reads.push_back(std::move(sim.seq));
  }
  return reads;
}

candgen::KmerIndex load_or_build_index(const RunConfig& cfg,
                                       const PackedSeq& ref) {
  if (!cfg.index.empty() && fs::exists(cfg.index))
    return candgen::KmerIndex::load_file(cfg.index);
  return candgen::KmerIndex::build(ref, cfg.k, cfg.max_occ);
}

void ensure_parent_dir(const std::string& path) {
  fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::ofstream open_out(const std::string& path) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  return out;
}

void write_kv_comments(std::ostream& out, const RunConfig& cfg) {
  std::istringstream kv(cfg.to_kv());
  std::string line;
  while (std::getline(kv, line)) out << "# " << line << "\n";
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

RunOutputs run_pipeline(const RunConfig& cfg, bool bench_mode) {
  const PackedSeq ref = load_reference(cfg);
  const std::vector<PackedSeq> reads = load_or_simulate_reads(cfg, ref);
  const candgen::KmerIndex index = load_or_build_index(cfg, ref);
  const Backend backend = parse_backend(cfg.backend);
  const bool need_core = bench_mode || backend == Backend::ApuSim;
  const size_t n_queries = reads.size();

  std::vector<std::vector<myers::FilterVerdict>> verdicts_by_q(n_queries);
  std::vector<BenchRow> bench_by_q(n_queries);

  struct Worker {
    std::optional<apusim::CoreState> core;
    std::array<int64_t, 8> phases{};
  };
  size_t n_workers = std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, std::max<size_t>(1, n_queries));
  std::vector<Worker> workers(n_workers);

  std::atomic<size_t> next{0};
  std::atomic<bool> stopped{false};
  std::exception_ptr first_error = nullptr;
  std::mutex error_mu;

  auto process = [&](size_t q, Worker& me) {
    auto cs = candgen::generate_candidates(reads[q], index, ref,
                                           uint32_t(q), cfg.cap);
    const int threshold = cfg.threshold >= 0
                              ? cfg.threshold
                              : myers::default_threshold(cs.m);
    std::vector<uint32_t> ref_starts;
    ref_starts.reserve(cs.entries.size());
    for (const auto& e : cs.entries) ref_starts.push_back(e.ref_start);

    BenchRow row;
    row.query_id = uint32_t(q);
    row.candidate_count = cs.entries.size();

    std::vector<uint16_t> scores;
    if (!cs.entries.empty()) {
      if (bench_mode) {
        std::vector<uint64_t> times;
        times.reserve(std::max(1u, cfg.repeats));
        for (unsigned r = 0; r < std::max(1u, cfg.repeats); ++r) {
          int64_t t0 = now_ns();
          for (const auto& e : cs.entries)
            (void)myers::myers_cpu(reads[q], e.window);
          times.push_back(uint64_t(now_ns() - t0));
        }
        row.cpu_ns = median(std::move(times));

        uint64_t c0 = me.core->cycles();
        uint64_t b0 = me.core->staged_bytes_in() + me.core->staged_bytes_out();
        auto run = myers::run_apu_query(*me.core, reads[q], cs.device_layout,
                                        cs.entries.size(), cs.n);
        row.sim_cycles = me.core->cycles() - c0;
        row.staged_bytes =
            me.core->staged_bytes_in() + me.core->staged_bytes_out() - b0;
        for (size_t i = 0; i < 8; ++i) me.phases[i] += run.phase_ns[i];
      } else {
        switch (backend) {
          case Backend::Oracle:
            for (const auto& e : cs.entries)
              scores.push_back(
                  uint16_t(myers::edit_distance_dp(reads[q], e.window)));
            break;
          case Backend::Cpu:
            for (const auto& e : cs.entries)
              scores.push_back(uint16_t(myers::myers_cpu(reads[q], e.window)));
            break;
          case Backend::ApuSim: {
            uint64_t c0 = me.core->cycles();
            uint64_t b0 =
                me.core->staged_bytes_in() + me.core->staged_bytes_out();
            auto run = myers::run_apu_query(*me.core, reads[q],
                                            cs.device_layout,
                                            cs.entries.size(), cs.n);
            scores = std::move(run.scores);
            row.sim_cycles = me.core->cycles() - c0;
            row.staged_bytes = me.core->staged_bytes_in() +
                               me.core->staged_bytes_out() - b0;
            for (size_t i = 0; i < 8; ++i) me.phases[i] += run.phase_ns[i];
            break;
          }
        }
      }
    }
    if (!bench_mode)
      verdicts_by_q[q] =
          myers::filter_candidates(uint32_t(q), scores, ref_starts, threshold);
    bench_by_q[q] = row;
  };

  auto work = [&](size_t w) {
    Worker& me = workers[w];
    if (need_core) me.core.emplace(cfg.cost_config());
    try {
      for (;;) {
        if (stopped.load()) break;
        size_t q = next.fetch_add(1);
        if (q >= n_queries) break;
        process(q, me);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!first_error) first_error = std::current_exception();
      stopped.store(true);
    }
  };

  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (size_t w = 0; w < n_workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  RunOutputs out;
  for (auto& v : verdicts_by_q)
    out.verdicts.insert(out.verdicts.end(), v.begin(), v.end());
  out.bench = std::move(bench_by_q);

  if (need_core) {
    out.has_cycles = true;
    out.cycles.config = cfg.cost_config();
    std::vector<std::pair<std::string, uint64_t>> acc;
    for (const auto& w : workers) {
      if (!w.core) continue;
      out.cycles.total_cycles += w.core->cycles();
      out.cycles.staged_bytes_in += w.core->staged_bytes_in();
      out.cycles.staged_bytes_out += w.core->staged_bytes_out();
      for (const auto& [label, cyc] : w.core->sections()) {
        auto it = std::find_if(acc.begin(), acc.end(),
                               [&](const auto& p) { return p.first == label; });
        if (it == acc.end()) acc.emplace_back(label, cyc);
        else it->second += cyc;
      }
      for (size_t i = 0; i < 8; ++i) out.phase_ns[i] += w.phases[i];
    }
    // canonical kernel-section order first, leftovers alphabetically
    for (const char* label : myers::kKernelSections) {
      auto it = std::find_if(acc.begin(), acc.end(),
                             [&](const auto& p) { return p.first == label; });
      if (it != acc.end() && it->second > 0) {
        out.cycles.sections.push_back({it->first, it->second});
        it->second = 0;
      }
    }
    std::sort(acc.begin(), acc.end());
    for (auto& [label, cyc] : acc)
      if (cyc > 0) out.cycles.sections.push_back({label, cyc});
  }
  return out;
}

void write_verdicts(const std::string& path, const RunConfig& cfg,
                    std::span<const myers::FilterVerdict> verdicts) {
  auto out = open_out(path);
  write_kv_comments(out, cfg);
  out << "query_id\tcandidate_id\tref_start\tscore\tkept\n";
  for (const auto& v : verdicts)
    out << v.query_id << '\t' << v.candidate_id << '\t' << v.ref_start << '\t'
        << v.score << '\t' << (v.kept ? 1 : 0) << '\n';
}

void write_bench(const std::string& path, const RunConfig& cfg,
                 std::span<const BenchRow> rows) {
  auto out = open_out(path);
  write_kv_comments(out, cfg);
  out << "query_id\tcandidate_count\tcpu_ns\tsim_cycles\tstaged_bytes\n";
  for (const auto& r : rows)
    out << r.query_id << '\t' << r.candidate_count << '\t' << r.cpu_ns << '\t'
        << r.sim_cycles << '\t' << r.staged_bytes << '\n';
}

void write_sweep(const std::string& path, const RunConfig& cfg,
                 std::span<const SweepRow> rows) {
  auto out = open_out(path);
  write_kv_comments(out, cfg);
  out << "cap\tqueries\ttotal_candidates\ttotal_cpu_ns\ttotal_sim_cycles\t"
         "total_staged_bytes\n";
  for (const auto& r : rows)
    out << r.cap << '\t' << r.queries << '\t' << r.total_candidates << '\t'
        << r.total_cpu_ns << '\t' << r.total_sim_cycles << '\t'
        << r.total_staged_bytes << '\n';
}

void write_cycles_json(const std::string& path, const RunConfig& cfg,
                       const CycleReport& report) {
  json j;
  j["total_cycles"] = report.total_cycles;
  j["staged_bytes_in"] = report.staged_bytes_in;
  j["staged_bytes_out"] = report.staged_bytes_out;
  j["config"] = {{"vmrf_cost", report.config.vmrf_cost},
                 {"dram_vr_cost", report.config.dram_vr_cost},
                 {"fragment_overhead", report.config.fragment_overhead}};
  j["sections"] = json::array();
  for (const auto& s : report.sections) {
    double pct = report.total_cycles == 0
                     ? 0.0
                     : 100.0 * double(s.cycles) / double(report.total_cycles);
    j["sections"].push_back(
        {{"label", s.label}, {"cycles", s.cycles}, {"percent", round4(pct)}});
  }
  json rc = json::object();
  std::istringstream kv(cfg.to_kv());
  std::string line;
  while (std::getline(kv, line)) {
    if (line.empty()) continue;
    size_t eq = line.find('=');
    rc[line.substr(0, eq)] = line.substr(eq + 1);
  }
  j["run_config"] = rc;

  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_histogram(const std::string& path, const RunConfig& cfg,
                     std::span<const BenchRow> rows) {
  uint64_t max_count = 0;
  for (const auto& r : rows) max_count = std::max(max_count, r.candidate_count);
  const uint64_t width = max_count / 32 + 1;

  std::array<uint64_t, 32> buckets{};
  for (const auto& r : rows) buckets[r.candidate_count / width] += 1;

  auto out = open_out(path);
  write_kv_comments(out, cfg);
  out << "bucket_lo,bucket_hi,queries\n";
  for (size_t b = 0; b < buckets.size(); ++b)
    out << b * width << ',' << (b + 1) * width - 1 << ',' << buckets[b]
        << '\n';
}

void write_phases(const std::string& path, const RunConfig& cfg,
                  const std::array<int64_t, 8>& phase_ns) {
  auto out = open_out(path);
  write_kv_comments(out, cfg);
  out << "phase\thost_ns\n";
  for (size_t i = 0; i < myers::kRunPhases.size(); ++i)
    out << myers::kRunPhases[i] << '\t' << phase_ns[i] << '\n';
}

ReportView render_report(const std::string& cycles_json_path) {
  std::ifstream in(cycles_json_path, std::ios::binary);
  if (!in)
    throw MalformedReport("cannot open report: " + cycles_json_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw MalformedReport(std::string("bad report json: ") + e.what());
  }
  if (!j.contains("total_cycles") || !j.contains("sections") ||
      !j["sections"].is_array())
    throw MalformedReport("report missing total_cycles or sections");

  ReportView view;
  view.total_cycles = j["total_cycles"].get<uint64_t>();

  std::ostringstream text;
  text << std::left << std::setw(28) << "section" << std::right
       << std::setw(14) << "cycles" << std::setw(10) << "percent" << "\n";
  for (const auto& s : j["sections"]) {
    if (!s.contains("label") || !s.contains("cycles") ||
        !s.contains("percent"))
      throw MalformedReport("section row missing a field");
    SectionRow row{s["label"].get<std::string>(),
                   s["cycles"].get<uint64_t>()};
    text << std::left << std::setw(28) << row.label << std::right
         << std::setw(14) << row.cycles << std::setw(9) << std::fixed
         << std::setprecision(2) << s["percent"].get<double>() << "%\n";
    view.sections.push_back(std::move(row));
  }
  text << std::left << std::setw(28) << "total" << std::right << std::setw(14)
       << view.total_cycles << std::setw(9) << std::fixed
       << std::setprecision(2) << 100.0 << "%\n";
  if (j.contains("staged_bytes_in"))
    text << "staged bytes in: " << j["staged_bytes_in"].get<uint64_t>()
         << ", out: " << j["staged_bytes_out"].get<uint64_t>() << "\n";
  view.text = text.str();
  return view;
}

int cmd_index(const RunConfig& cfg) {
  try {
    PackedSeq ref = load_reference(cfg);
    auto index = candgen::KmerIndex::build(ref, cfg.k, cfg.max_occ);
    std::string path = cfg.index.empty()
                           ? (fs::path(cfg.out_dir) / "index.kix").string()
                           : cfg.index;
    ensure_parent_dir(path);
    fs::create_directories(cfg.out_dir);
    index.save_file(path);
    std::cout << "indexed " << index.distinct_kmers() << " k-mers (k="
              << index.k() << ", dropped=" << index.dropped() << ") -> "
              << path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_simulate(const RunConfig& cfg) {
  try {
    PackedSeq ref = load_reference(cfg);
    auto reads = candgen::simulate_reads(ref, cfg.num_reads, cfg.read_len,
                                         0.005, 0.001, cfg.seed);
    std::vector<seqcore::FastaRecord> records;
    records.reserve(reads.size());
    for (auto& r : reads)
      records.push_back({r.id,
                         "start=" + std::to_string(r.true_start) +
                             " edits=" + std::to_string(r.edits_applied),
                         std::move(r.seq)});
    fs::create_directories(cfg.out_dir);
    std::string path = (fs::path(cfg.out_dir) / "reads.fasta").string();
    auto out = open_out(path);
    seqcore::write_fasta(out, records);
    std::cout << "simulated " << records.size() << " reads -> " << path
              << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_candidates(const RunConfig& cfg) {
  try {
    PackedSeq ref = load_reference(cfg);
    auto reads = load_or_simulate_reads(cfg, ref);
    auto index = load_or_build_index(cfg, ref);

    fs::create_directories(cfg.out_dir);
    auto tsv = open_out((fs::path(cfg.out_dir) / "candidates.tsv").string());
    write_kv_comments(tsv, cfg);
    tsv << "query_id\tref_start\twindow\n";
    auto bin = open_out((fs::path(cfg.out_dir) / "candidates.bin").string());

    uint64_t total = 0;
    for (size_t q = 0; q < reads.size(); ++q) {
      auto cs = candgen::generate_candidates(reads[q], index, ref,
                                             uint32_t(q), cfg.cap);
      total += cs.entries.size();
      for (const auto& e : cs.entries)
        tsv << q << '\t' << e.ref_start << '\t'
            << seqcore::unpack_seq(e.window) << '\n';
      uint32_t header[4] = {uint32_t(q), uint32_t(cs.entries.size()),
                            uint32_t(cs.n), uint32_t((cs.n + 7) / 8)};
      bin.write(reinterpret_cast<const char*>(header), sizeof header);
      bin.write(reinterpret_cast<const char*>(cs.device_layout.data()),
                std::streamsize(cs.device_layout.size() * 2));
    }
    std::cout << "wrote " << total << " candidates for " << reads.size()
              << " reads\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_filter(const RunConfig& cfg) {
  try {
    auto out = run_pipeline(cfg, false);
    fs::create_directories(cfg.out_dir);
    write_verdicts((fs::path(cfg.out_dir) / "verdicts.tsv").string(), cfg,
                   out.verdicts);
    if (out.has_cycles) {
      write_cycles_json((fs::path(cfg.out_dir) / "cycles.json").string(), cfg,
                        out.cycles);
      write_phases((fs::path(cfg.out_dir) / "phases.tsv").string(), cfg,
                   out.phase_ns);
    }
    uint64_t kept = 0;
    for (const auto& v : out.verdicts) kept += v.kept;
    std::cout << "kept " << kept << " of " << out.verdicts.size()
              << " candidates\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_bench(const RunConfig& cfg) {
  try {
    fs::create_directories(cfg.out_dir);
    if (cfg.sweep) {
      std::vector<SweepRow> rows;
      for (uint64_t cap = 800; cap <= 1800; cap += 200) {
        RunConfig sub = cfg;
        sub.cap = cap;
        auto out = run_pipeline(sub, true);
        SweepRow row;
        row.cap = cap;
        row.queries = out.bench.size();
        for (const auto& b : out.bench) {
          row.total_candidates += b.candidate_count;
          row.total_cpu_ns += b.cpu_ns;
          row.total_sim_cycles += b.sim_cycles;
          row.total_staged_bytes += b.staged_bytes;
        }
        rows.push_back(row);
      }
      write_sweep((fs::path(cfg.out_dir) / "bench.tsv").string(), cfg, rows);
      std::cout << "swept " << rows.size() << " cap values\n";
      return 0;
    }

    auto out = run_pipeline(cfg, true);
    write_bench((fs::path(cfg.out_dir) / "bench.tsv").string(), cfg,
                out.bench);
    write_histogram((fs::path(cfg.out_dir) / "histogram.csv").string(), cfg,
                    out.bench);
    if (out.has_cycles) {
      write_cycles_json((fs::path(cfg.out_dir) / "cycles.json").string(), cfg,
                        out.cycles);
      write_phases((fs::path(cfg.out_dir) / "phases.tsv").string(), cfg,
                   out.phase_ns);
    }
    std::cout << "benchmarked " << out.bench.size() << " queries\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_report(const RunConfig& cfg, const std::string& cycles_path) {
  try {
    std::string path = cycles_path.empty()
                           ? (fs::path(cfg.out_dir) / "cycles.json").string()
                           : cycles_path;
    auto view = render_report(path);
    std::cout << view.text;

    auto csv = open_out((fs::path(cfg.out_dir) / "sections.csv").string());
    csv << "label,cycles,percent\n";
    for (const auto& s : view.sections) {
      double pct = view.total_cycles == 0
                       ? 0.0
                       : 100.0 * double(s.cycles) / double(view.total_cycles);
      csv << s.label << ',' << s.cycles << ',' << round4(pct) << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace harness
