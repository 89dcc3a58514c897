#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "apusim.hpp"
#include "candgen.hpp"
#include "myers.hpp"
#include "seqcore.hpp"

// Pipeline driver shared by the CLI and the tests: load or simulate reads,
// generate candidate windows, score them on a chosen backend, and write
// the report files. Everything here is deterministic for a fixed config
// and seed except wall-clock nanosecond columns, which are confined to
// cpu_ns in bench.tsv and to phases.tsv.

namespace harness {

enum class Backend { Oracle, Cpu, ApuSim };

// Throws std::invalid_argument for anything but oracle|cpu|apu-sim.
Backend parse_backend(const std::string& name);
std::string backend_name(Backend b);

struct RunConfig {
  std::string reference;
  std::string reads;            // empty: simulate from the reference
  std::string index;            // empty: build in memory
  std::string out_dir = ".";
  std::string backend = "apu-sim";
  std::string n_policy = "reject";  // reject | map-to-a
  unsigned k = 10;
  uint32_t max_occ = 100000;
  uint64_t read_len = 300;
  uint64_t num_reads = 100;
  int threshold = -1;           // negative: ceil(m / 10) per query
  uint64_t cap = 32768;
  unsigned vmrf_cost = 16;
  unsigned dram_cost = 64;
  unsigned fragment_overhead = 3;
  uint64_t seed = 1;
  unsigned repeats = 10;
  bool sweep = false;

  // Flat key=value document, one pair per line, fixed key order. Every
  // report embeds it so a run can be reproduced from its outputs.
  std::string to_kv() const;
  static RunConfig from_kv(const std::string& text);

  apusim::CostConfig cost_config() const;
  seqcore::NPolicy npolicy() const;  // throws std::invalid_argument
};

struct BenchRow {
  uint32_t query_id = 0;
  uint64_t candidate_count = 0;
  uint64_t cpu_ns = 0;      // median over repeats; wall clock
  uint64_t sim_cycles = 0;
  uint64_t staged_bytes = 0;
};

struct SectionRow {
  std::string label;
  uint64_t cycles = 0;
};

struct CycleReport {
  uint64_t total_cycles = 0;
  uint64_t staged_bytes_in = 0;
  uint64_t staged_bytes_out = 0;
  apusim::CostConfig config;
  std::vector<SectionRow> sections;  // kernel-section order, extras after
};

struct SweepRow {
  uint64_t cap = 0;
  uint64_t queries = 0;
  uint64_t total_candidates = 0;
  uint64_t total_cpu_ns = 0;
  uint64_t total_sim_cycles = 0;
  uint64_t total_staged_bytes = 0;
};

struct RunOutputs {
  std::vector<myers::FilterVerdict> verdicts;
  std::vector<BenchRow> bench;
  std::array<int64_t, 8> phase_ns{};  // myers::kRunPhases order, summed
  CycleReport cycles;
  bool has_cycles = false;
};

// Scores every read's candidates. Verdicts come from cfg.backend; bench
// mode times the CPU backend and runs the simulator regardless of it.
// Queries go through a work pool (one simulator core per worker) and
// results keep input order.
RunOutputs run_pipeline(const RunConfig& cfg, bool bench_mode);

// Report writers. All create parent directories as needed and embed the
// config as '#'-prefixed key=value lines (TSV/CSV) or a run_config object
// (JSON).
void write_verdicts(const std::string& path, const RunConfig& cfg,
                    std::span<const myers::FilterVerdict> verdicts);
void write_bench(const std::string& path, const RunConfig& cfg,
                 std::span<const BenchRow> rows);
void write_sweep(const std::string& path, const RunConfig& cfg,
                 std::span<const SweepRow> rows);
void write_cycles_json(const std::string& path, const RunConfig& cfg,
                       const CycleReport& report);
// 32 linear buckets over per-query candidate counts.
void write_histogram(const std::string& path, const RunConfig& cfg,
                     std::span<const BenchRow> rows);
void write_phases(const std::string& path, const RunConfig& cfg,
                  const std::array<int64_t, 8>& phase_ns);

struct MalformedReport : std::runtime_error {
  explicit MalformedReport(const std::string& what)
      : std::runtime_error(what) {}
};

// Rendered section table from a cycles.json file; also returns the rows
// for the sections.csv plot file. Throws MalformedReport.
struct ReportView {
  uint64_t total_cycles = 0;
  std::vector<SectionRow> sections;
  std::string text;  // printable table
};
ReportView render_report(const std::string& cycles_json_path);

// Subcommand bodies; return a process exit code (0 ok, 2 data error).
int cmd_index(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_candidates(const RunConfig& cfg);
int cmd_filter(const RunConfig& cfg);
int cmd_bench(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg, const std::string& cycles_path);

}  // namespace harness
