#include <string>

#include "CLI11.hpp"
#include "harness.hpp"

// CLI around the pipeline. Exit codes: 0 success, 1 usage, 2 data error.

int main(int argc, char** argv) {
  CLI::App app{"associative-processor DNA seed filtering pipeline"};
  app.require_subcommand(1);

  harness::RunConfig cfg;
  std::string cycles_path;

  auto add_common = [&](CLI::App* sub, bool need_reference) {
    auto* ref = sub->add_option("--reference", cfg.reference,
                                "reference FASTA (first record is used)");
    if (need_reference) ref->required();
    sub->add_option("--reads", cfg.reads,
                    "reads FASTA; omitted: simulate from the reference");
    sub->add_option("--index", cfg.index,
                    "k-mer index file; missing: build in memory");
    sub->add_option("--out-dir", cfg.out_dir, "output directory");
    sub->add_option("--k", cfg.k, "k-mer length (1..15)");
    sub->add_option("--max-occ", cfg.max_occ,
                    "drop k-mers occurring more often than this");
    sub->add_option("--read-len", cfg.read_len, "simulated read length");
    sub->add_option("--num-reads", cfg.num_reads, "simulated read count");
    sub->add_option("--threshold", cfg.threshold,
                    "keep scores <= threshold; negative: ceil(m/10)");
    sub->add_option("--backend", cfg.backend, "scoring backend")
        ->check(CLI::IsMember({"oracle", "cpu", "apu-sim"}));
    sub->add_option("--cap", cfg.cap, "max candidates per query");
    sub->add_option("--vmrf-cost", cfg.vmrf_cost, "cycles per VMRF transfer");
    sub->add_option("--dram-cost", cfg.dram_cost,
                    "cycles per DRAM row load into a register");
    sub->add_option("--fragment-overhead", cfg.fragment_overhead,
                    "issue overhead cycles per fragment");
    sub->add_option("--seed", cfg.seed, "simulation seed");
    sub->add_option("--repeats", cfg.repeats,
                    "timing repeats per query (median wins)");
    sub->add_option("--n-policy", cfg.n_policy,
                    "non-ACGT handling in FASTA input")
        ->check(CLI::IsMember({"reject", "map-to-a"}));
  };

  auto* c_index = app.add_subcommand("index", "build and save a k-mer index");
  add_common(c_index, true);
  auto* c_sim = app.add_subcommand("simulate", "write simulated reads");
  add_common(c_sim, true);
  auto* c_cand =
      app.add_subcommand("candidates", "write candidate windows per read");
  add_common(c_cand, true);
  auto* c_filter =
      app.add_subcommand("filter", "score candidates and write verdicts");
  add_common(c_filter, true);
  auto* c_bench =
      app.add_subcommand("bench", "time the CPU backend against sim cycles");
  add_common(c_bench, true);
  c_bench->add_flag("--sweep", cfg.sweep,
                    "sweep candidate caps 800..1800 step 200");
  auto* c_report =
      app.add_subcommand("report", "render a cycles.json section table");
  c_report->add_option("--cycles", cycles_path,
                       "cycles.json path (default <out-dir>/cycles.json)");
  c_report->add_option("--out-dir", cfg.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*c_index) return harness::cmd_index(cfg);
  if (*c_sim) return harness::cmd_simulate(cfg);
  if (*c_cand) return harness::cmd_candidates(cfg);
  if (*c_filter) return harness::cmd_filter(cfg);
  if (*c_bench) return harness::cmd_bench(cfg);
  if (*c_report) return harness::cmd_report(cfg, cycles_path);
  return 1;
}
