// Benchmark driver: sum-rate sweeps, brute-force oracle and the receiver
// complexity table.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nomascma/bench.hpp"
#include "nomascma/rxcomplexity.hpp"

namespace {

using namespace nomascma;

struct SolverFlags {
  std::size_t L_T = 0;
  std::size_t K = 0;
  std::size_t U = 0;
  bool literal = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lt", L_T, "Max NOMA users per subcarrier (default 3)")->check(CLI::PositiveNumber);
    cmd->add_option("--reuse", K, "Max SCMA codebooks per subcarrier and cell (default 6)")->check(CLI::PositiveNumber);
    cmd->add_option("--codebook-size", U, "Subcarriers per SCMA codebook (default 2)")->check(CLI::PositiveNumber);
    cmd->add_flag("--literal-scma-interference", literal,
                  "Count every codebook of an interfering user in SCMA denominators");
  }

  SolverConfig apply(SolverConfig cfg) const {
    if (L_T) cfg.max_users_per_subcarrier = L_T;
    if (K) cfg.max_reuse_per_subcarrier = K;
    if (U) cfg.codebook_size = U;
    cfg.literal_scma_interference = literal;
    return cfg;
  }
};

int run_command(const std::string& scenario, const std::string& sweep, const std::vector<std::size_t>& values,
                std::size_t seeds, const std::string& out, const std::string& format, bool bits, bool strict,
                bool timing, std::size_t jobs, const SolverFlags& flags) {
  bench::SweepSpec spec;
  spec.axis = bench::parse_axis(sweep);
  spec.values = values;
  spec.seeds.resize(seeds);
  std::iota(spec.seeds.begin(), spec.seeds.end(), std::uint64_t{1});
  spec.base = load_network_config(scenario);
  spec.solver = flags.apply(spec.solver);
  spec.timing = timing;
  spec.jobs = jobs;

  const auto result = bench::run_sweep(spec);
  const std::string text = format == "plotdata" ? bench::to_plotdata(result, bits) : bench::to_csv(result, bits);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + out + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + out + "' failed");
  }
  for (const auto& row : result.rows)
    if (!row.ok())
      std::cerr << "scenario " << bench::axis_name(result.axis) << '=' << row.axis_value << " seed=" << row.seed
                << " failed: " << row.error << '\n';
  if (strict && result.failures() > 0) {
    std::cerr << result.failures() << " of " << result.rows.size() << " scenarios failed\n";
    return 2;
  }
  return 0;
}

int oracle_command(const std::string& scenario, const std::string& scheme, std::size_t grid, const SolverFlags& flags) {
  const SolverConfig cfg = flags.apply({});
  const ChannelState st = generate_scenario(load_network_config(scenario));
  const auto which = bench::parse_scheme(scheme);
  const auto oracle = bench::brute_force_oracle(st, which, grid, cfg);
  const double solver = which == bench::Scheme::noma ? noma::solve_noma(st, cfg).sum_rate : scma::solve_scma(st, cfg).sum_rate;
  std::printf("scheme        %s\n", scheme.c_str());
  std::printf("assignments   %zu\n", oracle.assignments);
  std::printf("grid points   %zu\n", grid);
  std::printf("oracle_nats   %.12g\n", oracle.sum_rate);
  std::printf("solver_nats   %.12g\n", solver);
  if (oracle.sum_rate > 0.0) std::printf("ratio         %.6f\n", solver / oracle.sum_rate);
  return 0;
}

int complexity_command(bool csv) {
  const auto rows = rx::complexity_table(rx::published_rows());
  std::cout << (csv ? rx::to_csv(rows) : rx::to_text(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NOMA and SCMA downlink resource allocation benchmark"};
  app.require_subcommand(1);

  std::string scenario, sweep, out, format = "csv", scheme;
  std::vector<std::size_t> values;
  std::size_t seeds = 20, grid = 20, jobs = 1;
  bool bits = false, strict = false, timing = false, table = false, csv = false;
  SolverFlags run_flags, oracle_flags;

  auto* run = app.add_subcommand("run", "Sum-rate sweep over user or cell count");
  run->add_option("--scenario", scenario, "Scenario file (key = value)")->required()->check(CLI::ExistingFile);
  run->add_option("--sweep", sweep, "Sweep axis")->required()->check(CLI::IsMember({"users", "cells"}));
  run->add_option("--values", values, "Ascending axis values")->required()->delimiter(',');
  run->add_option("--seeds", seeds, "Seeds 1..n per value")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output path ('-' for stdout)");
  run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "plotdata"}));
  run->add_flag("--bits", bits, "Report rates in bits instead of nats");
  run->add_flag("--strict", strict, "Exit nonzero if any scenario fails");
  run->add_flag("--timing", timing, "Record wall time per scenario (output no longer reproducible)");
  run->add_option("--jobs", jobs, "Scenarios solved concurrently")->check(CLI::PositiveNumber);
  run_flags.add_to(run);

  auto* oracle = app.add_subcommand("oracle", "Brute-force optimum of a small scenario");
  oracle->add_option("--scenario", scenario, "Scenario file (key = value)")->required()->check(CLI::ExistingFile);
  oracle->add_option("--scheme", scheme, "Access scheme")->required()->check(CLI::IsMember({"noma", "scma"}));
  oracle->add_option("--grid", grid, "Power levels per variable")->check(CLI::Range(1, 100));
  oracle_flags.add_to(oracle);

  auto* complexity = app.add_subcommand("complexity", "Receiver complexity table with audit notes");
  complexity->add_flag("--table", table, "Print the table (default)");
  complexity->add_flag("--csv", csv, "CSV instead of aligned text");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(scenario, sweep, values, seeds, out, format, bits, strict, timing, jobs, run_flags);
    if (*oracle) return oracle_command(scenario, scheme, grid, oracle_flags);
    return complexity_command(csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
