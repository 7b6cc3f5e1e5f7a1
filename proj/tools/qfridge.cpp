// qfridge command-line front end.
//
//   qfridge steady   --config params.json [--out report.json]
//   qfridge sweep    --config params.json [--variable T_H] [--from a --to b]
//                    [--steps n] [--g-list g1,g2,...] [--format csv|json] [--out f]
//   qfridge figure   fig1..fig6 [--from a --to b] [--steps n] [--g-list ...]
//                    [--format csv|json] [--out f]
//   qfridge selftest [--draws n] [--seed s]
//
// Exit codes: 0 success, 1 invalid configuration, 2 numerical failure, 3 IO.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qfridge/io.hpp"
#include "qfridge/selftest.hpp"
#include "qfridge/sweep.hpp"

namespace {

using namespace qfridge;

enum ExitCode { kOk = 0, kInvalidConfig = 1, kNumericalFailure = 2, kIoFailure = 3 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveParameter:
    case ErrorCode::DegenerateBohrFrequency:
    case ErrorCode::InvalidConfig:
    case ErrorCode::DomainError:
      return kInvalidConfig;
    case ErrorCode::Io:
      return kIoFailure;
    default:
      return kNumericalFailure;
  }
}

struct SweepOptions {
  std::string config;
  std::string variable = "T_H";
  std::optional<double> from;
  std::optional<double> to;
  int steps = 200;
  std::vector<double> g_list;
  std::vector<std::string> columns;
  std::string format = "csv";
  std::string out;
  unsigned workers = 0;
};

void add_sweep_flags(CLI::App* cmd, SweepOptions& o) {
  cmd->add_option("--from", o.from, "Start of the swept range");
  cmd->add_option("--to", o.to, "End of the swept range");
  cmd->add_option("--steps", o.steps, "Number of grid points (>= 2)")->check(CLI::Range(2, 1000000));
  cmd->add_option("--g-list", o.g_list, "Coupling values, one curve each")->delimiter(',');
  cmd->add_option("--columns", o.columns,
                  "Output columns (Qdot_H,Qdot_R,Qdot_C,eta,sigma,T_v,refrigerator,residual,g_over_gamma)")
      ->delimiter(',');
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "Output file (stdout when omitted)");
  cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
}

void apply_sweep_flags(const SweepOptions& o, SweepSpec& spec) {
  if (o.from) spec.range.from = *o.from;
  if (o.to) spec.range.to = *o.to;
  spec.range.steps = o.steps;
  if (!o.g_list.empty()) spec.g_values = o.g_list;
  if (!o.columns.empty()) {
    spec.outputs.clear();
    for (const auto& key : o.columns) {
      const auto c = parse_column(key);
      if (!c) throw Error(ErrorCode::InvalidConfig, "unknown column '" + key + "'");
      spec.outputs.push_back(*c);
    }
  }
  spec.workers = o.workers;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

void summarize(const SweepSpec& spec, const SweepTable& table) {
  std::cerr << table.rows.size() << " rows";
  if (!table.skipped.empty()) std::cerr << ", " << table.skipped.size() << " skipped";
  std::cerr << '\n';
  for (const auto& s : table.skipped) {
    std::cerr << "  skipped ";
    if (s.g_line) std::cerr << "g=" << format_double(*s.g_line) << ' ';
    std::cerr << variable_key(spec.variable) << '=' << format_double(s.x) << ": " << s.reason
              << '\n';
  }
}

int run_table(const SweepSpec& spec, const SweepOptions& o) {
  const SweepTable table = run_sweep(spec);
  const Format format = *parse_format(o.format);
  if (o.out.empty()) {
    write_table(table, format, std::cout);
  } else {
    emit(table, format, o.out);
  }
  summarize(spec, table);
  if (spec.variable == SweepVariable::T_H) {
    // Zero crossings of Qdot_C on the same grid.
    for (const auto& root : find_zero_crossing(spec, table, Observable::Qdot_C)) {
      std::cerr << "  Qdot_C crosses zero ";
      if (root.g_line) std::cerr << "(g=" << format_double(*root.g_line) << ") ";
      std::cerr << "at T_H=" << root.value << (root.rising ? " (rising)" : " (falling)")
                << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-qubit absorption refrigerator: steady states, heat currents, sweeps"};
  app.require_subcommand(1);

  std::string steady_config, steady_out;
  auto* steady = app.add_subcommand("steady", "Steady state at one parameter point (JSON report)");
  steady->add_option("--config", steady_config, "JSON parameter file")->required();
  steady->add_option("--out", steady_out, "Output file (stdout when omitted)");

  SweepOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and tabulate observables");
  sweep->add_option("--config", sweep_opts.config, "JSON parameter file")->required();
  sweep->add_option("--variable", sweep_opts.variable, "Swept parameter")
      ->check(CLI::IsMember({"T_H", "g", "T_C", "T_R"}));
  add_sweep_flags(sweep, sweep_opts);

  SweepOptions figure_opts;
  std::string figure_id;
  auto* figure = app.add_subcommand("figure", "Dataset for one of the preset figures");
  figure->add_option("id", figure_id, "fig1 .. fig6")->required()->check(
      CLI::IsMember(figure_ids()));
  add_sweep_flags(figure, figure_opts);

  int draws = 50;
  std::uint64_t seed = 20240611;
  auto* selftest = app.add_subcommand("selftest", "Run the randomized invariant suite");
  selftest->add_option("--draws", draws, "Random parameter draws")->check(CLI::PositiveNumber);
  selftest->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalidConfig;
  }

  try {
    if (*steady) {
      const ModelParams p = load_config(steady_config);
      const SteadyReport report = analyze(p);
      write_output(report_to_json(report).dump(2) + "\n", steady_out);
      return kOk;
    }
    if (*sweep) {
      SweepSpec spec;
      spec.variable = *parse_variable(sweep_opts.variable);
      spec.base = load_config(sweep_opts.config, spec.variable != SweepVariable::T_H);
      if (spec.variable == SweepVariable::T_H) {
        spec.range = default_t_hot_range(spec.base);
      } else if (!sweep_opts.from || !sweep_opts.to) {
        throw Error(ErrorCode::InvalidConfig, "--from and --to are required for this variable");
      }
      apply_sweep_flags(sweep_opts, spec);
      return run_table(spec, sweep_opts);
    }
    if (*figure) {
      FigurePreset preset = figure_preset(figure_id);
      apply_sweep_flags(figure_opts, preset.spec);
      std::cerr << preset.id << ": " << preset.description << '\n';
      return run_table(preset.spec, figure_opts);
    }
    if (*selftest) {
      bool ok = true;
      for (const auto& check : run_selftest(draws, seed)) {
        std::cout << (check.passed ? "PASS  " : "FAIL  ") << check.name << "  [" << check.detail
                  << "]\n";
        ok = ok && check.passed;
      }
      return ok ? kOk : kNumericalFailure;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kOk;
}
