// Command-line driver: generate scenarios, run policies, tune (alpha, beta),
// and summarize exported reports.

#include "dpdp/config.hpp"
#include "dpdp/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace dpdp;

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "key=value config file");
    app->add_option("-s,--set", overrides, "override one key, e.g. --set beta=256")->take_all();
  }

  ExperimentConfig load() const {
    try {
      ExperimentConfig c;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config file '" + config_path + "'");
        c = read_experiment_config(in);
      }
      for (const std::string& kv : overrides) {
        std::string key;
        std::string value;
        if (!split_key_value(kv, key, value)) throw std::invalid_argument("empty --set");
        set_experiment_key(c, key, value);
      }
      c.validate();
      return c;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

std::vector<double> parse_grid(const std::string& text, const std::vector<double>& fallback) {
  if (text.empty()) return fallback;
  ExperimentConfig scratch;
  try {
    set_experiment_key(scratch, "alpha_grid", text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return scratch.alpha_grid;
}

void print_summary(const AggregateReport& r) {
  const auto line = [](const char* name, const Estimate& e) {
    std::cout << "  " << name << " = " << e.mean << " (se " << e.se << ")\n";
  };
  std::cout << r.label << ", " << r.replications() << " replication(s)\n";
  line("penalty_per_request", r.penalty_per_request());
  line("pct_late", r.pct_late());
  line("mean_lateness_min", r.mean_lateness_min());
  line("total_travel_min", r.total_travel_min());
}

int cmd_generate(const Common& common, std::uint64_t seed, int count, const std::string& out_path) {
  ExperimentConfig c = common.load();
  if (count < 1) throw UsageError("--count must be at least 1");
  if (seed != 0) c.scenario.seed = seed;
  if (count == 1) {
    const Scenario s = generate_scenario(c.scenario);
    if (out_path.empty()) {
      write_scenario(std::cout, s);
    } else {
      auto out = open_out(out_path);
      write_scenario(out, s);
    }
    return 0;
  }
  if (out_path.empty()) throw UsageError("--out DIR is required with --count > 1");
  std::filesystem::create_directories(out_path);
  for (int i = 0; i < count; ++i) {
    ScenarioConfig sc = c.scenario;
    sc.seed = c.scenario.seed + static_cast<std::uint64_t>(i);
    auto out = open_out((std::filesystem::path(out_path) / ("scenario_" + std::to_string(sc.seed) + ".txt")).string());
    write_scenario(out, generate_scenario(sc));
  }
  return 0;
}

struct RunOutputs {
  std::string scenario;
  std::string summary;
  std::string trace;
  std::string csv;
  std::string jsonl;
};

int cmd_run(const Common& common, const RunOutputs& o) {
  ExperimentConfig c = common.load();
  if (!o.trace.empty()) c.trace_path = o.trace;
  if (!o.csv.empty()) c.output_csv = o.csv;
  if (!o.jsonl.empty()) c.output_jsonl = o.jsonl;
  const std::string& scenario_path = o.scenario;
  const std::string& summary_path = o.summary;
  std::vector<EpochTrace> trace;
  AggregateReport report;
  if (!scenario_path.empty()) {
    std::ifstream in(scenario_path);
    if (!in) throw std::runtime_error("cannot open scenario '" + scenario_path + "'");
    Scenario s;
    try {
      s = read_scenario(in);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(scenario_path + ": " + e.what());
    }
    auto policy = make_policy(c.policy, s.config, policy_seed(c, 0));
    const EpisodeResult r = run_episode(s, *policy, {c.max_epochs});
    report.label = c.policy.label();
    report.rows.push_back(make_row(0, s.config.seed, r.kpis));
    if (const auto* t = policy_trace(*policy)) trace = *t;
  } else {
    BatchHooks hooks;
    hooks.on_episode = [&](int i, Policy& p, const EpisodeResult&) {
      if (i != 0) return;
      if (const auto* t = policy_trace(p)) trace = *t;
    };
    report = run_batch(c, hooks);
  }
  print_summary(report);
  if (!c.output_csv.empty()) {
    auto out = open_out(c.output_csv);
    export_report(out, report, ReportFormat::Csv);
  }
  if (!c.output_jsonl.empty()) {
    auto out = open_out(c.output_jsonl);
    export_report(out, report, ReportFormat::JsonLines);
  }
  if (!summary_path.empty()) {
    auto out = open_out(summary_path);
    write_summary(out, {report});
  }
  if (!c.density_csv.empty()) {
    auto out = open_out(c.density_csv);
    write_density(out, delivery_density({report}, c.bin_width_min));
  }
  if (!c.trace_path.empty()) {
    auto out = open_out(c.trace_path);
    write_trace(out, trace);
  }
  return 0;
}

int cmd_tune(const Common& common, const std::string& alphas, const std::string& betas, bool quiet) {
  const ExperimentConfig c = common.load();
  const GridResult grid =
      grid_search(c, parse_grid(alphas, c.alpha_grid), parse_grid(betas, c.beta_grid), [&](const SurfacePoint& p) {
        if (quiet) return;
        std::cerr << "alpha=" << p.alpha << " beta=" << p.beta << ": ";
        if (p.failed) std::cerr << "failed (epoch cap)\n";
        else std::cerr << p.objective() << '\n';
      });
  if (!c.surface_csv.empty()) {
    auto out = open_out(c.surface_csv);
    write_surface(out, grid);
  } else {
    write_surface(std::cout, grid);
  }
  if (!grid.found) throw std::runtime_error("every grid point failed");
  const SurfacePoint* best = best_for_alpha(grid, grid.best_alpha);
  std::cout << "best alpha = " << format_double(grid.best_alpha) << "\nbest beta = " << format_double(grid.best_beta)
            << "\npenalty_per_request = " << best->objective() << '\n';
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& summary_path,
               const std::string& density_path, double bin_width) {
  std::vector<AggregateReport> reports;
  for (const std::string& path : inputs) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report '" + path + "'");
    try {
      reports.push_back(parse_report(in, report_format_for(path)));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(path + ": " + e.what());
    }
  }
  if (summary_path.empty()) {
    write_summary(std::cout, reports);
  } else {
    auto out = open_out(summary_path);
    write_summary(out, reports);
  }
  if (!density_path.empty()) {
    if (!(bin_width > 0)) throw UsageError("--bin-width must be positive");
    auto out = open_out(density_path);
    write_density(out, delivery_density(reports, bin_width));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic pickup-and-delivery simulator and policy optimizer"};
  app.require_subcommand(1);

  Common gen_common;
  std::uint64_t gen_seed = 0;
  int gen_count = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "sample scenario files");
  gen_common.attach(gen);
  gen->add_option("--seed", gen_seed, "scenario seed (overrides the config)");
  gen->add_option("-n,--count", gen_count, "number of consecutive seeds");
  gen->add_option("-o,--out", gen_out, "output file, or directory when --count > 1");

  Common run_common;
  std::string run_scenario;
  std::string run_summary;
  auto* run = app.add_subcommand("run", "run a policy on replications or on one scenario file");
  run_common.attach(run);
  run->add_option("--scenario", run_scenario, "run this scenario file instead of sampling replications");
  run->add_option("--summary", run_summary, "write the summary CSV here");
  std::string run_trace;
  std::string run_csv;
  std::string run_jsonl;
  run->add_option("--trace", run_trace, "per-epoch engine trace CSV (first replication)");
  run->add_option("--csv", run_csv, "per-replication report, CSV");
  run->add_option("--jsonl", run_jsonl, "per-replication report, JSON lines");

  Common tune_common;
  std::string tune_alphas;
  std::string tune_betas;
  bool tune_quiet = false;
  auto* tune = app.add_subcommand("tune", "grid search over (alpha, beta) for CFA");
  tune_common.attach(tune);
  tune->add_option("--alphas", tune_alphas, "comma-separated alpha grid (default: alpha_grid)");
  tune->add_option("--betas", tune_betas, "comma-separated beta grid (default: beta_grid)");
  tune->add_flag("-q,--quiet", tune_quiet, "no per-point progress on stderr");

  std::vector<std::string> rep_inputs;
  std::string rep_summary;
  std::string rep_density;
  double rep_bin = 5.0;
  auto* report = app.add_subcommand("report", "summaries and delivery-time densities from exported reports");
  report->add_option("inputs", rep_inputs, "report files (.csv or .jsonl)")->required();
  report->add_option("--summary", rep_summary, "summary CSV (default: stdout)");
  report->add_option("--density", rep_density, "density CSV");
  report->add_option("--bin-width", rep_bin, "density bin width in minutes");

  Common cfg_common;
  auto* config = app.add_subcommand("config", "print the effective configuration");
  cfg_common.attach(config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_generate(gen_common, gen_seed, gen_count, gen_out);
    if (*run) return cmd_run(run_common, {run_scenario, run_summary, run_trace, run_csv, run_jsonl});
    if (*tune) return cmd_tune(tune_common, tune_alphas, tune_betas, tune_quiet);
    if (*report) return cmd_report(rep_inputs, rep_summary, rep_density, rep_bin);
    if (*config) {
      write_experiment_config(std::cout, cfg_common.load());
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
