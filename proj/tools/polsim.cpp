// polsim: experiment driver for the partially observable load balancer.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pol/config.hpp"
#include "pol/experiment.hpp"
#include "pol/inference.hpp"

namespace {

pol::ExperimentConfig resolve_config(const std::string& path, std::vector<std::string> overrides,
                                     int workers, const std::string& output) {
  if (workers >= 0) overrides.push_back("workers=" + std::to_string(workers));
  if (!output.empty()) overrides.push_back("output_dir=\"" + output + "\"");
  return path.empty() ? pol::parse_config(pol::default_config_json(), overrides)
                      : pol::load_config(path, overrides);
}

void print_pol_latency(const pol::ExperimentResult& result) {
  double latency = 0.0;
  std::size_t decisions = 0;
  std::size_t degenerate = 0;
  for (const auto& o : result.outcomes) {
    latency += o.pol.total_latency;
    decisions += o.pol.decisions;
    degenerate += o.pol.degenerate_updates;
  }
  if (decisions > 0) {
    std::printf("pol: %zu decisions, mean latency %.3f ms, %zu degenerate belief updates\n", decisions,
                1e3 * latency / static_cast<double>(decisions), degenerate);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Load balancing with delayed acknowledgements: experiments and tools"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  int workers = -1;
  std::string output;

  auto* run = app.add_subcommand("run", "Run all configured strategies over T_m CRN-coupled runs");
  run->add_option("--config", config_path, "JSON experiment config (default: two-server setup)");
  run->add_option("--override", overrides, "key=value override, dotted keys (repeatable)");
  run->add_option("--workers", workers, "Concurrent runs (0 = hardware threads)");
  run->add_option("--output", output, "Output directory");

  std::vector<std::string> dirs;
  auto* summarize = app.add_subcommand("summarize", "Recompute the summary table from result CSVs");
  summarize->add_option("dirs", dirs, "Result directories (rows are concatenated)")->required();

  std::string etas;
  auto* sweep = app.add_subcommand("sweep", "Run the experiment at several offered loads");
  sweep->add_option("--config", config_path, "JSON experiment config");
  sweep->add_option("--eta", etas, "Comma-separated offered loads, e.g. 0.2,0.4,0.6")->required();
  sweep->add_option("--override", overrides, "key=value override (repeatable)");
  sweep->add_option("--workers", workers, "Concurrent runs (0 = hardware threads)");
  sweep->add_option("--output", output, "Output directory");

  std::string trace;
  std::string column;
  double alpha0 = 1.0;
  double beta0 = 1.0;
  auto* fit = app.add_subcommand("fit", "Fit an exponential model with a conjugate Gamma prior");
  fit->add_option("--trace", trace, "Trace file: one duration per line, or a headered CSV")->required();
  fit->add_option("--column", column, "Column name when the trace is a headered CSV");
  fit->add_option("--alpha0", alpha0, "Prior shape");
  fit->add_option("--beta0", beta0, "Prior rate");

  app.add_subcommand("default-config", "Print the default experiment config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      const auto config = resolve_config(config_path, overrides, workers, output);
      std::printf("N=%zu eta=%s t_m=%zu t_e=%zu -> %s\n", config.n_queues(),
                  pol::format_number(config.offered_load()).c_str(), config.t_m, config.t_e,
                  config.output_dir.c_str());
      const auto result = pol::run_experiment(config);
      std::fputs(result.summary_text.c_str(), stdout);
      print_pol_latency(result);
    } else if (*summarize) {
      std::fputs(pol::summarize(dirs).to_text().c_str(), stdout);
    } else if (*sweep) {
      const auto config = resolve_config(config_path, overrides, workers, output);
      std::vector<double> values;
      std::stringstream ss(etas);
      std::string item;
      while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
      if (values.empty()) throw std::invalid_argument("--eta needs at least one value");
      std::fputs(pol::format_sweep(pol::run_sweep(config, values)).c_str(), stdout);
    } else if (*fit) {
      const auto data = pol::load_trace(trace, column);
      const auto post = pol::fit_exponential(data, {alpha0, beta0});
      double sum = 0.0;
      for (double d : data) sum += d;
      nlohmann::json out = {{"n", data.size()},
                            {"alpha", post.alpha},
                            {"beta", post.beta},
                            {"posterior_mean_rate", post.mean_rate()},
                            {"predictive_mean", post.predictive_mean()},
                            {"empirical_mean", sum / static_cast<double>(data.size())}};
      std::cout << out.dump(2) << "\n";
    } else {
      std::fputs(pol::default_config_json().c_str(), stdout);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
