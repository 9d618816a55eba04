#include "pol/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "pol/baselines.hpp"
#include "pol/belief.hpp"
#include "pol/planner.hpp"

namespace pol {
namespace fs = std::filesystem;

namespace {

constexpr const char* kRunsHeader =
    "run_id,strategy,seed,eta,jobs_arrived,jobs_dropped,drop_rate,mean_response,p95_response,"
    "cumulative_reward";

double interpolated_percentile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// The POL decision loop state. The belief describes the fillings right
/// after the latest routing decision; the generative step pairs the next
/// action with the acks produced during the interval that precedes it.
class PolAgent {
 public:
  PolAgent(const ExperimentConfig& config, std::uint64_t seed)
      : model_(config.model()),
        params_(config.planner),
        rng_(seed),
        tree_(init_belief(params_.n_particles, AugmentedState::empty(config.n_queues()))),
        pending_(Observation::zeros(config.n_queues())) {}

  Action decide(PolDiagnostics& diag, double& latency) {
    const auto start = std::chrono::steady_clock::now();
    PlanStats stats;
    const Action a = plan(tree_, model_, params_, rng_, &stats);
    SirReport report;
    Belief next = sir_update(tree_.belief, a, pending_, model_, params_.sir_budget(), rng_, &report);
    if (params_.reuse_tree) {
      diag.reused_roots += advance_root(tree_, a, pending_, std::move(next)) ? 1 : 0;
    } else {
      tree_ = SearchTree(std::move(next));
    }
    latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ++diag.decisions;
    diag.degenerate_updates += report.degenerate ? 1 : 0;
    diag.simulations += stats.simulations;
    diag.total_latency += latency;
    return a;
  }

  void observe(const Observation& z) { pending_ = z; }
  const Belief& belief() const { return tree_.belief; }

 private:
  ModelParams model_;
  PlannerParams params_;
  Rng rng_;
  SearchTree tree_;
  Observation pending_;
};

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::uint64_t strategy_seed(std::uint64_t base_seed, std::size_t run_id, const std::string& strategy) {
  return derive_seed(base_seed, run_id, fnv1a(strategy));
}

RunOutcome run_strategy(const ExperimentConfig& config, const Strategy& strategy,
                        std::size_t run_id, bool record_belief_trace) {
  const ModelParams truth = config.model();
  const std::uint64_t seed = config.base_seed + run_id;
  Environment env(truth, config.t_e, seed);
  Rng rng(strategy_seed(config.base_seed, run_id, strategy.name()));

  RunOutcome out;
  std::optional<PolAgent> agent;
  if (strategy.kind == StrategyKind::kPol) agent.emplace(config, rng());

  Observation last = Observation::zeros(truth.num_queues());
  std::optional<Action> last_action;
  const bool heatmap = config.heatmap && truth.num_queues() == 2;
  std::size_t epoch = 0;
  while (!env.done()) {
    const std::vector<int> before = env.fillings();
    Action a;
    if (agent) {
      double latency = 0.0;
      a = agent->decide(out.pol, latency);
      out.metrics.decision_latencies.push_back(latency);
    } else if (strategy.full_information()) {
      a = decide_full_info(strategy, before, truth.service_rates(), rng);
    } else {
      a = decide_limited_info(strategy, last.acks, idle_servers(last.acks, last_action), rng);
    }

    const StepResult step = env.step(a);
    if (heatmap) ++out.heatmap[{before[0], before[1], a.queue}];
    if (agent && record_belief_trace) {
      const auto stats = belief_stats(agent->belief());
      for (std::size_t i = 0; i < stats.size(); ++i) {
        out.belief_trace.push_back(
            {epoch, i, step.fillings_after_routing[i], stats[i].mean, stats[i].p10, stats[i].p90});
      }
    }
    if (agent) agent->observe(step.observation);
    last = step.observation;
    last_action = a;
    ++epoch;
  }

  const auto latencies = std::move(out.metrics.decision_latencies);
  out.metrics = env.finalize();
  out.metrics.decision_latencies = latencies;
  out.row = RunRow{run_id,
                   strategy.name(),
                   seed,
                   truth.offered_load(),
                   out.metrics.jobs_arrived,
                   out.metrics.jobs_dropped,
                   out.metrics.drop_rate,
                   out.metrics.mean_response(),
                   out.metrics.response_percentile(0.95),
                   out.metrics.cumulative_reward};
  return out;
}

std::string format_runs_csv(const std::vector<RunRow>& rows) {
  std::string s = std::string(kRunsHeader) + "\n";
  for (const auto& r : rows) {
    s += std::to_string(r.run_id) + "," + r.strategy + "," + std::to_string(r.seed) + "," +
         format_number(r.eta) + "," + std::to_string(r.jobs_arrived) + "," +
         std::to_string(r.jobs_dropped) + "," + format_number(r.drop_rate) + "," +
         format_number(r.mean_response) + "," + format_number(r.p95_response) + "," +
         format_number(r.cumulative_reward) + "\n";
  }
  return s;
}

std::vector<RunRow> parse_runs_csv(const std::string& text, const std::string& source) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kRunsHeader) {
    throw std::runtime_error(source + ":1: unexpected header (expected '" + kRunsHeader + "')");
  }
  std::vector<RunRow> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    const std::string where = source + ":" + std::to_string(line_no);
    if (cells.size() != 10) throw std::runtime_error(where + ": expected 10 columns");
    try {
      RunRow r;
      r.run_id = std::stoul(cells[0]);
      r.strategy = cells[1];
      r.seed = std::stoull(cells[2]);
      r.eta = std::stod(cells[3]);
      r.jobs_arrived = std::stol(cells[4]);
      r.jobs_dropped = std::stol(cells[5]);
      r.drop_rate = std::stod(cells[6]);
      r.mean_response = std::stod(cells[7]);
      r.p95_response = std::stod(cells[8]);
      r.cumulative_reward = std::stod(cells[9]);
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      throw std::runtime_error(where + ": malformed value");
    }
  }
  return rows;
}

const StrategySummary* Summary::find(const std::string& strategy) const {
  for (const auto& s : strategies) {
    if (s.strategy == strategy) return &s;
  }
  return nullptr;
}

Summary summarize_rows(const std::vector<RunRow>& rows) {
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (std::find(order.begin(), order.end(), r.strategy) == order.end()) order.push_back(r.strategy);
  }
  Summary summary;
  for (const auto& name : order) {
    std::vector<double> drops;
    double response_sum = 0.0;
    std::size_t response_n = 0;
    double reward_sum = 0.0;
    for (const auto& r : rows) {
      if (r.strategy != name) continue;
      drops.push_back(r.drop_rate);
      if (!std::isnan(r.mean_response)) {
        response_sum += r.mean_response;
        ++response_n;
      }
      reward_sum += r.cumulative_reward;
    }
    StrategySummary s;
    s.strategy = name;
    s.runs = drops.size();
    s.drop_median = interpolated_percentile(drops, 0.5);
    s.drop_p5 = interpolated_percentile(drops, 0.05);
    s.drop_p95 = interpolated_percentile(drops, 0.95);
    s.mean_response = response_n == 0 ? std::numeric_limits<double>::quiet_NaN()
                                      : response_sum / static_cast<double>(response_n);
    s.mean_reward = reward_sum / static_cast<double>(s.runs);
    summary.strategies.push_back(s);
  }
  return summary;
}

std::string Summary::to_text() const {
  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-8s %5s %12s %12s %12s %14s %16s\n", "strategy", "runs",
                "drop_median", "drop_p5", "drop_p95", "mean_response", "mean_cum_reward");
  s += buf;
  for (const auto& r : strategies) {
    std::snprintf(buf, sizeof buf, "%-8s %5zu %12.6f %12.6f %12.6f %14.6f %16.3f\n", r.strategy.c_str(),
                  r.runs, r.drop_median, r.drop_p5, r.drop_p95, r.mean_response, r.mean_reward);
    s += buf;
  }
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("output_dir '" + config.output_dir + "' cannot be created");
  }

  const std::size_t n_runs = config.t_m;
  const std::size_t n_strat = config.strategies.size();
  std::vector<RunOutcome> outcomes(n_runs * n_strat);

  std::size_t workers = config.workers == 0 ? std::thread::hardware_concurrency() : config.workers;
  workers = std::clamp<std::size_t>(workers, 1, n_runs);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= n_runs) return;
      try {
        for (std::size_t s = 0; s < n_strat; ++s) {
          outcomes[r * n_strat + s] =
              run_strategy(config, config.strategies[s], config.run_offset + r, config.belief_trace);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  // Single collector: everything below runs after the workers joined.
  std::vector<RunRow> rows;
  for (const auto& o : outcomes) rows.push_back(o.row);
  const std::string runs_csv = format_runs_csv(rows);
  write_file(dir / "runs.csv", runs_csv);

  if (config.write_response_times) {
    std::string s = "strategy,run_id,response_time\n";
    for (const auto& o : outcomes) {
      const std::string prefix = o.row.strategy + "," + std::to_string(o.row.run_id) + ",";
      for (double t : o.metrics.response_times) s += prefix + format_number(t) + "\n";
    }
    write_file(dir / "response_times.csv", s);
  }

  if (config.belief_trace) {
    for (const auto& o : outcomes) {
      if (o.belief_trace.empty()) continue;
      std::string s = "epoch,queue,true_b,belief_mean,belief_p10,belief_p90\n";
      for (const auto& p : o.belief_trace) {
        s += std::to_string(p.epoch) + "," + std::to_string(p.queue) + "," +
             std::to_string(p.true_filling) + "," + format_number(p.mean) + "," +
             format_number(p.p10) + "," + format_number(p.p90) + "\n";
      }
      write_file(dir / ("belief_trace_run" + std::to_string(o.row.run_id) + ".csv"), s);
    }
  }

  if (config.heatmap && config.n_queues() == 2) {
    HeatmapCounts total;
    bool any = false;
    for (const auto& o : outcomes) {
      if (o.row.strategy != "pol") continue;
      any = true;
      for (const auto& [key, count] : o.heatmap) total[key] += count;
    }
    if (any) {
      std::string s = "b1,b2,action,count\n";
      for (const auto& [key, count] : total) {
        const auto& [b1, b2, a] = key;
        s += std::to_string(b1) + "," + std::to_string(b2) + "," + std::to_string(a) + "," +
             std::to_string(count) + "\n";
      }
      write_file(dir / "policy_heatmap.csv", s);
    }
  }

  write_file(dir / "config.json", to_json(config));

  ExperimentResult result;
  result.summary = summarize_rows(parse_runs_csv(runs_csv, (dir / "runs.csv").string()));
  result.summary_text = result.summary.to_text();
  write_file(dir / "summary.txt", result.summary_text);
  result.outcomes = std::move(outcomes);
  return result;
}

Summary summarize(const std::vector<std::string>& result_dirs) {
  std::vector<RunRow> rows;
  for (const auto& d : result_dirs) {
    const fs::path path = fs::path(d) / "runs.csv";
    if (!fs::exists(path)) throw std::runtime_error("no results: '" + path.string() + "' not found");
    auto part = parse_runs_csv(read_file(path), path.string());
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (rows.empty()) throw std::runtime_error("no results: runs.csv files contain no rows");
  return summarize_rows(rows);
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& config, const std::vector<double>& etas) {
  const ModelParams model = config.model();
  double total_mu = 0.0;
  for (double mu : model.service_rates()) total_mu += mu;
  std::vector<SweepPoint> points;
  for (double eta : etas) {
    if (!(eta > 0.0)) throw std::invalid_argument("sweep: offered loads must be positive");
    ExperimentConfig c = config;
    c.arrival = config.arrival.with_mean(1.0 / (eta * total_mu));
    c.output_dir = (fs::path(config.output_dir) / ("eta_" + format_number(eta))).string();
    auto result = run_experiment(c);
    points.push_back({eta, c.output_dir, std::move(result.summary)});
  }
  return points;
}

std::string format_sweep(const std::vector<SweepPoint>& points) {
  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-6s %-8s %5s %12s %12s %12s %14s\n", "eta", "strategy", "runs",
                "drop_median", "drop_p5", "drop_p95", "mean_response");
  s += buf;
  for (const auto& p : points) {
    for (const auto& r : p.summary.strategies) {
      std::snprintf(buf, sizeof buf, "%-6g %-8s %5zu %12.6f %12.6f %12.6f %14.6f\n", p.eta,
                    r.strategy.c_str(), r.runs, r.drop_median, r.drop_p5, r.drop_p95, r.mean_response);
      s += buf;
    }
  }
  return s;
}

}  // namespace pol
