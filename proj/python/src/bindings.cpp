#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "pol/baselines.hpp"
#include "pol/belief.hpp"
#include "pol/config.hpp"
#include "pol/experiment.hpp"
#include "pol/inference.hpp"
#include "pol/model.hpp"
#include "pol/planner.hpp"

namespace py = pybind11;
using namespace pol;

namespace {

ExperimentConfig config_of(const std::optional<std::string>& json, const std::vector<std::string>& overrides) {
  return parse_config(json ? *json : default_config_json(), overrides);
}

py::list summary_to_py(const Summary& s) {
  py::list out;
  for (const auto& row : s.strategies) {
    py::dict d;
    d["strategy"] = row.strategy;
    d["runs"] = row.runs;
    d["drop_median"] = row.drop_median;
    d["drop_p5"] = row.drop_p5;
    d["drop_p95"] = row.drop_p95;
    d["mean_response"] = row.mean_response;
    d["mean_reward"] = row.mean_reward;
    out.append(d);
  }
  return out;
}

py::dict row_to_py(const RunRow& r) {
  py::dict d;
  d["run_id"] = r.run_id;
  d["strategy"] = r.strategy;
  d["seed"] = r.seed;
  d["eta"] = r.eta;
  d["jobs_arrived"] = r.jobs_arrived;
  d["jobs_dropped"] = r.jobs_dropped;
  d["drop_rate"] = r.drop_rate;
  d["mean_response"] = r.mean_response;
  d["p95_response"] = r.p95_response;
  d["cumulative_reward"] = r.cumulative_reward;
  return d;
}

using Triple = std::tuple<int, int, int>;

AugmentedState state_of(const std::vector<Triple>& queues) {
  AugmentedState s = AugmentedState::empty(queues.size());
  for (std::size_t i = 0; i < queues.size(); ++i) {
    auto [b, x, y] = queues[i];
    s.queues[i] = {b, x, y};
  }
  return s;
}

std::vector<Triple> triples_of(const AugmentedState& s) {
  std::vector<Triple> out;
  for (const auto& q : s.queues) out.emplace_back(q.filling, q.in_flight, q.observed);
  return out;
}

/// Belief plus search tree for one planning agent over a fixed model. The
/// belief tracks the fillings right after the latest decision; the acks
/// passed to observe() are filtered together with the next decision.
class Agent {
 public:
  Agent(const std::string& config_json, std::uint64_t seed)
      : config_(parse_config(config_json)),
        model_(config_.model()),
        tree_(init_belief(config_.planner.n_particles, AugmentedState::empty(config_.n_queues()))),
        pending_(Observation::zeros(config_.n_queues())),
        rng_(seed) {}

  int decide() {
    const Action a = plan(tree_, model_, config_.planner, rng_);
    Belief next = sir_update(tree_.belief, a, pending_, model_, config_.planner.sir_budget(), rng_);
    if (config_.planner.reuse_tree) {
      advance_root(tree_, a, pending_, std::move(next));
    } else {
      tree_ = SearchTree(std::move(next));
    }
    return a.queue;
  }

  void observe(const std::vector<int>& acks) {
    if (acks.size() != config_.n_queues()) throw py::value_error("acks length must equal the number of queues");
    pending_ = Observation{acks};
  }

  py::list stats() const {
    py::list out;
    for (const auto& s : belief_stats(tree_.belief)) out.append(py::make_tuple(s.mean, s.p10, s.p90));
    return out;
  }

  std::vector<std::vector<Triple>> particles() const {
    std::vector<std::vector<Triple>> out;
    out.reserve(tree_.belief.size());
    for (const auto& p : tree_.belief.particles) out.push_back(triples_of(p));
    return out;
  }

 private:
  ExperimentConfig config_;
  ModelParams model_;
  SearchTree tree_;
  Observation pending_;
  Rng rng_;
};

}  // namespace

PYBIND11_MODULE(_polcore, m) {
  m.doc() = "Load balancing with delayed acknowledgements: simulation core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("default_config", &default_config_json, "Default experiment config as JSON text.");

  m.def(
      "resolve_config",
      [](std::optional<std::string> json, std::vector<std::string> overrides) {
        return to_json(config_of(json, overrides));
      },
      py::arg("config") = py::none(), py::arg("overrides") = std::vector<std::string>{},
      "Validate a config (with dotted key=value overrides) and return it fully resolved.");

  m.def(
      "run_experiment",
      [](std::optional<std::string> json, std::vector<std::string> overrides) {
        const auto config = config_of(json, overrides);
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(config);
        }
        return summary_to_py(result.summary);
      },
      py::arg("config") = py::none(), py::arg("overrides") = std::vector<std::string>{},
      "Run every configured strategy, write result CSVs to output_dir, return the summary rows.");

  m.def(
      "run_strategy",
      [](std::optional<std::string> json, const std::string& strategy, std::size_t run_id,
         std::vector<std::string> overrides) {
        const auto config = config_of(json, overrides);
        auto s = Strategy::parse(strategy);
        for (const auto& c : config.strategies) {
          if (c.kind == s.kind) s = c;
        }
        RunOutcome out;
        {
          py::gil_scoped_release release;
          out = run_strategy(config, s, run_id);
        }
        return row_to_py(out.row);
      },
      py::arg("config") = py::none(), py::arg("strategy") = "pol", py::arg("run_id") = 0,
      py::arg("overrides") = std::vector<std::string>{}, "Replay one CRN run under one strategy.");

  m.def(
      "summarize", [](const std::vector<std::string>& dirs) { return summary_to_py(summarize(dirs)); },
      py::arg("dirs"), "Aggregate runs.csv from one or more result directories.");

  m.def("job_count_pmf_mm", &job_count_pmf_mm, py::arg("arrival_rate"), py::arg("service_rate"), py::arg("k"),
        "P(K = k) for exponential arrivals and service.");

  m.def(
      "step",
      [](const std::vector<Triple>& state, int action, std::uint64_t seed, std::optional<std::string> json) {
        const auto config = config_of(json, {});
        if (state.size() != config.n_queues()) throw py::value_error("state length must equal the number of queues");
        Rng rng(seed);
        const auto t = step_generative(state_of(state), Action{action}, config.model(), rng);
        return py::make_tuple(triples_of(t.next), t.observation.acks, t.reward);
      },
      py::arg("state"), py::arg("action"), py::arg("seed") = 0, py::arg("config") = py::none(),
      "One generative epoch from (b, x, y) per queue; returns (next_state, acks, reward).");

  m.def(
      "fit_exponential",
      [](const std::vector<double>& data, double alpha0, double beta0) {
        const auto post = fit_exponential(data, GammaPosterior{alpha0, beta0});
        return py::make_tuple(post.alpha, post.beta);
      },
      py::arg("data"), py::arg("alpha0") = 1.0, py::arg("beta0") = 1.0,
      "Conjugate Gamma update for an exponential rate; returns (alpha, beta).");

  m.def("load_trace", &load_trace, py::arg("path"), py::arg("column") = "",
        "Read positive durations from a plain or headered CSV trace.");

  py::class_<Agent>(m, "Agent", "Particle belief plus tree search for the planning balancer.")
      .def(py::init<const std::string&, std::uint64_t>(), py::arg("config"), py::arg("seed") = 0)
      .def("decide", &Agent::decide, "Plan, route, and filter the pending acks; returns the chosen queue.")
      .def("observe", &Agent::observe, py::arg("acks"),
           "Record the acks seen since the last decision; they are filtered at the next decide().")
      .def("stats", &Agent::stats, "Per-queue (mean, p10, p90) of the filling marginal.")
      .def("particles", &Agent::particles, "Particles as lists of (b, x, y) per queue.");
}
