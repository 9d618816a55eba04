#include "pol/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pol/inference.hpp"

namespace pol {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

double get_number(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) fail(path + "." + key, "missing");
  if (!j.at(key).is_number()) fail(path + "." + key, "must be a number");
  return j.at(key).get<double>();
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "has the wrong type");
  }
}

DistributionSpec parse_distribution(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object with a 'kind'");
  const std::string kind = get_or<std::string>(j, "kind", "", path);
  try {
    if (kind == "exponential") {
      if (j.contains("mean")) return DistributionSpec::exponential(1.0 / get_number(j, "mean", path));
      return DistributionSpec::exponential(get_number(j, "rate", path));
    }
    if (kind == "gamma") {
      return DistributionSpec::gamma(get_number(j, "shape", path), get_number(j, "rate", path));
    }
    if (kind == "pareto") {
      return DistributionSpec::pareto(get_number(j, "scale", path), get_number(j, "tail_index", path));
    }
    if (kind == "deterministic") return DistributionSpec::deterministic(get_number(j, "value", path));
    if (kind == "empirical") {
      if (j.contains("trace")) {
        return DistributionSpec::empirical(load_trace(get_or<std::string>(j, "trace", "", path),
                                                      get_or<std::string>(j, "column", "", path)));
      }
      return DistributionSpec::empirical(get_or<std::vector<double>>(j, "samples", {}, path));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown distribution kind '" + kind +
                           "' (expected exponential, gamma, pareto, deterministic, empirical)");
}

json distribution_to_json(const DistributionSpec& d) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Exponential>) return {{"kind", "exponential"}, {"rate", k.rate}};
        if constexpr (std::is_same_v<T, Gamma>) return {{"kind", "gamma"}, {"shape", k.shape}, {"rate", k.rate}};
        if constexpr (std::is_same_v<T, Pareto>) {
          return {{"kind", "pareto"}, {"scale", k.scale}, {"tail_index", k.tail_index}};
        }
        if constexpr (std::is_same_v<T, Deterministic>) return {{"kind", "deterministic"}, {"value", k.value}};
        if constexpr (std::is_same_v<T, Empirical>) return {{"kind", "empirical"}, {"samples", k.samples}};
      },
      d.kind());
}

QueueParams parse_queue(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  if (!j.contains("service")) fail(path + ".service", "missing");
  QueueParams q{get_or<int>(j, "buffer_capacity", 10, path), parse_distribution(j.at("service"), path + ".service"),
                get_or<double>(j, "ack_probability", 0.6, path)};
  if (q.buffer_capacity < 1) fail(path + ".buffer_capacity", "must be >= 1");
  if (!(q.ack_probability > 0.0 && q.ack_probability <= 1.0)) fail(path + ".ack_probability", "must be in (0, 1]");
  return q;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "': expected key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const bool last = i + 1 == parts.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(parts[i]);
      } catch (const std::exception&) {
        throw ConfigError("override '" + key + "': '" + parts[i] + "' is not an array index");
      }
      if (idx >= node->size()) throw ConfigError("override '" + key + "': index out of range");
      node = &(*node)[idx];
    } else {
      node = &(*node)[parts[i]];
    }
    if (last) *node = value;
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
  json doc = json::parse(json_text, nullptr, false, true);
  if (doc.is_discarded() || !doc.is_object()) throw ConfigError("config: not a valid JSON object");
  for (const auto& o : overrides) apply_override(doc, o);

  ExperimentConfig c;
  if (doc.contains("arrival")) c.arrival = parse_distribution(doc.at("arrival"), "arrival");

  const int n = get_or<int>(doc, "n_queues", 0, "config");
  if (doc.contains("queues")) {
    const json& qs = doc.at("queues");
    if (!qs.is_array()) fail("queues", "must be an array");
    for (std::size_t i = 0; i < qs.size(); ++i) c.queues.push_back(parse_queue(qs[i], "queues." + std::to_string(i)));
  } else if (doc.contains("homogeneous_queue")) {
    if (n < 1) fail("n_queues", "must be >= 1 when homogeneous_queue is used");
    const QueueParams q = parse_queue(doc.at("homogeneous_queue"), "homogeneous_queue");
    c.queues.assign(static_cast<std::size_t>(n), q);
  } else {
    fail("queues", "missing (give 'queues' or 'homogeneous_queue')");
  }
  if (c.queues.empty()) fail("queues", "must not be empty");
  if (n != 0 && static_cast<std::size_t>(n) != c.queues.size()) {
    fail("n_queues", "is " + std::to_string(n) + " but " + std::to_string(c.queues.size()) + " queues are given");
  }

  if (doc.contains("reward")) {
    const json& r = doc.at("reward");
    try {
      c.reward = RewardSpec::parse(get_or<std::string>(r, "kind", "combined", "reward"),
                                   get_or<double>(r, "chi", 2.0, "reward"), get_or<double>(r, "kappa", 100.0, "reward"));
    } catch (const std::invalid_argument& e) {
      fail("reward", e.what());
    }
  }

  if (doc.contains("planner")) {
    const json& p = doc.at("planner");
    auto& pp = c.planner;
    pp.depth = get_or<int>(p, "depth", pp.depth, "planner");
    pp.uct_c = get_or<double>(p, "uct_c", pp.uct_c, "planner");
    pp.n_simulations = get_or<std::size_t>(p, "n_simulations", pp.n_simulations, "planner");
    pp.seconds = get_or<double>(p, "seconds", pp.seconds, "planner");
    pp.gamma = get_or<double>(p, "gamma", pp.gamma, "planner");
    pp.n_particles = get_or<std::size_t>(p, "n_particles", pp.n_particles, "planner");
    pp.sir_simulations = get_or<std::size_t>(p, "sir_simulations", pp.sir_simulations, "planner");
    pp.reuse_tree = get_or<bool>(p, "reuse_tree", pp.reuse_tree, "planner");
  }
  try {
    c.planner.validate();
  } catch (const std::invalid_argument& e) {
    fail("planner", e.what());
  }

  const int d = get_or<int>(doc, "djsq_d", 2, "config");
  const double explore = get_or<double>(doc, "jmo_e_explore_prob", 0.2, "config");
  if (!(explore >= 0.0 && explore <= 1.0)) fail("jmo_e_explore_prob", "must be in [0, 1]");
  const auto names = get_or<std::vector<std::string>>(
      doc, "strategies", {"pol", "jsq", "djsq", "sed", "jmo", "jmo-e"}, "config");
  if (names.empty()) fail("strategies", "must not be empty");
  for (std::size_t i = 0; i < names.size(); ++i) {
    try {
      Strategy s = Strategy::parse(names[i]);
      if (s.kind == StrategyKind::kDjsqFi && (d < 1 || static_cast<std::size_t>(d) > c.queues.size())) {
        fail("djsq_d", "must be in [1, n_queues]");
      }
      s.d = d;
      s.explore_prob = explore;
      c.strategies.push_back(s);
    } catch (const std::invalid_argument& e) {
      fail("strategies." + std::to_string(i), e.what());
    }
  }

  const long t_m = get_or<long>(doc, "t_m", 20, "config");
  const long t_e = get_or<long>(doc, "t_e", 2000, "config");
  if (t_m < 1) fail("t_m", "must be >= 1");
  if (t_e < 1) fail("t_e", "must be >= 1");
  c.t_m = static_cast<std::size_t>(t_m);
  c.t_e = static_cast<std::size_t>(t_e);
  c.base_seed = get_or<std::uint64_t>(doc, "base_seed", 1, "config");
  c.run_offset = get_or<std::size_t>(doc, "run_offset", 0, "config");
  c.output_dir = get_or<std::string>(doc, "output_dir", "results", "config");
  c.workers = get_or<std::size_t>(doc, "workers", 1, "config");
  c.write_response_times = get_or<bool>(doc, "write_response_times", true, "config");
  c.belief_trace = get_or<bool>(doc, "belief_trace", false, "config");
  c.heatmap = get_or<bool>(doc, "heatmap", true, "config");

  try {
    (void)c.model();
  } catch (const std::invalid_argument& e) {
    fail("queues", e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string default_config_json() {
  return R"({
  "n_queues": 2,
  "arrival": {"kind": "exponential", "rate": 5.0},
  "queues": [
    {"buffer_capacity": 10, "ack_probability": 0.6, "service": {"kind": "exponential", "rate": 4.0}},
    {"buffer_capacity": 10, "ack_probability": 0.6, "service": {"kind": "exponential", "rate": 2.0}}
  ],
  "reward": {"kind": "combined", "kappa": 100.0},
  "planner": {"depth": 10, "n_simulations": 500, "n_particles": 1000, "gamma": 0.95},
  "strategies": ["pol", "jsq", "djsq", "sed", "jmo", "jmo-e"],
  "t_m": 20,
  "t_e": 2000,
  "base_seed": 1,
  "output_dir": "results"
}
)";
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["n_queues"] = c.n_queues();
  j["arrival"] = distribution_to_json(c.arrival);
  j["queues"] = json::array();
  for (const auto& q : c.queues) {
    j["queues"].push_back({{"buffer_capacity", q.buffer_capacity},
                           {"ack_probability", q.ack_probability},
                           {"service", distribution_to_json(q.service)}});
  }
  j["reward"] = {{"kind", c.reward.name()}, {"chi", c.reward.chi}, {"kappa", c.reward.kappa}};
  const auto& p = c.planner;
  j["planner"] = {{"depth", p.depth},       {"uct_c", p.uct_c},
                  {"n_simulations", p.n_simulations}, {"seconds", p.seconds},
                  {"gamma", p.gamma},       {"n_particles", p.n_particles},
                  {"sir_simulations", p.sir_simulations}, {"reuse_tree", p.reuse_tree}};
  j["strategies"] = json::array();
  for (const auto& s : c.strategies) j["strategies"].push_back(s.name());
  if (!c.strategies.empty()) {
    j["djsq_d"] = c.strategies.front().d;
    j["jmo_e_explore_prob"] = c.strategies.front().explore_prob;
  }
  j["t_m"] = c.t_m;
  j["t_e"] = c.t_e;
  j["base_seed"] = c.base_seed;
  j["run_offset"] = c.run_offset;
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  j["write_response_times"] = c.write_response_times;
  j["belief_trace"] = c.belief_trace;
  j["heatmap"] = c.heatmap;
  j["offered_load"] = c.offered_load();
  return j.dump(2) + "\n";
}

}  // namespace pol
