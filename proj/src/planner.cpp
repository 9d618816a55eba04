#include "pol/planner.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pol {

void PlannerParams::validate() const {
  if (depth < 1) throw std::invalid_argument("planner depth must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("planner gamma must be in (0, 1)");
  if (!(uct_c >= 0.0)) throw std::invalid_argument("planner uct_c must be >= 0");
  if (n_simulations == 0 && seconds <= 0.0) {
    throw std::invalid_argument("planner needs n_simulations >= 1 or a time budget");
  }
  if (n_particles == 0) throw std::invalid_argument("planner n_particles must be >= 1");
}

SirBudget PlannerParams::sir_budget() const {
  return SirBudget{sir_simulations == 0 ? n_particles : sir_simulations, 0.0};
}

namespace {

std::size_t count_nodes(const ObservationNode& node) {
  std::size_t n = 1;
  for (const auto& a : node.actions) {
    ++n;
    for (const auto& [z, child] : a.children) n += count_nodes(*child);
  }
  return n;
}

class Search {
 public:
  Search(const ModelParams& model, const PlannerParams& params, Rng& rng,
         std::vector<SimulationRecord>* log)
      : model_(model), params_(params), rng_(rng), log_(log) {}

  void run(ObservationNode& root, const AugmentedState& start) {
    record_ = SimulationRecord{};
    simulate(root, start, 0);
    max_transitions_ = std::max(max_transitions_, record_.transitions);
    if (log_ != nullptr) log_->push_back(std::move(record_));
  }

  int max_transitions() const { return max_transitions_; }

 private:
  double simulate(ObservationNode& node, const AugmentedState& s, int level) {
    if (level >= params_.depth) return 0.0;
    if (!node.expanded()) {
      node.actions.resize(model_.num_queues());
      ++node.visits;
      return rollout_counted(s, params_.depth - level);
    }
    const int a = uct_select(node, params_.uct_c, rng_);
    Transition t;
    step_generative_into(s, Action{a}, model_, rng_, t);
    ++record_.transitions;

    ActionNode& edge = node.actions[a];
    auto& child = edge.children[t.observation];
    if (!child) child = std::make_unique<ObservationNode>();

    const std::size_t slot = record_.path.size();
    record_.path.push_back({a, t.observation, 0.0});
    const double ret = t.reward + params_.gamma * simulate(*child, t.next, level + 1);
    record_.path[slot].discounted_return = ret;

    ++node.visits;
    ++edge.visits;
    edge.value += (ret - edge.value) / edge.visits;
    return ret;
  }

  double rollout_counted(const AugmentedState& s, int remaining) {
    record_.transitions += remaining;
    return rollout(s, remaining, model_, params_.gamma, rng_, params_.rollout_policy);
  }

  const ModelParams& model_;
  const PlannerParams& params_;
  Rng& rng_;
  std::vector<SimulationRecord>* log_;
  SimulationRecord record_;
  int max_transitions_ = 0;
};

}  // namespace

std::size_t SearchTree::node_count() const { return count_nodes(*root); }

int uct_select(const ObservationNode& node, double uct_c, Rng& rng) {
  const int n = static_cast<int>(node.actions.size());
  if (n == 0) throw std::invalid_argument("uct_select on a node without actions");

  int unvisited = 0;
  for (const auto& a : node.actions) unvisited += a.visits == 0 ? 1 : 0;
  if (unvisited > 0) {
    int pick = std::uniform_int_distribution<int>(0, unvisited - 1)(rng);
    for (int i = 0; i < n; ++i) {
      if (node.actions[i].visits == 0 && pick-- == 0) return i;
    }
  }

  const double log_parent = std::log(static_cast<double>(std::max(node.visits, 1)));
  double best = -std::numeric_limits<double>::infinity();
  int best_index = 0;
  int ties = 0;
  for (int i = 0; i < n; ++i) {
    const auto& a = node.actions[i];
    const double score = a.value + uct_c * std::sqrt(log_parent / a.visits);
    if (score > best) {
      best = score;
      best_index = i;
      ties = 1;
    } else if (score == best) {
      // Reservoir sampling over equal scores.
      ++ties;
      if (std::uniform_int_distribution<int>(0, ties - 1)(rng) == 0) best_index = i;
    }
  }
  return best_index;
}

double rollout(const AugmentedState& state, int depth_remaining, const ModelParams& model,
               double gamma, Rng& rng, const RolloutPolicy& policy) {
  if (depth_remaining <= 0) return 0.0;
  const int n = static_cast<int>(model.num_queues());
  std::uniform_int_distribution<int> uniform(0, n - 1);
  Transition t;
  AugmentedState s = state;
  double total = 0.0;
  double discount = 1.0;
  for (int step = 0; step < depth_remaining; ++step) {
    const Action a = policy ? policy(s, rng) : Action{uniform(rng)};
    step_generative_into(s, a, model, rng, t);
    total += discount * t.reward;
    discount *= gamma;
    std::swap(s, t.next);
  }
  return total;
}

Action plan(SearchTree& tree, const ModelParams& model, const PlannerParams& params, Rng& rng,
            PlanStats* stats, std::vector<SimulationRecord>* log) {
  if (tree.belief.particles.empty()) throw std::invalid_argument("plan on an empty belief");
  params.validate();

  Search search(model, params, rng, log);
  // Expand the root up front so every simulation passes through an action.
  if (!tree.root->expanded()) tree.root->actions.resize(model.num_queues());
  std::uniform_int_distribution<std::size_t> pick(0, tree.belief.size() - 1);
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  std::size_t sims = 0;
  for (;;) {
    if (params.seconds > 0.0) {
      if (sims > 0 && std::chrono::duration<double>(Clock::now() - start).count() >= params.seconds) {
        break;
      }
    } else if (sims >= params.n_simulations) {
      break;
    }
    search.run(*tree.root, tree.belief.particles[pick(rng)]);
    ++sims;
  }

  const auto& actions = tree.root->actions;
  int best_index = 0;
  if (!actions.empty()) {
    double best = -std::numeric_limits<double>::infinity();
    int ties = 0;
    for (int i = 0; i < static_cast<int>(actions.size()); ++i) {
      if (actions[i].visits == 0) continue;
      if (actions[i].value > best) {
        best = actions[i].value;
        best_index = i;
        ties = 1;
      } else if (actions[i].value == best) {
        ++ties;
        if (std::uniform_int_distribution<int>(0, ties - 1)(rng) == 0) best_index = i;
      }
    }
    if (ties == 0) {
      best_index = std::uniform_int_distribution<int>(0, static_cast<int>(actions.size()) - 1)(rng);
    }
  }

  if (stats != nullptr) {
    stats->simulations = sims;
    stats->tree_nodes = tree.node_count();
    stats->max_transitions = search.max_transitions();
  }
  return Action{best_index};
}

Action plan(const Belief& belief, const ModelParams& model, const PlannerParams& params, Rng& rng) {
  SearchTree tree(belief);
  return plan(tree, model, params, rng);
}

bool advance_root(SearchTree& tree, Action taken, const Observation& observed, Belief new_belief) {
  std::unique_ptr<ObservationNode> next;
  auto& actions = tree.root->actions;
  if (taken.queue >= 0 && taken.queue < static_cast<int>(actions.size())) {
    auto& children = actions[taken.queue].children;
    auto it = children.find(observed);
    if (it != children.end()) next = std::move(it->second);
  }
  const bool kept = next != nullptr;
  tree.root = kept ? std::move(next) : std::make_unique<ObservationNode>();
  tree.belief = std::move(new_belief);
  return kept;
}

}  // namespace pol
