#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "pol/belief.hpp"
#include "pol/model.hpp"

namespace pol {

using RolloutPolicy = std::function<Action(const AugmentedState&, Rng&)>;

struct PlannerParams {
  int depth = 10;
  double uct_c = 100.0;
  std::size_t n_simulations = 500;
  double seconds = 0.0;  // > 0 switches tree search to a wall-clock budget
  double gamma = 0.95;
  std::size_t n_particles = 1000;
  std::size_t sir_simulations = 0;  // 0 means n_particles
  bool reuse_tree = true;
  RolloutPolicy rollout_policy;  // empty means uniform random

  void validate() const;
  SirBudget sir_budget() const;
};

struct ObservationNode;

struct ActionNode {
  int visits = 0;
  double value = 0.0;  // running mean of discounted returns
  std::unordered_map<Observation, std::unique_ptr<ObservationNode>, ObservationHash> children;
};

/// History node. Its action children are created on first expansion.
struct ObservationNode {
  int visits = 0;
  std::vector<ActionNode> actions;

  bool expanded() const { return !actions.empty(); }
};

struct SearchTree {
  std::unique_ptr<ObservationNode> root = std::make_unique<ObservationNode>();
  Belief belief;

  explicit SearchTree(Belief b) : belief(std::move(b)) {}
  std::size_t node_count() const;
};

struct PlanStats {
  std::size_t simulations = 0;
  std::size_t tree_nodes = 0;
  int max_transitions = 0;  // longest simulated trajectory, tree + rollout
};

/// Per-simulation trace used to audit backups: for each tree level passed,
/// the action taken, the observation drawn and the discounted return backed
/// up into that action node.
struct SimulationRecord {
  struct Step {
    int action;
    Observation observation;
    double discounted_return;
  };
  std::vector<Step> path;
  int transitions = 0;
};

int uct_select(const ObservationNode& node, double uct_c, Rng& rng);

double rollout(const AugmentedState& state, int depth_remaining, const ModelParams& model,
               double gamma, Rng& rng, const RolloutPolicy& policy = {});

/// Runs the tree search from `tree.belief` and returns the root action with
/// the highest value estimate (ties uniform).
Action plan(SearchTree& tree, const ModelParams& model, const PlannerParams& params, Rng& rng,
            PlanStats* stats = nullptr, std::vector<SimulationRecord>* log = nullptr);

Action plan(const Belief& belief, const ModelParams& model, const PlannerParams& params, Rng& rng);

/// Moves the root to the (taken, observed) grandchild if it was simulated,
/// otherwise starts a fresh root; the root belief becomes `new_belief`.
/// Returns true when an existing subtree was kept.
bool advance_root(SearchTree& tree, Action taken, const Observation& observed, Belief new_belief);

}  // namespace pol
