#pragma once

// Variance-driven node placement: a swarm-style search over per-node signal
// variances with personal-best and global-best attraction, followed by
// threshold selection of high-cost nodes.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "wsn3d/clustering.hpp"
#include "wsn3d/estimation.hpp"
#include "wsn3d/readings.hpp"

namespace wsn3d {

struct PlacementParams {
  double phi1 = 0.5;  // personal-best adaptation factor
  double phi2 = 0.5;  // global-best adaptation factor
  std::size_t rounds = 300;
  double threshold = 5.0;  // selection benchmark, cost units
};

void validate(const PlacementParams& params);

struct NodeState {
  NodeId id = 0;
  double sigma_p2 = 0.0;  // present signal variance
  double sigma_b2 = 0.0;  // personal best variance
  double best_cost = -std::numeric_limits<double>::infinity();
  double i_a = 0.0;  // velocity-like increment applied to sigma_p2 each round

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

struct PlacementState {
  std::vector<NodeState> nodes;
  double sigma_gb2 = 0.0;
  double global_best_cost = -std::numeric_limits<double>::infinity();
  std::size_t round = 0;
  std::vector<double> cost_history;  // mean cost of each completed round

  friend bool operator==(const PlacementState&, const PlacementState&) = default;
};

/// Cost of one node from its readings and the aligned readings of its cluster
/// neighbors. NaN marks a missing epoch.
using CostFunction =
    std::function<double(std::span<const double> readings, std::span<const std::span<const double>> neighbors)>;

/// Sample variance (n - 1 divisor) of the node's present readings plus the mean
/// sample covariance with each neighbor over the epochs both have. Neighbors
/// sharing fewer than two epochs are left out of the mean. Throws DomainError
/// when the node has fewer than two present readings.
double cost_function(std::span<const double> readings, std::span<const std::span<const double>> neighbors);

/// Sample variance of the present values; DomainError below two values.
double sample_variance(std::span<const double> values);

/// Fresh state: sigma_p2 = sigma_b2 = initial variance, no best cost yet, i_a = 0.
PlacementState initial_state(std::span<const NodeId> ids, std::span<const double> initial_variances);

/// One round: personal bests from `costs`, then the global best, then the
/// increment / variance update for every node. Appends mean(costs).
PlacementState placement_step(const PlacementState& state, std::span<const double> costs,
                              const PlacementParams& params);
PlacementState placement_step_serial(const PlacementState& state, std::span<const double> costs,
                                     const PlacementParams& params);

/// Epochs of the readings revealed to the cost function in round k (1-based)
/// out of `rounds`: a saturating prefix that reaches all `epochs` at k = rounds
/// and never drops below two.
std::size_t exposed_epochs(std::size_t k, std::size_t rounds, std::size_t epochs);

struct PlacementResult {
  PlacementState state;
  std::vector<double> final_costs;  // cost over every epoch, aligned with state.nodes
};

/// Called with the state after every completed round.
using RoundObserver = std::function<void(const PlacementState&)>;

/// Runs the full search over `dep`'s nodes. Each node's neighbors are the other
/// nodes of its cluster. Round k scores each node over exposed_epochs(k, ...).
PlacementResult run_placement(const Deployment& dep, const ReadingMatrix& readings, const ClusterSet& clusters,
                              const PlacementParams& params, const CostFunction& cost = cost_function,
                              const RoundObserver& observer = {});

/// Ids whose cost is at least `threshold`, in state order.
std::vector<NodeId> select_nodes(const PlacementState& state, std::span<const double> costs, double threshold);

struct AccuracyPoint {
  std::size_t m = 0;
  NodeId added = 0;
  double accuracy = 0.0;
};

/// Information accuracy of the m highest-cost nodes fused together, m = 1..n.
std::vector<AccuracyPoint> accuracy_by_cost_rank(const Deployment& dep, const PlacementState& state,
                                                 std::span<const double> costs, const CorrelationModel& model,
                                                 const SignalModel& signal, const NoiseProfile& noise,
                                                 const EventSource& event);

}  // namespace wsn3d
