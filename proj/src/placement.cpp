#include "wsn3d/placement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>

#include "wsn3d/error.hpp"

namespace wsn3d {

void validate(const PlacementParams& params) {
  if (!(params.phi1 >= 0.0) || !(params.phi2 >= 0.0) || !(params.phi1 + params.phi2 > 0.0)) {
    throw DomainError("placement: phi1, phi2 must be non-negative with a positive sum");
  }
  if (params.rounds < 1) throw DomainError("placement: rounds must be at least 1");
  if (!std::isfinite(params.threshold)) throw DomainError("placement: threshold must be finite");
}

double sample_variance(std::span<const double> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  if (n < 2) throw DomainError("sample variance needs at least two readings, got " + std::to_string(n));
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) ss += (v - mean) * (v - mean);
  }
  return ss / static_cast<double>(n - 1);
}

namespace {

// Covariance over epochs where both series are present; false when fewer than two.
bool pairwise_covariance(std::span<const double> a, std::span<const double> b, double& out) {
  const std::size_t len = std::min(a.size(), b.size());
  double sa = 0.0;
  double sb = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < len; ++t) {
    if (std::isnan(a[t]) || std::isnan(b[t])) continue;
    sa += a[t];
    sb += b[t];
    ++n;
  }
  if (n < 2) return false;
  const double ma = sa / static_cast<double>(n);
  const double mb = sb / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    if (std::isnan(a[t]) || std::isnan(b[t])) continue;
    acc += (a[t] - ma) * (b[t] - mb);
  }
  out = acc / static_cast<double>(n - 1);
  return true;
}

NodeState update_best(NodeState s, double cost) {
  if (cost > s.best_cost) {
    s.best_cost = cost;
    s.sigma_b2 = s.sigma_p2;
  }
  return s;
}

NodeState advance(NodeState s, double sigma_gb2, const PlacementParams& params) {
  s.i_a = s.i_a + params.phi1 * (s.sigma_b2 - s.sigma_p2) + params.phi2 * (sigma_gb2 - s.sigma_p2);
  s.sigma_p2 = s.sigma_p2 + s.i_a;
  return s;
}

void check_step(const PlacementState& state, std::span<const double> costs) {
  if (costs.size() != state.nodes.size()) {
    throw DomainError("placement step: " + std::to_string(costs.size()) + " costs for " +
                      std::to_string(state.nodes.size()) + " nodes");
  }
}

// Serial scan so the choice (first node on ties) never depends on thread timing.
void settle_global_best(PlacementState& next, const PlacementState& prev) {
  next.global_best_cost = prev.global_best_cost;
  next.sigma_gb2 = prev.sigma_gb2;
  for (const auto& n : next.nodes) {
    if (n.best_cost > next.global_best_cost) {
      next.global_best_cost = n.best_cost;
      next.sigma_gb2 = n.sigma_b2;
    }
  }
}

void close_round(PlacementState& next, std::span<const double> costs) {
  const double total = std::accumulate(costs.begin(), costs.end(), 0.0);
  next.cost_history.push_back(costs.empty() ? 0.0 : total / static_cast<double>(costs.size()));
  ++next.round;
}

}  // namespace

double cost_function(std::span<const double> readings, std::span<const std::span<const double>> neighbors) {
  const double variance = sample_variance(readings);
  double cov_sum = 0.0;
  std::size_t used = 0;
  for (const auto& nb : neighbors) {
    double c = 0.0;
    if (pairwise_covariance(readings, nb, c)) {
      cov_sum += c;
      ++used;
    }
  }
  return used == 0 ? variance : variance + cov_sum / static_cast<double>(used);
}

PlacementState initial_state(std::span<const NodeId> ids, std::span<const double> initial_variances) {
  if (ids.size() != initial_variances.size()) throw DomainError("placement: ids and variances differ in length");
  PlacementState s;
  s.nodes.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    NodeState n;
    n.id = ids[i];
    n.sigma_p2 = initial_variances[i];
    n.sigma_b2 = initial_variances[i];
    s.nodes.push_back(n);
  }
  return s;
}

PlacementState placement_step_serial(const PlacementState& state, std::span<const double> costs,
                                     const PlacementParams& params) {
  check_step(state, costs);
  PlacementState next = state;
  for (std::size_t i = 0; i < next.nodes.size(); ++i) next.nodes[i] = update_best(state.nodes[i], costs[i]);
  settle_global_best(next, state);
  for (auto& n : next.nodes) n = advance(n, next.sigma_gb2, params);
  close_round(next, costs);
  return next;
}

PlacementState placement_step(const PlacementState& state, std::span<const double> costs,
                              const PlacementParams& params) {
  check_step(state, costs);
  PlacementState next = state;
  const auto n = static_cast<std::int64_t>(next.nodes.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    next.nodes[k] = update_best(state.nodes[k], costs[k]);
  }
  settle_global_best(next, state);
  const double gb = next.sigma_gb2;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    next.nodes[k] = advance(next.nodes[k], gb, params);
  }
  close_round(next, costs);
  return next;
}

std::size_t exposed_epochs(std::size_t k, std::size_t rounds, std::size_t epochs) {
  // Exposure follows 1 - exp(-rate * k / rounds), rescaled to hit `epochs` at the last round.
  constexpr double kRate = 5.0;
  if (rounds == 0 || k >= rounds) return std::max<std::size_t>(epochs, 2);
  const double frac = (1.0 - std::exp(-kRate * static_cast<double>(k) / static_cast<double>(rounds))) /
                      (1.0 - std::exp(-kRate));
  const auto n = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(epochs)));
  return std::clamp<std::size_t>(n, 2, std::max<std::size_t>(epochs, 2));
}

PlacementResult run_placement(const Deployment& dep, const ReadingMatrix& readings, const ClusterSet& clusters,
                              const PlacementParams& params, const CostFunction& cost,
                              const RoundObserver& observer) {
  validate(params);
  const auto& nodes = dep.nodes();
  std::vector<NodeId> ids;
  std::vector<std::size_t> rows;
  for (const auto& n : nodes) {
    if (!readings.has_node(n.id)) throw ConfigError("placement: no readings for node " + std::to_string(n.id));
    ids.push_back(n.id);
    rows.push_back(readings.row_of(n.id));
  }
  if (readings.epoch_count() < 2) throw DomainError("placement: need at least two epochs of readings");

  std::map<NodeId, std::size_t> position;
  for (std::size_t i = 0; i < ids.size(); ++i) position[ids[i]] = i;
  std::vector<std::vector<std::size_t>> neighbors(ids.size());
  for (const auto& c : clusters.clusters) {
    const auto members = c.all_nodes();
    for (NodeId a : members) {
      const auto ia = position.find(a);
      if (ia == position.end()) continue;
      for (NodeId b : members) {
        const auto ib = position.find(b);
        if (b != a && ib != position.end()) neighbors[ia->second].push_back(ib->second);
      }
    }
  }

  std::vector<double> initial(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) initial[i] = sample_variance(readings.row(rows[i]));
  PlacementState state = initial_state(ids, initial);

  // A node's window always reaches its second present reading, so gaps at the
  // start of a trace cannot leave the cost undefined in early rounds.
  std::vector<std::size_t> min_window(ids.size(), 2);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto row = readings.row(rows[i]);
    std::size_t seen = 0;
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (!std::isnan(row[t]) && ++seen == 2) {
        min_window[i] = t + 1;
        break;
      }
    }
  }

  auto score = [&](std::size_t epochs) {
    std::vector<double> costs(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::size_t window = std::max(epochs, min_window[i]);
      std::vector<std::span<const double>> nb;
      nb.reserve(neighbors[i].size());
      for (std::size_t j : neighbors[i]) nb.push_back(readings.row(rows[j]).first(window));
      costs[i] = cost(readings.row(rows[i]).first(window), nb);
    }
    return costs;
  };

  PlacementResult result;
  std::size_t scored = 0;
  std::vector<double> costs;
  for (std::size_t k = 1; k <= params.rounds; ++k) {
    const std::size_t window = exposed_epochs(k, params.rounds, readings.epoch_count());
    if (window != scored) {
      costs = score(window);
      scored = window;
    }
    state = placement_step(state, costs, params);
    if (observer) observer(state);
  }
  result.final_costs = costs;
  result.state = std::move(state);
  return result;
}

std::vector<NodeId> select_nodes(const PlacementState& state, std::span<const double> costs, double threshold) {
  if (costs.size() != state.nodes.size()) throw DomainError("select nodes: costs misaligned with nodes");
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (costs[i] >= threshold) out.push_back(state.nodes[i].id);
  }
  return out;
}

std::vector<AccuracyPoint> accuracy_by_cost_rank(const Deployment& dep, const PlacementState& state,
                                                 std::span<const double> costs, const CorrelationModel& model,
                                                 const SignalModel& signal, const NoiseProfile& noise,
                                                 const EventSource& event) {
  if (costs.size() != state.nodes.size()) throw DomainError("accuracy curve: costs misaligned with nodes");
  std::vector<std::size_t> order(costs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] > costs[b]; });

  std::vector<AccuracyPoint> out;
  Cluster group;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const NodeId id = state.nodes[order[rank]].id;
    if (rank == 0) {
      group.head = id;
    } else {
      group.members.push_back(id);
    }
    const auto report = cluster_accuracy(dep, group, model, signal, noise, event);
    out.push_back({rank + 1, id, report.accuracy()});
  }
  return out;
}

}  // namespace wsn3d
