#pragma once

// Dodecahedron-range distributed clustering: event-range filtering, neighbor
// discovery under the node circumradius, and iterative max-neighbor
// cluster-head election.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "wsn3d/geometry.hpp"

namespace wsn3d {

using NodeId = int;

struct SensorNode {
  NodeId id = 0;
  Point3 position;

  friend bool operator==(const SensorNode&, const SensorNode&) = default;
};

/// Sensor positions plus an optional event source. Ids are positive and unique,
/// coordinates finite, and there is at least one node; the constructor enforces this.
class Deployment {
 public:
  explicit Deployment(std::vector<SensorNode> nodes, std::optional<EventSource> event = std::nullopt);

  const std::vector<SensorNode>& nodes() const noexcept { return nodes_; }
  const std::optional<EventSource>& event() const noexcept { return event_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  bool contains(NodeId id) const;
  /// Throws ConfigError for an unknown id.
  const SensorNode& node(NodeId id) const;
  const Point3& position(NodeId id) const { return node(id).position; }

  Point3 centroid() const;
  Deployment with_event(const EventSource& event) const;
  Deployment without_event() const;

 private:
  std::vector<SensorNode> nodes_;
  std::optional<EventSource> event_;
  std::map<NodeId, std::size_t> index_;
};

struct Cluster {
  NodeId head = 0;
  std::vector<NodeId> members;  // ascending, never contains head
  std::size_t order_index = 0;  // 1-based formation order

  std::size_t node_count() const noexcept { return members.size() + 1; }
  /// Head first, then members.
  std::vector<NodeId> all_nodes() const;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  double radius = 0.0;

  friend bool operator==(const ClusterSet&, const ClusterSet&) = default;
};

/// One head election. `candidates` is the set of remaining nodes that shared the
/// maximal neighbor count; `rule` names the criterion that settled the choice.
struct ElectionStep {
  enum class Rule { Unique, FarthestNeighbor, EventDistance, NodeId };

  NodeId head = 0;
  std::size_t neighbor_count = 0;
  std::vector<NodeId> candidates;
  Rule rule = Rule::Unique;
};

const char* to_string(ElectionStep::Rule rule) noexcept;

struct ClusteringTrace {
  ClusterSet clusters;
  std::vector<ElectionStep> steps;
};

/// Default node sensing radius, meters.
inline constexpr double kDefaultClusterRadius = 6.0;

/// Radius at which inter-node correlation equals tau_n (the dodecahedron circumradius).
double clustering_radius_from_threshold(const CorrelationModel& model, double tau_n);

/// Ids of nodes whose distance to the event is within correlation_radius(model, tau_e).
/// Throws ConfigError when the deployment has no event source.
std::vector<NodeId> filter_in_event_range(const Deployment& dep, const CorrelationModel& model);

/// Map from every node id to its neighbors within r_n (boundary inclusive), ascending.
std::map<NodeId, std::vector<NodeId>> neighbor_sets(std::span<const SensorNode> nodes, double r_n);

/// Runs the election loop until every participating node is placed. With an event
/// source only nodes inside its range participate. Tie-break order: most remaining
/// neighbors, nearest farthest-neighbor, nearest to the event, smallest id.
ClusterSet form_clusters(const Deployment& dep, double r_n, const CorrelationModel& model);
ClusteringTrace form_clusters_traced(const Deployment& dep, double r_n, const CorrelationModel& model);

/// Forms clusters with a prescribed head sequence: each head claims every
/// still-unassigned node within r_n. Throws ConfigError if a head is unknown or
/// already claimed, or if nodes remain unassigned afterwards.
ClusterSet replay_clusters(const Deployment& dep, double r_n, std::span<const NodeId> head_order);

}  // namespace wsn3d
