#include "wsn3d/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wsn3d/error.hpp"
#include "wsn3d/kernels.hpp"

namespace wsn3d {

Deployment::Deployment(std::vector<SensorNode> nodes, std::optional<EventSource> event)
    : nodes_(std::move(nodes)), event_(event) {
  if (nodes_.empty()) throw ConfigError("deployment: no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.id <= 0) throw ConfigError("deployment: node id must be positive, got " + std::to_string(n.id));
    if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y) || !std::isfinite(n.position.z)) {
      throw ConfigError("deployment: node " + std::to_string(n.id) + " has a non-finite coordinate");
    }
    if (!index_.emplace(n.id, i).second) {
      throw ConfigError("deployment: duplicate node id " + std::to_string(n.id));
    }
  }
  if (event_) validate(*event_);
}

bool Deployment::contains(NodeId id) const { return index_.contains(id); }

const SensorNode& Deployment::node(NodeId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw ConfigError("deployment: unknown node id " + std::to_string(id));
  return nodes_[it->second];
}

Point3 Deployment::centroid() const {
  Point3 c;
  for (const auto& n : nodes_) {
    c.x += n.position.x;
    c.y += n.position.y;
    c.z += n.position.z;
  }
  const auto k = static_cast<double>(nodes_.size());
  return {c.x / k, c.y / k, c.z / k};
}

Deployment Deployment::with_event(const EventSource& event) const { return Deployment(nodes_, event); }

Deployment Deployment::without_event() const { return Deployment(nodes_); }

std::vector<NodeId> Cluster::all_nodes() const {
  std::vector<NodeId> out;
  out.reserve(node_count());
  out.push_back(head);
  out.insert(out.end(), members.begin(), members.end());
  return out;
}

const char* to_string(ElectionStep::Rule rule) noexcept {
  switch (rule) {
    case ElectionStep::Rule::Unique: return "unique";
    case ElectionStep::Rule::FarthestNeighbor: return "farthest-neighbor";
    case ElectionStep::Rule::EventDistance: return "event-distance";
    case ElectionStep::Rule::NodeId: return "node-id";
  }
  return "?";
}

double clustering_radius_from_threshold(const CorrelationModel& model, double tau_n) {
  return correlation_radius(model, tau_n);
}

std::vector<NodeId> filter_in_event_range(const Deployment& dep, const CorrelationModel& model) {
  if (!dep.event()) throw ConfigError("event-range filter requires an event source");
  const auto& event = *dep.event();
  const double radius = correlation_radius(model, event.tau_e);
  std::vector<NodeId> out;
  for (const auto& n : dep.nodes()) {
    if (euclidean_distance(n.position, event.position) <= radius) out.push_back(n.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<NodeId, std::vector<NodeId>> neighbor_sets(std::span<const SensorNode> nodes, double r_n) {
  if (!(r_n > 0.0)) throw DomainError("neighbor sets: radius must be positive");
  std::vector<Point3> points;
  points.reserve(nodes.size());
  for (const auto& n : nodes) points.push_back(n.position);
  const auto lists = kernels::neighbor_lists(points, r_n);

  std::map<NodeId, std::vector<NodeId>> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto& ids = out[nodes[i].id];
    for (std::size_t j : lists[i]) ids.push_back(nodes[j].id);
    std::sort(ids.begin(), ids.end());
  }
  return out;
}

namespace {

std::vector<SensorNode> participants(const Deployment& dep, const CorrelationModel& model) {
  std::vector<SensorNode> out;
  if (dep.event()) {
    for (NodeId id : filter_in_event_range(dep, model)) out.push_back(dep.node(id));
  } else {
    out = dep.nodes();
  }
  // Id order makes the result independent of input ordering.
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

}  // namespace

ClusteringTrace form_clusters_traced(const Deployment& dep, double r_n, const CorrelationModel& model) {
  if (!(r_n > 0.0)) throw DomainError("form clusters: radius must be positive");
  ClusteringTrace trace;
  trace.clusters.radius = r_n;

  const auto nodes = participants(dep, model);
  if (nodes.empty()) return trace;

  std::vector<Point3> points;
  points.reserve(nodes.size());
  for (const auto& n : nodes) points.push_back(n.position);
  std::vector<double> event_distance(nodes.size(), 0.0);
  if (dep.event()) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      event_distance[i] = euclidean_distance(points[i], dep.event()->position);
    }
  }

  const auto neighbors = kernels::neighbor_lists(points, r_n);
  std::vector<char> alive(nodes.size(), 1);
  std::size_t remaining = nodes.size();

  while (remaining > 0) {
    const auto degrees = kernels::live_degrees(points, neighbors, alive);

    std::size_t max_count = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (alive[i]) max_count = std::max(max_count, degrees[i].count);
    }
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (alive[i] && degrees[i].count == max_count) group.push_back(i);
    }

    ElectionStep step;
    step.neighbor_count = max_count;
    for (std::size_t i : group) step.candidates.push_back(nodes[i].id);

    // Narrow the tie group one criterion at a time so the trace can report which one decided.
    auto narrow = [&group](auto key) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i : group) best = std::min(best, key(i));
      std::erase_if(group, [&](std::size_t i) { return key(i) != best; });
    };
    if (group.size() > 1) {
      narrow([&](std::size_t i) { return degrees[i].farthest; });
      step.rule = ElectionStep::Rule::FarthestNeighbor;
    }
    if (group.size() > 1 && dep.event()) {
      narrow([&](std::size_t i) { return event_distance[i]; });
      step.rule = ElectionStep::Rule::EventDistance;
    }
    if (group.size() > 1) step.rule = ElectionStep::Rule::NodeId;
    const std::size_t head = group.front();  // ascending id order

    Cluster cluster;
    cluster.head = nodes[head].id;
    cluster.order_index = trace.clusters.clusters.size() + 1;
    alive[head] = 0;
    --remaining;
    for (std::size_t j : neighbors[head]) {
      if (!alive[j]) continue;
      cluster.members.push_back(nodes[j].id);
      alive[j] = 0;
      --remaining;
    }
    std::sort(cluster.members.begin(), cluster.members.end());

    step.head = cluster.head;
    trace.steps.push_back(std::move(step));
    trace.clusters.clusters.push_back(std::move(cluster));
  }
  return trace;
}

ClusterSet form_clusters(const Deployment& dep, double r_n, const CorrelationModel& model) {
  return form_clusters_traced(dep, r_n, model).clusters;
}

ClusterSet replay_clusters(const Deployment& dep, double r_n, std::span<const NodeId> head_order) {
  if (!(r_n > 0.0)) throw DomainError("replay clusters: radius must be positive");
  ClusterSet out;
  out.radius = r_n;
  std::map<NodeId, bool> assigned;
  for (const auto& n : dep.nodes()) assigned[n.id] = false;

  for (NodeId head : head_order) {
    const auto it = assigned.find(head);
    if (it == assigned.end()) throw ConfigError("replay: unknown head " + std::to_string(head));
    if (it->second) throw ConfigError("replay: head " + std::to_string(head) + " already claimed");
    it->second = true;
    Cluster c;
    c.head = head;
    c.order_index = out.clusters.size() + 1;
    const auto& hp = dep.position(head);
    for (auto& [id, taken] : assigned) {
      if (taken) continue;
      if (euclidean_distance(hp, dep.position(id)) <= r_n) {
        c.members.push_back(id);
        taken = true;
      }
    }
    out.clusters.push_back(std::move(c));
  }
  for (const auto& [id, taken] : assigned) {
    if (!taken) throw ConfigError("replay: node " + std::to_string(id) + " left unassigned");
  }
  return out;
}

}  // namespace wsn3d
