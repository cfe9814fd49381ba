#pragma once

// File formats and synthetic data: node coordinate CSV, reading-trace CSV, the
// correlated sun/shade reading generator, and report writers.
//
// CSV dialect everywhere: comma separator, '.' decimal point, LF line endings,
// mandatory header row, UTF-8. Parsers reject anything else with the line number.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "wsn3d/clustering.hpp"
#include "wsn3d/estimation.hpp"
#include "wsn3d/placement.hpp"
#include "wsn3d/readings.hpp"

namespace wsn3d::io {

/// Header `node_id,x,y,z`; row order preserved.
Deployment parse_nodes(std::istream& in);
Deployment load_nodes(const std::string& path);
std::string write_nodes(const Deployment& dep);

/// Header `epoch,node_id,value`. An empty value marks the cell missing
/// explicitly; cells without a row are missing too. With a deployment, rows
/// follow its node order and unknown ids are rejected; otherwise rows are
/// ascending by id.
ReadingMatrix parse_readings(std::istream& in, const Deployment* dep = nullptr);
ReadingMatrix load_readings(const std::string& path, const Deployment* dep = nullptr);
/// Epoch-major, node rows in matrix order; missing cells are omitted.
std::string write_readings(const ReadingMatrix& readings);

struct NodeGroup {
  std::string name;
  double offset = 0.0;          // added to every reading of the group
  double variance_scale = 1.0;  // multiplies the field variance
};

struct SyntheticScenario {
  CorrelationModel model{30.0, 1.0};
  double variance = 1.0;  // base field variance
  double base_level = 20.0;
  std::vector<NodeGroup> groups{NodeGroup{"default", 0.0, 1.0}};
  std::map<NodeId, std::size_t> assignment;  // node -> group index; unlisted nodes use group 0
  std::size_t epochs = 800;
  std::uint64_t seed = 42;
};

void validate(const SyntheticScenario& scn);

/// Two populations in the same space: shade nodes (group 0) and sun nodes
/// (group 1, +4 offset, 8x variance). Sun = ids 1..23 and 33..47.
SyntheticScenario sun_shade_scenario(const Deployment& dep, std::uint64_t seed = 42, std::size_t epochs = 800);
bool is_sun_node(NodeId id) noexcept;

struct SyntheticField {
  ReadingMatrix readings;
  double jitter = 0.0;  // diagonal jitter added before factorization, 0 when none was needed
};

/// Per epoch, a zero-mean Gaussian field with covariance variance * C(d_ij) over
/// the node positions (coincident nodes share one component), scaled and shifted
/// per group. Epoch k draws from a stream seeded by (seed, k).
SyntheticField generate_synthetic_detailed(const SyntheticScenario& scn, const Deployment& dep);
SyntheticField generate_synthetic_detailed_serial(const SyntheticScenario& scn, const Deployment& dep);
ReadingMatrix generate_synthetic(const SyntheticScenario& scn, const Deployment& dep);

/// Resolves `--synthetic NAME`; throws ConfigError for unknown names.
SyntheticScenario named_scenario(std::string_view name, const Deployment& dep, std::uint64_t seed);

/// Cluster report. Keys in order: "radius", "clusters", then "metadata" when
/// non-empty. Each cluster: "index", "head", "members", "size", and "accuracy"
/// when a report for it is supplied.
nlohmann::ordered_json cluster_report_json(const ClusterSet& cs, std::span<const AccuracyReport> reports = {},
                                           const nlohmann::ordered_json& metadata = {});
std::string write_cluster_report(const ClusterSet& cs, std::span<const AccuracyReport> reports = {},
                                 const nlohmann::ordered_json& metadata = {});

struct ClusterReport {
  ClusterSet clusters;
  std::vector<AccuracyReport> accuracy;
};

ClusterReport parse_cluster_report(std::string_view json);

struct CostCurves {
  std::string curve;  // round,mean_cost
  std::string nodes;  // node_id,cost,selected
};

CostCurves write_cost_curves(const PlacementState& state, std::span<const double> costs, double threshold);

/// m,node_id,accuracy
std::string write_accuracy_curve(std::span<const AccuracyPoint> points);

/// epoch,node_id,re,im
std::string write_observations(const ObservationSet& obs);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace wsn3d::io
