#include "wsn3d/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "wsn3d/error.hpp"
#include "wsn3d/kernels.hpp"

namespace wsn3d::io {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view field, std::size_t line, const char* what) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(field) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view field, std::size_t line, const char* what) {
  Int v = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(field) + "'");
  }
  return v;
}

// Reads LF-terminated lines, rejecting CR and blank lines. Returns false at end of input.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') throw ParseError(number_, "CR line ending (expected LF)");
    if (line.empty()) throw ParseError(number_, "empty line");
    return true;
  }

  std::size_t number() const noexcept { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

void expect_header(LineReader& reader, std::string_view expected) {
  std::string line;
  if (!reader.next(line)) throw ParseError(0, "missing header '" + std::string(expected) + "'");
  if (line != expected) {
    throw ParseError(reader.number(), "expected header '" + std::string(expected) + "', got '" + line + "'");
  }
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return in;
}

std::seed_seq stream_seed(std::uint64_t seed, std::uint64_t index) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

Deployment parse_nodes(std::istream& in) {
  LineReader reader(in);
  expect_header(reader, "node_id,x,y,z");
  std::vector<SensorNode> nodes;
  std::set<NodeId> seen;
  std::string line;
  while (reader.next(line)) {
    const auto fields = split(line);
    const auto n = reader.number();
    if (fields.size() != 4) {
      throw ParseError(n, "expected 4 columns, got " + std::to_string(fields.size()));
    }
    SensorNode node;
    node.id = parse_int<NodeId>(fields[0], n, "node_id");
    if (node.id <= 0) throw ParseError(n, "node_id must be positive");
    node.position = {parse_double(fields[1], n, "x"), parse_double(fields[2], n, "y"),
                     parse_double(fields[3], n, "z")};
    if (!seen.insert(node.id).second) throw ParseError(n, "duplicate node_id " + std::to_string(node.id));
    nodes.push_back(node);
  }
  if (nodes.empty()) throw ParseError(reader.number(), "no nodes");
  return Deployment(std::move(nodes));
}

Deployment load_nodes(const std::string& path) {
  auto in = open(path);
  return parse_nodes(in);
}

std::string write_nodes(const Deployment& dep) {
  std::string out = "node_id,x,y,z\n";
  for (const auto& n : dep.nodes()) {
    out += std::to_string(n.id) + ',' + format_number(n.position.x) + ',' + format_number(n.position.y) + ',' +
           format_number(n.position.z) + '\n';
  }
  return out;
}

ReadingMatrix parse_readings(std::istream& in, const Deployment* dep) {
  LineReader reader(in);
  expect_header(reader, "epoch,node_id,value");

  struct Cell {
    std::int64_t epoch;
    NodeId node;
    double value;
  };
  std::vector<Cell> cells;
  std::set<std::pair<NodeId, std::int64_t>> seen;
  std::string line;
  while (reader.next(line)) {
    const auto fields = split(line);
    const auto n = reader.number();
    if (fields.size() != 3) throw ParseError(n, "expected 3 columns, got " + std::to_string(fields.size()));
    Cell c;
    c.epoch = parse_int<std::int64_t>(fields[0], n, "epoch");
    c.node = parse_int<NodeId>(fields[1], n, "node_id");
    c.value = fields[2].empty() ? ReadingMatrix::kMissing : parse_double(fields[2], n, "value");
    if (dep && !dep->contains(c.node)) throw ParseError(n, "unknown node " + std::to_string(c.node));
    if (!seen.emplace(c.node, c.epoch).second) {
      throw ParseError(n, "duplicate cell (node " + std::to_string(c.node) + ", epoch " + std::to_string(c.epoch) + ")");
    }
    cells.push_back(c);
  }

  std::vector<NodeId> ids;
  if (dep) {
    for (const auto& node : dep->nodes()) ids.push_back(node.id);
  } else {
    std::set<NodeId> unique;
    for (const auto& c : cells) unique.insert(c.node);
    ids.assign(unique.begin(), unique.end());
  }
  std::set<std::int64_t> epoch_set;
  for (const auto& c : cells) epoch_set.insert(c.epoch);
  std::vector<std::int64_t> epochs(epoch_set.begin(), epoch_set.end());

  ReadingMatrix m(std::move(ids), epochs);
  for (const auto& c : cells) {
    const auto col = static_cast<std::size_t>(std::lower_bound(epochs.begin(), epochs.end(), c.epoch) - epochs.begin());
    m.at(m.row_of(c.node), col) = c.value;
  }
  return m;
}

ReadingMatrix load_readings(const std::string& path, const Deployment* dep) {
  auto in = open(path);
  return parse_readings(in, dep);
}

std::string write_readings(const ReadingMatrix& readings) {
  std::string out = "epoch,node_id,value\n";
  for (std::size_t c = 0; c < readings.epoch_count(); ++c) {
    for (std::size_t r = 0; r < readings.node_count(); ++r) {
      if (readings.missing(r, c)) continue;
      out += std::to_string(readings.epochs()[c]) + ',' + std::to_string(readings.node_ids()[r]) + ',' +
             format_number(readings.at(r, c)) + '\n';
    }
  }
  return out;
}

void validate(const SyntheticScenario& scn) {
  if (scn.epochs < 2) throw DomainError("synthetic scenario: need at least two epochs");
  if (!(scn.variance > 0.0)) throw DomainError("synthetic scenario: variance must be positive");
  if (scn.groups.empty()) throw DomainError("synthetic scenario: no groups");
  for (const auto& g : scn.groups) {
    if (!(g.variance_scale > 0.0)) throw DomainError("synthetic scenario: group variance scale must be positive");
  }
  for (const auto& [id, g] : scn.assignment) {
    if (g >= scn.groups.size()) {
      throw DomainError("synthetic scenario: node " + std::to_string(id) + " assigned to a missing group");
    }
  }
}

bool is_sun_node(NodeId id) noexcept { return (id >= 1 && id <= 23) || (id >= 33 && id <= 47); }

SyntheticScenario sun_shade_scenario(const Deployment& dep, std::uint64_t seed, std::size_t epochs) {
  SyntheticScenario scn;
  scn.groups = {NodeGroup{"shade", 0.0, 1.0}, NodeGroup{"sun", 4.0, 8.0}};
  for (const auto& n : dep.nodes()) scn.assignment[n.id] = is_sun_node(n.id) ? 1 : 0;
  scn.epochs = epochs;
  scn.seed = seed;
  return scn;
}

SyntheticScenario named_scenario(std::string_view name, const Deployment& dep, std::uint64_t seed) {
  if (name == "sun-shade") return sun_shade_scenario(dep, seed);
  if (name == "uniform") {
    SyntheticScenario scn;
    scn.seed = seed;
    return scn;
  }
  throw ConfigError("unknown synthetic scenario '" + std::string(name) + "' (known: sun-shade, uniform)");
}

namespace {

struct FieldFactor {
  Eigen::MatrixXd lower;                // Cholesky factor over unique positions
  std::vector<std::size_t> component;   // node row -> unique position index
  double jitter = 0.0;
};

FieldFactor factor(const SyntheticScenario& scn, const Deployment& dep) {
  FieldFactor f;
  std::vector<Point3> unique;
  for (const auto& n : dep.nodes()) {
    const auto it = std::find(unique.begin(), unique.end(), n.position);
    if (it == unique.end()) {
      f.component.push_back(unique.size());
      unique.push_back(n.position);
    } else {
      f.component.push_back(static_cast<std::size_t>(it - unique.begin()));
    }
  }
  Eigen::MatrixXd cov = scn.variance * kernels::correlation_matrix(unique, scn.model);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    f.jitter = 1e-10 * scn.variance;
    cov.diagonal().array() += f.jitter;
    llt.compute(cov);
    if (llt.info() != Eigen::Success) {
      cov.diagonal().array() -= f.jitter;
      const double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov, Eigen::EigenvaluesOnly)
                                  .eigenvalues()
                                  .minCoeff();
      throw GenerationError("synthetic field: covariance is not positive definite (smallest eigenvalue " +
                                format_number(smallest) + ")",
                            smallest);
    }
  }
  f.lower = llt.matrixL();
  return f;
}

void fill_epoch(ReadingMatrix& out, const FieldFactor& f, const SyntheticScenario& scn, const Deployment& dep,
                std::size_t epoch) {
  auto seq = stream_seed(scn.seed, epoch);
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(f.lower.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  const Eigen::VectorXd field = f.lower.triangularView<Eigen::Lower>() * z;
  const auto& nodes = dep.nodes();
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const auto it = scn.assignment.find(nodes[r].id);
    const auto& g = scn.groups[it == scn.assignment.end() ? 0 : it->second];
    out.at(r, epoch) = scn.base_level + g.offset +
                       std::sqrt(g.variance_scale) * field(static_cast<Eigen::Index>(f.component[r]));
  }
}

ReadingMatrix empty_matrix(const SyntheticScenario& scn, const Deployment& dep) {
  std::vector<NodeId> ids;
  for (const auto& n : dep.nodes()) ids.push_back(n.id);
  std::vector<std::int64_t> epochs(scn.epochs);
  for (std::size_t k = 0; k < scn.epochs; ++k) epochs[k] = static_cast<std::int64_t>(k + 1);
  return ReadingMatrix(std::move(ids), std::move(epochs));
}

}  // namespace

SyntheticField generate_synthetic_detailed_serial(const SyntheticScenario& scn, const Deployment& dep) {
  validate(scn);
  const auto f = factor(scn, dep);
  SyntheticField out{empty_matrix(scn, dep), f.jitter};
  for (std::size_t k = 0; k < scn.epochs; ++k) fill_epoch(out.readings, f, scn, dep, k);
  return out;
}

SyntheticField generate_synthetic_detailed(const SyntheticScenario& scn, const Deployment& dep) {
  validate(scn);
  const auto f = factor(scn, dep);
  SyntheticField out{empty_matrix(scn, dep), f.jitter};
  const auto n = static_cast<std::int64_t>(scn.epochs);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) fill_epoch(out.readings, f, scn, dep, static_cast<std::size_t>(k));
  return out;
}

ReadingMatrix generate_synthetic(const SyntheticScenario& scn, const Deployment& dep) {
  return generate_synthetic_detailed(scn, dep).readings;
}

nlohmann::ordered_json cluster_report_json(const ClusterSet& cs, std::span<const AccuracyReport> reports,
                                           const nlohmann::ordered_json& metadata) {
  nlohmann::ordered_json doc;
  doc["radius"] = cs.radius;
  doc["clusters"] = nlohmann::ordered_json::array();
  for (const auto& c : cs.clusters) {
    nlohmann::ordered_json entry;
    entry["index"] = c.order_index;
    entry["head"] = c.head;
    entry["members"] = c.members;
    entry["size"] = c.node_count();
    const auto it = std::find_if(reports.begin(), reports.end(),
                                 [&](const AccuracyReport& r) { return r.cluster_index == c.order_index; });
    if (it != reports.end()) {
      entry["accuracy"] = {{"m", it->m},
                           {"value", it->terms.value},
                           {"gain", it->terms.gain},
                           {"redundancy", it->terms.redundancy},
                           {"noise", it->terms.noise}};
    }
    doc["clusters"].push_back(std::move(entry));
  }
  if (metadata.is_object() && !metadata.empty()) doc["metadata"] = metadata;
  return doc;
}

std::string write_cluster_report(const ClusterSet& cs, std::span<const AccuracyReport> reports,
                                 const nlohmann::ordered_json& metadata) {
  return cluster_report_json(cs, reports, metadata).dump(2) + '\n';
}

ClusterReport parse_cluster_report(std::string_view json) {
  ClusterReport out;
  try {
    const auto doc = nlohmann::json::parse(json);
    out.clusters.radius = doc.value("radius", 0.0);
    for (const auto& entry : doc.at("clusters")) {
      Cluster c;
      c.order_index = entry.at("index").get<std::size_t>();
      c.head = entry.at("head").get<NodeId>();
      c.members = entry.at("members").get<std::vector<NodeId>>();
      if (entry.contains("accuracy")) {
        const auto& a = entry["accuracy"];
        AccuracyReport r;
        r.cluster_index = c.order_index;
        r.head = c.head;
        r.m = a.at("m").get<std::size_t>();
        r.terms = {a.at("gain").get<double>(), a.at("redundancy").get<double>(), a.at("noise").get<double>(),
                   a.at("value").get<double>()};
        out.accuracy.push_back(r);
      }
      out.clusters.clusters.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("cluster report: ") + e.what());
  }
  return out;
}

CostCurves write_cost_curves(const PlacementState& state, std::span<const double> costs, double threshold) {
  if (costs.size() != state.nodes.size()) throw DomainError("cost curves: costs misaligned with nodes");
  CostCurves out;
  out.curve = "round,mean_cost\n";
  for (std::size_t k = 0; k < state.cost_history.size(); ++k) {
    out.curve += std::to_string(k + 1) + ',' + format_number(state.cost_history[k]) + '\n';
  }
  out.nodes = "node_id,cost,selected\n";
  for (std::size_t i = 0; i < costs.size(); ++i) {
    out.nodes += std::to_string(state.nodes[i].id) + ',' + format_number(costs[i]) + ',' +
                 (costs[i] >= threshold ? "1" : "0") + '\n';
  }
  return out;
}

std::string write_accuracy_curve(std::span<const AccuracyPoint> points) {
  std::string out = "m,node_id,accuracy\n";
  for (const auto& p : points) {
    out += std::to_string(p.m) + ',' + std::to_string(p.added) + ',' + format_number(p.accuracy) + '\n';
  }
  return out;
}

std::string write_observations(const ObservationSet& obs) {
  std::string out = "epoch,node_id,re,im\n";
  for (Eigen::Index t = 0; t < obs.samples.cols(); ++t) {
    for (Eigen::Index q = 0; q < obs.samples.rows(); ++q) {
      const auto v = obs.samples(q, t);
      out += std::to_string(t) + ',' + std::to_string(obs.node_ids[static_cast<std::size_t>(q)]) + ',' +
             format_number(v.real()) + ',' + format_number(v.imag()) + '\n';
    }
  }
  return out;
}

}  // namespace wsn3d::io
