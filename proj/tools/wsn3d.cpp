// wsn3d: command-line front end for clustering, accuracy estimation, dead-node
// prediction and node placement over 3D sensor deployments.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 input-data error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wsn3d/clustering.hpp"
#include "wsn3d/data_io.hpp"
#include "wsn3d/error.hpp"
#include "wsn3d/estimation.hpp"
#include "wsn3d/geometry.hpp"
#include "wsn3d/placement.hpp"

#ifndef WSN3D_DEFAULT_NODES
#define WSN3D_DEFAULT_NODES "data/intel54.csv"
#endif

namespace {

using namespace wsn3d;

struct RunConfig {
  std::string nodes = WSN3D_DEFAULT_NODES;
  std::string readings;
  std::string synthetic;
  double theta = 30.0;
  double alpha = 1.0;
  double tau_e = 0.85;
  double tau_n = 0.85;
  double radius = kDefaultClusterRadius;
  bool derive_radius = false;
  std::string event;
  double sigma_s2 = 1.0;
  double sigma_n2 = 0.05;
  double wavelength = 0.125;
  std::size_t epochs = 100;
  std::size_t synth_epochs = 800;
  bool dump_observations = false;
  double phi1 = 0.5;
  double phi2 = 0.5;
  std::size_t rounds = 300;
  double threshold = 5.0;
  std::uint64_t seed = 42;
  std::string out = ".";
  std::vector<NodeId> dead;
  bool eq13_literal = false;
  bool predict_unbiased = false;
};

// Usage / configuration problems map to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_model_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--nodes", cfg.nodes, "Node coordinate CSV (node_id,x,y,z)")->capture_default_str();
  app.add_option("--theta", cfg.theta, "Correlation range parameter theta, meters")->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "Correlation smoothness parameter alpha, (0,2]")->capture_default_str();
  app.add_option("--tau-e", cfg.tau_e, "Event correlation threshold; filters clustering when --event is given")
      ->capture_default_str();
  app.add_option("--event", cfg.event, "Event source position X,Y,Z (default: node centroid where needed)");
  app.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", cfg.out, "Output directory for machine-readable files")->capture_default_str();
}

void add_cluster_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--radius", cfg.radius, "Clustering radius, meters")->capture_default_str();
  app.add_flag("--derive-radius", cfg.derive_radius, "Use radius (theta ln(1/tau_n))^(1/alpha) instead of --radius");
  app.add_option("--tau-n", cfg.tau_n, "Inter-node correlation threshold for --derive-radius")->capture_default_str();
}

void add_estimate_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--sigma-s2", cfg.sigma_s2, "Source signal variance")->capture_default_str();
  app.add_option("--sigma-n2", cfg.sigma_n2, "Noise variance of every node")->capture_default_str();
  app.add_option("--wavelength", cfg.wavelength, "Carrier wavelength for simulated observations, meters")
      ->capture_default_str();
  app.add_option("--epochs", cfg.epochs, "Epochs of simulated observations per cluster")->capture_default_str();
  app.add_flag("--dump-observations", cfg.dump_observations, "Write observations_<k>.csv per cluster");
}

void add_readings_options(CLI::App& app, RunConfig& cfg) {
  auto* r = app.add_option("--readings", cfg.readings, "Reading CSV (epoch,node_id,value)");
  app.add_option("--synthetic", cfg.synthetic, "Synthetic scenario instead of --readings (sun-shade, uniform)")
      ->excludes(r);
  app.add_option("--synth-epochs", cfg.synth_epochs, "Epochs of synthetic readings")->capture_default_str();
}

void add_place_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--phi1", cfg.phi1, "Personal-best adaptation factor")->capture_default_str();
  app.add_option("--phi2", cfg.phi2, "Global-best adaptation factor")->capture_default_str();
  app.add_option("--rounds", cfg.rounds, "Placement rounds")->capture_default_str();
  app.add_option("--threshold", cfg.threshold, "Minimum cost for a node to be selected")->capture_default_str();
}

void add_predict_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--dead", cfg.dead, "Dead node ids")->delimiter(',');
  app.add_flag("--eq13-literal", cfg.eq13_literal, "Use 1/m^2 (live count) in the predictor pair term");
  app.add_flag("--predict-unbiased", cfg.predict_unbiased, "Divide the live-reading sum by m instead of O");
}

std::optional<Point3> parse_event(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("--event: malformed coordinate '" + part + "'");
    }
  }
  if (v.size() != 3) throw UsageError("--event expects X,Y,Z");
  return Point3{v[0], v[1], v[2]};
}

void write_file(const RunConfig& cfg, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(cfg.out);
  const auto path = std::filesystem::path(cfg.out) / name;
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw ParseError(0, "cannot write '" + path.string() + "'");
}

std::string join(const std::vector<NodeId>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  return s.empty() ? "-" : s;
}

struct Context {
  Deployment dep;
  CorrelationModel model;
  std::optional<Point3> event_flag;
};

Context load(const RunConfig& cfg) {
  CorrelationModel model(cfg.theta, cfg.alpha);
  auto event = parse_event(cfg.event);
  auto dep = io::load_nodes(cfg.nodes);
  if (event) dep = dep.with_event(EventSource{*event, cfg.tau_e});
  return {std::move(dep), model, event};
}

double cluster_radius(const RunConfig& cfg, const CorrelationModel& model) {
  return cfg.derive_radius ? clustering_radius_from_threshold(model, cfg.tau_n) : cfg.radius;
}

EventSource estimation_event(const RunConfig& cfg, const Context& ctx, nlohmann::ordered_json& meta) {
  EventSource event{ctx.event_flag.value_or(ctx.dep.centroid()), cfg.tau_e};
  validate(event);
  meta["event"] = {event.position.x, event.position.y, event.position.z};
  meta["event_source"] = ctx.event_flag ? "flag" : "centroid";
  if (!ctx.event_flag) {
    std::cout << "note: no --event given; using the deployment centroid (" << io::format_number(event.position.x)
              << ", " << io::format_number(event.position.y) << ", " << io::format_number(event.position.z)
              << ")\n";
  }
  return event;
}

void print_clusters(const ClusteringTrace& trace) {
  const auto& cs = trace.clusters;
  std::cout << "radius " << io::format_number(cs.radius) << " m, " << cs.clusters.size() << " clusters\n";
  std::cout << std::setw(4) << "#" << std::setw(7) << "head" << std::setw(6) << "size" << "  members\n";
  for (const auto& c : cs.clusters) {
    std::cout << std::setw(4) << c.order_index << std::setw(7) << c.head << std::setw(6) << c.node_count() << "  "
              << join(c.members) << '\n';
  }
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k];
    if (s.candidates.size() > 1) {
      std::cout << "tie at cluster " << k + 1 << ": candidates " << join(s.candidates) << " with "
                << s.neighbor_count << " neighbors, settled by " << to_string(s.rule) << '\n';
    }
  }
}

int cmd_cluster(const RunConfig& cfg) {
  const auto ctx = load(cfg);
  const auto trace = form_clusters_traced(ctx.dep, cluster_radius(cfg, ctx.model), ctx.model);
  print_clusters(trace);
  write_file(cfg, "clusters.json", io::write_cluster_report(trace.clusters));
  return 0;
}

std::vector<AccuracyReport> estimate(const RunConfig& cfg, const Context& ctx, const ClusterSet& cs,
                                     nlohmann::ordered_json& meta) {
  const auto event = estimation_event(cfg, ctx, meta);
  SignalModel signal;
  signal.sigma_s2 = cfg.sigma_s2;
  signal.wavelength = cfg.wavelength;
  validate(signal);
  NoiseProfile noise{cfg.sigma_n2, {}};
  validate(noise);
  if (cfg.epochs < 1) throw UsageError("--epochs must be at least 1");

  meta["sigma_s2"] = cfg.sigma_s2;
  meta["sigma_n2"] = cfg.sigma_n2;
  meta["wavelength"] = cfg.wavelength;
  meta["seed"] = cfg.seed;

  const auto dep = ctx.dep.with_event(event);
  const auto source = default_source_sequence(cfg.epochs, cfg.seed);
  std::vector<AccuracyReport> reports;
  nlohmann::ordered_json mse = nlohmann::ordered_json::array();

  std::cout << std::setw(4) << "#" << std::setw(7) << "head" << std::setw(5) << "m" << std::setw(12) << "accuracy"
            << std::setw(14) << "blue_mse" << '\n';
  for (const auto& c : cs.clusters) {
    const auto report = cluster_accuracy(dep, c, ctx.model, signal, noise, event);
    const auto obs = simulate_observations(dep, c, signal, noise, source, cfg.seed + c.order_index);
    const double e = empirical_mse(obs, signal, source);
    mse.push_back(e);
    if (cfg.dump_observations) {
      write_file(cfg, "observations_" + std::to_string(c.order_index) + ".csv", io::write_observations(obs));
    }
    std::cout << std::setw(4) << c.order_index << std::setw(7) << c.head << std::setw(5) << report.m << std::fixed
              << std::setprecision(4) << std::setw(12) << report.accuracy() << std::setprecision(6) << std::setw(14)
              << e << std::defaultfloat << '\n';
    reports.push_back(report);
  }
  meta["blue_epochs"] = cfg.epochs;
  meta["blue_mse"] = mse;
  return reports;
}

int cmd_estimate(const RunConfig& cfg) {
  const auto ctx = load(cfg);
  const auto trace = form_clusters_traced(ctx.dep, cluster_radius(cfg, ctx.model), ctx.model);
  nlohmann::ordered_json meta;
  const auto reports = estimate(cfg, ctx, trace.clusters, meta);
  write_file(cfg, "clusters.json", io::write_cluster_report(trace.clusters, reports, meta));
  return 0;
}

io::SyntheticScenario synthetic_scenario(const RunConfig& cfg, const std::string& name, const Deployment& dep) {
  if (cfg.synth_epochs < 2) throw UsageError("--synth-epochs must be at least 2");
  auto scn = io::named_scenario(name, dep, cfg.seed);
  scn.model = CorrelationModel(cfg.theta, cfg.alpha);
  scn.epochs = cfg.synth_epochs;
  return scn;
}

ReadingMatrix load_readings(const RunConfig& cfg, const Deployment& dep) {
  if (!cfg.readings.empty()) return io::load_readings(cfg.readings, &dep);
  const std::string name = cfg.synthetic.empty() ? "sun-shade" : cfg.synthetic;
  if (cfg.synthetic.empty()) std::cout << "note: no --readings given; using synthetic scenario '" << name << "'\n";
  const auto field = io::generate_synthetic_detailed(synthetic_scenario(cfg, name, dep), dep);
  if (field.jitter > 0.0) {
    std::cout << "note: covariance jitter " << io::format_number(field.jitter) << " added for factorization\n";
  }
  return field.readings;
}

int cmd_predict(const RunConfig& cfg) {
  const auto ctx = load(cfg);
  if (cfg.dead.empty()) {
    std::cout << "nothing to predict (no --dead nodes)\n";
    return 0;
  }
  const auto& dep = ctx.dep;
  std::vector<NodeId> dead = cfg.dead;
  std::sort(dead.begin(), dead.end());
  dead.erase(std::unique(dead.begin(), dead.end()), dead.end());
  for (NodeId id : dead) {
    if (!dep.contains(id)) throw UsageError("--dead: unknown node " + std::to_string(id));
  }
  if (dead.size() == dep.size()) throw UsageError("every node is dead; nothing left to predict from");

  const auto readings = load_readings(cfg, dep);
  std::vector<NodeId> live;
  for (const auto& n : dep.nodes()) {
    if (!std::binary_search(dead.begin(), dead.end(), n.id)) live.push_back(n.id);
  }
  const std::size_t o_total = dep.size();
  const auto divisor = cfg.predict_unbiased ? PredictorDivisor::LiveNodes : PredictorDivisor::TotalNodes;

  // Predicted value per epoch from the live readings present at that epoch.
  std::string csv = "epoch,node_id,predicted\n";
  std::vector<double> last(dead.size(), 0.0);
  bool any = false;
  for (std::size_t t = 0; t < readings.epoch_count(); ++t) {
    std::vector<double> observed;
    for (NodeId id : live) {
      const auto r = readings.row_of(id);
      if (!readings.missing(r, t)) observed.push_back(readings.at(r, t));
    }
    if (observed.empty()) continue;
    const double p = predict_dead(observed, o_total, divisor);
    for (std::size_t k = 0; k < dead.size(); ++k) {
      csv += std::to_string(readings.epochs()[t]) + ',' + std::to_string(dead[k]) + ',' + io::format_number(p) + '\n';
      last[k] = p;
    }
    any = true;
  }
  if (!any) throw ParseError(0, "no live readings to predict from");

  std::vector<Point3> points;
  for (const auto& n : dep.nodes()) points.push_back(n.position);
  Eigen::MatrixXd rho_pair(static_cast<Eigen::Index>(o_total), static_cast<Eigen::Index>(o_total));
  for (std::size_t i = 0; i < o_total; ++i) {
    for (std::size_t j = 0; j < o_total; ++j) {
      rho_pair(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          correlation(ctx.model, euclidean_distance(points[i], points[j]));
    }
  }
  std::optional<std::size_t> literal;
  if (cfg.eq13_literal) literal = live.size();

  std::cout << "O = " << o_total << ", live m = " << live.size() << ", dead n = " << dead.size() << '\n';
  std::cout << std::setw(7) << "node" << "  " << std::setw(20) << "predicted" << "  " << std::setw(20) << "P_d(Nor)"
            << '\n';
  for (std::size_t k = 0; k < dead.size(); ++k) {
    const auto& pd = dep.position(dead[k]);
    std::vector<double> rho_dead;
    for (const auto& p : points) rho_dead.push_back(correlation(ctx.model, euclidean_distance(pd, p)));
    const double quality = prediction_accuracy(o_total, rho_dead, rho_pair, literal);
    std::cout << std::setw(7) << dead[k] << "  " << std::setw(20) << io::format_number(last[k]) << "  "
              << std::setw(20) << io::format_number(quality) << '\n';
  }
  write_file(cfg, "predictions.csv", csv);
  return 0;
}

int cmd_place(const RunConfig& cfg, const Context& ctx, const ClusterSet& cs, nlohmann::ordered_json* meta) {
  PlacementParams params{cfg.phi1, cfg.phi2, cfg.rounds, cfg.threshold};
  validate(params);
  const auto readings = load_readings(cfg, ctx.dep);
  const auto result = run_placement(ctx.dep, readings, cs, params);
  const auto selected = select_nodes(result.state, result.final_costs, cfg.threshold);

  const auto curves = io::write_cost_curves(result.state, result.final_costs, cfg.threshold);
  write_file(cfg, "curve.csv", curves.curve);
  write_file(cfg, "nodes.csv", curves.nodes);

  nlohmann::ordered_json local;
  auto& m = meta ? *meta : local;
  const auto event = estimation_event(cfg, ctx, m);
  SignalModel signal;
  signal.sigma_s2 = cfg.sigma_s2;
  const auto accuracy = accuracy_by_cost_rank(ctx.dep, result.state, result.final_costs, ctx.model, signal,
                                              NoiseProfile{cfg.sigma_n2, {}}, event);
  write_file(cfg, "accuracy.csv", io::write_accuracy_curve(accuracy));

  std::cout << "rounds " << result.state.round << ", final mean cost "
            << io::format_number(result.state.cost_history.back()) << '\n';
  std::cout << "selected " << selected.size() << " of " << result.state.nodes.size() << " nodes at threshold "
            << io::format_number(cfg.threshold) << ": " << join(selected) << '\n';
  return 0;
}

int cmd_place(const RunConfig& cfg) {
  const auto ctx = load(cfg);
  const auto cs = form_clusters(ctx.dep, cluster_radius(cfg, ctx.model), ctx.model);
  return cmd_place(cfg, ctx, cs, nullptr);
}

int cmd_synth(const RunConfig& cfg) {
  const auto ctx = load(cfg);
  const std::string name = cfg.synthetic.empty() ? "sun-shade" : cfg.synthetic;
  const auto scn = synthetic_scenario(cfg, name, ctx.dep);
  const auto field = io::generate_synthetic_detailed(scn, ctx.dep);
  write_file(cfg, "readings.csv", io::write_readings(field.readings));
  std::cout << "scenario " << name << ": " << field.readings.node_count() << " nodes x "
            << field.readings.epoch_count() << " epochs";
  if (field.jitter > 0.0) std::cout << " (covariance jitter " << io::format_number(field.jitter) << ")";
  std::cout << '\n';
  return 0;
}

int cmd_pipeline(const RunConfig& cfg) {
  const auto ctx = load(cfg);
  const auto trace = form_clusters_traced(ctx.dep, cluster_radius(cfg, ctx.model), ctx.model);
  print_clusters(trace);
  nlohmann::ordered_json meta;
  const auto reports = estimate(cfg, ctx, trace.clusters, meta);
  write_file(cfg, "clusters.json", io::write_cluster_report(trace.clusters, reports, meta));
  cmd_place(cfg, ctx, trace.clusters, &meta);
  if (!cfg.dead.empty()) return cmd_predict(cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wsn3d - clustering, information accuracy and node placement for 3D sensor networks"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* cluster = app.add_subcommand("cluster", "Form dodecahedron-range clusters; writes clusters.json");
  add_model_options(*cluster, cfg);
  add_cluster_options(*cluster, cfg);

  auto* estimate_cmd = app.add_subcommand("estimate", "Per-cluster information accuracy; writes clusters.json");
  add_model_options(*estimate_cmd, cfg);
  add_cluster_options(*estimate_cmd, cfg);
  add_estimate_options(*estimate_cmd, cfg);

  auto* predict = app.add_subcommand("predict", "Predict readings of dead nodes; writes predictions.csv");
  add_model_options(*predict, cfg);
  add_readings_options(*predict, cfg);
  add_predict_options(*predict, cfg);

  auto* place = app.add_subcommand("place", "Variance-driven node placement; writes curve.csv, nodes.csv, accuracy.csv");
  add_model_options(*place, cfg);
  add_cluster_options(*place, cfg);
  add_readings_options(*place, cfg);
  add_place_options(*place, cfg);
  place->add_option("--sigma-s2", cfg.sigma_s2, "Source signal variance for accuracy.csv")->capture_default_str();
  place->add_option("--sigma-n2", cfg.sigma_n2, "Noise variance for accuracy.csv")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate synthetic readings; writes readings.csv");
  add_model_options(*synth, cfg);
  synth->add_option("--synthetic", cfg.synthetic, "Scenario name (sun-shade, uniform)");
  synth->add_option("--synth-epochs", cfg.synth_epochs, "Epochs to generate")->capture_default_str();

  auto* pipeline = app.add_subcommand("pipeline", "cluster, estimate, place (and predict with --dead) in one run");
  add_model_options(*pipeline, cfg);
  add_cluster_options(*pipeline, cfg);
  add_estimate_options(*pipeline, cfg);
  add_readings_options(*pipeline, cfg);
  add_place_options(*pipeline, cfg);
  add_predict_options(*pipeline, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*cluster) return cmd_cluster(cfg);
    if (*estimate_cmd) return cmd_estimate(cfg);
    if (*predict) return cmd_predict(cfg);
    if (*place) return cmd_place(cfg);
    if (*synth) return cmd_synth(cfg);
    if (*pipeline) return cmd_pipeline(cfg);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
