// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wsn3d/clustering.hpp"
#include "wsn3d/data_io.hpp"
#include "wsn3d/estimation.hpp"
#include "wsn3d/kernels.hpp"
#include "wsn3d/placement.hpp"

namespace fs = std::filesystem;
using namespace wsn3d;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok    " : "FAIL  ") + what);
  }
  void info(const std::string& what) { notes.push_back("info  " + what); }
};

std::string join(const std::vector<NodeId>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  return ids.empty() ? "-" : s;
}

std::string num(double v) { return io::format_number(v); }

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

Outcome table_ii_clusters() {
  Outcome out;
  const auto dir = oracle::scratch_dir("accept_c1");
  const auto t0 = Clock::now();
  const int rc = oracle::run_cli(std::string("cluster --nodes \"") + WSN3D_FIXTURE + "\" --radius 6 --out " + q(dir));
  const double secs = seconds_since(t0);
  out.check(rc == 0, "cluster command exit code " + std::to_string(rc));
  if (rc != 0) return out;
  const auto report = io::parse_cluster_report(oracle::slurp(dir / "clusters.json"));
  fs::remove_all(dir);

  const auto paper = oracle::table_ii();
  const auto& got = report.clusters.clusters;
  std::vector<NodeId> heads;
  for (const auto& c : got) heads.push_back(c.head);
  out.info("heads produced: " + join(heads));

  std::set<std::pair<NodeId, std::vector<NodeId>>> got_sets, want_sets;
  for (const auto& c : got) got_sets.insert({c.head, c.members});
  for (const auto& p : paper) want_sets.insert({p.head, p.members});
  out.check(got.size() == 7, "cluster count " + std::to_string(got.size()) + " (expected 7)");
  for (const auto& p : paper) {
    const bool found = want_sets.count({p.head, p.members}) && got_sets.count({p.head, p.members});
    out.check(found, "head " + std::to_string(p.head) + " with members {" + join(p.members) + "}");
  }
  out.check(secs < 1.0, "runtime " + num(secs) + " s (< 1 s)");

  // Explain the divergence: the election is max-neighbor, so compare counts.
  const auto dep = io::load_nodes(WSN3D_FIXTURE);
  const CorrelationModel model(30.0, 1.0);
  const auto trace = form_clusters_traced(dep, 6.0, model);
  const auto nb = neighbor_sets(dep.nodes(), 6.0);
  if (!trace.steps.empty()) {
    const auto& s0 = trace.steps.front();
    out.info("first election: node " + std::to_string(s0.head) + " has " + std::to_string(s0.neighbor_count) +
             " neighbors within 6 m; table head 25 has " + std::to_string(nb.at(25).size()) + ", 14 has " +
             std::to_string(nb.at(14).size()));
  }
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k];
    if (s.candidates.size() > 1) {
      out.info("tie at election " + std::to_string(k + 1) + ": candidates " + join(s.candidates) + " with " +
               std::to_string(s.neighbor_count) + " neighbors, settled by " + to_string(s.rule));
    }
  }
  std::vector<NodeId> order;
  for (const auto& p : paper) order.push_back(p.head);
  try {
    const auto replay = replay_clusters(dep, 6.0, order);
    bool same = replay.clusters.size() == paper.size();
    for (std::size_t k = 0; same && k < paper.size(); ++k) same = replay.clusters[k].members == paper[k].members;
    out.info(std::string("replaying the table's head order 25,14,47,33,31,16,11 with greedy claiming at 6 m ") +
             (same ? "reproduces every membership exactly" : "does not reproduce the memberships"));
  } catch (const std::exception& e) {
    out.info(std::string("replay failed: ") + e.what());
  }
  return out;
}

Outcome geometry_oracles() {
  Outcome out;
  const auto t0 = Clock::now();
  const std::size_t samples = 2'000'000;
  const auto mc = oracle::monte_carlo_unit_dodecahedron(samples, 20240229);
  const double v = dodeca_volume(Dodecahedron(1.0));
  const double rel = std::abs(v - mc.volume) / mc.volume;
  out.check(mc.facets == 12, "hull facets " + std::to_string(mc.facets));
  out.check(rel < 0.01, "dodeca_volume(1) = " + num(v) + " vs Monte-Carlo " + num(mc.volume) + " over " +
                            std::to_string(samples) + " samples, relative gap " + num(rel));
  const double c = dodeca_circumradius(Dodecahedron(1.0));
  const double expect = std::sqrt(3.0) / 4.0 * (1.0 + std::sqrt(5.0));
  out.check(std::abs(c - expect) < 1e-9, "circumradius constant " + num(c) + " vs " + num(expect));
  const double secs = seconds_since(t0);
  out.check(secs < 30.0, "runtime " + num(secs) + " s (< 30 s)");
  return out;
}

Outcome correlation_round_trip() {
  Outcome out;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> theta(1.0, 100.0);
  std::uniform_real_distribution<double> tau(0.01, 0.99);
  const double alphas[] = {0.5, 1.0, 2.0};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const CorrelationModel m(theta(rng), alphas[rng() % 3]);
    const double t = tau(rng);
    worst = std::max(worst, std::abs(correlation(m, correlation_radius(m, t)) - t));
  }
  out.check(worst < 1e-12, "worst |C(r(tau)) - tau| over 1000 tuples = " + num(worst));
  return out;
}

Outcome accuracy_identities() {
  Outcome out;
  bool exact = true;
  for (std::size_t m = 1; m <= 50; ++m) {
    const auto t = information_accuracy(std::vector<double>(m, 1.0), Eigen::MatrixXd::Ones(m, m), 1.0,
                                        std::vector<double>(m, 0.0));
    if (t.value != 1.0) {
      exact = false;
      out.info("m=" + std::to_string(m) + " gives " + num(t.value));
    }
  }
  out.check(exact, "all rho = 1, zero noise: I_A == 1 for m = 1..50");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double rho = u(rng), s2 = 0.1 + 5.0 * u(rng), n2 = 2.0 * u(rng);
    const double general = information_accuracy(std::vector<double>{rho}, Eigen::MatrixXd::Ones(1, 1), s2,
                                                std::vector<double>{n2})
                               .value;
    worst = std::max(worst, std::abs(general - (2.0 * rho - 1.0 - n2 / s2)));
  }
  out.check(worst < 1e-14, "m=1 closed form 2 rho - 1 - sn2/ss2, worst gap over 100 draws " + num(worst));
  return out;
}

Outcome blue_exactness_and_gain() {
  Outcome out;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 30.0);
  const double wavelength = 0.125;
  const auto source = default_source_sequence(32, 5);
  SignalModel sig;
  sig.wavelength = wavelength;
  double worst = 0.0;
  for (std::size_t m = 1; m <= 64; ++m) {
    std::vector<NodeId> ids(m);
    std::vector<double> dist(m);
    for (std::size_t i = 0; i < m; ++i) {
      ids[i] = static_cast<NodeId>(i + 1);
      dist[i] = u(rng);
    }
    const auto obs = simulate_observations(ids, dist, std::vector<double>(m, 0.0), wavelength, source, m);
    const auto est = blue_estimate(obs, sig);
    for (std::size_t t = 0; t < source.size(); ++t) worst = std::max(worst, std::abs(est[t] - source[t]));
  }
  out.check(worst < 1e-10, "zero noise, m = 1..64, random geometry: max |s_hat - s| = " + num(worst));

  std::vector<double> dist(64), noise(64, 1.0);
  for (auto& d : dist) d = u(rng);
  const auto mc = monte_carlo_blue(dist, noise, wavelength, 1.0, 10000, 55);
  out.check(mc.mse >= 1.0 / 96.0 && mc.mse <= 3.0 / 128.0,
            "m=64, noise variance 1, 10^4 trials: MSE " + num(mc.mse) + " in [1/96, 3/128] (1/64 = 0.015625)");
  return out;
}

Outcome dead_node_predictor() {
  Outcome out;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool literal = true;
  for (int k = 0; k < 100; ++k) {
    const std::size_t m = 1 + rng() % 20, o = m + rng() % 10;
    std::vector<double> live(m);
    for (auto& v : live) v = 40.0 * u(rng) - 10.0;
    double sum = 0.0;
    for (double v : live) sum += v;
    if (predict_dead(live, o) != sum / static_cast<double>(o)) literal = false;
  }
  out.check(literal, "Eq. 12 literal mode equals (sum of live readings) / O bit for bit on 100 instances");
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t o = 1 + rng() % 25;
    std::vector<double> dead(o);
    for (auto& v : dead) v = u(rng);
    std::vector<std::vector<double>> pair(o, std::vector<double>(o, 1.0));
    Eigen::MatrixXd pm = Eigen::MatrixXd::Ones(o, o);
    for (std::size_t i = 0; i < o; ++i)
      for (std::size_t j = i + 1; j < o; ++j) {
        pair[i][j] = pair[j][i] = u(rng);
        pm(i, j) = pm(j, i) = pair[i][j];
      }
    worst = std::max(worst, std::abs(prediction_accuracy(o, dead, pm) -
                                     oracle::predictor_quality(o, dead, pair, static_cast<double>(o))));
  }
  out.check(worst < 1e-12, "Eq. 13 with 1/O^2 vs brute-force double sum, worst gap over 100 instances " + num(worst));
  return out;
}

Outcome placement_properties() {
  Outcome out;
  const auto t0 = Clock::now();
  const auto dep = io::load_nodes(WSN3D_FIXTURE);
  const auto readings = io::generate_synthetic(io::sun_shade_scenario(dep, 42), dep);
  const CorrelationModel model(30.0, 1.0);
  const auto cs = form_clusters(dep, kDefaultClusterRadius, model);
  const PlacementParams params;  // phi1 = phi2 = 0.5, 300 rounds, threshold 5

  std::vector<double> prev_best;
  bool monotone = true;
  const auto result = run_placement(dep, readings, cs, params, cost_function, [&](const PlacementState& s) {
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
      if (!prev_best.empty() && s.nodes[i].best_cost < prev_best[i]) monotone = false;
    }
    prev_best.clear();
    for (const auto& n : s.nodes) prev_best.push_back(n.best_cost);
  });
  const double secs = seconds_since(t0);
  out.check(monotone, "(a) every node's best_cost is non-decreasing across all " +
                          std::to_string(result.state.round) + " rounds");

  const auto& h = result.state.cost_history;
  const std::size_t window = 30;
  double lo = h[h.size() - window - 1], hi = lo, step = 0.0;
  for (std::size_t k = h.size() - window; k < h.size(); ++k) {
    lo = std::min(lo, h[k]);
    hi = std::max(hi, h[k]);
    step = std::max(step, std::abs(h[k] - h[k - 1]) / std::abs(h[k - 1]));
  }
  const double spread = (hi - lo) / std::abs(h[h.size() - window - 1]);
  out.check(spread < 0.01, "(b) mean cost over the last 30 rounds varies by " + num(100.0 * spread) +
                               "% of its level (< 1%); largest round-to-round change " + num(100.0 * step) + "%");

  const double top = *std::max_element(result.final_costs.begin(), result.final_costs.end());
  bool shrinking = true;
  std::vector<NodeId> last = select_nodes(result.state, result.final_costs, 0.0);
  for (int k = 1; k <= 200; ++k) {
    const auto sel = select_nodes(result.state, result.final_costs, top * k / 200.0);
    if (!std::includes(last.begin(), last.end(), sel.begin(), sel.end())) shrinking = false;
    last = sel;
  }
  out.check(shrinking, "(c) selection shrinks monotonically (nested) as the threshold sweeps 0 -> " + num(top));

  const auto selected = select_nodes(result.state, result.final_costs, params.threshold);
  std::vector<NodeId> sun;
  for (const auto& n : dep.nodes())
    if (io::is_sun_node(n.id)) sun.push_back(n.id);
  out.check(selected == sun, "(d) selected at threshold 5: " + std::to_string(selected.size()) +
                                 " nodes, equal to the high-variance group (" + std::to_string(sun.size()) + ")");
  out.info("selected " + join(selected));
  out.check(secs < 10.0, "runtime " + num(secs) + " s (< 10 s)");
  return out;
}

Outcome synthetic_fidelity() {
  Outcome out;
  const auto dep = io::load_nodes(WSN3D_FIXTURE);
  for (const char* name : {"uniform", "sun-shade"}) {
    const auto scn = io::named_scenario(name, dep, 42);
    const auto m = io::generate_synthetic(scn, dep);
    double worst = 0.0;
    std::pair<NodeId, NodeId> at{0, 0};
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      const auto a = m.row(i);
      for (std::size_t j = i + 1; j < m.node_count(); ++j) {
        const auto b = m.row(j);
        const double d = euclidean_distance(dep.position(m.node_ids()[i]), dep.position(m.node_ids()[j]));
        const double gap = std::abs(oracle::pearson({a.begin(), a.end()}, {b.begin(), b.end()}) - std::exp(-d / 30.0));
        ++pairs;
        if (gap > worst) {
          worst = gap;
          at = {m.node_ids()[i], m.node_ids()[j]};
        }
      }
    }
    out.check(worst <= 0.05, std::string(name) + ": " + std::to_string(scn.epochs) + " epochs, " +
                                 std::to_string(pairs) + " pairs, worst |r - exp(-d/30)| = " + num(worst) +
                                 " (nodes " + std::to_string(at.first) + "," + std::to_string(at.second) + ")");
    const auto again = io::generate_synthetic(scn, dep);
    out.check(again == m, std::string(name) + ": regenerated matrix is bitwise identical");
  }
  return out;
}

Outcome determinism_and_goldens() {
  Outcome out;
  const std::vector<std::string> commands = {
      "cluster",
      "cluster --derive-radius --tau-n 0.85 --theta 30",
      "estimate --dump-observations",
      "predict --synthetic sun-shade --dead 3,7,16",
      "place",
      "synth --synthetic sun-shade",
      "pipeline --dead 5"};
  for (const auto& cmd : commands) {
    const auto a = oracle::scratch_dir("accept_a");
    const auto b = oracle::scratch_dir("accept_b");
    const int ra = oracle::run_cli(cmd + " --out " + q(a));
    const int rb = oracle::run_cli(cmd + " --out " + q(b));
    bool same = ra == 0 && rb == 0;
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file()) continue;
      ++files;
      if (oracle::slurp(e.path()) != oracle::slurp(b / fs::relative(e.path(), a))) same = false;
    }
    for (const auto& e : fs::recursive_directory_iterator(b)) {
      if (e.is_regular_file() && !fs::exists(a / fs::relative(e.path(), b))) same = false;
    }
    out.check(same && files > 0, "`" + cmd + "` twice: " + std::to_string(files) + " file(s) byte-identical");
    fs::remove_all(a);
    fs::remove_all(b);
  }

  const fs::path golden = WSN3D_GOLDEN_DIR;
  const auto dir = oracle::scratch_dir("accept_golden");
  oracle::run_cli(std::string("cluster --nodes \"") + WSN3D_FIXTURE + "\" --radius 6 --out " + q(dir / "cluster_r6"));
  oracle::run_cli(std::string("cluster --nodes \"") + WSN3D_FIXTURE +
                  "\" --derive-radius --tau-n 0.85 --theta 30 --out " + q(dir / "cluster_derived"));
  oracle::run_cli("place --synthetic sun-shade --rounds 300 --threshold 5 --seed 42 --out " + q(dir / "place"));
  for (const char* rel :
       {"cluster_r6/clusters.json", "cluster_derived/clusters.json", "place/curve.csv", "place/nodes.csv"}) {
    const bool stored = fs::exists(golden / rel);
    out.check(stored && oracle::slurp(golden / rel) == oracle::slurp(dir / rel),
              std::string("golden ") + rel + (stored ? " matches" : " is missing"));
  }
  fs::remove_all(dir);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 Table II cluster reproduction", table_ii_clusters},
      {"2 geometry oracles", geometry_oracles},
      {"3 correlation round-trip", correlation_round_trip},
      {"4 accuracy identities", accuracy_identities},
      {"5 BLUE exactness and gain", blue_exactness_and_gain},
      {"6 dead-node predictor", dead_node_predictor},
      {"7 placement properties", placement_properties},
      {"8 synthetic-field fidelity", synthetic_fidelity},
      {"9 determinism and golden files", determinism_and_goldens},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.check(false, std::string("threw: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << '\n';
    for (const auto& n : o.notes) std::cout << "        " << n << '\n';
    failed += o.pass ? 0 : 1;
  }
  std::cout << (criteria.size() - failed) << " of " << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
