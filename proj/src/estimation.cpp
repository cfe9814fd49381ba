#include "wsn3d/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "wsn3d/error.hpp"

namespace wsn3d {

void validate(const SignalModel& model) {
  if (!(model.sigma_s2 > 0.0)) throw DomainError("signal model: sigma_s2 must be positive");
  if (!(model.wavelength > 0.0)) throw DomainError("signal model: wavelength must be positive");
  if (!(model.speed > 0.0)) throw DomainError("signal model: speed must be positive");
}

double NoiseProfile::variance(NodeId id) const {
  const auto it = per_node.find(id);
  return it == per_node.end() ? uniform : it->second;
}

void validate(const NoiseProfile& noise) {
  if (!(noise.uniform >= 0.0)) throw DomainError("noise profile: variances must be non-negative");
  for (const auto& [id, v] : noise.per_node) {
    if (!(v >= 0.0)) {
      throw DomainError("noise profile: variance of node " + std::to_string(id) + " is negative");
    }
  }
}

double propagation_delay(const SignalModel& model, double d) {
  if (!(d >= 0.0)) throw DomainError("propagation delay: distance must be non-negative");
  validate(model);
  return d / model.speed;
}

double steering_phase(std::size_t q, double distance, double wavelength) noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(q) * distance / wavelength;
}

std::vector<double> default_source_sequence(std::size_t epochs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(epochs);
  for (auto& v : out) v = normal(rng);
  return out;
}

namespace {

void fill_samples(Eigen::MatrixXcd& samples, std::span<const double> distances,
                  std::span<const double> noise_variances, double wavelength, std::span<const double> source,
                  std::mt19937_64& rng) {
  const auto m = static_cast<Eigen::Index>(distances.size());
  const auto epochs = static_cast<Eigen::Index>(source.size());
  samples.resize(m, epochs);
  std::vector<std::complex<double>> steering(distances.size());
  for (std::size_t q = 0; q < distances.size(); ++q) {
    steering[q] = std::polar(1.0, steering_phase(q, distances[q], wavelength));
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index t = 0; t < epochs; ++t) {
    for (Eigen::Index q = 0; q < m; ++q) {
      const auto k = static_cast<std::size_t>(q);
      std::complex<double> v = source[static_cast<std::size_t>(t)] * steering[k];
      if (noise_variances[k] > 0.0) {
        const double sd = std::sqrt(noise_variances[k] / 2.0);
        const double re = normal(rng);
        const double im = normal(rng);
        v += std::complex<double>(sd * re, sd * im);
      }
      samples(q, t) = v;
    }
  }
}

// Weights for the BLUE combination; empty result means "plain average".
std::vector<double> blue_weights(std::span<const double> noise_variances) {
  const bool all_equal = std::adjacent_find(noise_variances.begin(), noise_variances.end(),
                                            std::not_equal_to<>()) == noise_variances.end();
  if (all_equal) return {};
  std::vector<double> w(noise_variances.size());
  const bool any_exact = std::any_of(noise_variances.begin(), noise_variances.end(),
                                     [](double v) { return v == 0.0; });
  for (std::size_t q = 0; q < w.size(); ++q) {
    if (any_exact) {
      w[q] = noise_variances[q] == 0.0 ? 1.0 : 0.0;
    } else {
      w[q] = 1.0 / noise_variances[q];
    }
  }
  return w;
}

std::complex<double> combine(const Eigen::MatrixXcd& samples, Eigen::Index t,
                             std::span<const std::complex<double>> derotate, std::span<const double> weights) {
  std::complex<double> acc = 0.0;
  if (weights.empty()) {
    for (Eigen::Index q = 0; q < samples.rows(); ++q) acc += samples(q, t) * derotate[static_cast<std::size_t>(q)];
    return acc / static_cast<double>(samples.rows());
  }
  double wsum = 0.0;
  for (Eigen::Index q = 0; q < samples.rows(); ++q) {
    const double w = weights[static_cast<std::size_t>(q)];
    acc += w * (samples(q, t) * derotate[static_cast<std::size_t>(q)]);
    wsum += w;
  }
  return acc / wsum;
}

std::vector<std::complex<double>> derotation(std::span<const double> distances, double wavelength) {
  std::vector<std::complex<double>> out(distances.size());
  for (std::size_t q = 0; q < distances.size(); ++q) {
    out[q] = std::polar(1.0, -steering_phase(q, distances[q], wavelength));
  }
  return out;
}

void check_noise(std::span<const double> noise_variances) {
  for (double v : noise_variances) {
    if (!(v >= 0.0)) throw DomainError("noise variances must be non-negative");
  }
}

}  // namespace

ObservationSet simulate_observations(std::vector<NodeId> node_ids, std::vector<double> distances,
                                     std::vector<double> noise_variances, double wavelength,
                                     std::span<const double> source, std::uint64_t seed) {
  if (node_ids.empty()) throw DomainError("simulate observations: no nodes");
  if (distances.size() != node_ids.size() || noise_variances.size() != node_ids.size()) {
    throw DomainError("simulate observations: per-node vectors differ in length");
  }
  if (source.empty()) throw DomainError("simulate observations: empty source sequence");
  if (!(wavelength > 0.0)) throw DomainError("simulate observations: wavelength must be positive");
  for (double d : distances) {
    if (!(d >= 0.0)) throw DomainError("simulate observations: distances must be non-negative");
  }
  check_noise(noise_variances);

  ObservationSet obs;
  obs.node_ids = std::move(node_ids);
  obs.distances = std::move(distances);
  obs.noise_variances = std::move(noise_variances);
  std::mt19937_64 rng(seed);
  fill_samples(obs.samples, obs.distances, obs.noise_variances, wavelength, source, rng);
  return obs;
}

ObservationSet simulate_observations(const Deployment& dep, const Cluster& cluster, const SignalModel& model,
                                     const NoiseProfile& noise, std::span<const double> source,
                                     std::uint64_t seed) {
  if (!dep.event()) throw ConfigError("simulate observations: deployment has no event source");
  validate(model);
  validate(noise);
  std::vector<NodeId> ids = cluster.all_nodes();
  std::vector<double> distances;
  std::vector<double> variances;
  for (NodeId id : ids) {
    if (!dep.contains(id)) {
      throw ConfigError("simulate observations: no position (hence no distance) for node " + std::to_string(id));
    }
    distances.push_back(euclidean_distance(dep.position(id), dep.event()->position));
    variances.push_back(noise.variance(id));
  }
  auto obs = simulate_observations(std::move(ids), std::move(distances), std::move(variances), model.wavelength,
                                   source, seed);
  obs.cluster = cluster;
  return obs;
}

std::vector<std::complex<double>> blue_estimate(const ObservationSet& obs, const SignalModel& model) {
  if (obs.node_count() == 0 || obs.samples.rows() == 0) throw DomainError("blue estimate: empty observation set");
  if (!(model.wavelength > 0.0)) throw DomainError("blue estimate: wavelength must be positive");
  const auto derotate = derotation(obs.distances, model.wavelength);
  const auto weights = blue_weights(obs.noise_variances);
  std::vector<std::complex<double>> out(obs.epochs());
  for (Eigen::Index t = 0; t < obs.samples.cols(); ++t) {
    out[static_cast<std::size_t>(t)] = combine(obs.samples, t, derotate, weights);
  }
  return out;
}

double empirical_mse(std::span<const std::complex<double>> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) throw DomainError("empirical mse: length mismatch");
  if (truth.empty()) throw DomainError("empirical mse: no epochs");
  double acc = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) acc += std::norm(truth[t] - estimate[t]);
  return acc / static_cast<double>(truth.size());
}

double empirical_mse(const ObservationSet& obs, const SignalModel& model, std::span<const double> truth) {
  if (truth.size() != obs.epochs()) throw DomainError("empirical mse: length mismatch");
  const auto est = blue_estimate(obs, model);
  return empirical_mse(est, truth);
}

AccuracyTerms information_accuracy(std::span<const double> rho_event, const Eigen::MatrixXd& rho_pair,
                                   double sigma_s2, std::span<const double> noise_variances) {
  const std::size_t m = rho_event.size();
  if (m == 0) throw DomainError("information accuracy: m must be at least 1");
  if (static_cast<std::size_t>(rho_pair.rows()) != m || static_cast<std::size_t>(rho_pair.cols()) != m) {
    throw DomainError("information accuracy: pairwise correlation matrix must be m x m");
  }
  if (noise_variances.size() != m) throw DomainError("information accuracy: need one noise variance per node");
  if (!(sigma_s2 > 0.0)) throw DomainError("information accuracy: sigma_s2 must be positive");
  check_noise(noise_variances);

  double pair_sum = 0.0;
  for (Eigen::Index i = 0; i < rho_pair.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho_pair.cols(); ++j) {
      if (i == j) continue;
      if (std::abs(rho_pair(i, j) - rho_pair(j, i)) > 1e-12) {
        throw DomainError("information accuracy: pairwise correlation matrix is not symmetric");
      }
      pair_sum += rho_pair(i, j);
    }
  }
  double event_sum = 0.0;
  for (double r : rho_event) event_sum += r;
  double noise_sum = 0.0;
  for (double v : noise_variances) noise_sum += v;

  const auto md = static_cast<double>(m);
  AccuracyTerms t;
  t.gain = 2.0 * event_sum / md;
  t.redundancy = pair_sum / (md * md);
  const double noise_part = md + noise_sum / sigma_s2;  // (m sigma_s2 + sum sigma_n^2) / sigma_s2
  t.noise = noise_part / (md * md);
  // both 1/m^2 terms share one division, so the all-ones case lands on 1 exactly
  t.value = t.gain - (pair_sum + noise_part) / (md * md);
  return t;
}

AccuracyReport cluster_accuracy(const Deployment& dep, const Cluster& cluster, const CorrelationModel& model,
                                const SignalModel& signal, const NoiseProfile& noise, const EventSource& event) {
  const auto ids = cluster.all_nodes();
  const auto m = static_cast<Eigen::Index>(ids.size());
  std::vector<double> rho_event;
  std::vector<double> variances;
  Eigen::MatrixXd rho_pair(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& pi = dep.position(ids[static_cast<std::size_t>(i)]);
    rho_event.push_back(correlation(model, euclidean_distance(pi, event.position)));
    variances.push_back(noise.variance(ids[static_cast<std::size_t>(i)]));
    for (Eigen::Index j = 0; j < m; ++j) {
      rho_pair(i, j) = correlation(model, euclidean_distance(pi, dep.position(ids[static_cast<std::size_t>(j)])));
    }
  }
  AccuracyReport report;
  report.cluster_index = cluster.order_index;
  report.head = cluster.head;
  report.m = ids.size();
  report.terms = information_accuracy(rho_event, rho_pair, signal.sigma_s2, variances);
  return report;
}

double predict_dead(std::span<const double> observed, std::size_t o_total, PredictorDivisor divisor) {
  if (observed.empty()) throw DomainError("predict dead: no live observations");
  if (o_total < observed.size()) throw DomainError("predict dead: total node count below live count");
  double sum = 0.0;
  for (double v : observed) sum += v;
  const auto k = divisor == PredictorDivisor::TotalNodes ? o_total : observed.size();
  return sum / static_cast<double>(k);
}

double prediction_accuracy(std::size_t o_total, std::span<const double> rho_dead, const Eigen::MatrixXd& rho_pair,
                           std::optional<std::size_t> literal_live_count) {
  if (o_total == 0) throw DomainError("prediction accuracy: O must be at least 1");
  if (rho_dead.size() != o_total) throw DomainError("prediction accuracy: need O dead-node correlations");
  if (static_cast<std::size_t>(rho_pair.rows()) != o_total || static_cast<std::size_t>(rho_pair.cols()) != o_total) {
    throw DomainError("prediction accuracy: pairwise correlation matrix must be O x O");
  }
  if (literal_live_count && *literal_live_count == 0) {
    throw DomainError("prediction accuracy: live count must be at least 1");
  }
  double dead_sum = 0.0;
  for (double r : rho_dead) dead_sum += r;
  double pair_sum = 0.0;
  for (Eigen::Index i = 0; i < rho_pair.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho_pair.cols(); ++j) {
      if (i != j) pair_sum += rho_pair(i, j);
    }
  }
  const auto o = static_cast<double>(o_total);
  const auto k = static_cast<double>(literal_live_count.value_or(o_total));
  return 2.0 / o * dead_sum - pair_sum / (k * k);
}

namespace {

std::complex<double> blue_trial(std::span<const double> distances, std::span<const double> noise_variances,
                                std::span<const std::complex<double>> derotate, std::span<const double> weights,
                                double wavelength, double source, std::uint64_t seed, std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  std::mt19937_64 rng(seq);
  Eigen::MatrixXcd samples;
  const double s[1] = {source};
  fill_samples(samples, distances, noise_variances, wavelength, s, rng);
  return combine(samples, 0, derotate, weights) - source;
}

MonteCarloResult reduce(const std::vector<std::complex<double>>& errors) {
  MonteCarloResult r;
  r.trials = errors.size();
  for (const auto& e : errors) {
    r.mse += std::norm(e);
    r.mean_error += e;
  }
  const auto n = static_cast<double>(errors.size());
  r.mse /= n;
  r.mean_error /= n;
  return r;
}

void check_mc(std::span<const double> distances, std::span<const double> noise_variances, double wavelength,
              std::size_t trials) {
  if (distances.empty()) throw DomainError("monte carlo: no nodes");
  if (distances.size() != noise_variances.size()) throw DomainError("monte carlo: per-node vectors differ in length");
  if (!(wavelength > 0.0)) throw DomainError("monte carlo: wavelength must be positive");
  if (trials == 0) throw DomainError("monte carlo: need at least one trial");
  check_noise(noise_variances);
}

}  // namespace

MonteCarloResult monte_carlo_blue_serial(std::span<const double> distances, std::span<const double> noise_variances,
                                         double wavelength, double source, std::size_t trials, std::uint64_t seed) {
  check_mc(distances, noise_variances, wavelength, trials);
  const auto derotate = derotation(distances, wavelength);
  const auto weights = blue_weights(noise_variances);
  std::vector<std::complex<double>> errors(trials);
  for (std::size_t k = 0; k < trials; ++k) {
    errors[k] = blue_trial(distances, noise_variances, derotate, weights, wavelength, source, seed, k);
  }
  return reduce(errors);
}

MonteCarloResult monte_carlo_blue(std::span<const double> distances, std::span<const double> noise_variances,
                                  double wavelength, double source, std::size_t trials, std::uint64_t seed) {
  check_mc(distances, noise_variances, wavelength, trials);
  const auto derotate = derotation(distances, wavelength);
  const auto weights = blue_weights(noise_variances);
  std::vector<std::complex<double>> errors(trials);
  const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    errors[i] = blue_trial(distances, noise_variances, derotate, weights, wavelength, source, seed, i);
  }
  return reduce(errors);
}

}  // namespace wsn3d
