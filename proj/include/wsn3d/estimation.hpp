#pragma once

// Information estimation at a cluster head: the complex-baseband observation
// model, BLUE fusion of phase-compensated samples, the closed-form normalized
// information accuracy, and the dead-node predictor.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wsn3d/clustering.hpp"
#include "wsn3d/geometry.hpp"

namespace wsn3d {

struct SignalModel {
  double sigma_s2 = 1.0;      // source signal variance
  double wavelength = 1.0;    // meters
  double carrier_freq = 0.0;  // angular frequency, rad/s
  double speed = 3.0e8;       // propagation velocity, m/s
};

void validate(const SignalModel& model);

/// Per-node additive noise variances. Nodes without an override use `uniform`.
struct NoiseProfile {
  double uniform = 0.0;
  std::map<NodeId, double> per_node;

  double variance(NodeId id) const;
};

void validate(const NoiseProfile& noise);

/// Baseband samples gathered at a cluster head. Row q of `samples` belongs to
/// node_ids[q]; column t to epoch t. Row order fixes the steering index q.
struct ObservationSet {
  Cluster cluster;
  std::vector<NodeId> node_ids;
  std::vector<double> distances;        // to the event source, meters
  std::vector<double> noise_variances;  // per row
  Eigen::MatrixXcd samples;

  std::size_t node_count() const noexcept { return node_ids.size(); }
  std::size_t epochs() const noexcept { return static_cast<std::size_t>(samples.cols()); }
};

/// Seconds for the signal to travel d meters at the model's propagation speed.
double propagation_delay(const SignalModel& model, double d);

/// Steering phase 2*pi*q*d/lambda of row q.
double steering_phase(std::size_t q, double distance, double wavelength) noexcept;

/// Unit-variance real Gaussian source, one value per epoch.
std::vector<double> default_source_sequence(std::size_t epochs, std::uint64_t seed);

/// sample(q, t) = s(t) exp(i * steering_phase(q)) + n_q(t), n_q circular complex
/// Gaussian with variance noise_variances[q] split evenly between re and im.
ObservationSet simulate_observations(std::vector<NodeId> node_ids, std::vector<double> distances,
                                     std::vector<double> noise_variances, double wavelength,
                                     std::span<const double> source, std::uint64_t seed);

/// Rows are the cluster head followed by its members. Needs the deployment's event source.
ObservationSet simulate_observations(const Deployment& dep, const Cluster& cluster, const SignalModel& model,
                                     const NoiseProfile& noise, std::span<const double> source,
                                     std::uint64_t seed);

/// Phase-compensates every row and combines them with inverse-noise-variance
/// weights. Equal variances reduce to the plain average over rows; rows with
/// zero variance, when present, dominate and are averaged on their own.
std::vector<std::complex<double>> blue_estimate(const ObservationSet& obs, const SignalModel& model);

/// Mean over epochs of |truth(t) - estimate(t)|^2.
double empirical_mse(std::span<const std::complex<double>> estimate, std::span<const double> truth);
double empirical_mse(const ObservationSet& obs, const SignalModel& model, std::span<const double> truth);

struct AccuracyTerms {
  double gain = 0.0;        // (2/m) sum rho(S, S_i)
  double redundancy = 0.0;  // (1/m^2) sum_{i != j} rho(S_i, S_j)
  double noise = 0.0;       // (1/m^2)(m sigma_s2 + sum sigma_n_i^2) / sigma_s2
  double value = 0.0;       // gain - redundancy - noise
};

/// Normalized information accuracy of m fused nodes. rho_pair must be m x m,
/// symmetric within 1e-12; its diagonal is ignored.
AccuracyTerms information_accuracy(std::span<const double> rho_event, const Eigen::MatrixXd& rho_pair,
                                   double sigma_s2, std::span<const double> noise_variances);

struct AccuracyReport {
  std::size_t cluster_index = 0;  // order_index of the cluster
  NodeId head = 0;
  std::size_t m = 0;
  AccuracyTerms terms;

  double accuracy() const noexcept { return terms.value; }
};

/// Correlations from geometry (head plus members), then information_accuracy.
AccuracyReport cluster_accuracy(const Deployment& dep, const Cluster& cluster, const CorrelationModel& model,
                                const SignalModel& signal, const NoiseProfile& noise, const EventSource& event);

/// How the dead-node predictor normalizes the sum of live readings.
enum class PredictorDivisor {
  TotalNodes,  // divide by O (live + dead)
  LiveNodes,   // divide by m, the unbiased mean of live readings
};

double predict_dead(std::span<const double> observed, std::size_t o_total,
                    PredictorDivisor divisor = PredictorDivisor::TotalNodes);

/// (2/O) sum rho_dead - (1/k^2) sum_{i != j} rho_pair, with k = O by default or
/// k = literal_live_count when given.
double prediction_accuracy(std::size_t o_total, std::span<const double> rho_dead, const Eigen::MatrixXd& rho_pair,
                           std::optional<std::size_t> literal_live_count = std::nullopt);

struct MonteCarloResult {
  double mse = 0.0;
  std::complex<double> mean_error;  // average of (estimate - source) over trials
  std::size_t trials = 0;
};

/// Repeats simulate -> blue_estimate for a constant single-epoch source. Trial k
/// draws its noise from a stream seeded by (seed, k), so the parallel build
/// returns the same bits as the serial one.
MonteCarloResult monte_carlo_blue_serial(std::span<const double> distances, std::span<const double> noise_variances,
                                         double wavelength, double source, std::size_t trials, std::uint64_t seed);
MonteCarloResult monte_carlo_blue(std::span<const double> distances, std::span<const double> noise_variances,
                                  double wavelength, double source, std::size_t trials, std::uint64_t seed);

}  // namespace wsn3d
