#pragma once

// Exponential spatial-correlation model and the sphere / regular-dodecahedron
// geometry that sizes event ranges and node sensing ranges.

#include <cmath>
#include <numbers>

#include "wsn3d/error.hpp"

namespace wsn3d {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double euclidean_distance(const Point3& a, const Point3& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// C(d) = exp(-|d|^alpha / theta). theta is the range parameter in meters,
/// alpha the dimensionless smoothness parameter in (0, 2].
class CorrelationModel {
 public:
  CorrelationModel(double theta, double alpha);

  double theta() const noexcept { return theta_; }
  double alpha() const noexcept { return alpha_; }

 private:
  double theta_;
  double alpha_;
};

/// Regular dodecahedron described by its edge length (meters).
class Dodecahedron {
 public:
  explicit Dodecahedron(double edge);

  double edge() const noexcept { return edge_; }

 private:
  double edge_;
};

struct EventSource {
  Point3 position;
  double tau_e = 0.85;  // correlation threshold in (0, 1]
};

void validate(const EventSource& event);

/// Circumradius / edge ratio of a regular dodecahedron, (sqrt(3)/4)(1 + sqrt(5)).
inline constexpr double kDodecaCircumradiusPerEdge =
    std::numbers::sqrt3 / 4.0 * (1.0 + 2.2360679774997896964);

/// Volume / edge^3 ratio of a regular dodecahedron, (15 + 7 sqrt(5)) / 4.
inline constexpr double kDodecaVolumePerEdgeCubed = (15.0 + 7.0 * 2.2360679774997896964) / 4.0;

/// Correlation coefficient at distance d >= 0; throws DomainError for negative d.
double correlation(const CorrelationModel& model, double d);

/// Distance at which the correlation drops to tau: (theta ln(1/tau))^(1/alpha).
/// tau == 1 yields 0. tau outside (0, 1] throws DomainError.
double correlation_radius(const CorrelationModel& model, double tau);

/// Volume of the sphere of radius correlation_radius(model, tau_e).
double event_volume(const CorrelationModel& model, double tau_e);

double dodeca_circumradius(const Dodecahedron& d) noexcept;

/// Inverse of dodeca_circumradius. r == 0 gives 0; negative r throws DomainError.
double dodeca_edge_from_circumradius(double r);

/// (15 + 7 sqrt(5)) / 4 * edge^3.
double dodeca_volume(const Dodecahedron& d) noexcept;

inline double sphere_volume(double r) noexcept { return 4.0 * std::numbers::pi / 3.0 * r * r * r; }

}  // namespace wsn3d
