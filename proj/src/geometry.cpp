#include "wsn3d/geometry.hpp"

#include <string>

namespace wsn3d {

CorrelationModel::CorrelationModel(double theta, double alpha) : theta_(theta), alpha_(alpha) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("correlation model: theta must be positive, got " + std::to_string(theta));
  }
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw DomainError("correlation model: alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
}

Dodecahedron::Dodecahedron(double edge) : edge_(edge) {
  if (!(edge > 0.0) || !std::isfinite(edge)) {
    throw DomainError("dodecahedron: edge must be positive, got " + std::to_string(edge));
  }
}

void validate(const EventSource& event) {
  if (!(event.tau_e > 0.0 && event.tau_e <= 1.0)) {
    throw DomainError("event source: tau_e must lie in (0, 1], got " + std::to_string(event.tau_e));
  }
}

double correlation(const CorrelationModel& model, double d) {
  if (!(d >= 0.0)) {
    throw DomainError("correlation: distance must be non-negative, got " + std::to_string(d));
  }
  return std::exp(-std::pow(d, model.alpha()) / model.theta());
}

double correlation_radius(const CorrelationModel& model, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw DomainError("correlation radius: tau must lie in (0, 1], got " + std::to_string(tau));
  }
  if (tau == 1.0) return 0.0;
  return std::pow(-model.theta() * std::log(tau), 1.0 / model.alpha());
}

double event_volume(const CorrelationModel& model, double tau_e) {
  return sphere_volume(correlation_radius(model, tau_e));
}

double dodeca_circumradius(const Dodecahedron& d) noexcept {
  return kDodecaCircumradiusPerEdge * d.edge();
}

double dodeca_edge_from_circumradius(double r) {
  if (!(r >= 0.0)) {
    throw DomainError("dodecahedron: circumradius must be non-negative, got " + std::to_string(r));
  }
  return r / kDodecaCircumradiusPerEdge;
}

double dodeca_volume(const Dodecahedron& d) noexcept {
  const double e = d.edge();
  return kDodecaVolumePerEdgeCubed * e * e * e;
}

}  // namespace wsn3d
