#pragma once

// Data-parallel inner loops. Every kernel has a `_serial` reference that the
// tests compare against; the unsuffixed variant is the OpenMP build used by the
// library. Both produce identical results (not just close ones): each output
// element is written by exactly one iteration, and reductions are ordered.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wsn3d/geometry.hpp"

namespace wsn3d::kernels {

/// neighbors[i] holds the indices j != i with |p_i - p_j| <= radius, ascending.
using NeighborLists = std::vector<std::vector<std::size_t>>;

NeighborLists neighbor_lists_serial(std::span<const Point3> points, double radius);
NeighborLists neighbor_lists(std::span<const Point3> points, double radius);

/// Per-node count of live neighbors and the farthest live-neighbor distance.
struct Degree {
  std::size_t count = 0;
  double farthest = 0.0;

  friend bool operator==(const Degree&, const Degree&) = default;
};

/// Degrees restricted to nodes with alive[j] != 0. Dead nodes get {0, 0}.
std::vector<Degree> live_degrees_serial(std::span<const Point3> points, const NeighborLists& neighbors,
                                        std::span<const char> alive);
std::vector<Degree> live_degrees(std::span<const Point3> points, const NeighborLists& neighbors,
                                 std::span<const char> alive);

/// Dense matrix of C(|p_i - p_j|); unit diagonal.
Eigen::MatrixXd correlation_matrix_serial(std::span<const Point3> points, const CorrelationModel& model);
Eigen::MatrixXd correlation_matrix(std::span<const Point3> points, const CorrelationModel& model);

}  // namespace wsn3d::kernels
