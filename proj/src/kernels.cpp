#include "wsn3d/kernels.hpp"

#include <cstdint>

namespace wsn3d::kernels {

namespace {

std::vector<std::size_t> neighbors_of(std::span<const Point3> points, std::size_t i, double radius) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (j != i && euclidean_distance(points[i], points[j]) <= radius) out.push_back(j);
  }
  return out;
}

Degree degree_of(std::span<const Point3> points, const NeighborLists& neighbors,
                 std::span<const char> alive, std::size_t i) {
  Degree d;
  if (!alive[i]) return d;
  for (std::size_t j : neighbors[i]) {
    if (!alive[j]) continue;
    ++d.count;
    const double dist = euclidean_distance(points[i], points[j]);
    if (dist > d.farthest) d.farthest = dist;
  }
  return d;
}

}  // namespace

NeighborLists neighbor_lists_serial(std::span<const Point3> points, double radius) {
  NeighborLists out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = neighbors_of(points, i, radius);
  return out;
}

NeighborLists neighbor_lists(std::span<const Point3> points, double radius) {
  NeighborLists out(points.size());
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = neighbors_of(points, static_cast<std::size_t>(i), radius);
  }
  return out;
}

std::vector<Degree> live_degrees_serial(std::span<const Point3> points, const NeighborLists& neighbors,
                                        std::span<const char> alive) {
  std::vector<Degree> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = degree_of(points, neighbors, alive, i);
  return out;
}

std::vector<Degree> live_degrees(std::span<const Point3> points, const NeighborLists& neighbors,
                                 std::span<const char> alive) {
  std::vector<Degree> out(points.size());
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = degree_of(points, neighbors, alive, k);
  }
  return out;
}

Eigen::MatrixXd correlation_matrix_serial(std::span<const Point3> points, const CorrelationModel& model) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = correlation(model, euclidean_distance(points[static_cast<std::size_t>(i)],
                                                             points[static_cast<std::size_t>(j)]));
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

Eigen::MatrixXd correlation_matrix(std::span<const Point3> points, const CorrelationModel& model) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd c(n, n);
  // Row i owns the lower-triangle entries (i, j<i) and their mirrors; no two rows touch the same cell.
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = correlation(model, euclidean_distance(points[static_cast<std::size_t>(i)],
                                                             points[static_cast<std::size_t>(j)]));
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

}  // namespace wsn3d::kernels
