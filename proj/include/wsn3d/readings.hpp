#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wsn3d/clustering.hpp"

namespace wsn3d {

/// Temperature readings keyed by (node, epoch). Rows follow `node_ids`, columns
/// follow the ascending `epochs`. A missing cell holds NaN; present cells are finite.
class ReadingMatrix {
 public:
  using Values = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  static constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  ReadingMatrix() = default;
  /// All cells start missing. Epochs must be strictly increasing, ids unique.
  ReadingMatrix(std::vector<NodeId> node_ids, std::vector<std::int64_t> epochs);

  const std::vector<NodeId>& node_ids() const noexcept { return node_ids_; }
  const std::vector<std::int64_t>& epochs() const noexcept { return epochs_; }
  std::size_t node_count() const noexcept { return node_ids_.size(); }
  std::size_t epoch_count() const noexcept { return epochs_.size(); }

  bool has_node(NodeId id) const { return row_.contains(id); }
  std::size_t row_of(NodeId id) const;

  double& at(std::size_t row, std::size_t col) { return values_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)); }
  double at(std::size_t row, std::size_t col) const {
    return values_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }
  bool missing(std::size_t row, std::size_t col) const { return std::isnan(at(row, col)); }
  std::size_t present_count() const;

  /// Contiguous readings of one node, NaN where missing.
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + static_cast<std::ptrdiff_t>(r * epoch_count()), epoch_count()};
  }
  std::span<const double> row_for(NodeId id) const { return row(row_of(id)); }

  const Values& values() const noexcept { return values_; }

  friend bool operator==(const ReadingMatrix& a, const ReadingMatrix& b);

 private:
  std::vector<NodeId> node_ids_;
  std::vector<std::int64_t> epochs_;
  std::map<NodeId, std::size_t> row_;
  Values values_;
};

}  // namespace wsn3d
