#include "wsn3d/readings.hpp"

#include <cstring>
#include <string>

#include "wsn3d/error.hpp"

namespace wsn3d {

ReadingMatrix::ReadingMatrix(std::vector<NodeId> node_ids, std::vector<std::int64_t> epochs)
    : node_ids_(std::move(node_ids)), epochs_(std::move(epochs)) {
  for (std::size_t i = 0; i < node_ids_.size(); ++i) {
    if (!row_.emplace(node_ids_[i], i).second) {
      throw ConfigError("reading matrix: duplicate node id " + std::to_string(node_ids_[i]));
    }
  }
  for (std::size_t i = 1; i < epochs_.size(); ++i) {
    if (epochs_[i] <= epochs_[i - 1]) throw ConfigError("reading matrix: epochs must be strictly increasing");
  }
  values_ = Values::Constant(static_cast<Eigen::Index>(node_ids_.size()), static_cast<Eigen::Index>(epochs_.size()),
                             kMissing);
}

std::size_t ReadingMatrix::row_of(NodeId id) const {
  const auto it = row_.find(id);
  if (it == row_.end()) throw ConfigError("reading matrix: no readings for node " + std::to_string(id));
  return it->second;
}

std::size_t ReadingMatrix::present_count() const {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isnan(values_.data()[i])) ++n;
  }
  return n;
}

bool operator==(const ReadingMatrix& a, const ReadingMatrix& b) {
  if (a.node_ids_ != b.node_ids_ || a.epochs_ != b.epochs_) return false;
  if (a.values_.size() == 0) return true;
  // Bitwise, so that NaN cells compare equal to NaN cells.
  return std::memcmp(a.values_.data(), b.values_.data(), sizeof(double) * static_cast<std::size_t>(a.values_.size())) == 0;
}

}  // namespace wsn3d
