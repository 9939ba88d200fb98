#include "ppca/dataset.hpp"

#include <sstream>

#include "ppca/errors.hpp"

namespace ppca {

Dataset::Dataset(Mat observations, std::vector<double> params)
    : observations_(std::move(observations)), params_(std::move(params)) {
  if (observations_.cols() != static_cast<Eigen::Index>(params_.size())) {
    std::ostringstream msg;
    msg << "dataset has " << observations_.cols() << " observations but "
        << params_.size() << " parameter values";
    throw DimensionError(msg.str());
  }
  if (observations_.cols() < 1) throw DimensionError("dataset needs at least one observation");
  if (observations_.rows() < 1) throw DimensionError("observations need dimension >= 1");
  if (!observations_.allFinite()) throw DimensionError("dataset contains non-finite values");
}

void Dataset::validate_on(const BinGrid& grid) const {
  for (int i = 0; i < size(); ++i) {
    if (!grid.contains(params_[static_cast<size_t>(i)])) {
      std::ostringstream msg;
      msg << "observation " << i << " has parameter value "
          << params_[static_cast<size_t>(i)] << " outside grid range ["
          << grid.lo() << ", " << grid.hi() << "]";
      throw OutOfRangeError(msg.str());
    }
  }
}

Dataset Dataset::subset(const std::vector<int>& indices) const {
  Mat obs(dim(), static_cast<Eigen::Index>(indices.size()));
  std::vector<double> params;
  params.reserve(indices.size());
  for (size_t j = 0; j < indices.size(); ++j) {
    obs.col(static_cast<Eigen::Index>(j)) = observations_.col(indices[j]);
    params.push_back(params_[static_cast<size_t>(indices[j])]);
  }
  return Dataset(std::move(obs), std::move(params));
}

}  // namespace ppca
