#pragma once

#include <vector>

#include "ppca/bin_grid.hpp"
#include "ppca/types.hpp"

namespace ppca {

/// n observations of dimension K, each tagged with a scalar context
/// parameter.  Observations are the columns of a K x n matrix.
class Dataset {
 public:
  Dataset(Mat observations, std::vector<double> params);

  int dim() const { return static_cast<int>(observations_.rows()); }
  int size() const { return static_cast<int>(observations_.cols()); }

  const Mat& observations() const { return observations_; }
  Vec observation(int i) const { return observations_.col(i); }
  double param(int i) const { return params_[static_cast<size_t>(i)]; }
  const std::vector<double>& params() const { return params_; }

  /// Throws OutOfRangeError if any parameter value falls outside the grid.
  void validate_on(const BinGrid& grid) const;

  /// New dataset keeping only the given observation indices, in order.
  Dataset subset(const std::vector<int>& indices) const;

 private:
  Mat observations_;
  std::vector<double> params_;
};

}  // namespace ppca
