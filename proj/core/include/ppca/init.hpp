#pragma once

#include <optional>
#include <vector>

#include "ppca/dataset.hpp"
#include "ppca/model.hpp"
#include "ppca/types.hpp"

namespace ppca {

/// Direction of the greedy basis reordering pass: forward uses the first
/// endpoint's basis as the initial reference, backward uses the last.
enum class ReorderDirection { forward, backward };

struct InitConfig {
  /// Observations with endpoint weight above this threshold join the
  /// endpoint's PCA subset.
  double weight_threshold = 0.001;
  /// Unset means automatic: forward unless the basis counts force backward.
  std::optional<ReorderDirection> reorder_direction;

  void validate() const;
};

/// Weighted per-endpoint means: mu_b = sum_i w_{b,i} x_i / sum_i w_{b,i}.
/// Throws EmptyEndpointError (naming the endpoint) when an endpoint receives
/// no weight.
Mat init_means(const Dataset& data, const BinGrid& grid);

/// Ascending indices of observations with endpoint-b weight strictly above
/// the threshold.  An interior endpoint draws from both adjacent bins.
/// Throws EmptyEndpointError when empty.
std::vector<int> select_endpoint_subset(const Dataset& data, const BinGrid& grid,
                                        int b, double threshold);

/// Principal component fit with an externally supplied center.
struct PcaBasis {
  /// K x count; columns beyond `rank` are zero placeholders.
  Mat components;
  /// Number of genuine components found (<= count).
  int rank = 0;
  /// True when the requested count exceeded the achievable rank.
  bool truncated = false;
};

/// Top-`count` eigenvectors of the scatter of (vectors - center), in
/// descending eigenvalue order, unit norm, with a deterministic sign
/// convention (largest-magnitude entry positive, ties to the lowest index).
/// `vectors` is K x m with one input vector per column.  Uses the K x K
/// scatter when K <= m and the m x m Gram route otherwise; both span the
/// same subspace.  If `count` exceeds the achievable rank the result is
/// padded with zero columns and flagged.  Throws DimensionError on empty
/// input or a negative count.
PcaBasis fit_pca(const Mat& vectors, const Vec& center, int count);

/// Greedy smoothness-promoting reordering of per-endpoint bases.  Starting
/// from the reference basis (first or last endpoint, per direction), each
/// neighbor is reordered in turn: unpaired vectors with the largest absolute
/// dot product are paired (ties to the lowest reference index, then lowest
/// target index), the target vector's sign is flipped when the dot product is
/// negative, leftover target vectors keep their relative order in the
/// remaining slots, and the reordered target becomes the next reference.
/// Basis widths must be non-decreasing (forward) or non-increasing
/// (backward); throws ReorderError otherwise.
std::vector<Mat> reorder_bases(std::vector<Mat> bases, ReorderDirection direction);

/// Initial coefficients for every observation, delegating to the
/// least-squares coefficient solve.
CoefficientSet init_coefficients(const PpcaModel& model, const Dataset& data);

}  // namespace ppca
