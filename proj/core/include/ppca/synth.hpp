#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ppca/bin_grid.hpp"
#include "ppca/dataset.hpp"
#include "ppca/model.hpp"
#include "ppca/types.hpp"

namespace ppca {

using MeanEvaluator = std::function<Vec(double)>;
using BasisEvaluator = std::function<Mat(double)>;

/// Configuration of the three-dimensional synthetic benchmark: observations
/// drawn from known smooth mean/basis functions of the parameter.
struct SynthSpec {
  /// Parameter schedule; defaults to 45 values 4, 12, ..., 356.
  std::vector<double> thetas;
  /// Coefficients are uniform in [-coeff_range, coeff_range] (two per point).
  double coeff_range = 1.0;
  /// Elementwise additive noise uniform in [-noise_range, noise_range].
  double noise_range = 1.5;
  std::uint64_t seed = kDefaultSeed;

  SynthSpec();
  void validate() const;
};

/// The 45-point default parameter schedule 4, 12, ..., 356.
std::vector<double> default_synthetic_thetas();

/// 14 equal bins spanning [0, 360].
BinGrid default_synthetic_grid();

/// Known mean curve on [0, 360]; throws OutOfRangeError outside it.
Vec true_mean(double theta);

/// Known 3 x 2 basis on [0, 360] (the columns span the true plane; they are
/// neither normalized nor orthogonal).
Mat true_basis(double theta);

struct SyntheticData {
  Dataset data;
  /// Ground-truth coefficients, one column (length 2) per observation.
  Mat coefficients;
};

/// x_i = true_mean(theta_i) + true_basis(theta_i) beta_i + eta_i with uniform
/// coefficients and noise, reproducible from the seed.  Per observation the
/// two coefficients are drawn first, then the three noise entries.
SyntheticData generate_dataset(const SynthSpec& spec);

/// Sum over the evaluation parameters of |estimated(theta) - truth(theta)|^2.
double mean_recovery_sse(const MeanEvaluator& estimated,
                         const std::vector<double>& thetas,
                         const MeanEvaluator& truth);

/// Convenience overload against the synthetic truth, with the model's
/// interpolated mean as the estimate.
double mean_recovery_sse(const PpcaModel& model, const std::vector<double>& thetas);

/// Sum over the evaluation parameters and over every true basis vector of
/// the squared distance from that vector to the span of the estimated basis
/// (the residual after orthogonal projection).  The estimated basis must
/// span at least as many directions as the truth provides; otherwise throws
/// DimensionError naming the parameter value.  The value depends on the
/// estimated basis only through its span.
double subspace_recovery_error(const BasisEvaluator& estimated,
                               const std::vector<double>& thetas,
                               const BasisEvaluator& truth);

/// Convenience overload against the synthetic truth.
double subspace_recovery_error(const PpcaModel& model, const std::vector<double>& thetas);

}  // namespace ppca
