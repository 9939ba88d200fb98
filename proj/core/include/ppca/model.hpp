#pragma once

#include <optional>
#include <vector>

#include "ppca/bin_grid.hpp"
#include "ppca/types.hpp"

namespace ppca {

/// Reconstruction of one observation together with the dimensions that are
/// structurally meaningful at its parameter value.  Without masks every
/// dimension is active.
struct Reconstruction {
  Vec values;
  ActiveSet active;
};

/// Linear subspace model attached to the bin endpoints of a grid: one mean
/// vector and one ordered basis per endpoint.  Evaluating the model at a
/// parameter value linearly blends the two bracketing endpoints, so the mean
/// and every basis vector are continuous piecewise-linear functions of the
/// parameter.
///
/// Endpoints may carry fewer than `max_components()` basis vectors; the
/// missing slots are stored as explicit zero columns ("placeholders") so that
/// stacked-vector formulas apply unchanged.  Optional per-endpoint masks mark
/// ambient dimensions as inactive; masked entries of the mean and basis
/// vectors are exactly zero.
class PpcaModel {
 public:
  /// `means` is K x B (column b = endpoint b's mean), `bases` holds B
  /// matrices of size K x V whose column v is basis vector v (zero columns
  /// beyond `basis_counts[b]`).  `basis_counts` may be empty, meaning every
  /// endpoint uses all V columns.  `masks` (K x B of 0/1) is optional.
  /// Throws DimensionError / ConfigError when the pieces are inconsistent.
  PpcaModel(BinGrid grid, Mat means, std::vector<Mat> bases,
            std::vector<int> basis_counts = {},
            std::optional<MaskMatrix> masks = std::nullopt);

  const BinGrid& grid() const { return grid_; }
  int dim() const { return static_cast<int>(means_.rows()); }
  int endpoint_count() const { return grid_.endpoint_count(); }
  /// V: the largest number of basis vectors at any endpoint (column count of
  /// every basis matrix).
  int max_components() const { return bases_.empty() ? 0 : static_cast<int>(bases_[0].cols()); }

  const Mat& means() const { return means_; }
  Vec mean(int b) const { return means_.col(b); }
  const std::vector<Mat>& bases() const { return bases_; }
  const Mat& basis(int b) const { return bases_[static_cast<size_t>(b)]; }
  const std::vector<int>& basis_counts() const { return basis_counts_; }
  int basis_count(int b) const { return basis_counts_[static_cast<size_t>(b)]; }

  bool has_masks() const { return masks_.has_value(); }
  const std::optional<MaskMatrix>& masks() const { return masks_; }

  /// Mean vector at theta: the weighted blend of the two bracketing endpoint
  /// means.  Throws OutOfRangeError outside the grid.
  Vec interpolate_mean(double theta) const;

  /// K x V basis at theta; column v blends the two endpoints' v-th vectors.
  /// Placeholder columns blend as ordinary zero vectors, so a vector present
  /// at only one endpoint fades linearly towards the other.
  Mat interpolate_basis(double theta) const;

  /// Number of non-placeholder columns of interpolate_basis(theta): the
  /// larger of the two bracketing endpoints' basis counts.
  int effective_components(double theta) const;

  /// Dimensions active at theta: active at either bracketing endpoint.
  /// All-true when the model has no masks.
  ActiveSet active_at(double theta) const;

  /// interpolate_mean(theta) + interpolate_basis(theta) * beta.  beta must
  /// have length max_components(); throws DimensionError otherwise.  The
  /// returned active set flags dimensions inactive at both bracketing
  /// endpoints (those entries of the value are exactly zero).
  Reconstruction reconstruct(double theta, const Vec& beta) const;

 private:
  BinGrid grid_;
  Mat means_;
  std::vector<Mat> bases_;
  std::vector<int> basis_counts_;
  std::optional<MaskMatrix> masks_;
};

/// One low-dimensional coefficient vector per observation.  Vector i has the
/// model's effective basis size at the observation's parameter value, which
/// can vary when endpoints carry different basis counts.
class CoefficientSet {
 public:
  CoefficientSet() = default;
  explicit CoefficientSet(std::vector<Vec> coeffs);

  int size() const { return static_cast<int>(coeffs_.size()); }
  const Vec& operator[](int i) const { return coeffs_[static_cast<size_t>(i)]; }
  const std::vector<Vec>& coeffs() const { return coeffs_; }

  /// Coefficient vector i zero-extended to length `v`.
  Vec padded(int i, int v) const;

 private:
  std::vector<Vec> coeffs_;
};

}  // namespace ppca
