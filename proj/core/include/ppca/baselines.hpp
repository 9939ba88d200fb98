#pragma once

#include <vector>

#include "ppca/bin_grid.hpp"
#include "ppca/dataset.hpp"
#include "ppca/types.hpp"

namespace ppca {

/// Single affine subspace fitted to all observations, ignoring the context
/// parameter entirely.
struct PcaModel {
  Vec mean;
  Mat basis;  // K x V, orthonormal columns (zero columns beyond `rank`)
  int rank = 0;
};

/// One independent affine subspace per bin: observations are grouped by
/// assign_bin and each group is fitted on its own, with no sharing across
/// bins.
struct IpcaModel {
  BinGrid grid;
  std::vector<Vec> means;  // one per bin
  std::vector<Mat> bases;  // one per bin, K x V orthonormal columns
};

/// Global mean plus the top `components` principal directions.
PcaModel fit_pca_global(const Dataset& data, int components);

/// Per-bin mean and per-bin PCA.  Throws EmptyBinError (naming the bin) when
/// a bin holds no observations.
IpcaModel fit_ipca(const Dataset& data, const BinGrid& grid, int components);

/// Orthogonal projection onto the affine subspace: mean + Q Q^T (x - mean).
Vec project_baseline(const PcaModel& model, const Vec& x);

/// Same, using the subspace of x's bin.  Throws OutOfRangeError for a theta
/// outside the grid.
Vec project_baseline(const IpcaModel& model, const Vec& x, double theta);

}  // namespace ppca
