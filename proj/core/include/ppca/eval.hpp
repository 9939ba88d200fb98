#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppca/baselines.hpp"
#include "ppca/dataset.hpp"
#include "ppca/model.hpp"
#include "ppca/optim.hpp"
#include "ppca/synth.hpp"
#include "ppca/types.hpp"

namespace ppca {

/// Root mean squared residual over the active dimensions (all dimensions
/// when no active set is given).  Throws DimensionError on mismatched sizes
/// or an empty active set.
double rmse_per_observation(const Vec& x, const Vec& reconstruction,
                            const std::optional<ActiveSet>& active = std::nullopt);

/// Maps an observation and its parameter value to a reconstruction.
using Projector = std::function<Reconstruction(const Vec&, double)>;

/// Least-squares coefficients followed by the model reconstruction.
Projector make_projector(const PpcaModel& model);
Projector make_projector(const PcaModel& model);
Projector make_projector(const IpcaModel& model);

/// Arithmetic mean of the per-observation RMSEs under the projector.
double mean_rmse(const Dataset& data, const Projector& projector);

/// Parameter-dependent mean/basis views used by the recovery metrics:
/// interpolated for the endpoint model, piecewise constant per bin for the
/// independent model, constant for the global one.
MeanEvaluator make_mean_evaluator(const PpcaModel& model);
MeanEvaluator make_mean_evaluator(const IpcaModel& model);
MeanEvaluator make_mean_evaluator(const PcaModel& model);
BasisEvaluator make_basis_evaluator(const PpcaModel& model);
BasisEvaluator make_basis_evaluator(const IpcaModel& model);
BasisEvaluator make_basis_evaluator(const PcaModel& model);

enum class Method { pca, ipca, ppca };

std::string method_name(Method method);

/// Ground-truth hooks for the recovery columns of comparison tables.
struct GroundTruth {
  MeanEvaluator mean_at;
  BasisEvaluator basis_at;
  std::vector<double> eval_thetas;
};

struct CompareConfig {
  std::vector<Method> methods = {Method::pca, Method::ipca, Method::ppca};
  /// Training-set sizes per bin; 0 (or an empty list) means the full set.
  std::vector<int> sizes_per_bin;
  int components = 2;
  TrainConfig train;
  std::uint64_t seed = kDefaultSeed;
  std::optional<GroundTruth> truth;
};

struct CompareRow {
  Method method = Method::pca;
  int size_per_bin = 0;  // 0 = full training set
  int train_size = 0;    // observations actually used
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  std::optional<double> mean_sse;
  std::optional<double> subspace_error;
};

/// Per-size training subsets drawn once from the seed: each bin's members
/// are shuffled once and size s takes the first min(s, bin size) of them, so
/// smaller subsets are nested inside larger ones.  Size 0 selects everything.
/// Returned index lists are ascending.
std::map<int, std::vector<int>> nested_subsets(const Dataset& data, const BinGrid& grid,
                                               const std::vector<int>& sizes,
                                               std::uint64_t seed);

/// Fits every requested method at every training size and reports train/test
/// mean RMSE, plus recovery metrics when ground truth is supplied.
std::vector<CompareRow> compare_methods(const Dataset& train_data,
                                        const Dataset& test_data, const BinGrid& grid,
                                        const CompareConfig& config);

/// Which penalty a recovery sweep varies.
enum class SweepAxis { mean_smoothness, basis_smoothness };

struct SweepPoint {
  double lambda_m = 0.0;
  double lambda_v = 0.0;
  double final_energy = 0.0;
  double mean_sse = 0.0;
  double subspace_error = 0.0;
  bool rolled_back = false;
};

struct SweepResult {
  std::vector<SweepPoint> ppca;  // one per swept penalty value
  double ipca_mean_sse = 0.0;
  double ipca_subspace_error = 0.0;
};

/// Recovery-versus-penalty protocol: train once per value of the swept
/// penalty (the other penalty stays at its base value), score mean and
/// subspace recovery against the ground truth, and report the independent
/// per-bin baseline on the same data for reference.
SweepResult recovery_sweep(const Dataset& data, const BinGrid& grid, int components,
                           const TrainConfig& base, SweepAxis axis,
                           const std::vector<double>& values, const GroundTruth& truth);

}  // namespace ppca
