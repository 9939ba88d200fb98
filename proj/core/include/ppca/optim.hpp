#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppca/dataset.hpp"
#include "ppca/energy.hpp"
#include "ppca/init.hpp"
#include "ppca/model.hpp"
#include "ppca/types.hpp"

namespace ppca {

enum class MeanSolver { closed_form, gradient_descent };

/// Knobs of the alternating training loop.
struct TrainConfig {
  Penalties penalties;
  int cycles = 100;       // alternating cycles over (means, bases, coefficients)
  int mean_steps = 100;   // gradient steps per cycle when descending means
  int basis_steps = 100;  // gradient steps per cycle for the bases
  double mean_rate = 1e-3;
  double basis_rate = 1e-3;
  MeanSolver mean_solver = MeanSolver::gradient_descent;
  std::uint64_t rng_seed = kDefaultSeed;
  InitConfig init;

  void validate() const;
};

/// Energy bookkeeping of one training run.  The trace holds the energy after
/// initialization followed by one entry per executed cycle, so its length is
/// cycles_run + 1.
struct TrainReport {
  std::vector<EnergyBreakdown> energy_trace;
  int cycles_run = 0;
  bool terminated_early = false;
  bool rolled_back = false;
  std::vector<std::string> warnings;
};

struct CoefficientSolution {
  CoefficientSet coefficients;
  /// True when at least one observation's effective basis was rank
  /// deficient and the minimum-norm solution was taken.
  bool rank_deficient = false;
};

struct TrainResult {
  PpcaModel model;
  CoefficientSet coefficients;
  TrainReport report;
};

/// Stationary means of the energy given fixed bases and coefficients, found
/// by solving the per-endpoint linear system (a linear solve, never an
/// explicit inverse; the system decouples across ambient dimensions).  With
/// masks the smoothness stencil is restricted to dimensions active at both
/// endpoints and masked entries are pinned to zero.  Practical for moderate
/// dimensions; high-dimensional data should use the gradient path.
/// Throws SingularSystemError when the system has no unique solution.
Mat solve_means_closed_form(const PpcaModel& model, const Dataset& data,
                            const CoefficientSet& coeffs, const Penalties& penalties);

/// Gradient of the total energy with respect to every endpoint mean,
/// accumulated per observation over the two bracketing endpoints plus the
/// tridiagonal smoothness stencil.  Masked entries carry zero gradient.
Mat grad_means(const PpcaModel& model, const Dataset& data,
               const CoefficientSet& coeffs, const Penalties& penalties);

/// Gradient of the total energy with respect to every basis vector p_{b,v}
/// with v < V_b.  Placeholder slots and masked entries are exactly zero
/// (those parameters never move).
std::vector<Mat> grad_bases(const PpcaModel& model, const Dataset& data,
                            const CoefficientSet& coeffs, const Penalties& penalties);

/// `steps` fixed-size gradient steps on the means; returns the updated mean
/// columns.  Throws DivergenceError (naming the rate) if an update produces
/// non-finite values.
Mat descend_means(const PpcaModel& model, const Dataset& data,
                  const CoefficientSet& coeffs, const Penalties& penalties,
                  double rate, int steps);

/// `steps` fixed-size gradient steps on the bases followed by one
/// renormalization pass (unit norm is a hard constraint, restored after the
/// descent loop completes, not inside it).
std::vector<Mat> descend_bases(const PpcaModel& model, const Dataset& data,
                               const CoefficientSet& coeffs, const Penalties& penalties,
                               double rate, int steps);

/// Rescales every non-placeholder basis vector to unit norm.  Throws
/// DegenerateBasisError when a non-placeholder vector has norm below 1e-12.
PpcaModel renormalize_bases(PpcaModel model);

/// Least-squares coefficients of a single observation: minimizes the
/// reconstruction error over dimensions active at theta and non-placeholder
/// columns.  Rank-deficient systems yield the minimum-norm solution and set
/// *rank_deficient (when provided).
Vec solve_coefficient(const PpcaModel& model, const Vec& x, double theta,
                      bool* rank_deficient = nullptr);

/// solve_coefficient applied to every observation.
CoefficientSolution solve_coefficients(const PpcaModel& model, const Dataset& data);

/// Full training run: weighted-mean and per-endpoint PCA initialization with
/// greedy basis reordering, then up to `config.cycles` alternating cycles of
/// mean update (closed form or descent), basis descent plus rescale, and
/// coefficient solve.  Training stops early when the energy increases,
/// restoring the previous cycle's means, bases and coefficients (the report
/// flags the rollback).  `basis_counts` has one entry per endpoint; when an
/// endpoint's subset cannot support the requested count the count is lowered
/// to the achieved rank (with a warning) and the missing slots become zero
/// placeholders.
TrainResult train(const Dataset& data, const BinGrid& grid,
                  const std::vector<int>& basis_counts, const TrainConfig& config,
                  std::optional<MaskMatrix> masks = std::nullopt);

/// Same, with a uniform number of basis vectors per endpoint.
TrainResult train(const Dataset& data, const BinGrid& grid, int components,
                  const TrainConfig& config,
                  std::optional<MaskMatrix> masks = std::nullopt);

}  // namespace ppca
