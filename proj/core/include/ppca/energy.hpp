#pragma once

#include "ppca/dataset.hpp"
#include "ppca/model.hpp"
#include "ppca/types.hpp"

namespace ppca {

/// Nonnegative penalty coefficients of the training energy.
struct Penalties {
  double mean_smoothness = 0.0;   // adjacent-endpoint mean differences
  double basis_smoothness = 0.0;  // adjacent-endpoint basis differences
  double orthonormality = 0.0;    // per-endpoint basis Gram deviation from I

  void validate() const;
};

/// The three energy terms and their sum.
struct EnergyBreakdown {
  double data = 0.0;
  double smoothness = 0.0;
  double ortho = 0.0;
  double total = 0.0;
};

/// Mean squared reconstruction error over the dataset,
/// (1/n) sum_i |x_i - mean(theta_i) - P(theta_i) beta_i|^2.
/// With masks, residual entries at dimensions inactive at both bracketing
/// endpoints of observation i are excluded from the norm.
/// Throws DimensionError on misaligned inputs.
double energy_data(const PpcaModel& model, const Dataset& data,
                   const CoefficientSet& coeffs);

/// Smoothness energy: mean_smoothness/(B-1) * sum_b |mu_b - mu_{b+1}|^2
/// plus basis_smoothness/(B-1) * sum_b sum_v |p_{b,v} - p_{b+1,v}|^2,
/// where the inner sum runs to min(V_b, V_{b+1}) and, with masks, each
/// difference is restricted to dimensions active at both endpoints.
double energy_smoothness(const PpcaModel& model, const Penalties& penalties);

/// Orthonormality energy: orthonormality * sum_b sum_{v<=w<=V_b}
/// (<p_{b,v}, p_{b,w}> - [v==w])^2.  Placeholder slots contribute nothing.
double energy_ortho(const PpcaModel& model, const Penalties& penalties);

/// All three terms plus their sum.
EnergyBreakdown energy_total(const PpcaModel& model, const Dataset& data,
                             const CoefficientSet& coeffs, const Penalties& penalties);

}  // namespace ppca
