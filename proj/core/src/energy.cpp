#include "ppca/energy.hpp"

#include <algorithm>
#include <sstream>

#include "ppca/errors.hpp"

namespace ppca {

void Penalties::validate() const {
  if (mean_smoothness < 0 || basis_smoothness < 0 || orthonormality < 0) {
    throw ConfigError("penalty coefficients must be nonnegative");
  }
}

namespace {

void check_alignment(const PpcaModel& model, const Dataset& data,
                     const CoefficientSet& coeffs) {
  if (data.dim() != model.dim()) {
    throw DimensionError("dataset dimension does not match the model");
  }
  if (coeffs.size() != data.size()) {
    std::ostringstream msg;
    msg << "coefficient set has " << coeffs.size() << " entries for "
        << data.size() << " observations";
    throw DimensionError(msg.str());
  }
  for (int i = 0; i < data.size(); ++i) {
    const int len = static_cast<int>(coeffs[i].size());
    const int eff = model.effective_components(data.param(i));
    if (len != eff && len != model.max_components()) {
      std::ostringstream msg;
      msg << "coefficient vector " << i << " has length " << len
          << " (expected " << eff << " or " << model.max_components() << ")";
      throw DimensionError(msg.str());
    }
  }
}

}  // namespace

double energy_data(const PpcaModel& model, const Dataset& data,
                   const CoefficientSet& coeffs) {
  check_alignment(model, data, coeffs);
  const int V = model.max_components();
  double sum = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const double theta = data.param(i);
    Vec residual = data.observation(i) - model.interpolate_mean(theta);
    if (V > 0) {
      residual -= model.interpolate_basis(theta) * coeffs.padded(i, V);
    }
    if (model.has_masks()) {
      const ActiveSet active = model.active_at(theta);
      residual = active.select(residual.array(), 0.0).matrix();
    }
    sum += residual.squaredNorm();
  }
  return sum / data.size();
}

double energy_smoothness(const PpcaModel& model, const Penalties& penalties) {
  penalties.validate();
  const int B = model.endpoint_count();
  const int bins = B - 1;
  double mean_part = 0.0;
  double basis_part = 0.0;
  for (int b = 0; b < bins; ++b) {
    Vec mean_diff = model.mean(b) - model.mean(b + 1);
    // Differences are only penalized on dimensions active at both endpoints.
    Eigen::ArrayXd pair_mask;
    if (model.has_masks()) {
      pair_mask = model.masks()->col(b) * model.masks()->col(b + 1);
      mean_diff = (mean_diff.array() * pair_mask).matrix();
    }
    mean_part += mean_diff.squaredNorm();

    const int shared = std::min(model.basis_count(b), model.basis_count(b + 1));
    for (int v = 0; v < shared; ++v) {
      Vec diff = model.basis(b).col(v) - model.basis(b + 1).col(v);
      if (model.has_masks()) diff = (diff.array() * pair_mask).matrix();
      basis_part += diff.squaredNorm();
    }
  }
  return penalties.mean_smoothness / bins * mean_part +
         penalties.basis_smoothness / bins * basis_part;
}

double energy_ortho(const PpcaModel& model, const Penalties& penalties) {
  penalties.validate();
  double sum = 0.0;
  for (int b = 0; b < model.endpoint_count(); ++b) {
    const int vb = model.basis_count(b);
    if (vb == 0) continue;
    const auto active_cols = model.basis(b).leftCols(vb);
    const Mat gram = active_cols.transpose() * active_cols;
    for (int v = 0; v < vb; ++v) {
      for (int w = v; w < vb; ++w) {
        const double target = (v == w) ? 1.0 : 0.0;
        const double d = gram(v, w) - target;
        sum += d * d;
      }
    }
  }
  return penalties.orthonormality * sum;
}

EnergyBreakdown energy_total(const PpcaModel& model, const Dataset& data,
                             const CoefficientSet& coeffs, const Penalties& penalties) {
  EnergyBreakdown e;
  e.data = energy_data(model, data, coeffs);
  e.smoothness = energy_smoothness(model, penalties);
  e.ortho = energy_ortho(model, penalties);
  e.total = e.data + e.smoothness + e.ortho;
  return e;
}

}  // namespace ppca
