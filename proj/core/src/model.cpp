#include "ppca/model.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "ppca/errors.hpp"

namespace ppca {

PpcaModel::PpcaModel(BinGrid grid, Mat means, std::vector<Mat> bases,
                     std::vector<int> basis_counts, std::optional<MaskMatrix> masks)
    : grid_(std::move(grid)),
      means_(std::move(means)),
      bases_(std::move(bases)),
      basis_counts_(std::move(basis_counts)),
      masks_(std::move(masks)) {
  const int B = grid_.endpoint_count();
  const int K = static_cast<int>(means_.rows());
  if (static_cast<int>(means_.cols()) != B) {
    throw DimensionError("means must have one column per bin endpoint");
  }
  if (static_cast<int>(bases_.size()) != B) {
    throw DimensionError("bases must have one entry per bin endpoint");
  }
  const int V = bases_.empty() ? 0 : static_cast<int>(bases_[0].cols());
  for (const Mat& basis : bases_) {
    if (static_cast<int>(basis.rows()) != K || static_cast<int>(basis.cols()) != V) {
      throw DimensionError("every endpoint basis must be K x V");
    }
  }
  if (basis_counts_.empty()) {
    basis_counts_.assign(static_cast<size_t>(B), V);
  }
  if (static_cast<int>(basis_counts_.size()) != B) {
    throw DimensionError("basis_counts must have one entry per bin endpoint");
  }
  int max_count = 0;
  for (int b = 0; b < B; ++b) {
    const int vb = basis_counts_[static_cast<size_t>(b)];
    if (vb < 0 || vb > V) throw ConfigError("basis count out of [0, V]");
    max_count = std::max(max_count, vb);
    // Placeholder slots beyond the endpoint's count are stored as explicit
    // zero vectors.
    for (int v = vb; v < V; ++v) {
      if (bases_[static_cast<size_t>(b)].col(v).norm() != 0.0) {
        std::ostringstream msg;
        msg << "endpoint " << b << " declares " << vb
            << " basis vectors but slot " << v << " is nonzero";
        throw ConfigError(msg.str());
      }
    }
  }
  if (V > 0 && max_count != V) {
    throw ConfigError("the largest basis count must equal the stored width V");
  }
  if (masks_.has_value()) {
    if (static_cast<int>(masks_->rows()) != K || static_cast<int>(masks_->cols()) != B) {
      throw DimensionError("masks must be K x B");
    }
    for (int b = 0; b < B; ++b) {
      for (int k = 0; k < K; ++k) {
        const double m = (*masks_)(k, b);
        if (m != 0.0 && m != 1.0) throw ConfigError("mask entries must be 0 or 1");
        if (m == 0.0) {
          if (means_(k, b) != 0.0) {
            std::ostringstream msg;
            msg << "mean entry (" << k << ", " << b << ") must be zero under the mask";
            throw ConfigError(msg.str());
          }
          if (bases_[static_cast<size_t>(b)].row(k).cwiseAbs().sum() != 0.0) {
            std::ostringstream msg;
            msg << "basis row " << k << " at endpoint " << b << " must be zero under the mask";
            throw ConfigError(msg.str());
          }
        }
      }
    }
  }
  if (!means_.allFinite()) throw ConfigError("means contain non-finite values");
  for (const Mat& basis : bases_) {
    if (!basis.allFinite()) throw ConfigError("bases contain non-finite values");
  }
}

Vec PpcaModel::interpolate_mean(double theta) const {
  const EndpointWeights w = grid_.compute_weights(theta);
  return w.w_lower * means_.col(w.lower) + w.w_upper * means_.col(w.upper);
}

Mat PpcaModel::interpolate_basis(double theta) const {
  const EndpointWeights w = grid_.compute_weights(theta);
  return w.w_lower * bases_[static_cast<size_t>(w.lower)] +
         w.w_upper * bases_[static_cast<size_t>(w.upper)];
}

int PpcaModel::effective_components(double theta) const {
  const EndpointWeights w = grid_.compute_weights(theta);
  return std::max(basis_count(w.lower), basis_count(w.upper));
}

ActiveSet PpcaModel::active_at(double theta) const {
  const int K = dim();
  if (!masks_.has_value()) return ActiveSet::Constant(K, true);
  const EndpointWeights w = grid_.compute_weights(theta);
  return (masks_->col(w.lower) + masks_->col(w.upper)) > 0.0;
}

Reconstruction PpcaModel::reconstruct(double theta, const Vec& beta) const {
  if (static_cast<int>(beta.size()) != max_components()) {
    std::ostringstream msg;
    msg << "coefficient vector has length " << beta.size() << " but the model has "
        << max_components() << " basis slots";
    throw DimensionError(msg.str());
  }
  Reconstruction r;
  r.values = interpolate_mean(theta);
  if (beta.size() > 0) r.values += interpolate_basis(theta) * beta;
  r.active = active_at(theta);
  return r;
}

CoefficientSet::CoefficientSet(std::vector<Vec> coeffs) : coeffs_(std::move(coeffs)) {
  for (const Vec& c : coeffs_) {
    if (!c.allFinite()) throw ConfigError("coefficients contain non-finite values");
  }
}

Vec CoefficientSet::padded(int i, int v) const {
  const Vec& c = coeffs_[static_cast<size_t>(i)];
  if (static_cast<int>(c.size()) > v) {
    throw DimensionError("coefficient vector longer than requested padding");
  }
  Vec out = Vec::Zero(v);
  out.head(c.size()) = c;
  return out;
}

}  // namespace ppca
