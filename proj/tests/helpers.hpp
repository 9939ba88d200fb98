#pragma once

// Shared test utilities: random instance generation, the finite-difference
// gradient oracle, dense constructions of the stacked system matrices, and
// small linear-algebra oracles.  Everything here goes through the public
// energy evaluation only, so gradient checks stay independent of the
// gradient implementation they verify.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ppca/baselines.hpp"
#include "ppca/dataset.hpp"
#include "ppca/energy.hpp"
#include "ppca/model.hpp"
#include "ppca/random.hpp"
#include "ppca/types.hpp"

namespace ppca::testing {

struct InstanceOptions {
  bool varied_counts = false;
  bool masked = false;
  int max_dim = 5;
  int max_endpoints = 4;
  int max_components = 3;
  int max_observations = 25;
};

struct Instance {
  BinGrid grid;
  Dataset data;
  PpcaModel model;
  CoefficientSet coeffs;
  Penalties penalties;
};

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_unit(rng) * (hi - lo + 1.0 - 1e-12));
}

inline Instance random_instance(std::mt19937_64& rng, const InstanceOptions& opt = {}) {
  const int K = opt.masked ? uniform_int(rng, 2, opt.max_dim)
                           : uniform_int(rng, 1, opt.max_dim);
  const int B = uniform_int(rng, 2, opt.max_endpoints);
  const int V = uniform_int(rng, 1, opt.max_components);
  const int n = uniform_int(rng, 1, opt.max_observations);

  std::vector<double> endpoints(static_cast<size_t>(B));
  endpoints[0] = uniform_in(rng, -5.0, 5.0);
  for (int b = 1; b < B; ++b) {
    endpoints[static_cast<size_t>(b)] =
        endpoints[static_cast<size_t>(b - 1)] + uniform_in(rng, 0.5, 3.0);
  }
  BinGrid grid(endpoints);

  std::vector<int> counts(static_cast<size_t>(B), V);
  if (opt.varied_counts) {
    for (int b = 0; b < B; ++b) counts[static_cast<size_t>(b)] = uniform_int(rng, 0, V);
    counts[static_cast<size_t>(uniform_int(rng, 0, B - 1))] = V;
  }

  std::optional<MaskMatrix> masks;
  if (opt.masked) {
    MaskMatrix m(K, B);
    for (int b = 0; b < B; ++b) {
      for (int k = 0; k < K; ++k) m(k, b) = uniform_unit(rng) < 0.75 ? 1.0 : 0.0;
    }
    masks = m;
  }

  Mat means(K, B);
  for (int b = 0; b < B; ++b) {
    for (int k = 0; k < K; ++k) means(k, b) = uniform_in(rng, -2.0, 2.0);
  }
  std::vector<Mat> bases(static_cast<size_t>(B), Mat::Zero(K, V));
  for (int b = 0; b < B; ++b) {
    for (int v = 0; v < counts[static_cast<size_t>(b)]; ++v) {
      for (int k = 0; k < K; ++k) {
        bases[static_cast<size_t>(b)](k, v) = uniform_in(rng, -1.0, 1.0);
      }
    }
  }
  if (masks.has_value()) {
    means.array() *= *masks;
    for (int b = 0; b < B; ++b) bases[static_cast<size_t>(b)].array().colwise() *= masks->col(b);
  }

  Mat observations(K, n);
  std::vector<double> thetas(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    thetas[static_cast<size_t>(i)] = uniform_in(rng, grid.lo(), grid.hi());
    for (int k = 0; k < K; ++k) observations(k, i) = uniform_in(rng, -2.0, 2.0);
  }
  Dataset data(observations, thetas);

  PpcaModel model(grid, means, bases, counts, masks);
  std::vector<Vec> coeffs;
  for (int i = 0; i < n; ++i) {
    const int eff = model.effective_components(data.param(i));
    Vec c(eff);
    for (int v = 0; v < eff; ++v) c[v] = uniform_in(rng, -1.5, 1.5);
    coeffs.push_back(c);
  }

  Penalties penalties;
  penalties.mean_smoothness = uniform_unit(rng) < 0.2 ? 0.0 : uniform_in(rng, 0.0, 2.0);
  penalties.basis_smoothness = uniform_unit(rng) < 0.2 ? 0.0 : uniform_in(rng, 0.0, 2.0);
  penalties.orthonormality = uniform_unit(rng) < 0.2 ? 0.0 : uniform_in(rng, 0.0, 3.0);

  return Instance{grid, std::move(data), std::move(model), CoefficientSet(std::move(coeffs)),
                  penalties};
}

// --- finite-difference oracle (central differences of the total energy over
// the free parameters; pinned and placeholder entries stay zero) ------------

inline double total_energy_of(const Instance& inst, const Mat& means,
                              const std::vector<Mat>& bases) {
  const PpcaModel model(inst.grid, means, bases, inst.model.basis_counts(),
                        inst.model.masks());
  return energy_total(model, inst.data, inst.coeffs, inst.penalties).total;
}

inline bool entry_free(const Instance& inst, int k, int b) {
  return !inst.model.has_masks() || (*inst.model.masks())(k, b) == 1.0;
}

inline Mat fd_grad_means(const Instance& inst, double base_step = 1e-6) {
  const int K = inst.model.dim();
  const int B = inst.model.endpoint_count();
  Mat g = Mat::Zero(K, B);
  for (int b = 0; b < B; ++b) {
    for (int k = 0; k < K; ++k) {
      if (!entry_free(inst, k, b)) continue;
      const double h = base_step * std::max(1.0, std::abs(inst.model.means()(k, b)));
      Mat means = inst.model.means();
      means(k, b) += h;
      const double up = total_energy_of(inst, means, inst.model.bases());
      means(k, b) -= 2.0 * h;
      const double down = total_energy_of(inst, means, inst.model.bases());
      g(k, b) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

inline std::vector<Mat> fd_grad_bases(const Instance& inst, double base_step = 1e-6) {
  const int K = inst.model.dim();
  const int B = inst.model.endpoint_count();
  const int V = inst.model.max_components();
  std::vector<Mat> g(static_cast<size_t>(B), Mat::Zero(K, V));
  for (int b = 0; b < B; ++b) {
    for (int v = 0; v < inst.model.basis_count(b); ++v) {
      for (int k = 0; k < K; ++k) {
        if (!entry_free(inst, k, b)) continue;
        const double h =
            base_step * std::max(1.0, std::abs(inst.model.basis(b)(k, v)));
        std::vector<Mat> bases = inst.model.bases();
        bases[static_cast<size_t>(b)](k, v) += h;
        const double up = total_energy_of(inst, inst.model.means(), bases);
        bases[static_cast<size_t>(b)](k, v) -= 2.0 * h;
        const double down = total_energy_of(inst, inst.model.means(), bases);
        g[static_cast<size_t>(b)](k, v) = (up - down) / (2.0 * h);
      }
    }
  }
  return g;
}

/// max_j |a_j - b_j| / max(1, |b_j|)
inline double max_relative_error(const Mat& a, const Mat& b) {
  double worst = 0.0;
  for (int c = 0; c < a.cols(); ++c) {
    for (int r = 0; r < a.rows(); ++r) {
      worst = std::max(worst, std::abs(a(r, c) - b(r, c)) / std::max(1.0, std::abs(b(r, c))));
    }
  }
  return worst;
}

inline double max_relative_error(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, max_relative_error(a[i], b[i]));
  return worst;
}

// --- dense constructions of the stacked operators --------------------------
// Means stack as index(b,k) = b*K + k; bases stack as index(b,v,k) =
// (b*V + v)*K + k.

inline Mat dense_weight_row(const EndpointWeights& w, int K, int B) {
  Mat row = Mat::Zero(K, B * K);
  row.block(0, w.lower * K, K, K) = w.w_lower * Mat::Identity(K, K);
  row.block(0, w.upper * K, K, K) = w.w_upper * Mat::Identity(K, K);
  return row;
}

inline Mat dense_mean_stencil(const PpcaModel& model) {
  const int K = model.dim();
  const int B = model.endpoint_count();
  Mat r = Mat::Zero(B * K, B * K);
  for (int b = 0; b + 1 < B; ++b) {
    Mat block = Mat::Identity(K, K);
    if (model.has_masks()) {
      block = (model.masks()->col(b) * model.masks()->col(b + 1)).matrix().asDiagonal();
    }
    r.block(b * K, b * K, K, K) += block;
    r.block((b + 1) * K, (b + 1) * K, K, K) += block;
    r.block(b * K, (b + 1) * K, K, K) -= block;
    r.block((b + 1) * K, b * K, K, K) -= block;
  }
  return r;
}

inline Mat dense_basis_stencil(const PpcaModel& model) {
  const int K = model.dim();
  const int B = model.endpoint_count();
  const int V = model.max_components();
  const int KV = K * V;
  Mat r = Mat::Zero(B * KV, B * KV);
  for (int b = 0; b + 1 < B; ++b) {
    Mat block = Mat::Identity(KV, KV);
    if (model.has_masks()) {
      block.setZero();
      for (int v = 0; v < V; ++v) {
        block.block(v * K, v * K, K, K) =
            (model.masks()->col(b) * model.masks()->col(b + 1)).matrix().asDiagonal();
      }
    }
    r.block(b * KV, b * KV, KV, KV) += block;
    r.block((b + 1) * KV, (b + 1) * KV, KV, KV) += block;
    r.block(b * KV, (b + 1) * KV, KV, KV) -= block;
    r.block((b + 1) * KV, b * KV, KV, KV) -= block;
  }
  return r;
}

inline Mat dense_coefficient_blocks(const Vec& beta_padded, int K, int B) {
  const int V = static_cast<int>(beta_padded.size());
  Mat b_block = Mat::Zero(K, K * V);
  for (int v = 0; v < V; ++v) {
    b_block.block(0, v * K, K, K) = beta_padded[v] * Mat::Identity(K, K);
  }
  Mat full = Mat::Zero(B * K, B * K * V);
  for (int b = 0; b < B; ++b) full.block(b * K, b * K * V, K, K * V) = b_block;
  return full;
}

inline Mat dense_transition(int b, int v, int w, int K, int B, int V) {
  Mat t = Mat::Zero(B * K * V, B * K * V);
  t.block((b * V + v) * K, (b * V + w) * K, K, K) = Mat::Identity(K, K);
  return t;
}

inline Vec stack_means(const Mat& means) {
  Vec out(means.size());
  for (int b = 0; b < means.cols(); ++b) {
    out.segment(b * means.rows(), means.rows()) = means.col(b);
  }
  return out;
}

inline Vec stack_bases(const std::vector<Mat>& bases) {
  const int K = static_cast<int>(bases[0].rows());
  const int V = static_cast<int>(bases[0].cols());
  Vec out(static_cast<Eigen::Index>(bases.size()) * K * V);
  for (size_t b = 0; b < bases.size(); ++b) {
    for (int v = 0; v < V; ++v) {
      out.segment((static_cast<Eigen::Index>(b) * V + v) * K, K) = bases[b].col(v);
    }
  }
  return out;
}

// --- misc oracles -----------------------------------------------------------

/// Largest principal angle (radians) between the column spans, computed
/// through the sine so that near-identical spans do not hit the acos floor.
inline double max_principal_angle(const Mat& a, const Mat& b) {
  const Eigen::HouseholderQR<Mat> qa(a), qb(b);
  const Mat q1 = qa.householderQ() * Mat::Identity(a.rows(), a.cols());
  const Mat q2 = qb.householderQ() * Mat::Identity(b.rows(), b.cols());
  const Mat residual = q2 - q1 * (q1.transpose() * q2);
  Eigen::JacobiSVD<Mat> svd(residual);
  const double sin_angle = std::clamp(svd.singularValues().maxCoeff(), 0.0, 1.0);
  return std::asin(sin_angle);
}

/// Reconstruction MSE of the best rank-V affine fit, from the covariance
/// eigenvalue tail.
inline double pca_mse_oracle(const Dataset& data, int components) {
  const Vec mean = data.observations().rowwise().mean();
  const Mat centered = data.observations().colwise() - mean;
  const Mat covariance = centered * centered.transpose() / data.size();
  Eigen::SelfAdjointEigenSolver<Mat> eig(covariance);
  double tail = 0.0;
  for (int j = 0; j < data.dim() - components; ++j) tail += std::max(eig.eigenvalues()[j], 0.0);
  return tail;
}

/// Random matrix with orthonormal columns.
inline Mat random_orthonormal(std::mt19937_64& rng, int rows, int cols) {
  Mat a(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) a(r, c) = uniform_in(rng, -1.0, 1.0);
  }
  const Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ() * Mat::Identity(rows, cols);
}

}  // namespace ppca::testing
