#include "ppca/init.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "ppca/errors.hpp"
#include "ppca/optim.hpp"

namespace ppca {

void InitConfig::validate() const {
  if (!(weight_threshold > 0.0 && weight_threshold < 1.0)) {
    throw ConfigError("weight threshold must lie in (0, 1)");
  }
}

Mat init_means(const Dataset& data, const BinGrid& grid) {
  data.validate_on(grid);
  const int B = grid.endpoint_count();
  Mat sums = Mat::Zero(data.dim(), B);
  Vec total_weight = Vec::Zero(B);
  for (int i = 0; i < data.size(); ++i) {
    const EndpointWeights w = grid.compute_weights(data.param(i));
    sums.col(w.lower) += w.w_lower * data.observation(i);
    sums.col(w.upper) += w.w_upper * data.observation(i);
    total_weight[w.lower] += w.w_lower;
    total_weight[w.upper] += w.w_upper;
  }
  for (int b = 0; b < B; ++b) {
    if (!(total_weight[b] > 0.0)) {
      std::ostringstream msg;
      msg << "endpoint " << b << " (parameter value " << grid.endpoint(b)
          << ") has zero total weight";
      throw EmptyEndpointError(msg.str());
    }
    sums.col(b) /= total_weight[b];
  }
  return sums;
}

std::vector<int> select_endpoint_subset(const Dataset& data, const BinGrid& grid,
                                        int b, double threshold) {
  data.validate_on(grid);
  std::vector<int> indices;
  for (int i = 0; i < data.size(); ++i) {
    const EndpointWeights w = grid.compute_weights(data.param(i));
    if (w.weight_for(b) > threshold) indices.push_back(i);
  }
  if (indices.empty()) {
    std::ostringstream msg;
    msg << "endpoint " << b << " has no observations with weight above "
        << threshold;
    throw EmptyEndpointError(msg.str());
  }
  return indices;
}

namespace {

// Deterministic sign: make the largest-magnitude entry positive, breaking
// ties towards the lowest index.
void fix_sign(Eigen::Ref<Vec> v) {
  int best = 0;
  double best_abs = std::abs(v[0]);
  for (int k = 1; k < v.size(); ++k) {
    if (std::abs(v[k]) > best_abs) {
      best_abs = std::abs(v[k]);
      best = k;
    }
  }
  if (v[best] < 0.0) v = -v;
}

}  // namespace

PcaBasis fit_pca(const Mat& vectors, const Vec& center, int count) {
  if (vectors.cols() < 1) throw DimensionError("pca needs at least one input vector");
  if (vectors.rows() != center.size()) {
    throw DimensionError("pca center dimension does not match the vectors");
  }
  if (count < 0) throw DimensionError("pca component count must be nonnegative");

  const int K = static_cast<int>(vectors.rows());
  const int m = static_cast<int>(vectors.cols());
  const Mat centered = vectors.colwise() - center;

  PcaBasis out;
  out.components = Mat::Zero(K, count);
  if (count == 0) return out;

  Mat directions;   // candidate components, one per column
  Vec eigenvalues;  // matching scatter eigenvalues, descending
  if (K <= m) {
    const Mat scatter = centered * centered.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> eig(scatter);
    const int avail = K;
    directions.resize(K, avail);
    eigenvalues.resize(avail);
    for (int j = 0; j < avail; ++j) {
      // SelfAdjointEigenSolver sorts ascending; flip to descending.
      directions.col(j) = eig.eigenvectors().col(avail - 1 - j);
      eigenvalues[j] = eig.eigenvalues()[avail - 1 - j];
    }
  } else {
    // Snapshot route: eigenvectors of the m x m Gram matrix, mapped back
    // through the data.  Spans the same subspace as the K x K scatter.
    const Mat gram = centered.transpose() * centered;
    Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
    const int avail = m;
    directions.resize(K, avail);
    eigenvalues.resize(avail);
    for (int j = 0; j < avail; ++j) {
      const double lambda = eig.eigenvalues()[avail - 1 - j];
      eigenvalues[j] = lambda;
      if (lambda > 0.0) {
        directions.col(j) = centered * eig.eigenvectors().col(avail - 1 - j) / std::sqrt(lambda);
      } else {
        directions.col(j).setZero();
      }
    }
  }

  const double max_eig = std::max(eigenvalues.size() > 0 ? eigenvalues[0] : 0.0, 0.0);
  const double tol = max_eig * 1e-10;
  int rank = 0;
  while (rank < static_cast<int>(eigenvalues.size()) && rank < count &&
         eigenvalues[rank] > tol && eigenvalues[rank] > 0.0) {
    ++rank;
  }
  for (int j = 0; j < rank; ++j) {
    Vec v = directions.col(j);
    v.normalize();
    fix_sign(v);
    out.components.col(j) = v;
  }
  out.rank = rank;
  out.truncated = rank < count;
  return out;
}

std::vector<Mat> reorder_bases(std::vector<Mat> bases, ReorderDirection direction) {
  const int B = static_cast<int>(bases.size());
  if (B == 0) return bases;
  const bool forward = direction == ReorderDirection::forward;
  for (int b = 0; b + 1 < B; ++b) {
    const auto earlier = bases[static_cast<size_t>(b)].cols();
    const auto later = bases[static_cast<size_t>(b + 1)].cols();
    if ((forward && earlier > later) || (!forward && earlier < later)) {
      std::ostringstream msg;
      msg << "basis widths " << earlier << " -> " << later << " at endpoints " << b
          << ", " << b + 1 << " are incompatible with "
          << (forward ? "forward" : "backward")
          << " reordering (widths must grow towards the reference-free end)";
      throw ReorderError(msg.str());
    }
  }

  const int start = forward ? 0 : B - 1;
  const int step = forward ? 1 : -1;
  for (int ref_idx = start; forward ? (ref_idx + 1 < B) : (ref_idx > 0); ref_idx += step) {
    const Mat& ref = bases[static_cast<size_t>(ref_idx)];
    Mat& target = bases[static_cast<size_t>(ref_idx + step)];
    const int vr = static_cast<int>(ref.cols());
    const int vt = static_cast<int>(target.cols());

    const Mat dots = ref.transpose() * target;  // vr x vt
    std::vector<bool> ref_used(static_cast<size_t>(vr), false);
    std::vector<bool> tgt_used(static_cast<size_t>(vt), false);
    Mat reordered(target.rows(), vt);

    for (int pair = 0; pair < vr; ++pair) {
      int best_r = -1, best_t = -1;
      double best_abs = -1.0;
      for (int r = 0; r < vr; ++r) {
        if (ref_used[static_cast<size_t>(r)]) continue;
        for (int t = 0; t < vt; ++t) {
          if (tgt_used[static_cast<size_t>(t)]) continue;
          // Strict > keeps ties on the lowest reference then target index.
          if (std::abs(dots(r, t)) > best_abs) {
            best_abs = std::abs(dots(r, t));
            best_r = r;
            best_t = t;
          }
        }
      }
      ref_used[static_cast<size_t>(best_r)] = true;
      tgt_used[static_cast<size_t>(best_t)] = true;
      reordered.col(best_r) =
          dots(best_r, best_t) < 0.0 ? Vec(-target.col(best_t)) : Vec(target.col(best_t));
    }
    // Leftover target vectors keep their relative order in the open slots.
    int slot = vr;
    for (int t = 0; t < vt; ++t) {
      if (!tgt_used[static_cast<size_t>(t)]) reordered.col(slot++) = target.col(t);
    }
    target = std::move(reordered);
  }
  return bases;
}

CoefficientSet init_coefficients(const PpcaModel& model, const Dataset& data) {
  return solve_coefficients(model, data).coefficients;
}

}  // namespace ppca
