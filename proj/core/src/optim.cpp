#include "ppca/optim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "ppca/errors.hpp"

namespace ppca {

namespace {

constexpr double kDegenerateNorm = 1e-12;

// Raw training state.  The structured system matrices (observation weight
// blocks, coefficient blocks, smoothness stencils, Gram transitions) are
// never materialized at their stacked size; everything below applies them
// through per-endpoint loops, which keeps the cost linear in B*K*V.
struct Workspace {
  int K = 0, B = 0, V = 0, n = 0, bins = 0;
  double lambda_m = 0.0, lambda_v = 0.0, lambda_o = 0.0;

  const Mat* X = nullptr;                // K x n observations
  std::vector<EndpointWeights> weights;  // one per observation
  std::vector<int> counts;               // V_b per endpoint

  bool masked = false;
  MaskMatrix mask;                     // K x B, 0/1
  MaskMatrix pair_mask;                // K x bins, mask_b * mask_{b+1}
  std::vector<Eigen::ArrayXd> active;  // per observation, union of bracketing masks

  Mat means;               // K x B
  std::vector<Mat> bases;  // B matrices of K x V
  Mat coeffs;              // V x n, zero-padded

  // scratch buffers reused across gradient steps
  mutable Vec resid_buf;
  mutable Vec diff_buf;
  mutable Mat gram_buf;
  mutable Mat h_buf;

  void set_masks(const MaskMatrix& m) {
    masked = true;
    mask = m;
    pair_mask.resize(K, bins);
    for (int b = 0; b < bins; ++b) pair_mask.col(b) = mask.col(b) * mask.col(b + 1);
    active.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const EndpointWeights& w = weights[static_cast<size_t>(i)];
      active[static_cast<size_t>(i)] = mask.col(w.lower).max(mask.col(w.upper));
    }
  }

  // x_i - mean(theta_i) - P(theta_i) beta_i, zeroed on dimensions inactive
  // at both bracketing endpoints.
  void residual(int i, Vec& r) const {
    const EndpointWeights& w = weights[static_cast<size_t>(i)];
    r = X->col(i);
    r.noalias() -= w.w_lower * means.col(w.lower);
    r.noalias() -= w.w_upper * means.col(w.upper);
    for (int v = 0; v < V; ++v) {
      const double c = coeffs(v, i);
      if (c == 0.0) continue;
      r.noalias() -= (c * w.w_lower) * bases[static_cast<size_t>(w.lower)].col(v);
      r.noalias() -= (c * w.w_upper) * bases[static_cast<size_t>(w.upper)].col(v);
    }
    if (masked) r.array() *= active[static_cast<size_t>(i)];
  }

  double data_energy() const {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      residual(i, resid_buf);
      sum += resid_buf.squaredNorm();
    }
    return sum / n;
  }

  void grad_means_into(Mat& g) const {
    g.setZero(K, B);
    const double data_scale = 2.0 / n;
    for (int i = 0; i < n; ++i) {
      residual(i, resid_buf);
      const EndpointWeights& w = weights[static_cast<size_t>(i)];
      g.col(w.lower) -= (data_scale * w.w_lower) * resid_buf;
      g.col(w.upper) -= (data_scale * w.w_upper) * resid_buf;
    }
    if (lambda_m > 0.0) {
      const double s = 2.0 * lambda_m / bins;
      for (int b = 0; b < bins; ++b) {
        diff_buf = means.col(b) - means.col(b + 1);
        if (masked) diff_buf.array() *= pair_mask.col(b);
        g.col(b) += s * diff_buf;
        g.col(b + 1) -= s * diff_buf;
      }
    }
    if (masked) g.array() *= mask;
  }

  void grad_bases_into(std::vector<Mat>& g) const {
    for (int b = 0; b < B; ++b) g[static_cast<size_t>(b)].setZero(K, V);
    const double data_scale = 2.0 / n;
    for (int i = 0; i < n; ++i) {
      residual(i, resid_buf);
      const EndpointWeights& w = weights[static_cast<size_t>(i)];
      for (int v = 0; v < V; ++v) {
        const double c = coeffs(v, i);
        if (c == 0.0) continue;
        if (v < counts[static_cast<size_t>(w.lower)]) {
          g[static_cast<size_t>(w.lower)].col(v) -= (data_scale * w.w_lower * c) * resid_buf;
        }
        if (v < counts[static_cast<size_t>(w.upper)]) {
          g[static_cast<size_t>(w.upper)].col(v) -= (data_scale * w.w_upper * c) * resid_buf;
        }
      }
    }
    if (lambda_v > 0.0) {
      const double s = 2.0 * lambda_v / bins;
      for (int b = 0; b < bins; ++b) {
        const int shared = std::min(counts[static_cast<size_t>(b)],
                                    counts[static_cast<size_t>(b + 1)]);
        for (int v = 0; v < shared; ++v) {
          diff_buf = bases[static_cast<size_t>(b)].col(v) -
                     bases[static_cast<size_t>(b + 1)].col(v);
          if (masked) diff_buf.array() *= pair_mask.col(b);
          g[static_cast<size_t>(b)].col(v) += s * diff_buf;
          g[static_cast<size_t>(b + 1)].col(v) -= s * diff_buf;
        }
      }
    }
    if (lambda_o > 0.0) {
      for (int b = 0; b < B; ++b) {
        const int vb = counts[static_cast<size_t>(b)];
        if (vb == 0) continue;
        const auto active_cols = bases[static_cast<size_t>(b)].leftCols(vb);
        auto gram = gram_buf.topLeftCorner(vb, vb);
        gram.noalias() = active_cols.transpose() * active_cols;
        auto h = h_buf.topLeftCorner(vb, vb);
        h = gram;
        h.diagonal() = 2.0 * (gram.diagonal().array() - 1.0);
        g[static_cast<size_t>(b)].leftCols(vb).noalias() +=
            (2.0 * lambda_o) * (active_cols * h);
      }
    }
    if (masked) {
      for (int b = 0; b < B; ++b) {
        g[static_cast<size_t>(b)].array().colwise() *= mask.col(b);
      }
    }
  }

  Mat solve_means() const {
    // The stacked system decouples across ambient dimensions: the
    // observation-weight part is the same B x B matrix for every dimension
    // and the smoothness stencil is tridiagonal per dimension.
    Mat data_part = Mat::Zero(B, B);
    for (int i = 0; i < n; ++i) {
      const EndpointWeights& w = weights[static_cast<size_t>(i)];
      data_part(w.lower, w.lower) += w.w_lower * w.w_lower;
      data_part(w.lower, w.upper) += w.w_lower * w.w_upper;
      data_part(w.upper, w.lower) += w.w_upper * w.w_lower;
      data_part(w.upper, w.upper) += w.w_upper * w.w_upper;
    }
    data_part /= n;

    Mat rhs = Mat::Zero(B, K);  // (1/n) sum_i w_{b,i} (x_i - P(theta_i) beta_i)
    Vec px(K);
    for (int i = 0; i < n; ++i) {
      const EndpointWeights& w = weights[static_cast<size_t>(i)];
      px = X->col(i);
      for (int v = 0; v < V; ++v) {
        const double c = coeffs(v, i);
        if (c == 0.0) continue;
        px.noalias() -= (c * w.w_lower) * bases[static_cast<size_t>(w.lower)].col(v);
        px.noalias() -= (c * w.w_upper) * bases[static_cast<size_t>(w.upper)].col(v);
      }
      rhs.row(w.lower) += w.w_lower * px.transpose();
      rhs.row(w.upper) += w.w_upper * px.transpose();
    }
    rhs /= n;

    const double s = lambda_m / bins;
    if (!masked) {
      Mat a = data_part;
      for (int b = 0; b < bins; ++b) {
        a(b, b) += s;
        a(b + 1, b + 1) += s;
        a(b, b + 1) -= s;
        a(b + 1, b) -= s;
      }
      Eigen::FullPivLU<Mat> lu(a);
      if (!lu.isInvertible()) {
        throw SingularSystemError(
            "mean system is singular; use the gradient path or a positive "
            "mean smoothness penalty");
      }
      Mat solution = lu.solve(rhs);  // B x K
      return solution.transpose();
    }

    Mat out(K, B);
    for (int k = 0; k < K; ++k) {
      Mat a = data_part;
      for (int b = 0; b < bins; ++b) {
        const double sb = s * pair_mask(k, b);
        a(b, b) += sb;
        a(b + 1, b + 1) += sb;
        a(b, b + 1) -= sb;
        a(b + 1, b) -= sb;
      }
      Vec rk = rhs.col(k);
      for (int b = 0; b < B; ++b) {
        if (mask(k, b) == 0.0) {
          a.row(b).setZero();
          a(b, b) = 1.0;
          rk[b] = 0.0;
        }
      }
      Eigen::FullPivLU<Mat> lu(a);
      if (!lu.isInvertible()) {
        std::ostringstream msg;
        msg << "mean system is singular for dimension " << k
            << "; use the gradient path or a positive mean smoothness penalty";
        throw SingularSystemError(msg.str());
      }
      out.row(k) = lu.solve(rk).transpose();
    }
    return out;
  }

  void descend_means_steps(double rate, int steps) {
    Mat g(K, B);
    for (int step = 0; step < steps; ++step) {
      grad_means_into(g);
      means -= rate * g;
      if (!means.allFinite()) {
        std::ostringstream msg;
        msg << "mean gradient descent produced non-finite values at rate " << rate;
        throw DivergenceError(msg.str());
      }
    }
  }

  void descend_bases_steps(double rate, int steps) {
    std::vector<Mat> g(static_cast<size_t>(B));
    for (int step = 0; step < steps; ++step) {
      grad_bases_into(g);
      for (int b = 0; b < B; ++b) {
        bases[static_cast<size_t>(b)] -= rate * g[static_cast<size_t>(b)];
        if (!bases[static_cast<size_t>(b)].allFinite()) {
          std::ostringstream msg;
          msg << "basis gradient descent produced non-finite values at rate " << rate;
          throw DivergenceError(msg.str());
        }
      }
    }
    renormalize_in_place();
  }

  void renormalize_in_place() {
    for (int b = 0; b < B; ++b) {
      for (int v = 0; v < counts[static_cast<size_t>(b)]; ++v) {
        const double norm = bases[static_cast<size_t>(b)].col(v).norm();
        if (norm < kDegenerateNorm) {
          std::ostringstream msg;
          msg << "basis vector " << v << " at endpoint " << b
              << " has near-zero norm and cannot be rescaled";
          throw DegenerateBasisError(msg.str());
        }
        bases[static_cast<size_t>(b)].col(v) /= norm;
      }
    }
  }
};

Workspace make_workspace(const PpcaModel& model, const Dataset& data,
                         const CoefficientSet& coeffs, const Penalties& penalties) {
  penalties.validate();
  if (data.dim() != model.dim()) {
    throw DimensionError("dataset dimension does not match the model");
  }
  if (coeffs.size() != data.size()) {
    throw DimensionError("coefficient set size does not match the dataset");
  }
  Workspace ws;
  ws.K = model.dim();
  ws.B = model.endpoint_count();
  ws.V = model.max_components();
  ws.n = data.size();
  ws.bins = ws.B - 1;
  ws.lambda_m = penalties.mean_smoothness;
  ws.lambda_v = penalties.basis_smoothness;
  ws.lambda_o = penalties.orthonormality;
  ws.X = &data.observations();
  ws.counts = model.basis_counts();
  ws.means = model.means();
  ws.bases = model.bases();
  ws.weights.reserve(static_cast<size_t>(ws.n));
  for (int i = 0; i < ws.n; ++i) {
    ws.weights.push_back(model.grid().compute_weights(data.param(i)));
  }
  ws.coeffs = Mat::Zero(ws.V, ws.n);
  for (int i = 0; i < ws.n; ++i) {
    const Vec& c = coeffs[i];
    const int eff = model.effective_components(data.param(i));
    if (static_cast<int>(c.size()) != eff && static_cast<int>(c.size()) != ws.V) {
      std::ostringstream msg;
      msg << "coefficient vector " << i << " has length " << c.size()
          << " (expected " << eff << " or " << ws.V << ")";
      throw DimensionError(msg.str());
    }
    ws.coeffs.col(i).head(c.size()) = c;
  }
  if (model.has_masks()) ws.set_masks(*model.masks());
  ws.resid_buf.resize(ws.K);
  ws.diff_buf.resize(ws.K);
  ws.gram_buf.resize(ws.V, ws.V);
  ws.h_buf.resize(ws.V, ws.V);
  return ws;
}

}  // namespace

void TrainConfig::validate() const {
  penalties.validate();
  init.validate();
  if (cycles < 1 || mean_steps < 1 || basis_steps < 1) {
    throw ConfigError("iteration counts must be at least 1");
  }
  if (!(mean_rate > 0.0) || !(basis_rate > 0.0)) {
    throw ConfigError("learning rates must be positive");
  }
}

Mat solve_means_closed_form(const PpcaModel& model, const Dataset& data,
                            const CoefficientSet& coeffs, const Penalties& penalties) {
  return make_workspace(model, data, coeffs, penalties).solve_means();
}

Mat grad_means(const PpcaModel& model, const Dataset& data,
               const CoefficientSet& coeffs, const Penalties& penalties) {
  const Workspace ws = make_workspace(model, data, coeffs, penalties);
  Mat g;
  ws.grad_means_into(g);
  return g;
}

std::vector<Mat> grad_bases(const PpcaModel& model, const Dataset& data,
                            const CoefficientSet& coeffs, const Penalties& penalties) {
  const Workspace ws = make_workspace(model, data, coeffs, penalties);
  std::vector<Mat> g(static_cast<size_t>(ws.B));
  ws.grad_bases_into(g);
  return g;
}

Mat descend_means(const PpcaModel& model, const Dataset& data,
                  const CoefficientSet& coeffs, const Penalties& penalties,
                  double rate, int steps) {
  if (!(rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (steps < 1) throw ConfigError("step count must be at least 1");
  Workspace ws = make_workspace(model, data, coeffs, penalties);
  ws.descend_means_steps(rate, steps);
  return ws.means;
}

std::vector<Mat> descend_bases(const PpcaModel& model, const Dataset& data,
                               const CoefficientSet& coeffs, const Penalties& penalties,
                               double rate, int steps) {
  if (!(rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (steps < 1) throw ConfigError("step count must be at least 1");
  Workspace ws = make_workspace(model, data, coeffs, penalties);
  ws.descend_bases_steps(rate, steps);
  return ws.bases;
}

PpcaModel renormalize_bases(PpcaModel model) {
  std::vector<Mat> bases = model.bases();
  for (int b = 0; b < model.endpoint_count(); ++b) {
    for (int v = 0; v < model.basis_count(b); ++v) {
      const double norm = bases[static_cast<size_t>(b)].col(v).norm();
      if (norm < kDegenerateNorm) {
        std::ostringstream msg;
        msg << "basis vector " << v << " at endpoint " << b
            << " has near-zero norm and cannot be rescaled";
        throw DegenerateBasisError(msg.str());
      }
      bases[static_cast<size_t>(b)].col(v) /= norm;
    }
  }
  return PpcaModel(model.grid(), model.means(), std::move(bases),
                   model.basis_counts(), model.masks());
}

Vec solve_coefficient(const PpcaModel& model, const Vec& x, double theta,
                      bool* rank_deficient) {
  if (x.size() != model.dim()) {
    throw DimensionError("observation dimension does not match the model");
  }
  const EndpointWeights w = model.grid().compute_weights(theta);
  const int eff = std::max(model.basis_count(w.lower), model.basis_count(w.upper));
  if (eff == 0) return Vec(0);

  Vec rhs = x - model.interpolate_mean(theta);
  Mat p(model.dim(), eff);
  for (int v = 0; v < eff; ++v) {
    p.col(v) = w.w_lower * model.basis(w.lower).col(v) +
               w.w_upper * model.basis(w.upper).col(v);
  }

  if (model.has_masks()) {
    const ActiveSet active = model.active_at(theta);
    const int rows = static_cast<int>(active.count());
    if (rows == 0) {
      if (rank_deficient) *rank_deficient = true;
      return Vec::Zero(eff);
    }
    Mat p_act(rows, eff);
    Vec rhs_act(rows);
    int r = 0;
    for (int k = 0; k < model.dim(); ++k) {
      if (!active[k]) continue;
      p_act.row(r) = p.row(k);
      rhs_act[r] = rhs[k];
      ++r;
    }
    p = std::move(p_act);
    rhs = std::move(rhs_act);
  }

  Eigen::CompleteOrthogonalDecomposition<Mat> cod(p);
  if (rank_deficient && cod.rank() < eff) *rank_deficient = true;
  return cod.solve(rhs);
}

CoefficientSolution solve_coefficients(const PpcaModel& model, const Dataset& data) {
  CoefficientSolution out;
  std::vector<Vec> coeffs;
  coeffs.reserve(static_cast<size_t>(data.size()));
  for (int i = 0; i < data.size(); ++i) {
    coeffs.push_back(
        solve_coefficient(model, data.observation(i), data.param(i), &out.rank_deficient));
  }
  out.coefficients = CoefficientSet(std::move(coeffs));
  return out;
}

namespace {

bool non_decreasing(const std::vector<int>& v) {
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i - 1] > v[i]) return false;
  }
  return true;
}

bool non_increasing(const std::vector<int>& v) {
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i - 1] < v[i]) return false;
  }
  return true;
}

std::string counts_to_string(const std::vector<int>& v) {
  std::ostringstream out;
  for (size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  return out.str();
}

}  // namespace

TrainResult train(const Dataset& data, const BinGrid& grid,
                  const std::vector<int>& basis_counts, const TrainConfig& config,
                  std::optional<MaskMatrix> masks) {
  config.validate();
  data.validate_on(grid);
  const int B = grid.endpoint_count();
  const int K = data.dim();
  if (static_cast<int>(basis_counts.size()) != B) {
    throw DimensionError("basis_counts must have one entry per bin endpoint");
  }
  for (int vb : basis_counts) {
    if (vb < 0) throw ConfigError("basis counts must be nonnegative");
  }
  if (masks.has_value() &&
      (static_cast<int>(masks->rows()) != K || static_cast<int>(masks->cols()) != B)) {
    throw DimensionError("masks must be K x B");
  }

  TrainReport report;

  // Initialization: weighted means, per-endpoint PCA, greedy reordering.
  Mat means = init_means(data, grid);
  if (masks.has_value()) means.array() *= *masks;

  std::vector<int> counts(static_cast<size_t>(B), 0);
  std::vector<Mat> ragged;
  ragged.reserve(static_cast<size_t>(B));
  for (int b = 0; b < B; ++b) {
    const std::vector<int> subset =
        select_endpoint_subset(data, grid, b, config.init.weight_threshold);
    Mat vectors(K, static_cast<Eigen::Index>(subset.size()));
    for (size_t j = 0; j < subset.size(); ++j) {
      vectors.col(static_cast<Eigen::Index>(j)) = data.observation(subset[j]);
    }
    if (masks.has_value()) {
      vectors.array().colwise() *= masks->col(b);
    }
    const PcaBasis pca = fit_pca(vectors, means.col(b), basis_counts[static_cast<size_t>(b)]);
    if (pca.truncated) {
      std::ostringstream msg;
      msg << "endpoint " << b << ": requested " << basis_counts[static_cast<size_t>(b)]
          << " basis vectors but the subset only supports " << pca.rank
          << "; missing slots stay zero";
      report.warnings.push_back(msg.str());
    }
    counts[static_cast<size_t>(b)] = pca.rank;
    ragged.push_back(pca.components.leftCols(pca.rank));
  }

  ReorderDirection direction = ReorderDirection::forward;
  const bool up = non_decreasing(counts);
  const bool down = non_increasing(counts);
  if (!up && !down) {
    throw ReorderError("basis counts (" + counts_to_string(counts) +
                       ") rise and fall; reordering needs monotone counts");
  }
  if (config.init.reorder_direction.has_value()) {
    direction = *config.init.reorder_direction;
    if ((direction == ReorderDirection::forward && !up) ||
        (direction == ReorderDirection::backward && !down)) {
      throw ReorderError("requested reorder direction is incompatible with basis counts (" +
                         counts_to_string(counts) + ")");
    }
  } else {
    direction = up ? ReorderDirection::forward : ReorderDirection::backward;
  }
  ragged = reorder_bases(std::move(ragged), direction);

  const int V = *std::max_element(counts.begin(), counts.end());
  std::vector<Mat> bases(static_cast<size_t>(B));
  for (int b = 0; b < B; ++b) {
    bases[static_cast<size_t>(b)] = Mat::Zero(K, V);
    bases[static_cast<size_t>(b)].leftCols(ragged[static_cast<size_t>(b)].cols()) =
        ragged[static_cast<size_t>(b)];
  }

  PpcaModel model(grid, means, bases, counts, masks);
  CoefficientSolution sol = solve_coefficients(model, data);
  if (sol.rank_deficient) {
    report.warnings.push_back("coefficient solve hit a rank-deficient basis; using minimum-norm solutions");
  }
  CoefficientSet coeffs = std::move(sol.coefficients);

  report.energy_trace.push_back(energy_total(model, data, coeffs, config.penalties));

  Workspace ws = make_workspace(model, data, coeffs, config.penalties);

  PpcaModel best_model = model;
  CoefficientSet best_coeffs = coeffs;
  bool warned_rank = sol.rank_deficient;

  for (int cycle = 1; cycle <= config.cycles; ++cycle) {
    if (config.mean_solver == MeanSolver::closed_form) {
      ws.means = ws.solve_means();
    } else {
      ws.descend_means_steps(config.mean_rate, config.mean_steps);
    }
    ws.descend_bases_steps(config.basis_rate, config.basis_steps);

    PpcaModel cycle_model(grid, ws.means, ws.bases, counts, masks);
    CoefficientSolution cycle_sol = solve_coefficients(cycle_model, data);
    if (cycle_sol.rank_deficient && !warned_rank) {
      report.warnings.push_back("coefficient solve hit a rank-deficient basis; using minimum-norm solutions");
      warned_rank = true;
    }
    CoefficientSet cycle_coeffs = std::move(cycle_sol.coefficients);
    for (int i = 0; i < ws.n; ++i) {
      ws.coeffs.col(i).setZero();
      ws.coeffs.col(i).head(cycle_coeffs[i].size()) = cycle_coeffs[i];
    }

    const EnergyBreakdown e =
        energy_total(cycle_model, data, cycle_coeffs, config.penalties);
    if (!std::isfinite(e.total)) {
      throw DivergenceError("training energy became non-finite; lower the learning rates");
    }
    report.energy_trace.push_back(e);
    report.cycles_run = cycle;

    if (e.total > report.energy_trace[static_cast<size_t>(cycle - 1)].total) {
      // Energy went up: keep the previous cycle's snapshot and stop.
      report.rolled_back = true;
      report.terminated_early = true;
      break;
    }
    best_model = std::move(cycle_model);
    best_coeffs = std::move(cycle_coeffs);
  }

  return TrainResult{std::move(best_model), std::move(best_coeffs), std::move(report)};
}

TrainResult train(const Dataset& data, const BinGrid& grid, int components,
                  const TrainConfig& config, std::optional<MaskMatrix> masks) {
  std::vector<int> counts(static_cast<size_t>(grid.endpoint_count()), components);
  return train(data, grid, counts, config, std::move(masks));
}

}  // namespace ppca
