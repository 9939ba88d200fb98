#include "ppca/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ppca/errors.hpp"
#include "ppca/random.hpp"

namespace ppca {

double rmse_per_observation(const Vec& x, const Vec& reconstruction,
                            const std::optional<ActiveSet>& active) {
  if (x.size() != reconstruction.size()) {
    throw DimensionError("observation and reconstruction have different dimensions");
  }
  if (!active.has_value()) {
    return std::sqrt((x - reconstruction).squaredNorm() / x.size());
  }
  if (active->size() != x.size()) {
    throw DimensionError("active set size does not match the observation");
  }
  double sum = 0.0;
  int count = 0;
  for (int k = 0; k < x.size(); ++k) {
    if (!(*active)[k]) continue;
    const double d = x[k] - reconstruction[k];
    sum += d * d;
    ++count;
  }
  if (count == 0) throw DimensionError("no active dimensions to evaluate");
  return std::sqrt(sum / count);
}

Projector make_projector(const PpcaModel& model) {
  return [model](const Vec& x, double theta) {
    const Vec beta = solve_coefficient(model, x, theta);
    Vec padded = Vec::Zero(model.max_components());
    padded.head(beta.size()) = beta;
    return model.reconstruct(theta, padded);
  };
}

Projector make_projector(const PcaModel& model) {
  return [model](const Vec& x, double /*theta*/) {
    Reconstruction r;
    r.values = project_baseline(model, x);
    r.active = ActiveSet::Constant(x.size(), true);
    return r;
  };
}

Projector make_projector(const IpcaModel& model) {
  return [model](const Vec& x, double theta) {
    Reconstruction r;
    r.values = project_baseline(model, x, theta);
    r.active = ActiveSet::Constant(x.size(), true);
    return r;
  };
}

double mean_rmse(const Dataset& data, const Projector& projector) {
  double sum = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const Vec x = data.observation(i);
    const Reconstruction r = projector(x, data.param(i));
    sum += rmse_per_observation(x, r.values, r.active);
  }
  return sum / data.size();
}

MeanEvaluator make_mean_evaluator(const PpcaModel& model) {
  return [model](double theta) { return model.interpolate_mean(theta); };
}

MeanEvaluator make_mean_evaluator(const IpcaModel& model) {
  return [model](double theta) {
    return model.means[static_cast<size_t>(model.grid.assign_bin(theta))];
  };
}

MeanEvaluator make_mean_evaluator(const PcaModel& model) {
  return [model](double /*theta*/) { return model.mean; };
}

BasisEvaluator make_basis_evaluator(const PpcaModel& model) {
  return [model](double theta) { return model.interpolate_basis(theta); };
}

BasisEvaluator make_basis_evaluator(const IpcaModel& model) {
  return [model](double theta) {
    return model.bases[static_cast<size_t>(model.grid.assign_bin(theta))];
  };
}

BasisEvaluator make_basis_evaluator(const PcaModel& model) {
  return [model](double /*theta*/) { return model.basis; };
}

std::string method_name(Method method) {
  switch (method) {
    case Method::pca: return "pca";
    case Method::ipca: return "ipca";
    case Method::ppca: return "ppca";
  }
  return "unknown";
}

std::map<int, std::vector<int>> nested_subsets(const Dataset& data, const BinGrid& grid,
                                               const std::vector<int>& sizes,
                                               std::uint64_t seed) {
  data.validate_on(grid);
  std::vector<std::vector<int>> members(static_cast<size_t>(grid.bin_count()));
  for (int i = 0; i < data.size(); ++i) {
    members[static_cast<size_t>(grid.assign_bin(data.param(i)))].push_back(i);
  }
  // One shuffle per bin, drawn once; every requested size reads a prefix.
  std::mt19937_64 rng(seed);
  for (auto& bin : members) {
    for (size_t j = bin.size(); j > 1; --j) {
      const size_t k = static_cast<size_t>(uniform_unit(rng) * static_cast<double>(j));
      std::swap(bin[j - 1], bin[std::min(k, j - 1)]);
    }
  }

  std::map<int, std::vector<int>> subsets;
  for (int size : sizes) {
    if (size < 0) throw ConfigError("subset sizes must be nonnegative");
    std::vector<int> indices;
    for (const auto& bin : members) {
      const size_t take = size == 0 ? bin.size() : std::min<size_t>(bin.size(), static_cast<size_t>(size));
      indices.insert(indices.end(), bin.begin(), bin.begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(indices.begin(), indices.end());
    subsets[size] = std::move(indices);
  }
  return subsets;
}

std::vector<CompareRow> compare_methods(const Dataset& train_data,
                                        const Dataset& test_data, const BinGrid& grid,
                                        const CompareConfig& config) {
  train_data.validate_on(grid);
  test_data.validate_on(grid);
  std::vector<int> sizes = config.sizes_per_bin;
  if (sizes.empty()) sizes.push_back(0);
  const auto subsets = nested_subsets(train_data, grid, sizes, config.seed);

  std::vector<CompareRow> rows;
  for (int size : sizes) {
    const Dataset sub = train_data.subset(subsets.at(size));
    for (Method method : config.methods) {
      CompareRow row;
      row.method = method;
      row.size_per_bin = size;
      row.train_size = sub.size();

      Projector projector;
      MeanEvaluator mean_at;
      BasisEvaluator basis_at;
      switch (method) {
        case Method::pca: {
          const PcaModel model = fit_pca_global(sub, config.components);
          projector = make_projector(model);
          mean_at = make_mean_evaluator(model);
          basis_at = make_basis_evaluator(model);
          break;
        }
        case Method::ipca: {
          const IpcaModel model = fit_ipca(sub, grid, config.components);
          projector = make_projector(model);
          mean_at = make_mean_evaluator(model);
          basis_at = make_basis_evaluator(model);
          break;
        }
        case Method::ppca: {
          const TrainResult result = train(sub, grid, config.components, config.train);
          projector = make_projector(result.model);
          mean_at = make_mean_evaluator(result.model);
          basis_at = make_basis_evaluator(result.model);
          break;
        }
      }

      row.train_rmse = mean_rmse(sub, projector);
      row.test_rmse = mean_rmse(test_data, projector);
      if (config.truth.has_value()) {
        row.mean_sse =
            mean_recovery_sse(mean_at, config.truth->eval_thetas, config.truth->mean_at);
        row.subspace_error = subspace_recovery_error(basis_at, config.truth->eval_thetas,
                                                     config.truth->basis_at);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

SweepResult recovery_sweep(const Dataset& data, const BinGrid& grid, int components,
                           const TrainConfig& base, SweepAxis axis,
                           const std::vector<double>& values, const GroundTruth& truth) {
  SweepResult result;

  const IpcaModel ipca = fit_ipca(data, grid, components);
  result.ipca_mean_sse =
      mean_recovery_sse(make_mean_evaluator(ipca), truth.eval_thetas, truth.mean_at);
  result.ipca_subspace_error = subspace_recovery_error(make_basis_evaluator(ipca),
                                                       truth.eval_thetas, truth.basis_at);

  for (double value : values) {
    TrainConfig config = base;
    if (axis == SweepAxis::mean_smoothness) {
      config.penalties.mean_smoothness = value;
    } else {
      config.penalties.basis_smoothness = value;
    }
    const TrainResult trained = train(data, grid, components, config);
    SweepPoint point;
    point.lambda_m = config.penalties.mean_smoothness;
    point.lambda_v = config.penalties.basis_smoothness;
    point.final_energy = energy_total(trained.model, data, trained.coefficients,
                                      config.penalties)
                             .total;
    point.mean_sse = mean_recovery_sse(make_mean_evaluator(trained.model),
                                       truth.eval_thetas, truth.mean_at);
    point.subspace_error = subspace_recovery_error(make_basis_evaluator(trained.model),
                                                   truth.eval_thetas, truth.basis_at);
    point.rolled_back = trained.report.rolled_back;
    result.ppca.push_back(point);
  }
  return result;
}

}  // namespace ppca
