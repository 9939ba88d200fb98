#include "ppca/baselines.hpp"

#include <sstream>
#include <utility>

#include "ppca/errors.hpp"
#include "ppca/init.hpp"

namespace ppca {

PcaModel fit_pca_global(const Dataset& data, int components) {
  PcaModel model;
  model.mean = data.observations().rowwise().mean();
  const PcaBasis basis = fit_pca(data.observations(), model.mean, components);
  model.basis = basis.components;
  model.rank = basis.rank;
  return model;
}

IpcaModel fit_ipca(const Dataset& data, const BinGrid& grid, int components) {
  data.validate_on(grid);
  const int bins = grid.bin_count();
  std::vector<std::vector<int>> members(static_cast<size_t>(bins));
  for (int i = 0; i < data.size(); ++i) {
    members[static_cast<size_t>(grid.assign_bin(data.param(i)))].push_back(i);
  }

  IpcaModel model{grid, {}, {}};
  for (int b = 0; b < bins; ++b) {
    if (members[static_cast<size_t>(b)].empty()) {
      std::ostringstream msg;
      msg << "bin " << b << " [" << grid.endpoint(b) << ", " << grid.endpoint(b + 1)
          << "] has no observations";
      throw EmptyBinError(msg.str());
    }
    Mat group(data.dim(), static_cast<Eigen::Index>(members[static_cast<size_t>(b)].size()));
    for (size_t j = 0; j < members[static_cast<size_t>(b)].size(); ++j) {
      group.col(static_cast<Eigen::Index>(j)) =
          data.observation(members[static_cast<size_t>(b)][j]);
    }
    Vec mean = group.rowwise().mean();
    PcaBasis basis = fit_pca(group, mean, components);
    model.means.push_back(std::move(mean));
    model.bases.push_back(std::move(basis.components));
  }
  return model;
}

Vec project_baseline(const PcaModel& model, const Vec& x) {
  if (x.size() != model.mean.size()) {
    throw DimensionError("observation dimension does not match the model");
  }
  const Vec centered = x - model.mean;
  return model.mean + model.basis * (model.basis.transpose() * centered);
}

Vec project_baseline(const IpcaModel& model, const Vec& x, double theta) {
  const int bin = model.grid.assign_bin(theta);
  const Vec& mean = model.means[static_cast<size_t>(bin)];
  const Mat& basis = model.bases[static_cast<size_t>(bin)];
  if (x.size() != mean.size()) {
    throw DimensionError("observation dimension does not match the model");
  }
  const Vec centered = x - mean;
  return mean + basis * (basis.transpose() * centered);
}

}  // namespace ppca
