#pragma once

#include <random>
#include <vector>

#include "ppca/dataset.hpp"
#include "ppca/energy.hpp"
#include "ppca/model.hpp"
#include "ppca/optim.hpp"
#include "ppca/random.hpp"

namespace ppca::bench {

struct Problem {
  BinGrid grid;
  Dataset data;
  PpcaModel model;
  CoefficientSet coeffs;
  Penalties penalties;
};

// Random instance with dimension K; endpoint and observation counts chosen
// to resemble the mid-size experiments.
inline Problem make_problem(int dim, int endpoints = 8, int components = 4,
                            int observations = 64) {
  std::mt19937_64 rng(1234);
  std::vector<double> grid_points;
  for (int b = 0; b < endpoints; ++b) grid_points.push_back(static_cast<double>(b));
  BinGrid grid(grid_points);

  Mat obs(dim, observations);
  std::vector<double> thetas;
  for (int i = 0; i < observations; ++i) {
    thetas.push_back(uniform_in(rng, grid.lo(), grid.hi()));
    for (int k = 0; k < dim; ++k) obs(k, i) = uniform_in(rng, -1, 1);
  }
  Dataset data(std::move(obs), std::move(thetas));

  Mat means(dim, endpoints);
  std::vector<Mat> bases;
  for (int b = 0; b < endpoints; ++b) {
    for (int k = 0; k < dim; ++k) means(k, b) = uniform_in(rng, -1, 1);
    Mat basis(dim, components);
    for (int v = 0; v < components; ++v) {
      for (int k = 0; k < dim; ++k) basis(k, v) = uniform_in(rng, -1, 1);
      basis.col(v).normalize();
    }
    bases.push_back(std::move(basis));
  }
  PpcaModel model(grid, std::move(means), std::move(bases));

  std::vector<Vec> coeffs;
  for (int i = 0; i < observations; ++i) {
    Vec c(components);
    for (int v = 0; v < components; ++v) c[v] = uniform_in(rng, -1, 1);
    coeffs.push_back(std::move(c));
  }

  Penalties penalties{0.01, 1.0, 20.0};
  return Problem{grid, std::move(data), std::move(model), CoefficientSet(std::move(coeffs)),
                 penalties};
}

}  // namespace ppca::bench
