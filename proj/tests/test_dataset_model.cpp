#include <doctest.h>

#include "helpers.hpp"
#include "ppca/errors.hpp"
#include "ppca/model.hpp"
#include "ppca/synth.hpp"

using namespace ppca;
using ppca::testing::random_instance;

namespace {

PpcaModel two_endpoint_model(Mat means, std::vector<Mat> bases) {
  return PpcaModel(BinGrid({0.0, 1.0}), std::move(means), std::move(bases));
}

}  // namespace

TEST_SUITE("dataset_model") {

TEST_CASE("dataset validates its shape") {
  Mat obs(2, 3);
  obs.setZero();
  CHECK_THROWS_AS(Dataset(obs, {0.0, 1.0}), DimensionError);
  const Dataset data(obs, {0.0, 0.5, 1.0});
  CHECK(data.dim() == 2);
  CHECK(data.size() == 3);
  CHECK_THROWS_AS(data.validate_on(BinGrid({0.0, 0.75})), OutOfRangeError);
  data.validate_on(BinGrid({0.0, 1.0}));
}

TEST_CASE("dataset subsets keep order and parameters") {
  Mat obs(1, 4);
  obs << 10, 11, 12, 13;
  const Dataset data(obs, {0.0, 0.25, 0.5, 1.0});
  const Dataset sub = data.subset({3, 1});
  CHECK(sub.size() == 2);
  CHECK(sub.observation(0)[0] == 13);
  CHECK(sub.param(1) == 0.25);
}

TEST_CASE("mean interpolation at an endpoint returns that endpoint's mean") {
  Mat means(2, 2);
  means << 1, 3, 2, 4;
  const PpcaModel model = two_endpoint_model(means, {Mat::Zero(2, 1), Mat::Zero(2, 1)});
  CHECK(model.interpolate_mean(0.0) == means.col(0));
  CHECK(model.interpolate_mean(1.0) == means.col(1));
}

TEST_CASE("mean interpolation blends the bracketing endpoints") {
  Mat means(2, 2);
  means << 0, 2, 0, 4;
  const PpcaModel model = two_endpoint_model(means, {Mat::Zero(2, 1), Mat::Zero(2, 1)});
  const Vec mid = model.interpolate_mean(0.5);
  CHECK(mid[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mid[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("interpolated means match an independent evaluation of the blend") {
  // Endpoint means sampled from the synthetic truth; interior values must
  // equal the hand-computed weighted blend.
  const BinGrid grid = default_synthetic_grid();
  Mat means(3, grid.endpoint_count());
  for (int b = 0; b < grid.endpoint_count(); ++b) means.col(b) = true_mean(grid.endpoint(b));
  std::vector<Mat> bases(static_cast<size_t>(grid.endpoint_count()), Mat::Zero(3, 1));
  const PpcaModel model(grid, means, bases);
  for (double theta : {4.0, 100.0, 201.37, 355.2}) {
    const int bin = grid.assign_bin(theta);
    const double lo = grid.endpoint(bin), hi = grid.endpoint(bin + 1);
    const double wl = (hi - theta) / (hi - lo);
    const Vec expected = wl * means.col(bin) + (1.0 - wl) * means.col(bin + 1);
    CHECK((model.interpolate_mean(theta) - expected).norm() < 1e-14);
  }
}

TEST_CASE("basis interpolation returns endpoints verbatim and blends columns") {
  std::mt19937_64 rng(3);
  Mat b0(3, 2), b1(3, 2);
  for (int v = 0; v < 2; ++v) {
    for (int k = 0; k < 3; ++k) {
      b0(k, v) = uniform_in(rng, -1, 1);
      b1(k, v) = uniform_in(rng, -1, 1);
    }
  }
  const PpcaModel model = two_endpoint_model(Mat::Zero(3, 2), {b0, b1});
  CHECK(model.interpolate_basis(0.0) == b0);
  CHECK(model.interpolate_basis(1.0) == b1);
  const Mat mid = model.interpolate_basis(0.5);
  CHECK((mid - 0.5 * (b0 + b1)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("a vector present at only one endpoint fades linearly") {
  Mat b0(2, 2), b1(2, 2);
  b0 << 1, 0, 0, 1;  // two vectors at the first endpoint
  b1 << 0, 0, 1, 0;  // only one at the second; slot 2 is a placeholder
  const PpcaModel model =
      PpcaModel(BinGrid({0.0, 1.0}), Mat::Zero(2, 2), {b0, b1}, {2, 1});
  const Mat mid = model.interpolate_basis(0.5);
  CHECK(mid(0, 1) == doctest::Approx(0.5 * b0(0, 1)).epsilon(1e-15));
  CHECK(mid(1, 1) == doctest::Approx(0.5 * b0(1, 1)).epsilon(1e-15));
  CHECK(model.effective_components(0.5) == 2);
}

TEST_CASE("interpolation is continuous at interior endpoints") {
  std::mt19937_64 rng(11);
  const auto inst = random_instance(rng);
  for (int b = 1; b + 1 < inst.model.endpoint_count(); ++b) {
    const double theta = inst.grid.endpoint(b);
    CHECK((inst.model.interpolate_mean(theta) - inst.model.means().col(b)).norm() == 0.0);
    CHECK((inst.model.interpolate_basis(theta) - inst.model.basis(b)).norm() == 0.0);
  }
}

TEST_CASE("reconstruct with zero coefficients returns the mean") {
  std::mt19937_64 rng(5);
  const auto inst = random_instance(rng);
  const double theta = 0.5 * (inst.grid.lo() + inst.grid.hi());
  const Reconstruction r =
      inst.model.reconstruct(theta, Vec::Zero(inst.model.max_components()));
  CHECK((r.values - inst.model.interpolate_mean(theta)).norm() == 0.0);
}

TEST_CASE("reconstruct applies the basis columns") {
  Mat basis(3, 1);
  basis << 1, 0, 0;
  Mat means(3, 2);
  means << 1, 1, 2, 2, 3, 3;
  const PpcaModel model = two_endpoint_model(means, {basis, basis});
  Vec beta(1);
  beta << 2.0;
  const Reconstruction r = model.reconstruct(0.25, beta);
  CHECK(r.values[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(r.values[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("reconstruct rejects coefficient vectors of the wrong length") {
  const PpcaModel model =
      two_endpoint_model(Mat::Zero(2, 2), {Mat::Zero(2, 2), Mat::Zero(2, 2)});
  CHECK_THROWS_AS(model.reconstruct(0.5, Vec::Zero(1)), DimensionError);
}

TEST_CASE("noiseless generated points reconstruct exactly") {
  // Build endpoint models from the true curves, generate a point from the
  // interpolated model, and round-trip it.
  const BinGrid grid = default_synthetic_grid();
  const int B = grid.endpoint_count();
  Mat means(3, B);
  std::vector<Mat> bases;
  for (int b = 0; b < B; ++b) {
    means.col(b) = true_mean(grid.endpoint(b));
    bases.push_back(true_basis(grid.endpoint(b)));
  }
  const PpcaModel model(grid, means, bases);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = uniform_in(rng, 0.0, 360.0);
    Vec beta(2);
    beta << uniform_in(rng, -1, 1), uniform_in(rng, -1, 1);
    const Vec x = model.interpolate_mean(theta) + model.interpolate_basis(theta) * beta;
    const Reconstruction r = model.reconstruct(theta, beta);
    CHECK((r.values - x).norm() < 1e-12);
  }
}

TEST_CASE("reconstruction is affine in the coefficients") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = random_instance(rng);
    const int V = inst.model.max_components();
    const double theta = uniform_in(rng, inst.grid.lo(), inst.grid.hi());
    Vec beta1(V), beta2(V);
    for (int v = 0; v < V; ++v) {
      beta1[v] = uniform_in(rng, -2, 2);
      beta2[v] = uniform_in(rng, -2, 2);
    }
    const double a = uniform_in(rng, -2, 2), b = uniform_in(rng, -2, 2);
    const Vec combined = inst.model.reconstruct(theta, a * beta1 + b * beta2).values;
    const Vec expected = a * inst.model.reconstruct(theta, beta1).values +
                         b * inst.model.reconstruct(theta, beta2).values +
                         (1.0 - a - b) * inst.model.interpolate_mean(theta);
    CHECK((combined - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("masked entries inactive at both endpoints interpolate to exact zero") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    testing::InstanceOptions opt;
    opt.masked = true;
    const auto inst = random_instance(rng, opt);
    const double theta = uniform_in(rng, inst.grid.lo(), inst.grid.hi());
    const EndpointWeights w = inst.grid.compute_weights(theta);
    const ActiveSet active = inst.model.active_at(theta);
    const Vec mean = inst.model.interpolate_mean(theta);
    const Mat basis = inst.model.interpolate_basis(theta);
    for (int k = 0; k < inst.model.dim(); ++k) {
      const bool either = (*inst.model.masks())(k, w.lower) == 1.0 ||
                          (*inst.model.masks())(k, w.upper) == 1.0;
      CHECK(active[k] == either);
      if (!either) {
        CHECK(mean[k] == 0.0);
        CHECK(basis.row(k).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST_CASE("model constructor enforces the placeholder and mask structure") {
  Mat basis(2, 2);
  basis << 1, 1, 0, 0;  // nonzero second column
  CHECK_THROWS_AS(
      PpcaModel(BinGrid({0.0, 1.0}), Mat::Zero(2, 2), {basis, basis}, {1, 2}),
      ConfigError);

  MaskMatrix masks(2, 2);
  masks << 1, 1, 0, 1;
  Mat means(2, 2);
  means << 1, 1, 5, 1;  // entry (1, 0) violates the mask
  CHECK_THROWS_AS(PpcaModel(BinGrid({0.0, 1.0}), means,
                            {Mat::Zero(2, 1), Mat::Zero(2, 1)}, {1, 1}, masks),
                  ConfigError);
}

TEST_CASE("coefficient sets pad with zeros") {
  CoefficientSet set({Vec::Ones(2), Vec::Zero(1)});
  CHECK(set.size() == 2);
  const Vec padded = set.padded(0, 4);
  CHECK(padded.size() == 4);
  CHECK(padded[1] == 1.0);
  CHECK(padded[3] == 0.0);
  CHECK_THROWS_AS(set.padded(0, 1), DimensionError);
}

}  // TEST_SUITE
