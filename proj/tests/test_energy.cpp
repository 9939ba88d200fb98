#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "ppca/energy.hpp"
#include "ppca/errors.hpp"

using namespace ppca;
using namespace ppca::testing;

namespace {

// Independent re-summation of the data term, written from scratch against
// the raw definitions (no model interpolation helpers).
double data_energy_oracle(const Instance& inst) {
  const auto& endpoints = inst.grid.endpoints();
  double sum = 0.0;
  for (int i = 0; i < inst.data.size(); ++i) {
    const double theta = inst.data.param(i);
    int bin = 0;
    for (size_t b = 1; b + 1 < endpoints.size(); ++b) {
      if (theta > endpoints[b]) bin = static_cast<int>(b);
    }
    const double lo = endpoints[static_cast<size_t>(bin)];
    const double hi = endpoints[static_cast<size_t>(bin) + 1];
    const double wl = (hi - theta) / (hi - lo);
    const double wu = 1.0 - wl;
    for (int k = 0; k < inst.data.dim(); ++k) {
      if (inst.model.has_masks() && (*inst.model.masks())(k, bin) == 0.0 &&
          (*inst.model.masks())(k, bin + 1) == 0.0) {
        continue;
      }
      double value = wl * inst.model.means()(k, bin) + wu * inst.model.means()(k, bin + 1);
      for (int v = 0; v < inst.coeffs[i].size(); ++v) {
        value += inst.coeffs[i][v] * (wl * inst.model.basis(bin)(k, v) +
                                      wu * inst.model.basis(bin + 1)(k, v));
      }
      const double r = inst.data.observations()(k, i) - value;
      sum += r * r;
    }
  }
  return sum / inst.data.size();
}

// Brute-force double loop over vector pairs.
double ortho_energy_oracle(const Instance& inst) {
  double sum = 0.0;
  for (int b = 0; b < inst.model.endpoint_count(); ++b) {
    for (int v = 0; v < inst.model.basis_count(b); ++v) {
      for (int w = v; w < inst.model.basis_count(b); ++w) {
        const double dot = inst.model.basis(b).col(v).dot(inst.model.basis(b).col(w));
        const double d = dot - (v == w ? 1.0 : 0.0);
        sum += d * d;
      }
    }
  }
  return inst.penalties.orthonormality * sum;
}

Instance reversed(const Instance& inst) {
  const int B = inst.model.endpoint_count();
  Mat means(inst.model.dim(), B);
  std::vector<Mat> bases;
  std::vector<int> counts;
  std::optional<MaskMatrix> masks;
  if (inst.model.has_masks()) masks = MaskMatrix(inst.model.dim(), B);
  for (int b = 0; b < B; ++b) {
    means.col(b) = inst.model.means().col(B - 1 - b);
    bases.push_back(inst.model.basis(B - 1 - b));
    counts.push_back(inst.model.basis_count(B - 1 - b));
    if (masks.has_value()) masks->col(b) = inst.model.masks()->col(B - 1 - b);
  }
  Instance out = inst;
  out.model = PpcaModel(inst.grid, means, bases, counts, masks);
  return out;
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("perfect reconstructions give zero data energy") {
  Mat means(2, 2);
  means << 1, 3, 2, 4;
  const PpcaModel model(BinGrid({0.0, 1.0}), means, {Mat::Zero(2, 1), Mat::Zero(2, 1)});
  Mat obs(2, 2);
  obs.col(0) = model.interpolate_mean(0.3);
  obs.col(1) = model.interpolate_mean(0.9);
  const Dataset data(obs, {0.3, 0.9});
  const CoefficientSet coeffs({Vec::Zero(1), Vec::Zero(1)});
  CHECK(energy_data(model, data, coeffs) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("a single residual (3, 4) contributes 25") {
  Mat means = Mat::Zero(2, 2);
  const PpcaModel model(BinGrid({0.0, 1.0}), means, {Mat::Zero(2, 1), Mat::Zero(2, 1)});
  Mat obs(2, 1);
  obs << 3, 4;
  const Dataset data(obs, {0.5});
  CHECK(energy_data(model, data, CoefficientSet({Vec::Zero(1)})) ==
        doctest::Approx(25.0).epsilon(1e-14));
}

TEST_CASE("data energy matches an independent re-summation") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    InstanceOptions opt;
    opt.varied_counts = trial % 2 == 1;
    opt.masked = trial % 3 == 2;
    const Instance inst = random_instance(rng, opt);
    const double expected = data_energy_oracle(inst);
    CHECK(energy_data(inst.model, inst.data, inst.coeffs) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("misaligned coefficients are rejected") {
  std::mt19937_64 rng(43);
  const Instance inst = random_instance(rng);
  std::vector<Vec> bad(static_cast<size_t>(inst.data.size()),
                       Vec::Zero(inst.model.max_components() + 1));
  CHECK_THROWS_AS(energy_data(inst.model, inst.data, CoefficientSet(bad)), DimensionError);
}

TEST_CASE("identical endpoints have zero smoothness energy") {
  std::mt19937_64 rng(47);
  Mat basis(3, 2);
  for (int v = 0; v < 2; ++v)
    for (int k = 0; k < 3; ++k) basis(k, v) = uniform_in(rng, -1, 1);
  Mat means(3, 3);
  means.colwise() = Vec::Ones(3);
  const PpcaModel model(BinGrid({0.0, 1.0, 2.0}), means, {basis, basis, basis});
  Penalties penalties;
  penalties.mean_smoothness = 3.0;
  penalties.basis_smoothness = 5.0;
  CHECK(energy_smoothness(model, penalties) == 0.0);
}

TEST_CASE("one bin, unit mean difference in two dimensions gives 2") {
  Mat means(2, 2);
  means << 0, 1, 0, 1;
  const PpcaModel model(BinGrid({0.0, 1.0}), means, {Mat::Zero(2, 1), Mat::Zero(2, 1)});
  Penalties penalties;
  penalties.mean_smoothness = 1.0;
  CHECK(energy_smoothness(model, penalties) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("basis differences beyond the shared count are excluded") {
  std::mt19937_64 rng(53);
  Mat shared(3, 2);
  for (int k = 0; k < 3; ++k) shared(k, 0) = uniform_in(rng, -1, 1);
  shared.col(1).setZero();
  Mat wide = shared;
  for (int k = 0; k < 3; ++k) wide(k, 1) = uniform_in(rng, -1, 1);

  Penalties penalties;
  penalties.basis_smoothness = 2.5;
  // Varied counts: the second slot exists only at the first endpoint, so the
  // energy must match the single-shared-vector model exactly.
  const PpcaModel varied(BinGrid({0.0, 1.0}), Mat::Zero(3, 2), {wide, shared}, {2, 1});
  const Mat first_only = shared.col(0);
  const PpcaModel narrow(BinGrid({0.0, 1.0}), Mat::Zero(3, 2), {first_only, first_only});
  CHECK(energy_smoothness(varied, penalties) ==
        doctest::Approx(energy_smoothness(narrow, penalties)).epsilon(1e-15));
}

TEST_CASE("orthonormal bases have zero orthonormality energy") {
  std::mt19937_64 rng(59);
  const Mat q = random_orthonormal(rng, 4, 2);
  const PpcaModel model(BinGrid({0.0, 1.0}), Mat::Zero(4, 2), {q, q});
  Penalties penalties;
  penalties.orthonormality = 100.0;
  CHECK(energy_ortho(model, penalties) < 1e-24);
}

TEST_CASE("a single vector of squared norm 4 contributes (4 - 1)^2") {
  Mat long_vec(1, 1), unit_vec(1, 1);
  long_vec << 2.0;  // squared norm 4
  unit_vec << 1.0;  // neutral second endpoint
  const PpcaModel model(BinGrid({0.0, 1.0}), Mat::Zero(1, 2), {long_vec, unit_vec});
  Penalties penalties;
  penalties.orthonormality = 1.0;
  CHECK(energy_ortho(model, penalties) == doctest::Approx(9.0).epsilon(1e-15));
}

TEST_CASE("orthonormality energy matches the brute-force oracle") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    InstanceOptions opt;
    opt.varied_counts = trial % 2 == 0;
    const Instance inst = random_instance(rng, opt);
    CHECK(energy_ortho(inst.model, inst.penalties) ==
          doctest::Approx(ortho_energy_oracle(inst)).epsilon(1e-12));
  }
}

TEST_CASE("the breakdown sums its parts") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 25; ++trial) {
    InstanceOptions opt;
    opt.varied_counts = trial % 2 == 0;
    opt.masked = trial % 3 == 0;
    const Instance inst = random_instance(rng, opt);
    const EnergyBreakdown e = energy_total(inst.model, inst.data, inst.coeffs, inst.penalties);
    CHECK(e.total == doctest::Approx(e.data + e.smoothness + e.ortho).epsilon(1e-12));
    CHECK(e.data == doctest::Approx(energy_data(inst.model, inst.data, inst.coeffs)).epsilon(1e-15));
    CHECK(e.data >= 0.0);
    CHECK(e.smoothness >= 0.0);
    CHECK(e.ortho >= 0.0);
  }
}

TEST_CASE("with zero penalties the total equals the data term") {
  std::mt19937_64 rng(71);
  Instance inst = random_instance(rng);
  inst.penalties = Penalties{};
  const EnergyBreakdown e = energy_total(inst.model, inst.data, inst.coeffs, inst.penalties);
  CHECK(e.total == e.data);
  CHECK(e.smoothness == 0.0);
  CHECK(e.ortho == 0.0);
}

TEST_CASE("smoothness and orthonormality are invariant under endpoint reversal") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 25; ++trial) {
    InstanceOptions opt;
    opt.varied_counts = trial % 2 == 0;
    opt.masked = trial % 3 == 0;
    const Instance inst = random_instance(rng, opt);
    const Instance flipped = reversed(inst);
    CHECK(energy_smoothness(inst.model, inst.penalties) ==
          doctest::Approx(energy_smoothness(flipped.model, inst.penalties)).epsilon(1e-13));
    CHECK(energy_ortho(inst.model, inst.penalties) ==
          doctest::Approx(energy_ortho(flipped.model, inst.penalties)).epsilon(1e-13));
  }
}

TEST_CASE("masked smoothness with an all-ones mask equals the unmasked value") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng);
    const MaskMatrix ones =
        MaskMatrix::Constant(inst.model.dim(), inst.model.endpoint_count(), 1.0);
    const PpcaModel masked(inst.grid, inst.model.means(), inst.model.bases(),
                           inst.model.basis_counts(), ones);
    CHECK(energy_smoothness(masked, inst.penalties) ==
          energy_smoothness(inst.model, inst.penalties));
  }
}

TEST_CASE("masked smoothness only penalizes dimensions active at both endpoints") {
  MaskMatrix masks(2, 2);
  masks << 1, 1, 1, 0;  // second dimension inactive at the right endpoint
  Mat means(2, 2);
  means << 0, 1, 5, 0;  // large difference hidden by the mask
  const PpcaModel model(BinGrid({0.0, 1.0}), means, {Mat::Zero(2, 1), Mat::Zero(2, 1)},
                        {1, 1}, masks);
  Penalties penalties;
  penalties.mean_smoothness = 1.0;
  CHECK(energy_smoothness(model, penalties) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("negative penalties are rejected") {
  Penalties penalties;
  penalties.mean_smoothness = -1.0;
  CHECK_THROWS_AS(penalties.validate(), ConfigError);
}

}  // TEST_SUITE
