#include "ppca/synth.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ppca/errors.hpp"
#include "ppca/random.hpp"

namespace ppca {

namespace {

constexpr double kThetaLo = 0.0;
constexpr double kThetaHi = 360.0;

void check_theta(double theta) {
  if (theta < kThetaLo || theta > kThetaHi) {
    std::ostringstream msg;
    msg << "parameter value " << theta << " outside synthetic range [" << kThetaLo
        << ", " << kThetaHi << "]";
    throw OutOfRangeError(msg.str());
  }
}

}  // namespace

SynthSpec::SynthSpec() : thetas(default_synthetic_thetas()) {}

void SynthSpec::validate() const {
  if (thetas.empty()) throw ConfigError("synthetic spec needs at least one parameter value");
  for (double t : thetas) check_theta(t);
  if (coeff_range < 0.0 || noise_range < 0.0) {
    throw ConfigError("coefficient and noise ranges must be nonnegative");
  }
}

std::vector<double> default_synthetic_thetas() {
  std::vector<double> thetas;
  for (int t = 4; t <= 356; t += 8) thetas.push_back(static_cast<double>(t));
  return thetas;
}

BinGrid default_synthetic_grid() { return BinGrid::uniform(kThetaLo, kThetaHi, 14); }

Vec true_mean(double theta) {
  check_theta(theta);
  constexpr double pi = std::numbers::pi;
  Vec mu(3);
  mu[0] = std::sin(7.0 * pi * theta / 720.0);
  mu[1] = -91.0 * theta / 1800.0 + 8.0;
  mu[2] = std::sin(7.0 * pi * theta / 576.0 + 0.6);
  return mu;
}

Mat true_basis(double theta) {
  check_theta(theta);
  constexpr double pi = std::numbers::pi;
  const double tan_arg = 7.0 * pi * theta / 4860.0 - 0.8;
  // On [0, 360] the tangent argument stays inside (-pi/2, pi/2), so there is
  // no pole to hit.
  assert(tan_arg > -pi / 2.0 && tan_arg < pi / 2.0);
  Mat p(3, 2);
  p(0, 0) = std::sin(7.0 * pi * theta / 1080.0 + 0.4);
  p(1, 0) = std::tan(tan_arg);
  p(2, 0) = 49.0 * theta / 1800.0 - 1.1;
  p(0, 1) = std::cos(7.0 * pi * theta / 972.0);
  p(1, 1) = std::cos(7.0 * pi * theta / 576.0 - 0.4);
  p(2, 1) = 7.0 * theta / 600.0 + 1.4;
  return p;
}

SyntheticData generate_dataset(const SynthSpec& spec) {
  spec.validate();
  const int n = static_cast<int>(spec.thetas.size());
  Mat observations(3, n);
  Mat coefficients(2, n);
  std::mt19937_64 rng(spec.seed);
  for (int i = 0; i < n; ++i) {
    const double theta = spec.thetas[static_cast<size_t>(i)];
    Vec beta(2);
    beta[0] = uniform_in(rng, -spec.coeff_range, spec.coeff_range);
    beta[1] = uniform_in(rng, -spec.coeff_range, spec.coeff_range);
    Vec x = true_mean(theta) + true_basis(theta) * beta;
    for (int k = 0; k < 3; ++k) {
      x[k] += uniform_in(rng, -spec.noise_range, spec.noise_range);
    }
    observations.col(i) = x;
    coefficients.col(i) = beta;
  }
  return SyntheticData{Dataset(std::move(observations), spec.thetas), std::move(coefficients)};
}

double mean_recovery_sse(const MeanEvaluator& estimated,
                         const std::vector<double>& thetas,
                         const MeanEvaluator& truth) {
  double sum = 0.0;
  for (double theta : thetas) {
    sum += (estimated(theta) - truth(theta)).squaredNorm();
  }
  return sum;
}

double mean_recovery_sse(const PpcaModel& model, const std::vector<double>& thetas) {
  return mean_recovery_sse([&](double t) { return model.interpolate_mean(t); }, thetas,
                           [](double t) { return true_mean(t); });
}

double subspace_recovery_error(const BasisEvaluator& estimated,
                               const std::vector<double>& thetas,
                               const BasisEvaluator& truth) {
  double sum = 0.0;
  for (double theta : thetas) {
    const Mat basis = estimated(theta);
    const Mat target = truth(theta);
    Eigen::ColPivHouseholderQR<Mat> qr(basis);
    const int rank = static_cast<int>(qr.rank());
    if (rank < target.cols()) {
      std::ostringstream msg;
      msg << "estimated basis at parameter value " << theta << " has rank " << rank
          << " but " << target.cols() << " true vectors were requested";
      throw DimensionError(msg.str());
    }
    const Mat q = qr.householderQ() * Mat::Identity(basis.rows(), rank);
    for (int k = 0; k < target.cols(); ++k) {
      const Vec residual = target.col(k) - q * (q.transpose() * target.col(k));
      sum += residual.squaredNorm();
    }
  }
  return sum;
}

double subspace_recovery_error(const PpcaModel& model, const std::vector<double>& thetas) {
  return subspace_recovery_error([&](double t) { return model.interpolate_basis(t); },
                                 thetas, [](double t) { return true_basis(t); });
}

}  // namespace ppca
