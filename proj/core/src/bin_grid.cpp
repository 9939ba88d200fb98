#include "ppca/bin_grid.hpp"

#include <algorithm>
#include <sstream>

#include "ppca/errors.hpp"

namespace ppca {

namespace {

[[noreturn]] void throw_out_of_range(double theta, double lo, double hi) {
  std::ostringstream msg;
  msg << "parameter value " << theta << " outside grid range [" << lo << ", "
      << hi << "]";
  throw OutOfRangeError(msg.str());
}

}  // namespace

BinGrid::BinGrid(std::vector<double> endpoints) : endpoints_(std::move(endpoints)) {
  if (endpoints_.size() < 2) {
    throw ConfigError("grid needs at least two endpoints");
  }
  for (size_t b = 1; b < endpoints_.size(); ++b) {
    if (!(endpoints_[b - 1] < endpoints_[b])) {
      std::ostringstream msg;
      msg << "grid endpoints must be strictly increasing, got " << endpoints_[b - 1]
          << " before " << endpoints_[b];
      throw ConfigError(msg.str());
    }
  }
}

BinGrid BinGrid::uniform(double lo, double hi, int bins) {
  if (bins < 1) throw ConfigError("uniform grid needs at least one bin");
  if (!(lo < hi)) throw ConfigError("uniform grid needs lo < hi");
  std::vector<double> endpoints(static_cast<size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) {
    endpoints[static_cast<size_t>(b)] = lo + (hi - lo) * b / bins;
  }
  endpoints.front() = lo;
  endpoints.back() = hi;
  return BinGrid(std::move(endpoints));
}

int BinGrid::assign_bin(double theta) const {
  if (!contains(theta)) throw_out_of_range(theta, lo(), hi());
  if (theta == lo()) return 0;
  // First endpoint >= theta; a theta equal to an interior endpoint lands on
  // that endpoint and therefore resolves to the bin on its left.
  auto it = std::lower_bound(endpoints_.begin(), endpoints_.end(), theta);
  return static_cast<int>(it - endpoints_.begin()) - 1;
}

EndpointWeights BinGrid::compute_weights(double theta) const {
  const int bin = assign_bin(theta);
  const double lo_val = endpoint(bin);
  const double hi_val = endpoint(bin + 1);
  EndpointWeights w;
  w.lower = bin;
  w.upper = bin + 1;
  w.w_lower = (hi_val - theta) / (hi_val - lo_val);
  // Complement rather than the symmetric formula so the pair sums to one
  // exactly in floating point.
  w.w_upper = 1.0 - w.w_lower;
  return w;
}

}  // namespace ppca
