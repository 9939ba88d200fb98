#pragma once

#include <vector>

#include "ppca/types.hpp"

namespace ppca {

/// Barycentric weights of a parameter value within its bin.  The two
/// endpoint indices bracket the bin, `upper == lower + 1`, and the weights
/// sum to one exactly.
struct EndpointWeights {
  int lower = 0;
  int upper = 1;
  double w_lower = 1.0;
  double w_upper = 0.0;

  /// Weight carried by endpoint b: `w_lower`/`w_upper` on the bracketing
  /// endpoints and zero everywhere else.
  double weight_for(int b) const {
    if (b == lower) return w_lower;
    if (b == upper) return w_upper;
    return 0.0;
  }
};

/// Partition of the admissible parameter range into `bin_count()` contiguous
/// bins delimited by strictly increasing endpoint values.  Interior endpoints
/// are shared by the two bins they delimit.
class BinGrid {
 public:
  /// Builds a grid from explicit endpoint values (at least two, strictly
  /// increasing).  Throws ConfigError otherwise.
  explicit BinGrid(std::vector<double> endpoints);

  /// Equal-width grid with `bins` bins spanning [lo, hi].
  static BinGrid uniform(double lo, double hi, int bins);

  int endpoint_count() const { return static_cast<int>(endpoints_.size()); }
  int bin_count() const { return endpoint_count() - 1; }
  double endpoint(int b) const { return endpoints_[static_cast<size_t>(b)]; }
  const std::vector<double>& endpoints() const { return endpoints_; }
  double lo() const { return endpoints_.front(); }
  double hi() const { return endpoints_.back(); }

  bool contains(double theta) const { return theta >= lo() && theta <= hi(); }

  /// Index of the bin [endpoint(b), endpoint(b+1)] containing theta.
  /// A theta equal to an interior endpoint resolves to the bin on its left;
  /// theta == lo() resolves to bin 0.  Throws OutOfRangeError outside the
  /// grid (values are never extrapolated).
  int assign_bin(double theta) const;

  /// Endpoint weights for theta's bin: w_lower = (theta_u - theta) / width,
  /// w_upper = 1 - w_lower.
  EndpointWeights compute_weights(double theta) const;

 private:
  std::vector<double> endpoints_;
};

}  // namespace ppca
