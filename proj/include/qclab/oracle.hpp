#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qclab/correlator.hpp"

namespace qclab {

/// Brute-force correlator: explicit operator product in slot order, traced
/// against rho.  Shares only the Fock-space and mode machinery with the
/// main path; assembles its own operators and never touches the
/// CorrelatorField representation.
Tensor dense_correlator(const DensityOperator& rho, const FockSpace& space,
                        const ModeSet& ms, const SlotPattern& pattern,
                        const std::vector<SpacetimePoint>& points);

struct FDScheme {
  int order = 2;  // 2 or 4, central
  double h = 1e-2;
  bool richardson = false;
};

struct FDResult {
  Tensor value;
  bool h_too_large = false;
  std::optional<Tensor> error_estimate;  // richardson only
};

using TensorFunction = std::function<Tensor(const SpacetimePoint&)>;

/// Central-difference derivative along `axis`.  lambda_min > 0 enables the
/// step-size warning (h should be <= lambda_min / 20).
FDResult fd_derivative(const TensorFunction& f, const SpacetimePoint& p, Axis axis,
                       const FDScheme& scheme, double lambda_min = 0.0);

/// Uniform-grid rectangle rule over the periodic box; exact for integrands
/// band-limited below the Nyquist bound.
Complex grid_integral(const std::function<Complex(const Vec3&)>& f, double box_length,
                      int points_per_axis);

struct OrderFit {
  double slope = 0.0;
  bool floor_reached = false;
};

/// Least-squares slope of log(residual) against log(h).
OrderFit convergence_order(const std::vector<std::pair<double, double>>& samples);

}  // namespace qclab
