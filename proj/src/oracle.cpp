#include "qclab/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace qclab {

namespace {

// Operators assembled locally so the oracle path stays independent of
// field_ops and the CorrelatorField machinery.
std::array<Matrix, 3> slot_operator(const FockSpace& space, const ModeSet& ms,
                                    const Slot& slot, const SpacetimePoint& p) {
  const int dim = space.dim();
  std::array<Matrix, 3> out{Matrix::Zero(dim, dim), Matrix::Zero(dim, dim),
                            Matrix::Zero(dim, dim)};
  for (int mu = 0; mu < ms.size(); ++mu) {
    const Vec3c f =
        mode_function(ms, ms.modes[static_cast<std::size_t>(mu)], slot.field, slot.sign, p);
    const LadderPair lp = ladder(space, mu);
    const Matrix& op = (slot.sign == FreqSign::Plus) ? lp.annihilate : lp.create;
    for (int j = 0; j < 3; ++j) out[static_cast<std::size_t>(j)] += f(j) * op;
  }
  return out;
}

}  // namespace

Tensor dense_correlator(const DensityOperator& rho, const FockSpace& space,
                        const ModeSet& ms, const SlotPattern& pattern,
                        const std::vector<SpacetimePoint>& points) {
  if (!pattern.normal_ordered()) throw std::invalid_argument("normal ordering violated");
  if (points.size() != pattern.slots.size())
    throw std::invalid_argument("one point per slot required");
  if (rho.matrix.rows() != space.dim())
    throw std::invalid_argument("dimension mismatch");

  const int rank = pattern.rank();
  std::vector<std::array<Matrix, 3>> ops;
  ops.reserve(static_cast<std::size_t>(rank));
  for (int s = 0; s < rank; ++s)
    ops.push_back(slot_operator(space, ms, pattern.slots[static_cast<std::size_t>(s)],
                                points[static_cast<std::size_t>(s)]));

  Tensor out(rank);
  // split into left products (rho O_1 O_2) and right products (O_3 O_4),
  // then a cheap elementwise trace for each Cartesian tuple
  std::vector<Matrix> left(3);
  for (int j = 0; j < 3; ++j) left[static_cast<std::size_t>(j)] = rho.matrix * ops[0][static_cast<std::size_t>(j)];
  if (rank == 2) {
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        out.at({j, k}) = trace_of_product(left[static_cast<std::size_t>(j)],
                                          ops[1][static_cast<std::size_t>(k)]);
    return out;
  }
  std::vector<Matrix> left2(9), right(9);
  for (int j = 0; j < 3; ++j)
    for (int m = 0; m < 3; ++m)
      left2[static_cast<std::size_t>(j * 3 + m)] =
          left[static_cast<std::size_t>(j)] * ops[1][static_cast<std::size_t>(m)];
  for (int n = 0; n < 3; ++n)
    for (int o = 0; o < 3; ++o)
      right[static_cast<std::size_t>(n * 3 + o)] =
          ops[2][static_cast<std::size_t>(n)] * ops[3][static_cast<std::size_t>(o)];
  for (int j = 0; j < 3; ++j)
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n)
        for (int o = 0; o < 3; ++o)
          out.at({j, m, n, o}) =
              trace_of_product(left2[static_cast<std::size_t>(j * 3 + m)],
                               right[static_cast<std::size_t>(n * 3 + o)]);
  return out;
}

namespace {

SpacetimePoint shifted(const SpacetimePoint& p, Axis axis, double delta) {
  SpacetimePoint out = p;
  if (axis == Axis::T)
    out.t += delta;
  else
    out.r(static_cast<int>(axis)) += delta;
  return out;
}

}  // namespace

FDResult fd_derivative(const TensorFunction& f, const SpacetimePoint& p, Axis axis,
                       const FDScheme& scheme, double lambda_min) {
  if (scheme.h <= 0.0) throw std::invalid_argument("step must be positive");
  if (scheme.order != 2 && scheme.order != 4)
    throw std::invalid_argument("central scheme order must be 2 or 4");
  FDResult result;
  result.h_too_large = (lambda_min > 0.0 && scheme.h > lambda_min / 20.0);

  auto central2 = [&](double h) {
    Tensor d = f(shifted(p, axis, h)) - f(shifted(p, axis, -h));
    return d * Complex{1.0 / (2.0 * h), 0.0};
  };

  if (scheme.order == 2) {
    result.value = central2(scheme.h);
    if (scheme.richardson) {
      const Tensor d_half = central2(0.5 * scheme.h);
      const Tensor diff = d_half - result.value;
      result.error_estimate = diff * Complex{1.0 / 3.0, 0.0};
      result.value = d_half + *result.error_estimate;
    }
    return result;
  }

  const double h = scheme.h;
  Tensor d = (f(shifted(p, axis, -2.0 * h)) - f(shifted(p, axis, 2.0 * h))) +
             (f(shifted(p, axis, h)) - f(shifted(p, axis, -h))) * Complex{8.0, 0.0};
  result.value = d * Complex{1.0 / (12.0 * h), 0.0};
  if (scheme.richardson) {
    FDScheme half = scheme;
    half.h = 0.5 * h;
    half.richardson = false;
    const Tensor d_half = fd_derivative(f, p, axis, half, 0.0).value;
    result.error_estimate = (d_half - result.value) * Complex{1.0 / 15.0, 0.0};
    result.value = d_half + *result.error_estimate;
  }
  return result;
}

Complex grid_integral(const std::function<Complex(const Vec3&)>& f, double box_length,
                      int points_per_axis) {
  if (points_per_axis < 2) throw std::invalid_argument("need at least 2 points per axis");
  const double step = box_length / points_per_axis;
  const double weight = step * step * step;
  Complex total{0.0, 0.0};
  for (int i = 0; i < points_per_axis; ++i)
    for (int j = 0; j < points_per_axis; ++j)
      for (int k = 0; k < points_per_axis; ++k)
        total += f(Vec3(i * step, j * step, k * step));
  return total * weight;
}

OrderFit convergence_order(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) throw std::invalid_argument("need at least 3 samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].first >= samples[i - 1].first)
      throw std::invalid_argument("steps must be strictly decreasing");

  double max_residual = 0.0;
  for (const auto& [h, r] : samples) max_residual = std::max(max_residual, r);
  if (max_residual <= 1e-14) return OrderFit{0.0, true};

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(samples.size());
  for (const auto& [h, r] : samples) {
    const double x = std::log(h);
    const double y = std::log(std::max(r, 1e-16 * max_residual));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return OrderFit{slope, false};
}

}  // namespace qclab
