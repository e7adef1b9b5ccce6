#pragma once

#include <functional>
#include <vector>

#include "qclab/geometry.hpp"
#include "qclab/tensor.hpp"

namespace qclab {

/// One term of a plane-wave sum: coeff * exp(i (q.r - nu t)).
struct PlaneWaveTerm {
  Vec3 q{0.0, 0.0, 0.0};
  double nu = 0.0;
  Tensor coeff;
};

/// A tensor-valued function of a single spacetime point, stored as a finite
/// plane-wave sum.  Derivatives, products, and box integrals are exact.
/// Terms are kept merged on (q, nu) and in a deterministic order.
class PlaneWaveField {
 public:
  PlaneWaveField() = default;
  explicit PlaneWaveField(int rank) : rank_(rank) {}

  int rank() const { return rank_; }
  const std::vector<PlaneWaveTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add_term(const Vec3& q, double nu, const Tensor& coeff);

  Tensor evaluate(const SpacetimePoint& p) const;

  /// Termwise multiplication by i q_axis (or -i nu for the time axis).
  PlaneWaveField derivative(Axis axis) const;
  /// eps_jkl d_k F_l on the first index.
  PlaneWaveField curl_first() const;
  /// sum_j d_j F_j on the first index; rank decreases by one.
  PlaneWaveField divergence_first() const;

  PlaneWaveField conjugate() const;
  PlaneWaveField scaled(Complex s) const;
  PlaneWaveField operator+(const PlaneWaveField& o) const;
  PlaneWaveField operator-(const PlaneWaveField& o) const;

  /// Largest term coefficient norm; the scale used for relative residuals.
  double max_term_norm() const;

  /// exp(i q.r - i nu t) integrated exactly over the box [0,L]^3
  /// restricted to z in [0, z_hi]; full box when z_hi == L.
  /// Returns the integral as a function of t via the complex value at t.
  Complex integral_over_box(double box_length, double z_hi, double t) const;

  /// Exact integral of (r - r0)_axis * field over the full box at time t.
  Complex first_moment_integral(double box_length, const Vec3& r0, int axis,
                                double t) const;

  /// Exact integral over the plane z = z0 (x and y over [0,L]) at time t.
  Complex plane_integral_z(double box_length, double z0, double t) const;

 private:
  int rank_ = 0;
  std::vector<PlaneWaveTerm> terms_;
};

/// Pointwise bilinear map of two plane-wave fields: every term pair (a, b)
/// contributes combine(a.coeff, b.coeff) at (q_a + q_b, nu_a + nu_b).
PlaneWaveField bilinear_map(const PlaneWaveField& a, const PlaneWaveField& b,
                            int out_rank,
                            const std::function<Tensor(const Tensor&, const Tensor&)>& combine);

/// sum over all indices of conj(a) * b, as a rank-0 field.
PlaneWaveField contract_all_bilinear(const PlaneWaveField& a, const PlaneWaveField& b);

/// out[p, i] = sum_tail conj(a)[p, tail] * b[i, tail], as a rank-2 field.
PlaneWaveField contract_tail_bilinear(const PlaneWaveField& a, const PlaneWaveField& b);

/// out[k] = eps_klj sum_tail a[l, tail] * conj(b)[j, tail], as a rank-1 field.
PlaneWaveField eps_contract_bilinear(const PlaneWaveField& a, const PlaneWaveField& b);

}  // namespace qclab
