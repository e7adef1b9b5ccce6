#include "qclab/planewave.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qclab {

namespace {

constexpr double kZeroFrequencyTol = 1e-12;

bool key_less(const PlaneWaveTerm& a, const Vec3& q, double nu) {
  if (a.q.x() != q.x()) return a.q.x() < q.x();
  if (a.q.y() != q.y()) return a.q.y() < q.y();
  if (a.q.z() != q.z()) return a.q.z() < q.z();
  return a.nu < nu;
}

bool key_equal(const PlaneWaveTerm& a, const Vec3& q, double nu) {
  return a.q.x() == q.x() && a.q.y() == q.y() && a.q.z() == q.z() && a.nu == nu;
}

/// integral of exp(i q x) over [0, hi], with q an exact lattice multiple
/// of 2 pi / L; full-period integrals are returned exactly zero.
Complex line_integral(double q, double hi, double box_length) {
  if (std::abs(q) < kZeroFrequencyTol * 2.0 * M_PI / box_length) return Complex{hi, 0.0};
  const double m = q * box_length / (2.0 * M_PI);
  const long mi = std::lround(m);
  if (std::abs(hi - box_length) < 1e-15 * box_length && mi != 0)
    return Complex{0.0, 0.0};
  return (std::exp(kI * q * hi) - Complex{1.0, 0.0}) / (kI * q);
}

/// integral of (x - r0) exp(i q x) over [0, L], lattice q.
Complex line_first_moment(double q, double r0, double box_length) {
  if (std::abs(q) < kZeroFrequencyTol * 2.0 * M_PI / box_length)
    return Complex{box_length * (0.5 * box_length - r0), 0.0};
  return Complex{box_length, 0.0} / (kI * q);
}

}  // namespace

void PlaneWaveField::add_term(const Vec3& q, double nu, const Tensor& coeff) {
  if (coeff.rank() != rank_) throw std::invalid_argument("term rank mismatch");
  auto it = std::lower_bound(terms_.begin(), terms_.end(), 0,
                             [&](const PlaneWaveTerm& t, int) { return key_less(t, q, nu); });
  if (it != terms_.end() && key_equal(*it, q, nu)) {
    it->coeff += coeff;
  } else {
    terms_.insert(it, PlaneWaveTerm{q, nu, coeff});
  }
}

Tensor PlaneWaveField::evaluate(const SpacetimePoint& p) const {
  Tensor out(rank_);
  for (const auto& t : terms_) {
    const Complex phase = std::exp(kI * (t.q.dot(p.r) - t.nu * p.t));
    out += t.coeff * phase;
  }
  return out;
}

PlaneWaveField PlaneWaveField::derivative(Axis axis) const {
  PlaneWaveField out(rank_);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    const Complex factor = (axis == Axis::T) ? -kI * t.nu : kI * t.q(static_cast<int>(axis));
    out.terms_.push_back(PlaneWaveTerm{t.q, t.nu, t.coeff * factor});
  }
  return out;
}

PlaneWaveField PlaneWaveField::curl_first() const {
  PlaneWaveField out(rank_);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    const Vec3c iq = kI * t.q.cast<Complex>();
    out.terms_.push_back(PlaneWaveTerm{t.q, t.nu, t.coeff.cross_first(iq)});
  }
  return out;
}

PlaneWaveField PlaneWaveField::divergence_first() const {
  PlaneWaveField out(rank_ - 1);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    const Vec3c iq = kI * t.q.cast<Complex>();
    out.terms_.push_back(PlaneWaveTerm{t.q, t.nu, t.coeff.contract_first(iq)});
  }
  return out;
}

PlaneWaveField PlaneWaveField::conjugate() const {
  PlaneWaveField out(rank_);
  for (const auto& t : terms_) out.add_term(-t.q, -t.nu, t.coeff.conjugate());
  return out;
}

PlaneWaveField PlaneWaveField::scaled(Complex s) const {
  PlaneWaveField out(rank_);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) out.terms_.push_back(PlaneWaveTerm{t.q, t.nu, t.coeff * s});
  return out;
}

PlaneWaveField PlaneWaveField::operator+(const PlaneWaveField& o) const {
  if (rank_ != o.rank_) throw std::invalid_argument("field rank mismatch");
  PlaneWaveField out(rank_);
  for (const auto& t : terms_) out.add_term(t.q, t.nu, t.coeff);
  for (const auto& t : o.terms_) out.add_term(t.q, t.nu, t.coeff);
  return out;
}

PlaneWaveField PlaneWaveField::operator-(const PlaneWaveField& o) const {
  return *this + o.scaled(Complex{-1.0, 0.0});
}

double PlaneWaveField::max_term_norm() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, t.coeff.frobenius_norm());
  return m;
}

Complex PlaneWaveField::integral_over_box(double box_length, double z_hi, double t) const {
  if (rank_ != 0)
    throw std::invalid_argument("integral_over_box on scalar fields only; contract first");
  Complex total{0.0, 0.0};
  for (const auto& term : terms_) {
    const Complex ix = line_integral(term.q.x(), box_length, box_length);
    const Complex iy = line_integral(term.q.y(), box_length, box_length);
    const Complex iz = line_integral(term.q.z(), z_hi, box_length);
    total += term.coeff[0] * ix * iy * iz * std::exp(-kI * term.nu * t);
  }
  return total;
}

Complex PlaneWaveField::first_moment_integral(double box_length, const Vec3& r0,
                                              int axis, double t) const {
  if (rank_ != 0)
    throw std::invalid_argument("first_moment_integral on scalar fields only");
  Complex total{0.0, 0.0};
  for (const auto& term : terms_) {
    Complex prod{1.0, 0.0};
    for (int b = 0; b < 3; ++b) {
      if (b == axis)
        prod *= line_first_moment(term.q(b), r0(b), box_length);
      else
        prod *= line_integral(term.q(b), box_length, box_length);
    }
    total += term.coeff[0] * prod * std::exp(-kI * term.nu * t);
  }
  return total;
}

Complex PlaneWaveField::plane_integral_z(double box_length, double z0, double t) const {
  if (rank_ != 0)
    throw std::invalid_argument("plane_integral_z on scalar fields only");
  Complex total{0.0, 0.0};
  for (const auto& term : terms_) {
    const Complex ix = line_integral(term.q.x(), box_length, box_length);
    const Complex iy = line_integral(term.q.y(), box_length, box_length);
    total += term.coeff[0] * ix * iy * std::exp(kI * term.q.z() * z0) *
             std::exp(-kI * term.nu * t);
  }
  return total;
}

PlaneWaveField bilinear_map(const PlaneWaveField& a, const PlaneWaveField& b,
                            int out_rank,
                            const std::function<Tensor(const Tensor&, const Tensor&)>& combine) {
  PlaneWaveField out(out_rank);
  for (const auto& ta : a.terms())
    for (const auto& tb : b.terms())
      out.add_term(ta.q + tb.q, ta.nu + tb.nu, combine(ta.coeff, tb.coeff));
  return out;
}

PlaneWaveField contract_all_bilinear(const PlaneWaveField& a, const PlaneWaveField& b) {
  return bilinear_map(a.conjugate(), b, 0, [](const Tensor& ca, const Tensor& cb) {
    Tensor out(0);
    out[0] = ca.contract_all(cb);
    return out;
  });
}

PlaneWaveField contract_tail_bilinear(const PlaneWaveField& a, const PlaneWaveField& b) {
  return bilinear_map(a.conjugate(), b, 2, [](const Tensor& ca, const Tensor& cb) {
    return Tensor::contract_tail(ca, cb);
  });
}

PlaneWaveField eps_contract_bilinear(const PlaneWaveField& a, const PlaneWaveField& b) {
  return bilinear_map(a, b.conjugate(), 1, [](const Tensor& ca, const Tensor& cb) {
    const Tensor p = Tensor::contract_tail(ca, cb);  // p[l, j] = sum_tail a[l]*conj(b)[j]
    Tensor out(1);
    for (int k = 0; k < 3; ++k) {
      const int l = (k + 1) % 3, j = (k + 2) % 3;
      out.at({k}) = p.at({l, j}) - p.at({j, l});
    }
    return out;
  });
}

}  // namespace qclab
