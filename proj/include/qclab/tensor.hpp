#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qclab/geometry.hpp"

namespace qclab {

/// Dense complex tensor over Cartesian indices (extent 3 each), rank 0..4.
/// Small enough (<= 81 entries) that value semantics are free.
class Tensor {
 public:
  Tensor() : rank_(0), data_(1, Complex{0.0, 0.0}) {}
  explicit Tensor(int rank) : rank_(rank), data_(size_for(rank), Complex{0.0, 0.0}) {
    if (rank < 0 || rank > 4) throw std::invalid_argument("tensor rank must be 0..4");
  }

  static std::size_t size_for(int rank) {
    std::size_t s = 1;
    for (int i = 0; i < rank; ++i) s *= 3;
    return s;
  }

  int rank() const { return rank_; }
  std::size_t size() const { return data_.size(); }

  Complex& operator[](std::size_t flat) { return data_[flat]; }
  const Complex& operator[](std::size_t flat) const { return data_[flat]; }

  /// Flat index of (i0, i1, ...), row-major with i0 most significant.
  std::size_t flat(std::initializer_list<int> idx) const {
    std::size_t f = 0;
    for (int i : idx) f = f * 3 + static_cast<std::size_t>(i);
    return f;
  }

  Complex& at(std::initializer_list<int> idx) { return data_[flat(idx)]; }
  const Complex& at(std::initializer_list<int> idx) const { return data_[flat(idx)]; }

  Tensor& operator+=(const Tensor& o) {
    check_rank(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    check_rank(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Tensor& operator*=(Complex s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, Complex s) { return a *= s; }
  friend Tensor operator*(Complex s, Tensor a) { return a *= s; }

  Tensor conjugate() const {
    Tensor out(rank_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = std::conj(data_[i]);
    return out;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Contract the full index set against another tensor of the same rank:
  /// sum_idx a[idx] * b[idx].  No conjugation is applied here.
  Complex contract_all(const Tensor& o) const {
    check_rank(o);
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < data_.size(); ++i) s += data_[i] * o.data_[i];
    return s;
  }

  /// Contract all indices except the first of both operands:
  /// out[p, i] = sum_rest a[p, rest] * b[i, rest].
  static Tensor contract_tail(const Tensor& a, const Tensor& b) {
    a.check_rank(b);
    if (a.rank_ < 1) throw std::invalid_argument("contract_tail needs rank >= 1");
    const std::size_t tail = a.size() / 3;
    Tensor out(2);
    for (int p = 0; p < 3; ++p)
      for (int i = 0; i < 3; ++i) {
        Complex s{0.0, 0.0};
        for (std::size_t r = 0; r < tail; ++r)
          s += a.data_[static_cast<std::size_t>(p) * tail + r] *
               b.data_[static_cast<std::size_t>(i) * tail + r];
        out.at({p, i}) = s;
      }
    return out;
  }

  /// Replace the first index by its contraction with a fixed 3-vector:
  /// out[rest] = sum_j v[j] * a[j, rest].  Rank decreases by one.
  Tensor contract_first(const Vec3c& v) const {
    if (rank_ < 1) throw std::invalid_argument("contract_first needs rank >= 1");
    Tensor out(rank_ - 1);
    const std::size_t tail = size() / 3;
    for (std::size_t r = 0; r < tail; ++r) {
      Complex s{0.0, 0.0};
      for (int j = 0; j < 3; ++j) s += v(j) * data_[static_cast<std::size_t>(j) * tail + r];
      out.data_[r] = s;
    }
    return out;
  }

  /// Cross product on the first index: out[j, rest] = eps_jkl v[k] a[l, rest].
  Tensor cross_first(const Vec3c& v) const {
    if (rank_ < 1) throw std::invalid_argument("cross_first needs rank >= 1");
    Tensor out(rank_);
    const std::size_t tail = size() / 3;
    for (int j = 0; j < 3; ++j) {
      const int k1 = (j + 1) % 3, l1 = (j + 2) % 3;
      for (std::size_t r = 0; r < tail; ++r) {
        out.data_[static_cast<std::size_t>(j) * tail + r] =
            v(k1) * data_[static_cast<std::size_t>(l1) * tail + r] -
            v(l1) * data_[static_cast<std::size_t>(k1) * tail + r];
      }
    }
    return out;
  }

  /// Outer product of 3-vectors, one per slot, in slot order.
  static Tensor outer(const std::vector<Vec3c>& vectors) {
    const int rank = static_cast<int>(vectors.size());
    Tensor out(rank);
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t f = 0; f < out.size(); ++f) {
      std::size_t rem = f;
      for (int s = rank - 1; s >= 0; --s) {
        idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % 3);
        rem /= 3;
      }
      Complex v{1.0, 0.0};
      for (int s = 0; s < rank; ++s) v *= vectors[static_cast<std::size_t>(s)](idx[static_cast<std::size_t>(s)]);
      out.data_[f] = v;
    }
    return out;
  }

  const std::vector<Complex>& data() const { return data_; }

 private:
  void check_rank(const Tensor& o) const {
    if (rank_ != o.rank_) throw std::invalid_argument("tensor rank mismatch");
  }

  int rank_;
  std::vector<Complex> data_;
};

}  // namespace qclab
