#include "qclab/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace qclab {

FockSpace::FockSpace(int mode_count, std::vector<int> cutoffs, int max_dim)
    : mode_count_(mode_count), cutoffs_(std::move(cutoffs)) {
  if (mode_count_ < 1) throw std::invalid_argument("mode_count must be >= 1");
  if (static_cast<int>(cutoffs_.size()) != mode_count_)
    throw std::invalid_argument("cutoffs size must equal mode_count");
  long long dim = 1;
  for (int c : cutoffs_) {
    if (c < 1) throw std::invalid_argument("cutoff must be >= 1");
    dim *= (c + 1);
    if (dim > max_dim) throw std::runtime_error("space too large");
  }
  dim_ = static_cast<int>(dim);
  strides_.assign(static_cast<std::size_t>(mode_count_), 1);
  for (int m = mode_count_ - 2; m >= 0; --m)
    strides_[static_cast<std::size_t>(m)] =
        strides_[static_cast<std::size_t>(m + 1)] * (cutoffs_[static_cast<std::size_t>(m + 1)] + 1);
}

std::vector<int> FockSpace::occupation(int index) const {
  std::vector<int> occ(static_cast<std::size_t>(mode_count_), 0);
  for (int m = 0; m < mode_count_; ++m) {
    occ[static_cast<std::size_t>(m)] = index / strides_[static_cast<std::size_t>(m)];
    index %= strides_[static_cast<std::size_t>(m)];
  }
  return occ;
}

int FockSpace::index_of(const std::vector<int>& occ) const {
  if (static_cast<int>(occ.size()) != mode_count_)
    throw std::invalid_argument("occupation tuple size mismatch");
  int idx = 0;
  for (int m = 0; m < mode_count_; ++m) {
    const int n = occ[static_cast<std::size_t>(m)];
    if (n < 0 || n > cutoffs_[static_cast<std::size_t>(m)])
      throw std::out_of_range("occupation exceeds cutoff");
    idx += n * strides_[static_cast<std::size_t>(m)];
  }
  return idx;
}

FockSpace build_fock_space(int mode_count, const std::vector<int>& cutoffs, int max_dim) {
  return FockSpace(mode_count, cutoffs, max_dim);
}

LadderPair ladder(const FockSpace& space, int mode_index) {
  if (mode_index < 0 || mode_index >= space.mode_count())
    throw std::out_of_range("mode index out of range");
  const int dim = space.dim();
  Matrix a = Matrix::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    std::vector<int> occ = space.occupation(col);
    const int n = occ[static_cast<std::size_t>(mode_index)];
    if (n == 0) continue;
    occ[static_cast<std::size_t>(mode_index)] = n - 1;
    a(space.index_of(occ), col) = std::sqrt(static_cast<double>(n));
  }
  return LadderPair{a, a.adjoint()};
}

StateSpec StateSpec::fock(std::vector<int> occ) {
  StateSpec s;
  s.kind = Kind::Fock;
  s.occupations = std::move(occ);
  return s;
}

StateSpec StateSpec::coherent(std::vector<Complex> alphas) {
  StateSpec s;
  s.kind = Kind::Coherent;
  s.alphas = std::move(alphas);
  return s;
}

StateSpec StateSpec::thermal(std::vector<double> nbars) {
  StateSpec s;
  s.kind = Kind::Thermal;
  s.nbars = std::move(nbars);
  return s;
}

StateSpec StateSpec::mixture_of(std::vector<std::pair<double, StateSpec>> parts) {
  StateSpec s;
  s.kind = Kind::Mixture;
  for (auto& [w, sub] : parts)
    s.mixture.push_back({w, std::make_shared<StateSpec>(std::move(sub))});
  return s;
}

StateSpec StateSpec::superposition_of(std::vector<SuperpositionTerm> terms) {
  StateSpec s;
  s.kind = Kind::PureSuperposition;
  s.superposition = std::move(terms);
  return s;
}

namespace {

// Normalized truncated coherent series; throws when the discarded tail
// exceeds the truncation guard.
Eigen::VectorXcd coherent_vector(Complex alpha, int cutoff) {
  Eigen::VectorXcd psi(cutoff + 1);
  Complex amp{1.0, 0.0};
  psi(0) = amp;
  for (int n = 1; n <= cutoff; ++n) {
    amp *= alpha / std::sqrt(static_cast<double>(n));
    psi(n) = amp;
  }
  const double kept = psi.squaredNorm();
  const double discarded = 1.0 - kept * std::exp(-std::norm(alpha));
  if (discarded > kTruncationGuard) throw std::runtime_error("cutoff too small");
  psi /= std::sqrt(kept);
  return psi;
}

Matrix thermal_matrix(double nbar, int cutoff) {
  if (nbar < 0.0) throw std::invalid_argument("thermal mean photon number must be >= 0");
  Eigen::VectorXd p(cutoff + 1);
  if (nbar == 0.0) {
    p.setZero();
    p(0) = 1.0;
  } else {
    const double ratio = nbar / (1.0 + nbar);
    double w = 1.0 / (1.0 + nbar);
    for (int n = 0; n <= cutoff; ++n) {
      p(n) = w;
      w *= ratio;
    }
    const double kept = p.sum();
    if (1.0 - kept > kTruncationGuard) throw std::runtime_error("cutoff too small");
    p /= kept;
  }
  Matrix rho = Matrix::Zero(cutoff + 1, cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) rho(n, n) = p(n);
  return rho;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix product_over_modes(const FockSpace& space,
                          const std::function<Matrix(int mode, int cutoff)>& factor) {
  Matrix rho = factor(0, space.cutoff(0));
  for (int m = 1; m < space.mode_count(); ++m) rho = kron(rho, factor(m, space.cutoff(m)));
  return rho;
}

void validate_density(const Matrix& rho) {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) throw std::runtime_error("density operator not Hermitian");
  const double tr = std::abs(rho.trace() - Complex{1.0, 0.0});
  if (tr > 1e-10) throw std::runtime_error("density operator trace != 1");
  if (rho.rows() <= 1024) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw std::runtime_error("density operator not positive semidefinite");
  }
}

}  // namespace

DensityOperator make_state(const FockSpace& space, const StateSpec& spec) {
  using Kind = StateSpec::Kind;
  const int M = space.mode_count();
  Matrix rho;
  switch (spec.kind) {
    case Kind::Vacuum: {
      rho = Matrix::Zero(space.dim(), space.dim());
      rho(0, 0) = 1.0;
      break;
    }
    case Kind::Fock: {
      const int idx = space.index_of(spec.occupations);  // validates against cutoffs
      rho = Matrix::Zero(space.dim(), space.dim());
      rho(idx, idx) = 1.0;
      break;
    }
    case Kind::Coherent: {
      if (static_cast<int>(spec.alphas.size()) != M)
        throw std::invalid_argument("coherent spec needs one alpha per mode");
      Eigen::VectorXcd psi = coherent_vector(spec.alphas[0], space.cutoff(0));
      for (int m = 1; m < M; ++m) {
        Eigen::VectorXcd pm = coherent_vector(spec.alphas[static_cast<std::size_t>(m)], space.cutoff(m));
        Eigen::VectorXcd next(psi.size() * pm.size());
        for (Eigen::Index i = 0; i < psi.size(); ++i)
          next.segment(i * pm.size(), pm.size()) = psi(i) * pm;
        psi = std::move(next);
      }
      rho = psi * psi.adjoint();
      break;
    }
    case Kind::Thermal: {
      if (static_cast<int>(spec.nbars.size()) != M)
        throw std::invalid_argument("thermal spec needs one nbar per mode");
      rho = product_over_modes(space, [&](int m, int cutoff) {
        return thermal_matrix(spec.nbars[static_cast<std::size_t>(m)], cutoff);
      });
      break;
    }
    case Kind::Mixture: {
      if (spec.mixture.empty()) throw std::invalid_argument("mixture needs components");
      double wsum = 0.0;
      for (const auto& c : spec.mixture) {
        if (c.weight < 0.0) throw std::invalid_argument("mixture weight must be >= 0");
        wsum += c.weight;
      }
      if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("mixture weights must sum to 1");
      rho = Matrix::Zero(space.dim(), space.dim());
      for (const auto& c : spec.mixture)
        rho += c.weight * make_state(space, *c.spec).matrix;
      break;
    }
    case Kind::PureSuperposition: {
      if (spec.superposition.empty())
        throw std::invalid_argument("superposition needs terms");
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.dim());
      for (const auto& term : spec.superposition)
        psi(space.index_of(term.occupations)) += term.amplitude;
      const double norm = psi.norm();
      if (norm == 0.0) throw std::invalid_argument("superposition has zero norm");
      psi /= norm;
      rho = psi * psi.adjoint();
      break;
    }
  }
  validate_density(rho);
  return DensityOperator{space, std::move(rho)};
}

Complex trace_expect(const DensityOperator& rho, const Matrix& op) {
  return trace_of_product(rho.matrix, op);
}

Complex trace_of_product(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows())
    throw std::invalid_argument("dimension mismatch in trace");
  Complex s{0.0, 0.0};
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) s += a(i, j) * b(j, i);
  return s;
}

}  // namespace qclab
