#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "qclab/geometry.hpp"

namespace qclab {

using Matrix = Eigen::MatrixXcd;

/// Truncated multimode Fock space.  Basis states are occupation tuples
/// (n_0, ..., n_{M-1}) with n_m <= cutoff_m, enumerated lexicographically
/// with mode 0 most significant.
class FockSpace {
 public:
  static constexpr int kDefaultMaxDim = 4096;

  FockSpace() = default;
  FockSpace(int mode_count, std::vector<int> cutoffs, int max_dim = kDefaultMaxDim);

  int mode_count() const { return mode_count_; }
  int dim() const { return dim_; }
  int cutoff(int mode) const { return cutoffs_.at(static_cast<std::size_t>(mode)); }
  const std::vector<int>& cutoffs() const { return cutoffs_; }

  /// Occupation tuple of basis state `index`.
  std::vector<int> occupation(int index) const;
  /// Basis index of an occupation tuple.
  int index_of(const std::vector<int>& occ) const;

 private:
  int mode_count_ = 0;
  std::vector<int> cutoffs_;
  std::vector<int> strides_;
  int dim_ = 0;
};

FockSpace build_fock_space(int mode_count, const std::vector<int>& cutoffs,
                           int max_dim = FockSpace::kDefaultMaxDim);

struct LadderPair {
  Matrix annihilate;
  Matrix create;
};

/// Annihilation/creation matrices for one mode.
LadderPair ladder(const FockSpace& space, int mode_index);

/// Description of a test state.  Mixtures hold weighted sub-descriptions.
struct StateSpec {
  enum class Kind { Vacuum, Fock, Coherent, Thermal, Mixture, PureSuperposition };

  struct MixtureComponent {
    double weight = 0.0;
    // stored flat to keep the type copyable without indirection headaches
    std::shared_ptr<StateSpec> spec;
  };

  struct SuperpositionTerm {
    std::vector<int> occupations;
    Complex amplitude{0.0, 0.0};
  };

  Kind kind = Kind::Vacuum;
  std::vector<int> occupations;          // Fock
  std::vector<Complex> alphas;           // Coherent, one per mode
  std::vector<double> nbars;             // Thermal, one per mode
  std::vector<MixtureComponent> mixture; // Mixture
  std::vector<SuperpositionTerm> superposition;

  static StateSpec vacuum() { return StateSpec{}; }
  static StateSpec fock(std::vector<int> occ);
  static StateSpec coherent(std::vector<Complex> alphas);
  static StateSpec thermal(std::vector<double> nbars);
  static StateSpec mixture_of(std::vector<std::pair<double, StateSpec>> parts);
  static StateSpec superposition_of(std::vector<SuperpositionTerm> terms);
};

/// Density operator on a FockSpace.  Hermitian, unit trace, PSD
/// (validated on construction, eigenvalue check for dim <= 1024).
struct DensityOperator {
  FockSpace space;
  Matrix matrix;
};

/// Maximum probability mass a truncated coherent/thermal marginal may lose.
inline constexpr double kTruncationGuard = 1e-6;

DensityOperator make_state(const FockSpace& space, const StateSpec& spec);

/// Tr(rho * op) with a fixed row-major summation order.
Complex trace_expect(const DensityOperator& rho, const Matrix& op);

/// Tr(a * b) without forming the product, row-major deterministic order.
Complex trace_of_product(const Matrix& a, const Matrix& b);

}  // namespace qclab
