#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace hfock {

using Complex = std::complex<double>;

/// Highest retained Fock index. Matrices built against a cutoff have
/// dimension n_max + 1; nothing is ever re-truncated implicitly.
class FockCutoff {
 public:
  explicit FockCutoff(int n_max);

  int n_max() const { return n_max_; }
  int dim() const { return n_max_ + 1; }

  friend bool operator==(FockCutoff, FockCutoff) = default;

 private:
  int n_max_;
};

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-9;
inline constexpr double kEigenvalueFloor = -1e-9;

/// Hermitian, positive-semidefinite, unit-trace matrix on a truncated Fock basis.
///
/// Construction validates Hermiticity (to kHermitianTolerance), symmetrizes
/// exactly, rescales the trace to exactly one and rejects eigenvalues below
/// kEigenvalueFloor. Inputs whose trace is off by more than kTraceTolerance are rejected
/// rather than rescaled.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd elements);

  static DensityMatrix vacuum(FockCutoff cutoff);
  static DensityMatrix fock(int n, FockCutoff cutoff);

  int dim() const { return static_cast<int>(rho_.rows()); }
  FockCutoff cutoff() const { return FockCutoff(dim() - 1); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Complex operator()(int m, int n) const { return rho_(m, n); }

  Eigen::VectorXd diagonal() const { return rho_.diagonal().real(); }
  bool is_diagonal() const;

  /// Ascending eigenvalues with round-off in [kEigenvalueFloor, 0) clamped to 0.
  Eigen::VectorXd eigenvalues() const;

 private:
  Eigen::MatrixXcd rho_;
};

/// Normalized ket on a truncated Fock basis.
class PureState {
 public:
  explicit PureState(Eigen::VectorXcd amplitudes);

  static PureState fock(int n, FockCutoff cutoff);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  DensityMatrix to_density() const;

 private:
  Eigen::VectorXcd amplitudes_;
};

/// Truncated annihilation operator: entry (m, m+1) = sqrt(m+1).
Eigen::MatrixXcd annihilation_matrix(FockCutoff cutoff);

/// Photon-number operator diag(0, 1, ..., n_max).
Eigen::MatrixXcd number_matrix(FockCutoff cutoff);

/// Diagonal (phase-insensitive) state with the given photon-number
/// distribution. Shorter inputs are zero-padded up to the cutoff; the sum must
/// be within 1e-6 of one and is renormalized exactly.
DensityMatrix dm_from_diag(std::span<const double> probs, FockCutoff cutoff);

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2, clamped to [0, 1].
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

double mean_photon(const DensityMatrix& rho);

}  // namespace hfock
