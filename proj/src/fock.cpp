#include "hfock/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hfock/errors.hpp"

namespace hfock {

FockCutoff::FockCutoff(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw DomainError("Fock cutoff must be non-negative, got " + std::to_string(n_max));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd elements) : rho_(std::move(elements)) {
  if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) {
    throw DomainError("density matrix must be square and non-empty");
  }
  if (!rho_.allFinite()) throw DomainError("density matrix has non-finite entries");

  const double asym = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance) {
    throw DomainError("density matrix is not Hermitian (deviation " + std::to_string(asym) + ")");
  }
  rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();

  const double trace = rho_.trace().real();
  if (!(std::abs(trace - 1.0) <= kTraceTolerance)) {
    throw DomainError("density matrix trace " + std::to_string(trace) + " is not 1");
  }
  rho_ /= trace;

  const double lowest = eigenvalues().minCoeff();
  if (lowest < 0.0) {
    throw DomainError("density matrix has negative eigenvalue " + std::to_string(lowest));
  }
}

DensityMatrix DensityMatrix::vacuum(FockCutoff cutoff) { return fock(0, cutoff); }

DensityMatrix DensityMatrix::fock(int n, FockCutoff cutoff) {
  if (n < 0 || n > cutoff.n_max()) throw DomainError("Fock index outside cutoff");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff.dim(), cutoff.dim());
  m(n, n) = 1.0;
  return DensityMatrix(std::move(m));
}

bool DensityMatrix::is_diagonal() const {
  for (int i = 0; i < dim(); ++i) {
    for (int j = 0; j < dim(); ++j) {
      if (i != j && rho_(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::VectorXd values;
  if (is_diagonal()) {
    values = diagonal();
    std::sort(values.data(), values.data() + values.size());
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho_, Eigen::EigenvaluesOnly);
    values = solver.eigenvalues();
  }
  for (double& v : values) {
    if (v < kEigenvalueFloor) continue;  // reported as-is; caller decides
    if (v < 0.0) v = 0.0;
  }
  return values;
}

PureState::PureState(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw DomainError("empty state vector");
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw DomainError("state vector is not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
  }
}

PureState PureState::fock(int n, FockCutoff cutoff) {
  if (n < 0 || n > cutoff.n_max()) throw DomainError("Fock index outside cutoff");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cutoff.dim());
  v(n) = 1.0;
  return PureState(std::move(v));
}

DensityMatrix PureState::to_density() const {
  return DensityMatrix(amplitudes_ * amplitudes_.adjoint());
}

Eigen::MatrixXcd annihilation_matrix(FockCutoff cutoff) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff.dim(), cutoff.dim());
  for (int m = 0; m < cutoff.n_max(); ++m) a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
  return a;
}

Eigen::MatrixXcd number_matrix(FockCutoff cutoff) {
  Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(cutoff.dim(), cutoff.dim());
  for (int m = 0; m <= cutoff.n_max(); ++m) n(m, m) = static_cast<double>(m);
  return n;
}

DensityMatrix dm_from_diag(std::span<const double> probs, FockCutoff cutoff) {
  if (probs.size() > static_cast<std::size_t>(cutoff.dim())) {
    throw DomainError("photon-number distribution longer than the cutoff allows");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("photon-number probability must be non-negative");
    sum += p;
  }
  if (sum <= 0.0) throw DomainError("photon-number distribution sums to zero");
  if (std::abs(sum - 1.0) > 1e-6) {
    throw DomainError("photon-number distribution sums to " + std::to_string(sum));
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff.dim(), cutoff.dim());
  for (std::size_t n = 0; n < probs.size(); ++n) m(n, n) = probs[n] / sum;
  return DensityMatrix(std::move(m));
}

namespace {

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("fidelity: dimension mismatch");

  double root_sum = 0.0;
  if (a.is_diagonal() && b.is_diagonal()) {
    const Eigen::VectorXd p = a.diagonal();
    const Eigen::VectorXd q = b.diagonal();
    for (int n = 0; n < a.dim(); ++n) root_sum += std::sqrt(std::max(p(n), 0.0) * std::max(q(n), 0.0));
  } else {
    const Eigen::MatrixXcd sa = psd_sqrt(a.matrix());
    Eigen::MatrixXcd inner = sa * b.matrix() * sa;
    inner = 0.5 * (inner + inner.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(inner, Eigen::EigenvaluesOnly);
    for (double v : solver.eigenvalues()) root_sum += std::sqrt(std::max(v, 0.0));
  }
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

double mean_photon(const DensityMatrix& rho) {
  double mean = 0.0;
  for (int n = 1; n < rho.dim(); ++n) mean += n * rho(n, n).real();
  return mean;
}

}  // namespace hfock
