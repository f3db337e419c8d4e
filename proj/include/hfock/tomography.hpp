#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hfock/fock.hpp"
#include "hfock/homodyne.hpp"

namespace hfock {

struct MleConfig {
  FockCutoff cutoff{10};
  int max_iterations = 2000;
  /// Stop once the per-sample log-likelihood gain of an iteration drops below this.
  double log_likelihood_tolerance = 1e-9;
  /// Constrain the estimate to be diagonal and ignore theta.
  bool phase_insensitive = true;
  /// Group samples into bins of this width (in x, and in theta for full-phase
  /// mode) and weight each bin centre by its count.
  std::optional<double> bin_width;

  void validate() const;
};

inline constexpr std::size_t kMinTomographyRecords = 100;

/// Identity admixture applied after each normalization.
inline constexpr double kMixingFloor = 1e-12;

struct MleResult {
  DensityMatrix rho;
  int iterations_used = 0;
  double final_log_likelihood = 0.0;  // mean over samples
  bool converged = false;
  /// Mean log-likelihood of the initial state and of every accepted iterate.
  std::vector<double> log_likelihood_history;
  /// Iterations where the plain R rho R step lowered the likelihood and a
  /// diluted step was taken instead.
  int diluted_steps = 0;
};

/// Rank-one POVM element |x,theta><x,theta|, v_n = psi_n(x) e^{i n theta}.
Eigen::MatrixXcd projector_weights(double x, double theta, FockCutoff cutoff);

/// Diagonal of the phase-averaged projector, psi_n(x)^2.
Eigen::VectorXd projector_diagonal(double x, FockCutoff cutoff);

/// Iterative maximum-likelihood estimate, rho <- N[R rho R] with
/// R = (1/N) sum_j Pi_j / tr(rho Pi_j), started from the maximally mixed state
/// unless `initial` is given.
///
/// Each accepted iterate has a log-likelihood no lower than its predecessor:
/// when the plain step would decrease it, the diluted update
/// (1 + eps R) rho (1 + eps R) is used with eps halved until it ascends. If no
/// ascending step exists the estimate is at the numerical maximum and the run
/// is reported converged.
MleResult mle_reconstruct(std::span<const QuadratureRecord> records, const MleConfig& cfg,
                          const std::optional<DensityMatrix>& initial = std::nullopt);

}  // namespace hfock
