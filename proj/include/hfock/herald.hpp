#pragma once

#include <string>
#include <vector>

#include "hfock/fock.hpp"

namespace hfock {

/// Maximum two-mode-squeezed-vacuum weight allowed beyond the Fock cutoff.
inline constexpr double kMaxTruncationResidual = 1e-6;

/// One heralded-generation configuration.
///
/// The whole idler chain (filtering, coupling, detector efficiency) is one
/// transmission `eta_i`; the signal chain including homodyne efficiency is
/// `eta_s`. Squeezing is given directly as `r`.
class HeraldScenario {
 public:
  HeraldScenario(double r, double eta_i, double eta_s, int herald_n, FockCutoff cutoff,
                 std::string label = {});

  double r() const { return r_; }
  double eta_i() const { return eta_i_; }
  double eta_s() const { return eta_s_; }
  int herald_n() const { return herald_n_; }
  FockCutoff cutoff() const { return cutoff_; }
  const std::string& label() const { return label_; }

  /// Squeezed-vacuum weight lost to truncation, tanh^{2(n_max+1)}(r).
  double truncation_residual() const;

 private:
  double r_;
  double eta_i_;
  double eta_s_;
  int herald_n_;
  FockCutoff cutoff_;
  std::string label_;
};

/// Diagonal POVM element of a lossy photon-number-resolving detector.
struct PnrPovmElement {
  int herald_n;
  std::vector<double> weights;  // weights[m] = P(report herald_n | m photons)
};

/// Schmidt coefficients c_n = tanh^n(r) / cosh(r), n = 0..n_max.
std::vector<double> tmsv_coefficients(double r, FockCutoff cutoff);

PnrPovmElement pnr_povm(int herald_n, double eta_i, FockCutoff cutoff);

double herald_probability(const HeraldScenario& scenario);

/// Beamsplitter-to-vacuum loss channel with transmission eta.
DensityMatrix apply_loss(const DensityMatrix& rho, double eta);

struct HeraldedState {
  DensityMatrix state;
  double probability;
};

/// Signal-mode state conditioned on the idler herald, after signal loss.
/// Throws UnheraldableError when the herald probability is below 1e-15.
HeraldedState conditional_signal_state(const HeraldScenario& scenario);

}  // namespace hfock
