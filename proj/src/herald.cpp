#include "hfock/herald.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hfock/errors.hpp"

namespace hfock {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

void require_efficiency(double eta, const char* what) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(eta));
  }
}

}  // namespace

HeraldScenario::HeraldScenario(double r, double eta_i, double eta_s, int herald_n, FockCutoff cutoff,
                               std::string label)
    : r_(r), eta_i_(eta_i), eta_s_(eta_s), herald_n_(herald_n), cutoff_(cutoff), label_(std::move(label)) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("squeezing parameter r must be >= 0");
  require_efficiency(eta_i, "eta_i");
  require_efficiency(eta_s, "eta_s");
  if (herald_n < 0 || herald_n > cutoff.n_max()) {
    throw DomainError("herald_n must lie in [0, n_max]");
  }
  if (truncation_residual() >= kMaxTruncationResidual) {
    throw DomainError("Fock cutoff " + std::to_string(cutoff.n_max()) + " too small for r = " + std::to_string(r) +
                      " (truncated squeezed-vacuum weight " + std::to_string(truncation_residual()) + ")");
  }
}

double HeraldScenario::truncation_residual() const {
  return std::pow(std::tanh(r_), 2.0 * (cutoff_.n_max() + 1));
}

std::vector<double> tmsv_coefficients(double r, FockCutoff cutoff) {
  if (!(r >= 0.0)) throw DomainError("squeezing parameter r must be >= 0");
  std::vector<double> c(cutoff.dim());
  const double t = std::tanh(r);
  c[0] = 1.0 / std::cosh(r);
  for (int n = 1; n < cutoff.dim(); ++n) c[n] = c[n - 1] * t;
  return c;
}

PnrPovmElement pnr_povm(int herald_n, double eta_i, FockCutoff cutoff) {
  if (herald_n < 0 || herald_n > cutoff.n_max()) throw DomainError("herald_n must lie in [0, n_max]");
  require_efficiency(eta_i, "eta_i");
  PnrPovmElement element{herald_n, std::vector<double>(cutoff.dim(), 0.0)};
  for (int m = herald_n; m < cutoff.dim(); ++m) {
    element.weights[m] = binomial(m, herald_n) * std::pow(eta_i, herald_n) * std::pow(1.0 - eta_i, m - herald_n);
  }
  return element;
}

double herald_probability(const HeraldScenario& scenario) {
  const auto c = tmsv_coefficients(scenario.r(), scenario.cutoff());
  const auto povm = pnr_povm(scenario.herald_n(), scenario.eta_i(), scenario.cutoff());
  double p = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) p += c[m] * c[m] * povm.weights[m];
  return p;
}

DensityMatrix apply_loss(const DensityMatrix& rho, double eta) {
  require_efficiency(eta, "loss transmission eta");
  const int dim = rho.dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  // Kraus sum: rho'_{ab} = sum_k sqrt(C(a+k,k) C(b+k,k)) eta^{(a+b)/2} (1-eta)^k rho_{a+k,b+k}
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      Complex acc = 0.0;
      for (int k = 0; a + k < dim && b + k < dim; ++k) {
        const double w = std::sqrt(binomial(a + k, k) * binomial(b + k, k)) * std::pow(eta, 0.5 * (a + b)) *
                         std::pow(1.0 - eta, k);
        acc += w * rho(a + k, b + k);
      }
      out(a, b) = acc;
    }
  }
  return DensityMatrix(std::move(out));
}

HeraldedState conditional_signal_state(const HeraldScenario& scenario) {
  const auto c = tmsv_coefficients(scenario.r(), scenario.cutoff());
  const auto povm = pnr_povm(scenario.herald_n(), scenario.eta_i(), scenario.cutoff());

  // Schmidt-diagonal input: conditioning keeps the signal state diagonal.
  std::vector<double> weights(c.size());
  double probability = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) {
    weights[m] = c[m] * c[m] * povm.weights[m];
    probability += weights[m];
  }
  if (probability < 1e-15) {
    throw UnheraldableError("herald outcome n = " + std::to_string(scenario.herald_n()) +
                            " has probability " + std::to_string(probability));
  }
  for (double& w : weights) w /= probability;

  return {apply_loss(dm_from_diag(weights, scenario.cutoff()), scenario.eta_s()), probability};
}

}  // namespace hfock
