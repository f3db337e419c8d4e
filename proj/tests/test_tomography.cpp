#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "hfock/errors.hpp"
#include "hfock/herald.hpp"
#include "hfock/tomography.hpp"

using namespace hfock;

namespace {

double max_decrease(const std::vector<double>& history) {
  double worst = 0.0;
  for (std::size_t i = 1; i < history.size(); ++i) worst = std::max(worst, history[i - 1] - history[i]);
  return worst;
}

// Mean log-likelihood of a diagonal estimate, computed independently of the solver.
double diagonal_log_likelihood(const std::vector<QuadratureRecord>& rec, const DensityMatrix& rho) {
  double sum = 0.0;
  for (const auto& r : rec) sum += std::log(quad_pdf(rho, 0.0, r.x));
  return sum / static_cast<double>(rec.size());
}

DensityMatrix lossy_superposition(FockCutoff cutoff) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cutoff.dim());
  v(0) = 0.6;
  v(1) = Complex(0.0, 0.48);
  v(2) = 0.64;
  return apply_loss(PureState(v).to_density(), 0.9);
}

}  // namespace

TEST_CASE("projectors resolve the identity") {
  const FockCutoff cutoff(10);
  const double half = 12.0;
  const int points = 4001;
  const double h = 2.0 * half / (points - 1);
  for (double theta : {0.0, 0.7, 3.5}) {
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(cutoff.dim(), cutoff.dim());
    Eigen::VectorXd diag_sum = Eigen::VectorXd::Zero(cutoff.dim());
    for (int i = 0; i < points; ++i) {
      const double x = -half + i * h;
      const double w = (i == 0 || i == points - 1) ? 0.5 * h : h;
      sum += w * projector_weights(x, theta, cutoff);
      diag_sum += w * projector_diagonal(x, cutoff);
    }
    CHECK((sum - Eigen::MatrixXcd::Identity(cutoff.dim(), cutoff.dim())).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((diag_sum - Eigen::VectorXd::Ones(cutoff.dim())).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("projector trace against a state reproduces the quadrature density") {
  const auto rho = lossy_superposition(FockCutoff(4));
  for (double theta : {0.0, 1.1, 2.9}) {
    for (double x : {-1.3, 0.2, 0.9}) {
      const double p = (rho.matrix() * projector_weights(x, theta, FockCutoff(4))).trace().real();
      CHECK(p == doctest::Approx(quad_pdf(rho, theta, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("config validation") {
  MleConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.log_likelihood_tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.bin_width = -0.1;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("vacuum reconstruction") {
  const auto rec = sample_quadratures(DensityMatrix::vacuum(FockCutoff(10)), 10000, UniformRandomPhase{}, 1);
  const auto result = mle_reconstruct(rec, MleConfig{});
  CHECK(result.converged);
  CHECK(result.rho(0, 0).real() >= 0.98);
  CHECK(result.rho.is_diagonal());
  CHECK(max_decrease(result.log_likelihood_history) <= 1e-12);
}

TEST_CASE("reference single-photon distribution reconstruction") {
  const double p[] = {0.372, 0.620, 0.000, 0.008, 0.000};
  const auto truth = dm_from_diag(p, FockCutoff(10));
  const auto rec = sample_quadratures(truth, 10000, UniformRandomPhase{}, 2);
  const auto result = mle_reconstruct(rec, MleConfig{});
  CHECK(result.converged);
  // three binomial standard errors at N = 10000
  CHECK(std::abs(result.rho(1, 1).real() - 0.62) <= 0.0146);
  CHECK(fidelity(result.rho, truth) >= 0.99);
  CHECK(result.final_log_likelihood == doctest::Approx(diagonal_log_likelihood(rec, result.rho)).epsilon(1e-9));
  CHECK(result.final_log_likelihood >= diagonal_log_likelihood(rec, truth) - 1e-12);
}

TEST_CASE("estimate is a fixed point") {
  const double p[] = {0.38, 0.62};
  const auto rec = sample_quadratures(dm_from_diag(p, FockCutoff(10)), 3000, UniformRandomPhase{}, 3);
  const auto first = mle_reconstruct(rec, MleConfig{});
  REQUIRE(first.converged);
  const auto second = mle_reconstruct(rec, MleConfig{}, first.rho);
  CHECK(second.converged);
  CHECK(second.iterations_used <= 5);
  CHECK((second.rho.matrix() - first.rho.matrix()).cwiseAbs().maxCoeff() < 1e-3);
  CHECK(second.final_log_likelihood >= first.final_log_likelihood - 1e-12);
}

TEST_CASE("likelihood never decreases across a grid of states") {
  int k = 0;
  for (double eta : {0.3, 0.62, 1.0}) {
    for (int n : {1, 2, 3}) {
      const auto truth = apply_loss(DensityMatrix::fock(n, FockCutoff(8)), eta);
      const auto rec = sample_quadratures(truth, 2000, UniformRandomPhase{}, derive_seed(10, k++));
      MleConfig cfg;
      cfg.cutoff = FockCutoff(8);
      const auto result = mle_reconstruct(rec, cfg);
      CHECK(max_decrease(result.log_likelihood_history) <= 1e-12);
      CHECK(result.log_likelihood_history.size() == static_cast<std::size_t>(result.iterations_used) + 1);
    }
  }
}

TEST_CASE("full-phase reconstruction of a coherent superposition") {
  const FockCutoff cutoff(6);
  const auto truth = lossy_superposition(cutoff);
  const auto rec = sample_quadratures(truth, 4000, UniformRandomPhase{}, 4);
  MleConfig cfg;
  cfg.cutoff = cutoff;
  cfg.phase_insensitive = false;
  const auto result = mle_reconstruct(rec, cfg);
  CHECK(max_decrease(result.log_likelihood_history) <= 1e-12);
  CHECK_FALSE(result.rho.is_diagonal());
  CHECK(fidelity(result.rho, truth) >= 0.95);
  CHECK(std::abs(result.rho(0, 1) - truth(0, 1)) < 0.08);
}

TEST_CASE("binned likelihood approximates the unbinned estimate") {
  const double p[] = {0.38, 0.62};
  const auto truth = dm_from_diag(p, FockCutoff(10));
  const auto rec = sample_quadratures(truth, 5000, UniformRandomPhase{}, 6);
  MleConfig binned;
  binned.bin_width = 0.02;
  const auto a = mle_reconstruct(rec, MleConfig{});
  const auto b = mle_reconstruct(rec, binned);
  CHECK(std::abs(a.rho(1, 1).real() - b.rho(1, 1).real()) < 0.01);
}

TEST_CASE("iteration cap reports non-convergence") {
  const auto rec = sample_quadratures(DensityMatrix::fock(1, FockCutoff(10)), 2000, UniformRandomPhase{}, 7);
  MleConfig cfg;
  cfg.max_iterations = 2;
  const auto result = mle_reconstruct(rec, cfg);
  CHECK_FALSE(result.converged);
  CHECK(result.iterations_used == 2);
}

TEST_CASE("tomography input errors") {
  const auto rec = sample_quadratures(DensityMatrix::vacuum(FockCutoff(2)), 99, UniformRandomPhase{}, 8);
  CHECK_THROWS_AS(mle_reconstruct(rec, MleConfig{}), DomainError);

  auto wide = sample_quadratures(DensityMatrix::vacuum(FockCutoff(2)), 200, UniformRandomPhase{}, 8);
  wide[10].x = 100.0;
  CHECK_THROWS_AS(mle_reconstruct(wide, MleConfig{}), DomainError);

  wide[10].x = 0.0;
  CHECK_THROWS_AS(mle_reconstruct(wide, MleConfig{}, DensityMatrix::vacuum(FockCutoff(3))), DomainError);
}
