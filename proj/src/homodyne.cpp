#include "hfock/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hfock/errors.hpp"

namespace hfock {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

}  // namespace

Eigen::VectorXd hermite_functions(double x, int n_max) {
  if (n_max < 0) throw DomainError("hermite_functions: n_max must be >= 0");
  Eigen::VectorXd psi(n_max + 1);
  psi(0) = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
  if (n_max >= 1) psi(1) = std::numbers::sqrt2 * x * psi(0);
  for (int n = 1; n < n_max; ++n) {
    psi(n + 1) = std::sqrt(2.0 / (n + 1)) * x * psi(n) - std::sqrt(static_cast<double>(n) / (n + 1)) * psi(n - 1);
  }
  return psi;
}

double quad_pdf(const DensityMatrix& rho, double theta, double x) {
  const Eigen::VectorXd psi = hermite_functions(x, rho.dim() - 1);
  double p = 0.0;
  for (int m = 0; m < rho.dim(); ++m) {
    p += rho(m, m).real() * psi(m) * psi(m);
    for (int n = m + 1; n < rho.dim(); ++n) {
      // (m, n) and (n, m) terms are complex conjugates
      p += 2.0 * (rho(m, n) * std::polar(1.0, (n - m) * theta)).real() * psi(m) * psi(n);
    }
  }
  return std::max(p, 0.0);
}

double sampler_half_width(FockCutoff cutoff) { return 5.0 + std::sqrt(2.0 * cutoff.n_max()); }

QuadratureSampler::QuadratureSampler(const DensityMatrix& rho, PhasePolicy policy) : policy_(policy) {
  const double half_width = sampler_half_width(rho.cutoff());
  const double step = 2.0 * half_width / (kSamplerGridPoints - 1);
  grid_.resize(kSamplerGridPoints);
  for (int i = 0; i < kSamplerGridPoints; ++i) grid_[i] = -half_width + i * step;

  phase_dependent_ = std::holds_alternative<UniformRandomPhase>(policy_) && !rho.is_diagonal();

  if (!phase_dependent_) {
    const double theta = std::holds_alternative<FixedPhase>(policy_) ? std::get<FixedPhase>(policy_).theta : 0.0;
    std::vector<double> pdf(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) pdf[i] = quad_pdf(rho, theta, grid_[i]);
    fixed_cdf_ = cdf_from_pdf(pdf);
    return;
  }

  const int dim = rho.dim();
  harmonics_.assign(dim, std::vector<Complex>(grid_.size(), 0.0));
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const Eigen::VectorXd psi = hermite_functions(grid_[i], dim - 1);
    for (int d = 0; d < dim; ++d) {
      Complex g = 0.0;
      for (int m = 0; m + d < dim; ++m) g += rho(m, m + d) * psi(m) * psi(m + d);
      harmonics_[d][i] = g;
    }
  }
}

std::vector<double> QuadratureSampler::cdf_from_pdf(const std::vector<double>& pdf) const {
  std::vector<double> cdf(pdf.size(), 0.0);
  for (std::size_t i = 1; i < pdf.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (pdf[i - 1] + pdf[i]) * (grid_[i] - grid_[i - 1]);
  }
  if (!(cdf.back() > 0.0)) throw DomainError("quadrature density vanishes on the sampler grid");
  return cdf;
}

double QuadratureSampler::invert(const std::vector<double>& cdf, double u) const {
  const double target = u * cdf.back();
  auto upper = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (upper == cdf.end()) return grid_.back();
  if (upper == cdf.begin()) return grid_.front();
  const std::size_t j = static_cast<std::size_t>(upper - cdf.begin());
  const double frac = (target - cdf[j - 1]) / (cdf[j] - cdf[j - 1]);
  return grid_[j - 1] + frac * (grid_[j] - grid_[j - 1]);
}

QuadratureRecord QuadratureSampler::draw(Rng& rng) const {
  QuadratureRecord rec;
  if (std::holds_alternative<FixedPhase>(policy_)) {
    rec.theta = wrap_phase(std::get<FixedPhase>(policy_).theta);
  } else {
    rec.theta = kTwoPi * uniform01(rng);
  }

  if (!phase_dependent_) {
    rec.x = invert(fixed_cdf_, uniform01(rng));
    return rec;
  }

  std::vector<double> pdf(grid_.size());
  std::vector<Complex> phases(harmonics_.size());
  for (std::size_t d = 0; d < harmonics_.size(); ++d) phases[d] = std::polar(1.0, static_cast<double>(d) * rec.theta);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    double p = harmonics_[0][i].real();
    for (std::size_t d = 1; d < harmonics_.size(); ++d) p += 2.0 * (harmonics_[d][i] * phases[d]).real();
    pdf[i] = std::max(p, 0.0);
  }
  rec.x = invert(cdf_from_pdf(pdf), uniform01(rng));
  return rec;
}

std::vector<QuadratureRecord> sample_quadratures(const DensityMatrix& rho, std::size_t count, PhasePolicy policy,
                                                 std::uint64_t seed, int herald_n, int slot) {
  if (count < 1) throw DomainError("sample_quadratures: count must be >= 1");
  const QuadratureSampler sampler(rho, policy);
  Rng rng(seed);
  std::vector<QuadratureRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    QuadratureRecord rec = sampler.draw(rng);
    rec.herald_n = herald_n;
    rec.slot = slot;
    out.push_back(rec);
  }
  return out;
}

}  // namespace hfock
