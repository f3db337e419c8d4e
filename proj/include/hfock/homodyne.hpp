#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "hfock/fock.hpp"
#include "hfock/random.hpp"

namespace hfock {

/// Quadrature convention used throughout the library.
///
/// x = (a + a^dagger) / sqrt(2), so the vacuum has variance 1/2 ("shot-noise
/// units") and the energy eigenfunctions are
/// psi_n(x) = H_n(x) exp(-x^2 / 2) / sqrt(2^n n! sqrt(pi)).
struct QuadratureConvention {
  static constexpr double kVacuumVariance = 0.5;
};

/// One homodyne outcome.
struct QuadratureRecord {
  double x = 0.0;      // shot-noise units
  double theta = 0.0;  // local-oscillator phase, [0, 2 pi)
  int herald_n = 0;
  int slot = 0;

  friend bool operator==(const QuadratureRecord&, const QuadratureRecord&) = default;
};

/// psi_0(x) .. psi_{n_max}(x) by the three-term recurrence on the normalized
/// functions themselves (no Hermite polynomial overflow for large n).
Eigen::VectorXd hermite_functions(double x, int n_max);

/// p(x | theta) = sum_{m,n} rho_{mn} e^{i(n-m) theta} psi_m(x) psi_n(x).
double quad_pdf(const DensityMatrix& rho, double theta, double x);

/// Half-width L of the tabulated quadrature grid, 5 + sqrt(2 n_max).
double sampler_half_width(FockCutoff cutoff);

inline constexpr int kSamplerGridPoints = 4096;

struct FixedPhase {
  double theta = 0.0;
};
struct UniformRandomPhase {};
using PhasePolicy = std::variant<FixedPhase, UniformRandomPhase>;

/// Inverse-CDF sampler over a tabulated grid x in [-L, L].
///
/// For diagonal states or a fixed phase one table serves every draw. A
/// phase-sensitive state with random phases stores the density as a Fourier
/// series in theta and builds the table per draw.
class QuadratureSampler {
 public:
  QuadratureSampler(const DensityMatrix& rho, PhasePolicy policy);

  QuadratureRecord draw(Rng& rng) const;

  const std::vector<double>& grid() const { return grid_; }

 private:
  double invert(const std::vector<double>& cdf, double u) const;
  std::vector<double> cdf_from_pdf(const std::vector<double>& pdf) const;

  PhasePolicy policy_;
  std::vector<double> grid_;
  std::vector<double> fixed_cdf_;                  // used when the density is theta-independent
  std::vector<std::vector<Complex>> harmonics_;    // harmonics_[d][i]: e^{i d theta} coefficient, d >= 0
  bool phase_dependent_ = false;
};

/// Draws `count` i.i.d. records. Deterministic given the seed. Every record is
/// tagged with `herald_n` and `slot`.
std::vector<QuadratureRecord> sample_quadratures(const DensityMatrix& rho, std::size_t count, PhasePolicy policy,
                                                 std::uint64_t seed, int herald_n = 0, int slot = 0);

}  // namespace hfock
