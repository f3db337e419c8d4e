#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hfock/fock.hpp"
#include "hfock/homodyne.hpp"
#include "hfock/tomography.hpp"

namespace hfock {

/// W(x, p) in the vacuum-variance-1/2 convention, normalized so that
/// the integral over dx dp is one. Off-diagonal elements use the
/// associated-Laguerre kernel; the diagonal part reduces to
/// (1/pi) e^{-s^2} sum_n rho_nn (-1)^n L_n(2 s^2), s^2 = x^2 + p^2.
double wigner_point(const DensityMatrix& rho, double x, double p);

struct AxisRange {
  double lo;
  double hi;
};

inline constexpr AxisRange kDefaultWignerRange{-5.0, 5.0};
inline constexpr int kDefaultWignerResolution = 201;

struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
  Eigen::MatrixXd values;  // values(i, j) = W(x_axis[i], p_axis[j])
  double min_value = 0.0;
  double min_x = 0.0;
  double min_p = 0.0;

  /// Trapezoidal integral of W over the grid.
  double integral() const;
};

/// Samples W on a resolution x resolution grid (resolution >= 16) and records the minimum.
WignerGrid wigner_grid(const DensityMatrix& rho, AxisRange x_range = kDefaultWignerRange,
                       AxisRange p_range = kDefaultWignerRange, int resolution = kDefaultWignerResolution);

struct RadialMinimum {
  double radius;
  double value;
};

/// Golden-section search of W along the radius for a diagonal (radially
/// symmetric) state. Finds a local minimum in [r_lo, r_hi].
RadialMinimum refine_radial_minimum(const DensityMatrix& rho, double r_lo, double r_hi, double tolerance = 1e-10);

/// Photon-number probabilities P(0) .. P(n_max).
std::vector<double> photon_distribution(const DensityMatrix& rho);

struct PhotonNumberStatistic {
  int n;
};
struct WignerStatistic {
  double x;
  double p;
};
using BootstrapStatistic = std::variant<PhotonNumberStatistic, WignerStatistic>;

std::string statistic_name(const BootstrapStatistic& statistic);
double evaluate_statistic(const BootstrapStatistic& statistic, const DensityMatrix& rho);

inline constexpr int kDefaultBootstrapReplicates = 100;
/// Reports built from fewer replicates carry a warning.
inline constexpr int kBootstrapWarnBelow = 20;

struct BootstrapReport {
  std::string statistic;
  int replicate_count = 0;  // requested
  int used_replicates = 0;
  int excluded_replicates = 0;  // MLE did not converge
  double point_estimate = 0.0;
  double standard_deviation = 0.0;
  double ci_low = 0.0;  // 2.5 % percentile
  double ci_high = 0.0;  // 97.5 % percentile
  bool skew_flag = false;  // point estimate outside the percentile interval
  std::vector<std::string> warnings;
  std::vector<double> replicate_values;
};

/// Nonparametric bootstrap: resample the records with replacement, rerun
/// tomography per replicate, evaluate each statistic. Replicate i draws from
/// derive_seed(seed, i), so results do not depend on `threads`.
std::vector<BootstrapReport> bootstrap_many(std::span<const QuadratureRecord> records,
                                            std::span<const BootstrapStatistic> statistics, const MleConfig& cfg,
                                            int replicates, std::uint64_t seed, unsigned threads = 0);

BootstrapReport bootstrap(std::span<const QuadratureRecord> records, const BootstrapStatistic& statistic,
                          const MleConfig& cfg, int replicates, std::uint64_t seed, unsigned threads = 0);

}  // namespace hfock
