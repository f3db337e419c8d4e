#include "hfock/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include "hfock/errors.hpp"
#include "hfock/random.hpp"

namespace hfock {

namespace {

// L_0^{(a)}(t) .. L_{count-1}^{(a)}(t)
std::vector<double> laguerre_sequence(int count, double a, double t) {
  std::vector<double> l(std::max(count, 0));
  if (count > 0) l[0] = 1.0;
  if (count > 1) l[1] = 1.0 + a - t;
  for (int k = 1; k + 1 < count; ++k) {
    l[k + 1] = ((2.0 * k + 1.0 + a - t) * l[k] - (k + a) * l[k - 1]) / (k + 1.0);
  }
  return l;
}

}  // namespace

double wigner_point(const DensityMatrix& rho, double x, double p) {
  const int dim = rho.dim();
  const double s2 = x * x + p * p;
  const double envelope = std::exp(-s2);

  // rho_mn (-1)^m sqrt(m!/n!) (sqrt2 (x + i p))^{n-m} e^{-s^2} L_m^{(n-m)}(2 s^2), n >= m,
  // plus the conjugate term for n < m.
  const Complex z = std::numbers::sqrt2 * Complex(x, p);
  double total = 0.0;
  Complex z_power = 1.0;
  for (int d = 0; d < dim; ++d) {
    const auto lag = laguerre_sequence(dim - d, d, 2.0 * s2);
    Complex band = 0.0;
    for (int m = 0; m + d < dim; ++m) {
      const int n = m + d;
      const double norm = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(n + 1.0)));
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      band += rho(m, n) * (sign * norm * lag[m]);
    }
    total += (d == 0 ? 1.0 : 2.0) * (band * z_power).real();
    z_power *= z;
  }
  return envelope * total / std::numbers::pi;
}

double WignerGrid::integral() const {
  const auto trapezoid_weights = [](const std::vector<double>& axis) {
    std::vector<double> w(axis.size(), 0.0);
    for (std::size_t i = 0; i + 1 < axis.size(); ++i) {
      const double h = 0.5 * (axis[i + 1] - axis[i]);
      w[i] += h;
      w[i + 1] += h;
    }
    return w;
  };
  const auto wx = trapezoid_weights(x_axis);
  const auto wp = trapezoid_weights(p_axis);
  double sum = 0.0;
  for (std::size_t i = 0; i < x_axis.size(); ++i) {
    for (std::size_t j = 0; j < p_axis.size(); ++j) sum += wx[i] * wp[j] * values(i, j);
  }
  return sum;
}

WignerGrid wigner_grid(const DensityMatrix& rho, AxisRange x_range, AxisRange p_range, int resolution) {
  if (resolution < 16) throw DomainError("Wigner grid resolution must be >= 16");
  if (!(x_range.hi > x_range.lo) || !(p_range.hi > p_range.lo)) throw DomainError("empty Wigner grid range");

  const auto axis = [resolution](AxisRange r) {
    std::vector<double> a(resolution);
    for (int i = 0; i < resolution; ++i) a[i] = r.lo + (r.hi - r.lo) * i / (resolution - 1);
    return a;
  };
  WignerGrid grid{axis(x_range), axis(p_range), Eigen::MatrixXd(resolution, resolution), 0.0, 0.0, 0.0};
  grid.min_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const double w = wigner_point(rho, grid.x_axis[i], grid.p_axis[j]);
      grid.values(i, j) = w;
      if (w < grid.min_value) {
        grid.min_value = w;
        grid.min_x = grid.x_axis[i];
        grid.min_p = grid.p_axis[j];
      }
    }
  }
  return grid;
}

RadialMinimum refine_radial_minimum(const DensityMatrix& rho, double r_lo, double r_hi, double tolerance) {
  if (!rho.is_diagonal()) throw DomainError("radial refinement requires a phase-insensitive (diagonal) state");
  if (!(r_hi > r_lo) || r_lo < 0.0) throw DomainError("invalid radial search interval");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const auto f = [&rho](double r) { return wigner_point(rho, 0.0, r); };
  double a = r_lo;
  double b = r_hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double r = 0.5 * (a + b);
  return {r, f(r)};
}

std::vector<double> photon_distribution(const DensityMatrix& rho) {
  const Eigen::VectorXd d = rho.diagonal();
  return {d.data(), d.data() + d.size()};
}

std::string statistic_name(const BootstrapStatistic& statistic) {
  if (const auto* pn = std::get_if<PhotonNumberStatistic>(&statistic)) return "P(" + std::to_string(pn->n) + ")";
  const auto& w = std::get<WignerStatistic>(statistic);
  char buf[64];
  std::snprintf(buf, sizeof buf, "W(%g,%g)", w.x, w.p);
  return buf;
}

double evaluate_statistic(const BootstrapStatistic& statistic, const DensityMatrix& rho) {
  if (const auto* pn = std::get_if<PhotonNumberStatistic>(&statistic)) {
    if (pn->n < 0 || pn->n >= rho.dim()) throw DomainError("photon number outside cutoff");
    return rho(pn->n, pn->n).real();
  }
  const auto& w = std::get<WignerStatistic>(statistic);
  return wigner_point(rho, w.x, w.p);
}

namespace {

// Linear-interpolation percentile of sorted data.
double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<BootstrapReport> bootstrap_many(std::span<const QuadratureRecord> records,
                                            std::span<const BootstrapStatistic> statistics, const MleConfig& cfg,
                                            int replicates, std::uint64_t seed, unsigned threads) {
  if (replicates < 2) throw DomainError("bootstrap needs at least 2 replicates");
  if (records.empty()) throw DomainError("bootstrap needs a non-empty dataset");
  if (statistics.empty()) throw DomainError("bootstrap needs at least one statistic");

  const MleResult full = mle_reconstruct(records, cfg);

  struct Replicate {
    bool converged = false;
    std::vector<double> values;
  };
  std::vector<Replicate> results(replicates);
  std::atomic<int> next{0};
  const auto worker = [&]() {
    std::vector<QuadratureRecord> resample(records.size());
    for (int i = next++; i < replicates; i = next++) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      for (auto& rec : resample) rec = records[uniform_index(rng, records.size())];
      const MleResult fit = mle_reconstruct(resample, cfg);
      results[i].converged = fit.converged;
      for (const auto& s : statistics) results[i].values.push_back(evaluate_statistic(s, fit.rho));
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(replicates));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  std::vector<BootstrapReport> reports;
  for (std::size_t s = 0; s < statistics.size(); ++s) {
    BootstrapReport report;
    report.statistic = statistic_name(statistics[s]);
    report.replicate_count = replicates;
    report.point_estimate = evaluate_statistic(statistics[s], full.rho);
    for (const auto& r : results) {
      if (r.converged) {
        report.replicate_values.push_back(r.values[s]);
      } else {
        ++report.excluded_replicates;
      }
    }
    report.used_replicates = static_cast<int>(report.replicate_values.size());
    if (report.used_replicates < 2) {
      throw DomainError("bootstrap: fewer than 2 replicates converged");
    }
    if (!full.converged) report.warnings.push_back("tomography on the full dataset did not converge");
    if (replicates < kBootstrapWarnBelow) {
      report.warnings.push_back("only " + std::to_string(replicates) + " replicates; spread is poorly determined");
    }
    if (report.excluded_replicates > 0) {
      report.warnings.push_back(std::to_string(report.excluded_replicates) +
                                " replicates excluded (tomography did not converge)");
    }

    const auto& v = report.replicate_values;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    report.standard_deviation = std::sqrt(ss / static_cast<double>(v.size() - 1));

    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    report.ci_low = percentile(sorted, 0.025);
    report.ci_high = percentile(sorted, 0.975);
    report.skew_flag = report.point_estimate < report.ci_low || report.point_estimate > report.ci_high;
    if (report.skew_flag) report.warnings.push_back("point estimate lies outside the percentile interval");
    reports.push_back(std::move(report));
  }
  return reports;
}

BootstrapReport bootstrap(std::span<const QuadratureRecord> records, const BootstrapStatistic& statistic,
                          const MleConfig& cfg, int replicates, std::uint64_t seed, unsigned threads) {
  const BootstrapStatistic one[] = {statistic};
  return bootstrap_many(records, one, cfg, replicates, seed, threads).front();
}

}  // namespace hfock
