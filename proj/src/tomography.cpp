#include "hfock/tomography.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "hfock/errors.hpp"

namespace hfock {

void MleConfig::validate() const {
  if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
  if (!(log_likelihood_tolerance > 0.0)) throw DomainError("log-likelihood tolerance must be > 0");
  if (bin_width && !(*bin_width > 0.0)) throw DomainError("bin width must be > 0");
}

Eigen::MatrixXcd projector_weights(double x, double theta, FockCutoff cutoff) {
  const Eigen::VectorXd psi = hermite_functions(x, cutoff.n_max());
  Eigen::VectorXcd v(cutoff.dim());
  for (int n = 0; n < cutoff.dim(); ++n) v(n) = psi(n) * std::polar(1.0, n * theta);
  return v * v.adjoint();
}

Eigen::VectorXd projector_diagonal(double x, FockCutoff cutoff) {
  return hermite_functions(x, cutoff.n_max()).array().square().matrix();
}

namespace {

constexpr double kProbabilityGuard = 1e-300;
constexpr int kMaxDilutionHalvings = 40;

struct Sample {
  double x;
  double theta;
  double weight;
};

std::vector<Sample> collect_samples(std::span<const QuadratureRecord> records, const MleConfig& cfg) {
  if (!cfg.bin_width) {
    std::vector<Sample> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.x, r.theta, 1.0});
    return out;
  }
  const double w = *cfg.bin_width;
  std::map<std::pair<long long, long long>, double> counts;
  for (const auto& r : records) {
    const long long ix = static_cast<long long>(std::floor(r.x / w));
    const long long it = cfg.phase_insensitive ? 0 : static_cast<long long>(std::floor(r.theta / w));
    counts[{ix, it}] += 1.0;
  }
  std::vector<Sample> out;
  out.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    out.push_back({(key.first + 0.5) * w, cfg.phase_insensitive ? 0.0 : (key.second + 0.5) * w, count});
  }
  return out;
}

Eigen::MatrixXcd mixed_and_normalized(Eigen::MatrixXcd m) {
  m = 0.5 * (m + m.adjoint()).eval();
  m /= m.trace().real();
  m += kMixingFloor * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  m /= 1.0 + kMixingFloor * static_cast<double>(m.rows());
  return m;
}

// Phase-averaged model: the state is a probability vector and each sample a
// row of psi_n(x)^2.
class DiagonalModel {
 public:
  DiagonalModel(const std::vector<Sample>& samples, FockCutoff cutoff)
      : design_(samples.size(), cutoff.dim()), weights_(samples.size()) {
    double total = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      design_.row(j) = projector_diagonal(samples[j].x, cutoff).transpose();
      weights_(j) = samples[j].weight;
      total += samples[j].weight;
    }
    weights_ /= total;
  }

  using State = Eigen::VectorXd;

  static State from_density(const DensityMatrix& rho) { return rho.diagonal(); }
  static DensityMatrix to_density(const State& s) { return DensityMatrix(s.cast<Complex>().asDiagonal().toDenseMatrix()); }

  Eigen::VectorXd probabilities(const State& s) const {
    return (design_ * s).cwiseMax(kProbabilityGuard);
  }

  double log_likelihood(const Eigen::VectorXd& p) const { return weights_.dot(p.array().log().matrix()); }

  State r_operator(const Eigen::VectorXd& p) const {
    return design_.transpose() * weights_.cwiseQuotient(p);
  }

  // eps < 0 selects the undiluted R rho R step.
  static State step(const State& s, const State& r, double eps) {
    State next;
    if (eps < 0.0) {
      next = (r.array().square() * s.array()).matrix();
    } else {
      next = ((1.0 + eps * r.array()).square() * s.array()).matrix();
    }
    next /= next.sum();
    next.array() += kMixingFloor;
    next /= 1.0 + kMixingFloor * static_cast<double>(next.size());
    return next;
  }

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd weights_;
};

// Full model: each sample is the vector v_n = psi_n(x) e^{i n theta}.
class FullModel {
 public:
  FullModel(const std::vector<Sample>& samples, FockCutoff cutoff)
      : vectors_(samples.size(), cutoff.dim()), weights_(samples.size()) {
    double total = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const Eigen::VectorXd psi = hermite_functions(samples[j].x, cutoff.n_max());
      for (int n = 0; n < cutoff.dim(); ++n) vectors_(j, n) = psi(n) * std::polar(1.0, n * samples[j].theta);
      weights_(j) = samples[j].weight;
      total += samples[j].weight;
    }
    weights_ /= total;
  }

  using State = Eigen::MatrixXcd;

  static State from_density(const DensityMatrix& rho) { return rho.matrix(); }
  static DensityMatrix to_density(const State& s) { return DensityMatrix(s); }

  Eigen::VectorXd probabilities(const State& s) const {
    // p_j = v_j^dagger rho v_j
    const Eigen::MatrixXcd left = vectors_.conjugate() * s;
    return left.cwiseProduct(vectors_).rowwise().sum().real().cwiseMax(kProbabilityGuard);
  }

  double log_likelihood(const Eigen::VectorXd& p) const { return weights_.dot(p.array().log().matrix()); }

  State r_operator(const Eigen::VectorXd& p) const {
    const Eigen::VectorXd c = weights_.cwiseQuotient(p);
    return vectors_.transpose() * (c.asDiagonal() * vectors_.conjugate());
  }

  static State step(const State& s, const State& r, double eps) {
    if (eps < 0.0) return mixed_and_normalized(r * s * r);
    const Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(s.rows(), s.cols()) + eps * r;
    return mixed_and_normalized(g * s * g.adjoint());
  }

 private:
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd weights_;
};

template <typename Model>
MleResult iterate(const Model& model, typename Model::State state, const MleConfig& cfg) {
  Eigen::VectorXd p = model.probabilities(state);
  double ll = model.log_likelihood(p);

  MleResult result{Model::to_density(state), 0, ll, false, {ll}, 0};
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const auto r = model.r_operator(p);

    auto candidate = Model::step(state, r, -1.0);
    Eigen::VectorXd cp = model.probabilities(candidate);
    double cll = model.log_likelihood(cp);

    if (cll < ll) {
      ++result.diluted_steps;
      bool ascended = false;
      double eps = 1.0;
      for (int h = 0; h < kMaxDilutionHalvings && !ascended; ++h, eps *= 0.5) {
        candidate = Model::step(state, r, eps);
        cp = model.probabilities(candidate);
        cll = model.log_likelihood(cp);
        ascended = cll >= ll;
      }
      if (!ascended) {
        result.converged = true;
        break;
      }
    }

    const double gain = cll - ll;
    state = std::move(candidate);
    p = std::move(cp);
    ll = cll;
    result.iterations_used = it;
    result.log_likelihood_history.push_back(ll);
    if (gain < cfg.log_likelihood_tolerance) {
      result.converged = true;
      break;
    }
  }

  for (std::size_t k = 1; k < result.log_likelihood_history.size(); ++k) {
    if (result.log_likelihood_history[k] < result.log_likelihood_history[k - 1]) {
      throw std::logic_error("maximum-likelihood iteration decreased the likelihood");
    }
  }
  result.rho = Model::to_density(state);
  result.final_log_likelihood = ll;
  return result;
}

}  // namespace

MleResult mle_reconstruct(std::span<const QuadratureRecord> records, const MleConfig& cfg,
                          const std::optional<DensityMatrix>& initial) {
  cfg.validate();
  if (records.size() < kMinTomographyRecords) {
    throw DomainError("tomography needs at least " + std::to_string(kMinTomographyRecords) + " records, got " +
                      std::to_string(records.size()));
  }
  const double half_width = sampler_half_width(cfg.cutoff);
  for (const auto& r : records) {
    if (!std::isfinite(r.x) || std::abs(r.x) > half_width) {
      throw DomainError("quadrature " + std::to_string(r.x) + " outside the tomography grid [-" +
                        std::to_string(half_width) + ", " + std::to_string(half_width) + "]");
    }
  }
  if (initial && initial->cutoff() != cfg.cutoff) throw DomainError("initial state has the wrong cutoff");

  const auto samples = collect_samples(records, cfg);
  const int dim = cfg.cutoff.dim();

  if (cfg.phase_insensitive) {
    const DiagonalModel model(samples, cfg.cutoff);
    Eigen::VectorXd start = initial ? DiagonalModel::from_density(*initial)
                                    : Eigen::VectorXd::Constant(dim, 1.0 / dim);
    start /= start.sum();
    return iterate(model, std::move(start), cfg);
  }
  const FullModel model(samples, cfg.cutoff);
  Eigen::MatrixXcd start = initial ? initial->matrix()
                                   : Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
  return iterate(model, std::move(start), cfg);
}

}  // namespace hfock
