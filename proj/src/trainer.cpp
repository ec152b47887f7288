#include "vbhmm/trainer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "parallel.hpp"
#include "vbhmm/rng.hpp"
#include "vbhmm/special_functions.hpp"

namespace vbhmm {

namespace {

void validate_data(const std::vector<ObservationSequence>& data) {
  if (data.empty()) throw std::invalid_argument("fit: no sequences");
  const Eigen::Index d = data.front().cols();
  for (const auto& seq : data) {
    if (seq.rows() == 0) throw std::invalid_argument("fit: empty sequence");
    if (seq.cols() != d) throw std::invalid_argument("fit: inconsistent dimensions");
    if (!seq.allFinite()) throw std::invalid_argument("fit: non-finite observation");
  }
}

// Statistics for the initial M-step. No E-step has run yet, so pairwise
// responsibilities are approximated by outer products of consecutive gamma
// rows; every slice then sums to 1 with the right marginals.
SufficientStats stats_from_responsibilities(const std::vector<Eigen::MatrixXd>& gammas,
                                            const std::vector<ObservationSequence>& data) {
  std::vector<EStepResult> pseudo(gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const auto& g = gammas[i];
    pseudo[i].gamma = g;
    pseudo[i].log_c = Eigen::VectorXd::Zero(g.rows());
    pseudo[i].xi.reserve(g.rows() > 0 ? g.rows() - 1 : 0);
    for (Eigen::Index t = 0; t + 1 < g.rows(); ++t) {
      pseudo[i].xi.emplace_back(g.row(t).transpose() * g.row(t + 1));
    }
  }
  return sufficient_stats(pseudo, data);
}

HmmPosterior m_step(const HmmPriors& priors, const SufficientStats& stats,
                    InitialUpdateMode mode, int* jitter_events) {
  return HmmPosterior{update_initial(priors, stats, mode),
                      update_transitions(priors, stats),
                      update_emissions(priors, stats, jitter_events)};
}

std::vector<Eigen::MatrixXd> kmeans_responsibilities(
    const std::vector<ObservationSequence>& data, int states, rng::Stream& stream) {
  Eigen::Index total = 0;
  const Eigen::Index d = data.front().cols();
  for (const auto& seq : data) total += seq.rows();
  Eigen::MatrixXd pooled(total, d);
  Eigen::Index at = 0;
  for (const auto& seq : data) {
    pooled.middleRows(at, seq.rows()) = seq;
    at += seq.rows();
  }

  Eigen::MatrixXd centers(states, d);
  for (int k = 0; k < states; ++k) {
    centers.row(k) = pooled.row(static_cast<Eigen::Index>(stream.next_u64() % total));
  }
  std::vector<int> label(total, 0);
  for (int iter = 0; iter < 10; ++iter) {
    for (Eigen::Index i = 0; i < total; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < states; ++k) {
        const double dist = (pooled.row(i) - centers.row(k)).squaredNorm();
        if (dist < best) {
          best = dist;
          label[i] = k;
        }
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(states, d);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(states);
    for (Eigen::Index i = 0; i < total; ++i) {
      sums.row(label[i]) += pooled.row(i);
      counts[label[i]] += 1.0;
    }
    for (int k = 0; k < states; ++k) {
      if (counts[k] > 0.0) centers.row(k) = sums.row(k) / counts[k];
    }
  }

  const double off = states > 1 ? 0.1 / (states - 1) : 0.0;
  std::vector<Eigen::MatrixXd> gammas;
  gammas.reserve(data.size());
  Eigen::Index offset = 0;
  for (const auto& seq : data) {
    Eigen::MatrixXd g = states > 1
                            ? Eigen::MatrixXd::Constant(seq.rows(), states, off).eval()
                            : Eigen::MatrixXd::Ones(seq.rows(), 1).eval();
    if (states > 1) {
      for (Eigen::Index t = 0; t < seq.rows(); ++t) g(t, label[offset + t]) = 0.9;
    }
    offset += seq.rows();
    gammas.push_back(std::move(g));
  }
  return gammas;
}

std::vector<Eigen::MatrixXd> make_responsibilities(const std::vector<ObservationSequence>& data,
                                                   const TrainConfig& cfg, std::uint64_t seed) {
  rng::Stream stream(seed);
  if (cfg.init == InitMethod::kKMeans) {
    return kmeans_responsibilities(data, cfg.states, stream);
  }
  std::vector<Eigen::MatrixXd> gammas;
  gammas.reserve(data.size());
  for (const auto& seq : data) {
    Eigen::MatrixXd g(seq.rows(), cfg.states);
    for (Eigen::Index t = 0; t < seq.rows(); ++t) {
      double sum = 0.0;
      for (int k = 0; k < cfg.states; ++k) {
        g(t, k) = stream.next_exponential();
        sum += g(t, k);
      }
      g.row(t) /= sum;
    }
    gammas.push_back(std::move(g));
  }
  return gammas;
}

}  // namespace

void TrainConfig::validate() const {
  if (states < 1) throw std::invalid_argument("TrainConfig: states must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("TrainConfig: tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("TrainConfig: max_iters must be >= 1");
  if (restarts < 1) throw std::invalid_argument("TrainConfig: restarts must be >= 1");
}

std::vector<Eigen::MatrixXd> init_responsibilities(const std::vector<ObservationSequence>& data,
                                                   const TrainConfig& cfg) {
  cfg.validate();
  validate_data(data);
  return make_responsibilities(data, cfg, cfg.seed);
}

TrainReport fit_from_responsibilities(const std::vector<ObservationSequence>& data,
                                      const TrainConfig& cfg, const HmmPriors& priors,
                                      const std::vector<Eigen::MatrixXd>& responsibilities,
                                      const IterationObserver& observer) {
  cfg.validate();
  validate_data(data);
  priors.validate();
  if (priors.states() != cfg.states || priors.dim() != data.front().cols()) {
    throw std::invalid_argument("fit: priors do not match states/dimension");
  }
  if (responsibilities.size() != data.size()) {
    throw std::invalid_argument("fit: one responsibility matrix per sequence required");
  }

  TrainReport report{
      HmmPosterior{priors.initial_alpha0, priors.transition_alpha0,
                   std::vector<GaussWishart>(cfg.states, priors.emission0)},
      priors, cfg, {}, 0, false, {}};

  int jitter_events = 0;
  SufficientStats stats = stats_from_responsibilities(responsibilities, data);
  HmmPosterior post = m_step(priors, stats, cfg.initial_update, &jitter_events);

  std::vector<EStepResult> e_steps(data.size());
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    detail::parallel_for_index(static_cast<int>(data.size()),
                               [&](int i) { e_steps[i] = e_step(post, data[i]); });
    double log_z = 0.0;
    int degenerate = 0;
    for (const auto& r : e_steps) {
      log_z += r.log_z_tilde;
      degenerate += r.degenerate_steps;
    }
    if (degenerate > 0) {
      report.warnings.push_back("iteration " + std::to_string(iter) + ": " +
                                std::to_string(degenerate) + " degenerate forward steps");
    }
    stats = sufficient_stats(e_steps, data);
    const ElboBreakdown bound = elbo(post, priors, stats, log_z);
    report.elbo_trace.push_back(bound.total);
    report.iterations = iter;
    if (observer) observer(IterationInfo{iter, post, stats, e_steps, bound});

    for (int state = 0; state < cfg.states; ++state) {
      if (stats.empty[state]) {
        report.warnings.push_back("iteration " + std::to_string(iter) + ": state " +
                                  std::to_string(state) + " empty, reverted to prior");
      }
    }

    if (report.elbo_trace.size() >= 2) {
      const double prev = report.elbo_trace[report.elbo_trace.size() - 2];
      const double cur = report.elbo_trace.back();
      if (std::abs(cur - prev) / (1.0 + std::abs(cur)) < cfg.tol) {
        report.converged = true;
        break;
      }
    }
    const int jitter_before = jitter_events;
    post = m_step(priors, stats, cfg.initial_update, &jitter_events);
    if (jitter_events > jitter_before) {
      report.warnings.push_back("iteration " + std::to_string(iter) + ": " +
                                std::to_string(jitter_events - jitter_before) +
                                " jitter escalations");
    }
  }
  report.posterior = std::move(post);
  return report;
}

TrainReport fit(const std::vector<ObservationSequence>& data, const TrainConfig& cfg,
                const std::optional<HmmPriors>& priors, const IterationObserver& observer) {
  cfg.validate();
  validate_data(data);

  HmmPriors resolved = [&] {
    if (priors.has_value()) return *priors;
    const auto [mean, scale] = data_summary(data);
    return default_priors(cfg.states, static_cast<int>(data.front().cols()), mean, scale);
  }();

  TrainReport best{HmmPosterior{resolved.initial_alpha0, resolved.transition_alpha0,
                                std::vector<GaussWishart>(cfg.states, resolved.emission0)},
                   resolved, cfg, {}, 0, false, {}};
  bool have_best = false;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    const std::uint64_t seed = restart == 0 ? cfg.seed : rng::derive(cfg.seed, restart);
    auto gammas = make_responsibilities(data, cfg, seed);
    TrainReport report = fit_from_responsibilities(
        data, cfg, resolved, gammas, cfg.restarts == 1 ? observer : nullptr);
    if (!have_best || report.elbo_trace.back() > best.elbo_trace.back()) {
      best = std::move(report);
      have_best = true;
    }
  }
  return best;
}

PointEstimate point_estimate(const HmmPosterior& post) {
  post.validate();
  const int j = post.states();
  const int d = post.dim();
  PointEstimate pe;
  pe.pi = post.initial.alpha / post.initial.alpha.sum();
  pe.a.resize(j, j);
  for (int row = 0; row < j; ++row) {
    pe.a.row(row) = (post.transitions[row].alpha / post.transitions[row].alpha.sum()).transpose();
  }
  for (const auto& gw : post.emissions) {
    pe.means.push_back(gw.m);
    const Eigen::MatrixXd precision = gw.nu * gw.w;
    Eigen::MatrixXd cov = detail::spd_llt(precision, "point_estimate")
                              .solve(Eigen::MatrixXd::Identity(d, d));
    pe.covariances.push_back(0.5 * (cov + cov.transpose()));
  }
  return pe;
}

}  // namespace vbhmm
