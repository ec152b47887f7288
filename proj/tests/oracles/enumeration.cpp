#include "oracles/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

EnumerationResult enumerate_marginals(const Eigen::VectorXd& log_pi,
                                      const Eigen::MatrixXd& log_a,
                                      const Eigen::MatrixXd& log_b) {
  const int n = static_cast<int>(log_b.rows());
  const int j = static_cast<int>(log_b.cols());
  double paths = 1.0;
  for (int t = 0; t < n; ++t) paths *= j;
  if (paths > 2e7) throw std::invalid_argument("enumerate_marginals: too many paths");
  const long total = static_cast<long>(paths);

  std::vector<int> path(n);
  auto decode = [&](long index) {
    for (int t = 0; t < n; ++t) {
      path[t] = static_cast<int>(index % j);
      index /= j;
    }
  };
  auto log_weight = [&] {
    double w = log_pi[path[0]] + log_b(0, path[0]);
    for (int t = 1; t < n; ++t) w += log_a(path[t - 1], path[t]) + log_b(t, path[t]);
    return w;
  };

  double max_log = -std::numeric_limits<double>::infinity();
  for (long index = 0; index < total; ++index) {
    decode(index);
    max_log = std::max(max_log, log_weight());
  }

  EnumerationResult result;
  result.gamma = Eigen::MatrixXd::Zero(n, j);
  result.xi.assign(n > 0 ? n - 1 : 0, Eigen::MatrixXd::Zero(j, j));
  double total_weight = 0.0;
  for (long index = 0; index < total; ++index) {
    decode(index);
    const double w = std::exp(log_weight() - max_log);
    total_weight += w;
    for (int t = 0; t < n; ++t) result.gamma(t, path[t]) += w;
    for (int t = 0; t + 1 < n; ++t) result.xi[t](path[t], path[t + 1]) += w;
  }
  result.gamma /= total_weight;
  for (auto& slice : result.xi) slice /= total_weight;
  result.log_z = std::log(total_weight) + max_log;
  return result;
}

}  // namespace oracle
