#pragma once

#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct EnumerationResult {
  Eigen::MatrixXd gamma;
  std::vector<Eigen::MatrixXd> xi;
  double log_z;
};

// Exhaustive posterior marginals over all J^N state paths:
// weight(path) = pi_{z1} b_{1,z1} prod_n a_{z_{n-1}, z_n} b_{n, z_n},
// evaluated in log space. Intended for J <= 3, N <= 10.
EnumerationResult enumerate_marginals(const Eigen::VectorXd& log_pi,
                                      const Eigen::MatrixXd& log_a,
                                      const Eigen::MatrixXd& log_b);

}  // namespace oracle
