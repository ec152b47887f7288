#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "vbhmm/types.hpp"

namespace vbhmm {

// Generating parameters for synthetic benchmarks.
struct GroundTruthHmm {
  Eigen::VectorXd pi;
  Eigen::MatrixXd a;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;

  int states() const { return static_cast<int>(pi.size()); }
  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
  void validate() const;
};

struct SampleResult {
  ObservationSequence observations;  // length x D
  std::vector<int> states;           // 0-based generating state per step
};

// Draws a length-N sequence. Step n consumes a counter-derived stream keyed
// on (seed, n), so a prefix of draws never changes when N grows.
SampleResult sample(const GroundTruthHmm& model, int length, std::uint64_t seed);

}  // namespace vbhmm
