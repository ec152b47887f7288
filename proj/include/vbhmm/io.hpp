#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vbhmm/baseline_em.hpp"
#include "vbhmm/datagen.hpp"
#include "vbhmm/posteriors.hpp"
#include "vbhmm/trainer.hpp"
#include "vbhmm/types.hpp"

namespace vbhmm::io {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

enum class DataFormat { kCsv, kJsonl };

// csv: one observation per row, D numeric columns, blank line between
// sequences. jsonl: one sequence per line as an array of D-length arrays.
// Ragged rows, non-numeric cells, NaN/Inf and empty files raise DataError
// with the offending line number where applicable.
std::vector<ObservationSequence> read_sequences(const std::string& path, DataFormat format);

// Writes the csv dataset format; `states`, when non-null, appends one
// integer label column per row.
void write_sequences_csv(const std::string& path, std::span<const ObservationSequence> seqs,
                         const std::vector<std::vector<int>>* states = nullptr);

struct TrainMeta {
  std::uint64_t seed = 0;
  int iterations = 0;
  double final_objective = 0.0;
  std::string tool_version = kToolVersion;
};

struct VbModel {
  HmmPriors priors;
  HmmPosterior posterior;
  TrainMeta meta;
};

struct EmModel {
  MlHmm params;
  TrainMeta meta;
};

using Model = std::variant<VbModel, EmModel>;

void write_model(const TrainReport& report, const HmmPriors& priors, const std::string& path);
void write_model(const EmReport& report, std::uint64_t seed, const std::string& path);

// Parses either model kind; unknown schema_version or malformed structure
// raises DataError.
Model read_model(const std::string& path);

// Ground-truth parameter files for `sample`; also accepts a trained model
// (vb models are converted through point_estimate).
GroundTruthHmm read_ground_truth(const std::string& path);
void write_ground_truth(const GroundTruthHmm& model, const std::string& path);

// Shortest-round-trip decimal rendering of a double.
std::string format_double(double value);

}  // namespace vbhmm::io

namespace vbhmm {

// Command-line entry point; returns the process exit code
// (0 ok, 2 usage, 3 data error, 4 numeric failure).
int cli(int argc, const char* const* argv);

}  // namespace vbhmm
