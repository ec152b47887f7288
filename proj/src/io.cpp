#include "vbhmm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "vbhmm/trainer.hpp"

namespace vbhmm::io {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) { throw DataError(message); }

std::string location(const std::string& path, int line) {
  return path + ":" + std::to_string(line) + ": ";
}

double parse_cell(std::string_view cell, const std::string& path, int line) {
  // Trim spaces, tabs and a trailing CR.
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() &&
         (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
    cell.remove_suffix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    fail(location(path, line) + "non-numeric cell '" + std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    fail(location(path, line) + "non-finite value not allowed");
  }
  return value;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::vector<ObservationSequence> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");

  std::vector<ObservationSequence> sequences;
  std::vector<std::vector<double>> rows;
  int dim = -1;

  auto flush = [&] {
    if (rows.empty()) return;
    ObservationSequence seq(rows.size(), dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (int c = 0; c < dim; ++c) seq(static_cast<Eigen::Index>(r), c) = rows[r][c];
    }
    sequences.push_back(std::move(seq));
    rows.clear();
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) {
      flush();
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      row.push_back(parse_cell(std::string_view(line).substr(start, end - start), path, line_no));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (dim == -1) dim = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != dim) {
      fail(location(path, line_no) + "ragged row: expected " + std::to_string(dim) +
           " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  flush();
  if (sequences.empty()) fail("'" + path + "' contains no data rows");
  return sequences;
}

std::vector<ObservationSequence> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");

  std::vector<ObservationSequence> sequences;
  int dim = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json parsed;
    try {
      parsed = json::parse(line);
    } catch (const json::exception& e) {
      fail(location(path, line_no) + e.what());
    }
    if (!parsed.is_array() || parsed.empty()) {
      fail(location(path, line_no) + "expected a nonempty array of observations");
    }
    for (const auto& obs : parsed) {
      if (!obs.is_array() || obs.empty()) {
        fail(location(path, line_no) + "each observation must be a nonempty numeric array");
      }
      if (dim == -1) dim = static_cast<int>(obs.size());
      if (static_cast<int>(obs.size()) != dim) {
        fail(location(path, line_no) + "ragged observation: expected " + std::to_string(dim) +
             " values, got " + std::to_string(obs.size()));
      }
    }
    ObservationSequence seq(parsed.size(), dim);
    for (std::size_t r = 0; r < parsed.size(); ++r) {
      for (int c = 0; c < dim; ++c) {
        const auto& cell = parsed[r][static_cast<std::size_t>(c)];
        if (!cell.is_number()) fail(location(path, line_no) + "non-numeric cell");
        const double value = cell.get<double>();
        if (!std::isfinite(value)) fail(location(path, line_no) + "non-finite value not allowed");
        seq(static_cast<Eigen::Index>(r), c) = value;
      }
    }
    sequences.push_back(std::move(seq));
  }
  if (sequences.empty()) fail("'" + path + "' contains no sequences");
  return sequences;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
  }
  return out;
}

json gw_to_json(const GaussWishart& gw) {
  return json{{"m", to_json(gw.m)}, {"beta", gw.beta}, {"w", to_json(gw.w)}, {"nu", gw.nu}};
}

double number_of(const json& j, const std::string& what) {
  if (!j.is_number()) fail("model file: '" + what + "' must be a number");
  const double value = j.get<double>();
  if (!std::isfinite(value)) fail("model file: '" + what + "' is not finite");
  return value;
}

const json& member(const json& j, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) fail("model file: missing '" + key + "'");
  return *it;
}

Eigen::VectorXd vector_of(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail("model file: '" + what + "' must be a nonempty array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_of(j[i], what);
  return v;
}

Eigen::MatrixXd matrix_of(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail("model file: '" + what + "' must be a nonempty array");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail("model file: '" + what + "' must be an array of arrays");
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail("model file: ragged '" + what + "'");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number_of(j[r][c], what);
    }
  }
  return m;
}

GaussWishart gw_of(const json& j, const std::string& what) {
  return GaussWishart(vector_of(member(j, "m"), what + ".m"),
                      number_of(member(j, "beta"), what + ".beta"),
                      matrix_of(member(j, "w"), what + ".w"),
                      number_of(member(j, "nu"), what + ".nu"));
}

std::vector<DirichletRow> rows_of(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail("model file: '" + what + "' must be a nonempty array");
  std::vector<DirichletRow> rows;
  rows.reserve(j.size());
  for (const auto& row : j) rows.emplace_back(vector_of(row, what));
  return rows;
}

TrainMeta meta_of(const json& j, const std::string& objective_key) {
  TrainMeta meta;
  meta.seed = member(j, "seed").get<std::uint64_t>();
  meta.iterations = member(j, "iterations").get<int>();
  meta.final_objective = number_of(member(j, objective_key), objective_key);
  meta.tool_version = member(j, "tool_version").get<std::string>();
  return meta;
}

json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail("'" + path + "': " + e.what());
  }
}

void check_schema(const json& doc, const std::string& path) {
  const int version = member(doc, "schema_version").get<int>();
  if (version != kSchemaVersion) {
    fail("'" + path + "': unsupported schema_version " + std::to_string(version));
  }
}

void write_document(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) fail("failed writing '" + path + "'");
}

json params_to_json(const Eigen::VectorXd& pi, const Eigen::MatrixXd& a,
                    const std::vector<Eigen::VectorXd>& means,
                    const std::vector<Eigen::MatrixXd>& covariances) {
  json means_json = json::array();
  json covs_json = json::array();
  for (const auto& m : means) means_json.push_back(to_json(m));
  for (const auto& c : covariances) covs_json.push_back(to_json(c));
  return json{{"pi", to_json(pi)}, {"a", to_json(a)}, {"means", means_json},
              {"covariances", covs_json}};
}

}  // namespace

std::vector<ObservationSequence> read_sequences(const std::string& path, DataFormat format) {
  return format == DataFormat::kCsv ? read_csv(path) : read_jsonl(path);
}

void write_sequences_csv(const std::string& path, std::span<const ObservationSequence> seqs,
                         const std::vector<std::vector<int>>* states) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (i > 0) out << '\n';
    const auto& seq = seqs[i];
    for (Eigen::Index r = 0; r < seq.rows(); ++r) {
      for (Eigen::Index c = 0; c < seq.cols(); ++c) {
        if (c > 0) out << ',';
        out << format_double(seq(r, c));
      }
      if (states != nullptr) out << ',' << (*states)[i][static_cast<std::size_t>(r)];
      out << '\n';
    }
  }
  if (!out) fail("failed writing '" + path + "'");
}

void write_model(const TrainReport& report, const HmmPriors& priors, const std::string& path) {
  json posterior_emissions = json::array();
  for (const auto& gw : report.posterior.emissions) posterior_emissions.push_back(gw_to_json(gw));
  json prior_rows = json::array();
  for (const auto& row : priors.transition_alpha0) prior_rows.push_back(to_json(row.alpha));
  json post_rows = json::array();
  for (const auto& row : report.posterior.transitions) post_rows.push_back(to_json(row.alpha));

  const json doc{
      {"schema_version", kSchemaVersion},
      {"kind", "vb"},
      {"states", report.posterior.states()},
      {"dim", report.posterior.dim()},
      {"priors",
       {{"initial_alpha", to_json(priors.initial_alpha0.alpha)},
        {"transition_alpha", prior_rows},
        {"emission", gw_to_json(priors.emission0)}}},
      {"posterior",
       {{"initial_alpha", to_json(report.posterior.initial.alpha)},
        {"transition_alpha", post_rows},
        {"emissions", posterior_emissions}}},
      {"train_meta",
       {{"seed", report.config.seed},
        {"iterations", report.iterations},
        {"final_elbo", report.elbo_trace.empty() ? 0.0 : report.elbo_trace.back()},
        {"tool_version", kToolVersion}}}};
  write_document(doc, path);
}

void write_model(const EmReport& report, std::uint64_t seed, const std::string& path) {
  const json doc{
      {"schema_version", kSchemaVersion},
      {"kind", "em"},
      {"states", report.model.states()},
      {"dim", report.model.dim()},
      {"parameters", params_to_json(report.model.pi, report.model.a, report.model.means,
                                    report.model.covariances)},
      {"train_meta",
       {{"seed", seed},
        {"iterations", report.iterations},
        {"final_loglik", report.loglik_trace.empty() ? 0.0 : report.loglik_trace.back()},
        {"tool_version", kToolVersion}}}};
  write_document(doc, path);
}

Model read_model(const std::string& path) {
  const json doc = load_document(path);
  check_schema(doc, path);
  const std::string kind = member(doc, "kind").get<std::string>();
  try {
    if (kind == "vb") {
      const json& priors = member(doc, "priors");
      const json& post = member(doc, "posterior");
      VbModel model{
          HmmPriors{DirichletRow(vector_of(member(priors, "initial_alpha"), "initial_alpha")),
                    rows_of(member(priors, "transition_alpha"), "transition_alpha"),
                    gw_of(member(priors, "emission"), "emission")},
          HmmPosterior{DirichletRow(vector_of(member(post, "initial_alpha"), "initial_alpha")),
                       rows_of(member(post, "transition_alpha"), "transition_alpha"),
                       {}},
          meta_of(member(doc, "train_meta"), "final_elbo")};
      for (const auto& gw : member(post, "emissions")) {
        model.posterior.emissions.push_back(gw_of(gw, "emissions"));
      }
      model.priors.validate();
      model.posterior.validate();
      return model;
    }
    if (kind == "em") {
      const json& params = member(doc, "parameters");
      EmModel model{MlHmm{vector_of(member(params, "pi"), "pi"),
                          matrix_of(member(params, "a"), "a"),
                          {},
                          {}},
                    meta_of(member(doc, "train_meta"), "final_loglik")};
      for (const auto& m : member(params, "means")) {
        model.params.means.push_back(vector_of(m, "means"));
      }
      for (const auto& c : member(params, "covariances")) {
        model.params.covariances.push_back(matrix_of(c, "covariances"));
      }
      model.params.validate();
      return model;
    }
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    fail("'" + path + "': " + e.what());
  }
  fail("'" + path + "': unknown model kind '" + kind + "'");
}

GroundTruthHmm read_ground_truth(const std::string& path) {
  const json doc = load_document(path);
  GroundTruthHmm truth;
  try {
    if (doc.contains("kind") && member(doc, "kind").get<std::string>() != "ground_truth") {
      const Model model = read_model(path);
      if (const auto* vb = std::get_if<VbModel>(&model)) {
        const PointEstimate pe = point_estimate(vb->posterior);
        truth = GroundTruthHmm{pe.pi, pe.a, pe.means, pe.covariances};
      } else {
        const auto& em = std::get<EmModel>(model);
        truth = GroundTruthHmm{em.params.pi, em.params.a, em.params.means,
                               em.params.covariances};
      }
    } else {
      truth.pi = vector_of(member(doc, "pi"), "pi");
      truth.a = matrix_of(member(doc, "a"), "a");
      for (const auto& m : member(doc, "means")) truth.means.push_back(vector_of(m, "means"));
      for (const auto& c : member(doc, "covariances")) {
        truth.covariances.push_back(matrix_of(c, "covariances"));
      }
    }
    truth.validate();
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    fail("'" + path + "': " + e.what());
  }
  return truth;
}

void write_ground_truth(const GroundTruthHmm& model, const std::string& path) {
  json doc{{"kind", "ground_truth"},
           {"pi", to_json(model.pi)},
           {"a", to_json(model.a)},
           {"means", json::array()},
           {"covariances", json::array()}};
  for (const auto& m : model.means) doc["means"].push_back(to_json(m));
  for (const auto& c : model.covariances) doc["covariances"].push_back(to_json(c));
  write_document(doc, path);
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace vbhmm::io
