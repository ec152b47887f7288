#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vbhmm/baseline_em.hpp"
#include "vbhmm/datagen.hpp"
#include "vbhmm/io.hpp"
#include "vbhmm/trainer.hpp"
#include "vbhmm/types.hpp"
#include "vbhmm/vb_updates.hpp"

namespace vbhmm {

namespace {

using io::format_double;

io::DataFormat parse_format(const std::string& name) {
  if (name == "csv") return io::DataFormat::kCsv;
  if (name == "jsonl") return io::DataFormat::kJsonl;
  throw CLI::ValidationError("--format", "expected csv or jsonl");
}

void print_vector(const std::string& key, const Eigen::VectorXd& v) {
  std::cout << key;
  for (Eigen::Index i = 0; i < v.size(); ++i) std::cout << ' ' << format_double(v[i]);
  std::cout << '\n';
}

void print_matrix_rows(const std::string& key, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    print_vector(key + std::to_string(r), m.row(r).transpose());
  }
}

void print_matrix_flat(const std::string& key, const Eigen::MatrixXd& m) {
  std::cout << key;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) std::cout << ' ' << format_double(m(r, c));
  }
  std::cout << '\n';
}

struct TrainArgs {
  std::string data_path;
  std::string out_path;
  std::string format = "csv";
  std::string init = "random";
  std::string initial_update = "paper";
  std::string method = "vb";
  int states = 1;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iters = 200;
  int restarts = 1;
  double cov_floor = -1.0;  // em only; negative = 1e-6 * data scale
};

int run_train(const TrainArgs& args) {
  const auto data = io::read_sequences(args.data_path, parse_format(args.format));
  if (args.method == "em") {
    double cov_floor = args.cov_floor;
    if (cov_floor < 0.0) {
      cov_floor = 1e-6 * data_summary(data).second;
    }
    const EmReport report =
        baum_welch_fit(data, args.states, args.seed, args.max_iters, args.tol, cov_floor);
    if (report.diverged) {
      throw NumericError("em training diverged (covariance collapse); no model written");
    }
    for (std::size_t k = 0; k < report.loglik_trace.size(); ++k) {
      std::cout << "iter " << (k + 1) << " elbo " << format_double(report.loglik_trace[k])
                << '\n';
    }
    io::write_model(report, args.seed, args.out_path);
    return 0;
  }

  TrainConfig cfg;
  cfg.states = args.states;
  cfg.seed = args.seed;
  cfg.tol = args.tol;
  cfg.max_iters = args.max_iters;
  cfg.restarts = args.restarts;
  cfg.init = args.init == "kmeans" ? InitMethod::kKMeans : InitMethod::kRandomResponsibilities;
  cfg.initial_update = args.initial_update == "first-step" ? InitialUpdateMode::kFirstStep
                                                           : InitialUpdateMode::kPaper;
  const TrainReport report = fit(data, cfg);
  for (std::size_t k = 0; k < report.elbo_trace.size(); ++k) {
    std::cout << "iter " << (k + 1) << " elbo " << format_double(report.elbo_trace[k]) << '\n';
  }
  io::write_model(report, report.priors, args.out_path);
  return 0;
}

struct SampleArgs {
  std::string model_path;
  std::string out_path;
  int length = 1;
  std::uint64_t seed = 0;
  bool with_states = false;
};

int run_sample(const SampleArgs& args) {
  const GroundTruthHmm truth = io::read_ground_truth(args.model_path);
  const SampleResult result = sample(truth, args.length, args.seed);
  const std::vector<ObservationSequence> seqs{result.observations};
  if (args.with_states) {
    const std::vector<std::vector<int>> states{result.states};
    io::write_sequences_csv(args.out_path, seqs, &states);
  } else {
    io::write_sequences_csv(args.out_path, seqs);
  }
  return 0;
}

struct EvalArgs {
  std::string model_path;
  std::string data_path;
  std::string format = "csv";
};

int run_eval(const EvalArgs& args) {
  const io::Model model = io::read_model(args.model_path);
  const auto data = io::read_sequences(args.data_path, parse_format(args.format));
  double total = 0.0;
  double observations = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double log_z = 0.0;
    if (const auto* vb = std::get_if<io::VbModel>(&model)) {
      log_z = e_step(vb->posterior, data[i]).log_z_tilde;
    } else {
      log_z = log_likelihood(std::get<io::EmModel>(model).params, data[i]);
    }
    std::cout << "seq " << i << " logZ " << format_double(log_z) << '\n';
    total += log_z;
    observations += static_cast<double>(data[i].rows());
  }
  std::cout << "total logZ " << format_double(total) << '\n';
  std::cout << "per_obs " << format_double(total / observations) << '\n';
  return 0;
}

int run_inspect(const std::string& model_path) {
  const io::Model model = io::read_model(model_path);
  if (const auto* vb = std::get_if<io::VbModel>(&model)) {
    const PointEstimate pe = point_estimate(vb->posterior);
    const int states = vb->posterior.states();
    std::cout << "kind vb\n";
    std::cout << "states " << states << '\n';
    std::cout << "dim " << vb->posterior.dim() << '\n';
    print_vector("pi", pe.pi);
    print_matrix_rows("A", pe.a);
    for (int j = 0; j < states; ++j) {
      print_vector("mean" + std::to_string(j), pe.means[j]);
      print_matrix_flat("cov" + std::to_string(j), pe.covariances[j]);
    }
    print_vector("post_initial_alpha", vb->posterior.initial.alpha);
    for (int j = 0; j < states; ++j) {
      print_vector("post_transition_alpha" + std::to_string(j),
                   vb->posterior.transitions[j].alpha);
    }
    for (int j = 0; j < states; ++j) {
      const auto& gw = vb->posterior.emissions[j];
      print_vector("post_m" + std::to_string(j), gw.m);
      std::cout << "post_beta" << j << ' ' << format_double(gw.beta) << '\n';
      print_matrix_flat("post_w" + std::to_string(j), gw.w);
      std::cout << "post_nu" << j << ' ' << format_double(gw.nu) << '\n';
    }
    print_vector("prior_initial_alpha", vb->priors.initial_alpha0.alpha);
    for (int j = 0; j < states; ++j) {
      print_vector("prior_transition_alpha" + std::to_string(j),
                   vb->priors.transition_alpha0[j].alpha);
    }
    print_vector("prior_m", vb->priors.emission0.m);
    std::cout << "prior_beta " << format_double(vb->priors.emission0.beta) << '\n';
    print_matrix_flat("prior_w", vb->priors.emission0.w);
    std::cout << "prior_nu " << format_double(vb->priors.emission0.nu) << '\n';
    std::cout << "final_elbo " << format_double(vb->meta.final_objective) << '\n';
    std::cout << "iterations " << vb->meta.iterations << '\n';
    std::cout << "seed " << vb->meta.seed << '\n';
    return 0;
  }
  const auto& em = std::get<io::EmModel>(model);
  std::cout << "kind em\n";
  std::cout << "states " << em.params.states() << '\n';
  std::cout << "dim " << em.params.dim() << '\n';
  print_vector("pi", em.params.pi);
  print_matrix_rows("A", em.params.a);
  for (int j = 0; j < em.params.states(); ++j) {
    print_vector("mean" + std::to_string(j), em.params.means[j]);
    print_matrix_flat("cov" + std::to_string(j), em.params.covariances[j]);
  }
  std::cout << "final_loglik " << format_double(em.meta.final_objective) << '\n';
  std::cout << "iterations " << em.meta.iterations << '\n';
  std::cout << "seed " << em.meta.seed << '\n';
  return 0;
}

}  // namespace

int cli(int argc, const char* const* argv) {
  CLI::App app{"Variational Bayesian training for Gaussian-emission hidden Markov models"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "fit a model to a dataset");
  train_cmd->add_option("--data", train_args.data_path, "input dataset")->required();
  train_cmd->add_option("--states", train_args.states, "number of hidden states")
      ->required()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--format", train_args.format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  train_cmd->add_option("--seed", train_args.seed, "random seed");
  train_cmd->add_option("--tol", train_args.tol, "convergence tolerance")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--max-iters", train_args.max_iters, "iteration cap")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--init", train_args.init, "random or kmeans")
      ->check(CLI::IsMember({"random", "kmeans"}));
  train_cmd->add_option("--initial-update", train_args.initial_update, "paper or first-step")
      ->check(CLI::IsMember({"paper", "first-step"}));
  train_cmd->add_option("--restarts", train_args.restarts, "independent restarts")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--method", train_args.method, "vb or em")
      ->check(CLI::IsMember({"vb", "em"}));
  train_cmd->add_option("--cov-floor", train_args.cov_floor,
                        "em covariance eigenvalue floor (default 1e-6 * data scale)");
  train_cmd->add_option("--out", train_args.out_path, "output model file")->required();

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "draw a synthetic sequence from a model");
  sample_cmd->add_option("--model", sample_args.model_path, "ground-truth or trained model")
      ->required();
  sample_cmd->add_option("--length", sample_args.length, "sequence length")
      ->required()
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sample_args.seed, "random seed");
  sample_cmd->add_flag("--with-states", sample_args.with_states, "append the state column");
  sample_cmd->add_option("--out", sample_args.out_path, "output csv")->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "score a dataset under a model");
  eval_cmd->add_option("--model", eval_args.model_path, "model file")->required();
  eval_cmd->add_option("--data", eval_args.data_path, "input dataset")->required();
  eval_cmd->add_option("--format", eval_args.format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  std::string inspect_path;
  auto* inspect_cmd = app.add_subcommand("inspect", "print model parameters");
  inspect_cmd->add_option("--model", inspect_path, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train_cmd->parsed()) return run_train(train_args);
    if (sample_cmd->parsed()) return run_sample(sample_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (inspect_cmd->parsed()) return run_inspect(inspect_path);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 4;
  }
  return 2;
}

}  // namespace vbhmm
