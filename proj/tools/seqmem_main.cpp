// seqmem: train, replay, and verify binary recurrent sequence memories, and
// evaluate the associated failure bounds and capacity formulas.
//
// Exit codes: 0 success; 1 verification found imperfect memorization
// (verify subcommand only); 2 usage, parameter, or input errors.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "seqmem/bounds.hpp"
#include "seqmem/experiments.hpp"
#include "seqmem/multi_pass.hpp"
#include "seqmem/network.hpp"
#include "seqmem/serialize.hpp"
#include "seqmem/single_pass.hpp"

namespace {

using namespace seqmem;

int g_exit_code = 0;

// Data goes to --out when given, standard output otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) {
        throw std::runtime_error("cannot open output file: " + path);
      }
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

struct MultiOptions {
  std::string schedule = "kaczmarz";
  std::string order = "random";
  double beta = 0.0;
  std::size_t max_epochs = 500;
  double tolerance = 0.25;
  std::uint64_t seed = 0;
};

void add_multi_options(CLI::App* cmd, MultiOptions& opts) {
  cmd->add_option("--schedule", opts.schedule, "Step-size schedule")
      ->check(CLI::IsMember({"kaczmarz", "constant"}));
  cmd->add_option("--order", opts.order, "Column visiting order")
      ->check(CLI::IsMember({"cyclic", "random"}));
  cmd->add_option("--beta", opts.beta, "Constant step size (constant schedule)");
  cmd->add_option("--max-epochs", opts.max_epochs, "Training epoch budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", opts.tolerance, "Max-abs residual for convergence")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--train-seed", opts.seed, "Row-sampling seed");
}

TrainConfig make_train_config(const MultiOptions& opts, std::size_t columns,
                              double p, double eta_tilde) {
  TrainConfig config;
  config.schedule = opts.schedule == "kaczmarz" ? StepSchedule::kKaczmarz
                                                : StepSchedule::kConstant;
  config.order =
      opts.order == "cyclic" ? VisitOrder::kCyclic : VisitOrder::kRandom;
  config.beta = opts.beta;
  config.max_updates = opts.max_epochs * columns;
  config.tolerance = opts.tolerance;
  config.seed = opts.seed;
  config.eta_tilde = eta_tilde;
  config.p = p;
  return config;
}

unsigned default_workers() {
  if (const char* env = std::getenv("SEQMEM_WORKERS")) {
    const int value = std::atoi(env);
    if (value >= 1) return static_cast<unsigned>(value);
  }
  return 1;
}

void setup_bound_eval(CLI::App& app) {
  auto* cmd = app.add_subcommand("bound-eval",
                                 "Evaluate the memorization failure bound");
  auto params = std::make_shared<BoundParams>();
  auto out_path = std::make_shared<std::string>();
  cmd->add_option("--L", params->neuron_count, "Neuron count")->required();
  cmd->add_option("--N", params->sequence_length, "Sequence length")->required();
  cmd->add_option("--p", params->p, "Firing probability");
  cmd->add_option("--eta-tilde", params->eta_tilde, "Relative disturbance");
  cmd->add_option("--out", *out_path, "Output path (default stdout)");
  cmd->callback([params, out_path] {
    Output out(*out_path);
    out.stream() << bound_json(theorem_bound(*params)).dump(1) << '\n';
  });
}

void setup_bound_invert(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "bound-invert", "Smallest L with bound <= target at the given N");
  struct Args {
    std::uint64_t n = 0;
    double p = 0.5;
    double eta_tilde = 0.125;
    double target = 1e-3;
    std::string out_path;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--N", args->n, "Sequence length")->required();
  cmd->add_option("--p", args->p, "Firing probability");
  cmd->add_option("--eta-tilde", args->eta_tilde, "Relative disturbance");
  cmd->add_option("--target", args->target, "Bound level to reach")->required();
  cmd->add_option("--out", args->out_path, "Output path (default stdout)");
  cmd->callback([args] {
    Output out(args->out_path);
    out.stream() << min_L_for_target(args->n, args->p, args->eta_tilde,
                                     args->target)
                 << '\n';
  });
}

void setup_bound_sweep(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "bound-sweep",
      "CSV of required L over a grid of N and bound levels (defaults: "
      "p=1/2, eta~=1/8, 17 lengths x 4 levels)");
  struct Args {
    std::vector<std::uint64_t> n_values;
    std::vector<double> targets;
    double p = 0.5;
    double eta_tilde = 0.125;
    std::string out_path;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--N", args->n_values, "Sequence lengths (repeatable)");
  cmd->add_option("--target", args->targets, "Bound levels (repeatable)");
  cmd->add_option("--p", args->p, "Firing probability");
  cmd->add_option("--eta-tilde", args->eta_tilde, "Relative disturbance");
  cmd->add_option("--out", args->out_path, "Output path (default stdout)");
  cmd->callback([args] {
    if (args->n_values.empty()) args->n_values = default_sweep_n_values();
    if (args->targets.empty()) args->targets = default_sweep_targets();
    const auto rows =
        bound_sweep(args->n_values, args->targets, args->p, args->eta_tilde);
    Output out(args->out_path);
    write_sweep_csv(out.stream(), rows);
  });
}

void setup_train(CLI::App& app) {
  auto* cmd = app.add_subcommand("train", "Train a network on a matrix file");
  struct Args {
    std::string matrix_path;
    std::string net_path;
    std::string mode = "single";
    double p = 0.5;
    double eta_tilde = 0.125;
    std::string residual_csv;
    unsigned workers = default_workers();
  };
  auto args = std::make_shared<Args>();
  auto multi = std::make_shared<MultiOptions>();
  cmd->add_option("--matrix", args->matrix_path, "Input matrix file")->required();
  cmd->add_option("--net", args->net_path, "Output network file")->required();
  cmd->add_option("--mode", args->mode, "Learning mode")
      ->check(CLI::IsMember({"single", "multi"}));
  cmd->add_option("--p", args->p, "Firing probability used for training");
  cmd->add_option("--eta-tilde", args->eta_tilde, "Relative disturbance");
  cmd->add_option("--residual-csv", args->residual_csv,
                  "Write the residual history (multi mode)");
  cmd->add_option("--workers", args->workers, "Parallel per-neuron workers")
      ->envname("SEQMEM_WORKERS");
  add_multi_options(cmd, *multi);
  cmd->callback([args, multi] {
    const FiringMatrix matrix = read_matrix_file(args->matrix_path);
    if (args->mode == "single") {
      const SinglePassNetwork net =
          train_single_pass(matrix, args->p, args->eta_tilde);
      write_network_file(args->net_path, net);
      std::cerr << "trained single-pass network: L=" << matrix.neuron_count()
                << " N=" << matrix.column_count()
                << " theta=" << net.params().theta << '\n';
      return;
    }
    const TrainConfig config = make_train_config(
        *multi, matrix.column_count(), args->p, args->eta_tilde);
    const SgdResult result = sgd_train(matrix, config, args->workers);
    write_network_file(args->net_path, result.network);
    if (!args->residual_csv.empty()) {
      std::ofstream csv(args->residual_csv);
      if (!csv) {
        throw std::runtime_error("cannot open output file: " +
                                 args->residual_csv);
      }
      write_residual_csv(csv, result.history);
    }
    std::cerr << "trained multi-pass network: converged="
              << (result.converged ? "yes" : "no")
              << " updates/neuron=" << result.updates_per_neuron
              << " max-residual=" << result.final_max_residual << '\n';
    if (result.structurally_unmemorizable) {
      std::cerr << "warning: an all-zero column precedes a firing target; "
                   "this sequence is structurally unmemorizable\n";
    }
  });
}

void setup_verify(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "verify", "Worst-case-disturbance verification of a trained network");
  struct Args {
    std::string net_path;
    std::string matrix_path;
    std::string out_path;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--net", args->net_path, "Network file")->required();
  cmd->add_option("--matrix", args->matrix_path, "Matrix file")->required();
  cmd->add_option("--out", args->out_path, "Report path (default stdout)");
  cmd->callback([args] {
    const FiringMatrix matrix = read_matrix_file(args->matrix_path);
    const NetworkVariant net = read_network_file(args->net_path);
    const VerificationReport report = std::visit(
        [&matrix](const auto& n) { return verify_memorization(n, matrix); },
        net);
    Output out(args->out_path);
    out.stream() << verification_json(report).dump(1) << '\n';
    if (!report.perfect) g_exit_code = 1;
  });
}

void setup_run(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "run", "Replay a trained network from a stored column");
  struct Args {
    std::string net_path;
    std::string matrix_path;
    std::size_t init_col = 0;
    std::size_t steps = 1;
    std::string policy = "none";
    std::uint64_t seed = 0;
    std::string out_path;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--net", args->net_path, "Network file")->required();
  cmd->add_option("--matrix", args->matrix_path, "Matrix file")->required();
  cmd->add_option("--init-col", args->init_col, "0-based column to start from");
  cmd->add_option("--steps", args->steps, "Steps to replay")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--policy", args->policy, "Disturbance policy")
      ->check(CLI::IsMember({"none", "adversarial", "sampled"}));
  cmd->add_option("--seed", args->seed, "Seed for the sampled policy");
  cmd->add_option("--out", args->out_path, "Output path (default stdout)");
  cmd->callback([args] {
    const FiringMatrix matrix = read_matrix_file(args->matrix_path);
    if (args->init_col >= matrix.column_count()) {
      throw std::runtime_error("--init-col is out of range");
    }
    const NetworkVariant net = read_network_file(args->net_path);
    DisturbanceSpec spec;
    spec.seed = args->seed;
    if (args->policy == "adversarial") {
      spec.policy = DisturbancePolicy::kAdversarial;
    } else if (args->policy == "sampled") {
      spec.policy = DisturbancePolicy::kSampled;
    }
    const FiringVector init = matrix.column_copy(args->init_col);
    const auto trajectory = std::visit(
        [&](const auto& n) { return run_sequence(n, init, args->steps, spec); },
        net);
    Output out(args->out_path);
    write_sequence(out.stream(), trajectory);
  });
}

void setup_mc(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "mc", "Monte Carlo estimate of the memorization failure rate");
  struct Args {
    ExperimentConfig config;
    std::string mode = "single";
    std::string out_path;
    std::string trial_csv;
  };
  auto args = std::make_shared<Args>();
  auto multi = std::make_shared<MultiOptions>();
  args->config.workers = default_workers();
  cmd->add_option("--L", args->config.neuron_count, "Neuron count")->required();
  cmd->add_option("--N", args->config.sequence_length, "Sequence length")
      ->required();
  cmd->add_option("--p", args->config.p, "Firing probability");
  cmd->add_option("--eta-tilde", args->config.eta_tilde, "Relative disturbance");
  cmd->add_option("--trials", args->config.trials, "Trial count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args->config.seed, "Master seed");
  cmd->add_option("--workers", args->config.workers, "Parallel trial workers")
      ->envname("SEQMEM_WORKERS");
  cmd->add_option("--confidence", args->config.confidence,
                  "Confidence level of the exact interval");
  cmd->add_option("--mode", args->mode, "Learning mode")
      ->check(CLI::IsMember({"single", "multi"}));
  cmd->add_option("--out", args->out_path, "Report path (default stdout)");
  cmd->add_option("--trial-csv", args->trial_csv, "Per-trial outcome dump");
  add_multi_options(cmd, *multi);
  cmd->callback([args, multi] {
    if (args->mode == "multi") {
      args->config.mode = TrainMode::kMultiPass;
      args->config.multi =
          make_train_config(*multi, args->config.sequence_length,
                            args->config.p, args->config.eta_tilde);
    }
    const bool keep_trials = !args->trial_csv.empty();
    const ExperimentReport report = monte_carlo(args->config, keep_trials);
    if (keep_trials) {
      std::ofstream csv(args->trial_csv);
      if (!csv) {
        throw std::runtime_error("cannot open output file: " + args->trial_csv);
      }
      write_trials_csv(csv, report.trial_outcomes);
    }
    Output out(args->out_path);
    out.stream() << report_json(report).dump(1) << '\n';
  });
}

void setup_exhaustive(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "exhaustive", "Exact failure probability by enumerating all matrices");
  struct Args {
    std::size_t l = 1;
    std::size_t n = 2;
    double p = 0.5;
    double eta_tilde = 0.125;
    std::size_t cap = 20;
    std::string out_path;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--L", args->l, "Neuron count")->required();
  cmd->add_option("--N", args->n, "Sequence length")->required();
  cmd->add_option("--p", args->p, "Firing probability");
  cmd->add_option("--eta-tilde", args->eta_tilde, "Relative disturbance");
  cmd->add_option("--cap", args->cap, "Enumeration cap on L*N");
  cmd->add_option("--out", args->out_path, "Output path (default stdout)");
  cmd->callback([args] {
    const double value =
        exhaustive_exact(args->l, args->n, args->p, args->eta_tilde, args->cap);
    Output out(args->out_path);
    out.stream() << format_number(value) << '\n';
  });
}

void setup_mgf(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "mgf", "Sample the interference statistic and check its MGF bound");
  struct Args {
    std::size_t l = 10;
    std::size_t n = 5;
    double p = 0.5;
    double t = 0.1;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    std::string out_path;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--L", args->l, "Neuron count")->required();
  cmd->add_option("--N", args->n, "Sequence length")->required();
  cmd->add_option("--p", args->p, "Firing probability");
  cmd->add_option("--t", args->t, "MGF argument");
  cmd->add_option("--samples", args->samples, "Sample count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args->seed, "Master seed");
  cmd->add_option("--out", args->out_path, "Output path (default stdout)");
  cmd->callback([args] {
    const MgfDiagnostic diag = estimate_mgf(args->l, args->n, args->p, args->t,
                                            args->samples, args->seed);
    Output out(args->out_path);
    out.stream() << mgf_json(diag).dump(1) << '\n';
  });
}

void setup_capacity(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "capacity", "Capacity formulas at the given parameters (bits)");
  struct Args {
    std::uint64_t l = 0;
    std::uint64_t n = 2;
    double p = 0.5;
    double eta_tilde = 0.125;
    std::string out_path;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--L", args->l, "Neuron count")->required();
  cmd->add_option("--N", args->n, "Sequence length");
  cmd->add_option("--p", args->p, "Firing probability");
  cmd->add_option("--eta-tilde", args->eta_tilde, "Relative disturbance");
  cmd->add_option("--out", args->out_path, "Output path (default stdout)");
  cmd->callback([args] {
    const CapacitySummary summary =
        capacity_summary(args->l, args->n, args->p, args->eta_tilde);
    Output out(args->out_path);
    out.stream() << capacity_json(summary).dump(1) << '\n';
  });
}

void setup_rank(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "rank", "Exact rank of the shifted system of a matrix file");
  struct Args {
    std::string matrix_path;
    std::size_t cap = 512;
    bool float_rank = false;
    std::string out_path;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--matrix", args->matrix_path, "Matrix file")->required();
  cmd->add_option("--cap", args->cap, "Exact-arithmetic cap on N");
  cmd->add_flag("--float-rank", args->float_rank,
                "Floating-point rank estimate instead of the exact test");
  cmd->add_option("--out", args->out_path, "Output path (default stdout)");
  cmd->callback([args] {
    const FiringMatrix matrix = read_matrix_file(args->matrix_path);
    const ShiftedSystem system = build_shifted_system(matrix);
    nlohmann::ordered_json j;
    j["L"] = matrix.neuron_count();
    j["N"] = matrix.column_count();
    if (args->float_rank) {
      const std::size_t rank = estimate_rank_float(system);
      j["rank"] = rank;
      j["full"] = rank == matrix.column_count();
      j["exact"] = false;
    } else {
      const RankResult result = rank_is_full(system, args->cap);
      j["rank"] = result.rank;
      j["full"] = result.full;
      j["exact"] = true;
    }
    Output out(args->out_path);
    out.stream() << j.dump(1) << '\n';
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "seqmem: sequence memorization in binary recurrent threshold networks "
      "(single-pass and multi-pass learning, failure bounds, capacity)"};
  app.require_subcommand(1);

  setup_bound_eval(app);
  setup_bound_invert(app);
  setup_bound_sweep(app);
  setup_train(app);
  setup_verify(app);
  setup_run(app);
  setup_mc(app);
  setup_exhaustive(app);
  setup_mgf(app);
  setup_capacity(app);
  setup_rank(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return g_exit_code;
}
