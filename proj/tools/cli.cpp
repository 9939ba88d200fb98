#include "cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ppca/baselines.hpp"
#include "ppca/errors.hpp"
#include "ppca/eval.hpp"
#include "ppca/io.hpp"
#include "ppca/optim.hpp"
#include "ppca/synth.hpp"

namespace ppca::cli {

namespace {

std::vector<double> parse_double_list(const std::string& csv, const std::string& flag) {
  std::vector<double> values;
  std::stringstream stream(csv);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stod(token, &pos));
      if (pos != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ConfigError("bad value '" + token + "' in " + flag);
    }
  }
  if (values.empty()) throw ConfigError(flag + " needs at least one value");
  return values;
}

std::vector<int> parse_int_list(const std::string& csv, const std::string& flag) {
  std::vector<int> values;
  for (double v : parse_double_list(csv, flag)) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw ConfigError(flag + " needs integer values");
    values.push_back(i);
  }
  return values;
}

// --- shared option blocks --------------------------------------------------

struct GridOptions {
  std::string explicit_list;
  double lo = 0.0;
  double hi = 0.0;
  int bins = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--grid", explicit_list, "explicit endpoint list, e.g. 0,90,180,270,360");
    cmd->add_option("--grid-min", lo, "lower end of an equal-width grid");
    cmd->add_option("--grid-max", hi, "upper end of an equal-width grid");
    cmd->add_option("--bins", bins, "number of equal-width bins");
  }

  BinGrid make() const {
    if (!explicit_list.empty()) {
      if (bins != 0) throw ConfigError("give either --grid or --bins, not both");
      return BinGrid(parse_double_list(explicit_list, "--grid"));
    }
    if (bins <= 0) throw ConfigError("grid unspecified: give --grid or --grid-min/--grid-max/--bins");
    return BinGrid::uniform(lo, hi, bins);
  }
};

struct TrainOptions {
  double lambda_m = 0.0;
  double lambda_v = 0.0;
  double lambda_o = 0.0;
  double alpha_m = 1e-3;
  double alpha_v = 1e-3;
  int cycles = 100;
  int mean_iters = 100;
  int basis_iters = 100;
  std::string mean_solver = "gradient-descent";
  std::string reorder = "auto";
  double weight_threshold = 0.001;
  std::uint64_t seed = kDefaultSeed;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lambda-m", lambda_m, "mean smoothness penalty");
    cmd->add_option("--lambda-v", lambda_v, "basis smoothness penalty");
    cmd->add_option("--lambda-o", lambda_o, "orthonormality penalty");
    cmd->add_option("--alpha-m", alpha_m, "mean learning rate");
    cmd->add_option("--alpha-v", alpha_v, "basis learning rate");
    cmd->add_option("--cycles", cycles, "alternating cycles");
    cmd->add_option("--mean-iters", mean_iters, "mean descent steps per cycle");
    cmd->add_option("--basis-iters", basis_iters, "basis descent steps per cycle");
    cmd->add_option("--mean-solver", mean_solver,
                    "mean update: closed-form or gradient-descent")
        ->check(CLI::IsMember({"closed-form", "gradient-descent"}));
    cmd->add_option("--reorder", reorder, "basis reordering direction")
        ->check(CLI::IsMember({"auto", "forward", "backward"}));
    cmd->add_option("--weight-threshold", weight_threshold,
                    "PCA subset weight threshold");
    cmd->add_option("--seed", seed, "random seed");
  }

  TrainConfig make() const {
    TrainConfig config;
    config.penalties.mean_smoothness = lambda_m;
    config.penalties.basis_smoothness = lambda_v;
    config.penalties.orthonormality = lambda_o;
    config.mean_rate = alpha_m;
    config.basis_rate = alpha_v;
    config.cycles = cycles;
    config.mean_steps = mean_iters;
    config.basis_steps = basis_iters;
    config.mean_solver = mean_solver == "closed-form" ? MeanSolver::closed_form
                                                      : MeanSolver::gradient_descent;
    config.rng_seed = seed;
    config.init.weight_threshold = weight_threshold;
    if (reorder == "forward") config.init.reorder_direction = ReorderDirection::forward;
    if (reorder == "backward") config.init.reorder_direction = ReorderDirection::backward;
    return config;
  }
};

std::string default_sibling(const std::string& path, const std::string& suffix) {
  const size_t dot = path.rfind('.');
  const size_t slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

EnergyBreakdown returned_energy(const TrainReport& report) {
  const size_t idx = static_cast<size_t>(report.cycles_run) - (report.rolled_back ? 1 : 0);
  return report.energy_trace[idx];
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::string truth_out;
  std::uint64_t seed = kDefaultSeed;
  double coeff = 1.0;
  double noise = 1.5;
  double theta_start = 4.0;
  double theta_step = 8.0;
  int theta_count = 45;
};

int do_synth(const SynthArgs& args) {
  SynthSpec spec;
  spec.seed = args.seed;
  spec.coeff_range = args.coeff;
  spec.noise_range = args.noise;
  spec.thetas.clear();
  for (int i = 0; i < args.theta_count; ++i) {
    spec.thetas.push_back(args.theta_start + args.theta_step * i);
  }
  const SyntheticData generated = generate_dataset(spec);
  write_dataset_csv(args.out, generated.data);
  const std::string truth_path =
      args.truth_out.empty() ? default_sibling(args.out, "-truth") : args.truth_out;
  write_truth_csv(truth_path, make_truth_table(spec.thetas, generated.coefficients));
  std::cout << "wrote " << generated.data.size() << " observations to " << args.out
            << "\nwrote ground truth to " << truth_path << "\n";
  return 0;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string out;
  std::string trace;
  std::string mask;
  GridOptions grid;
  TrainOptions train;
  int components = 2;
  std::string components_list;
  bool strict = false;
};

int do_train(const TrainArgs& args) {
  const Dataset data = read_dataset_csv(args.data);
  const BinGrid grid = args.grid.make();
  data.validate_on(grid);

  std::vector<int> counts;
  if (!args.components_list.empty()) {
    counts = parse_int_list(args.components_list, "--components-list");
  } else {
    counts.assign(static_cast<size_t>(grid.endpoint_count()), args.components);
  }

  std::optional<MaskMatrix> masks;
  if (!args.mask.empty()) masks = read_mask_csv(args.mask);

  const TrainConfig config = args.train.make();
  const TrainResult result = train(data, grid, counts, config, masks);

  TrainMetadata meta;
  meta.penalties = config.penalties;
  meta.mean_rate = config.mean_rate;
  meta.basis_rate = config.basis_rate;
  meta.cycles = config.cycles;
  meta.mean_steps = config.mean_steps;
  meta.basis_steps = config.basis_steps;
  meta.mean_solver = config.mean_solver;
  meta.seed = config.rng_seed;
  meta.cycles_run = result.report.cycles_run;
  meta.terminated_early = result.report.terminated_early;
  meta.rolled_back = result.report.rolled_back;
  meta.final_energy = returned_energy(result.report);
  save_model(args.out, result.model, meta);

  const std::string trace_path =
      args.trace.empty() ? args.out + ".trace.csv" : args.trace;
  write_energy_trace_csv(trace_path, result.report.energy_trace);

  for (const std::string& warning : result.report.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  std::cout << "trained on " << data.size() << " observations, " << grid.bin_count()
            << " bins\ncycles run: " << result.report.cycles_run
            << (result.report.rolled_back ? " (rolled back to the previous cycle)" : "")
            << "\nfinal energy: " << format_double(meta.final_energy.total)
            << " (data " << format_double(meta.final_energy.data) << ", smoothness "
            << format_double(meta.final_energy.smoothness) << ", ortho "
            << format_double(meta.final_energy.ortho) << ")\nmodel: " << args.out
            << "\ntrace: " << trace_path << "\n";

  if (args.strict && result.report.rolled_back) {
    std::cerr << "error: training rolled back and --strict is set\n";
    return 2;
  }
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string data;
  std::string train_data;
  std::string model;
  std::string truth;
  std::string out;
  std::string methods = "pca,ipca,ppca";
  std::string sizes;
  std::string sweep_lambda_m;
  std::string sweep_lambda_v;
  GridOptions grid;
  TrainOptions train;
  int components = 2;
};

int do_eval(const EvalArgs& args) {
  const Dataset data = read_dataset_csv(args.data);

  std::optional<TruthTable> truth_table;
  if (!args.truth.empty()) truth_table = read_truth_csv(args.truth);

  if (!args.model.empty()) {
    const ModelFile loaded = load_model(args.model);
    const double rmse = mean_rmse(data, make_projector(loaded.model));
    std::ofstream out(args.out);
    if (!out) throw IoError("cannot open '" + args.out + "' for writing");
    out << "model,n,mean_rmse,mean_recovery_sse,subspace_recovery_error\n";
    out << args.model << "," << data.size() << "," << format_double(rmse) << ",";
    if (truth_table.has_value()) {
      const GroundTruth truth = truth_evaluators(*truth_table);
      out << format_double(mean_recovery_sse(make_mean_evaluator(loaded.model),
                                             truth.eval_thetas, truth.mean_at));
      out << ","
          << format_double(subspace_recovery_error(make_basis_evaluator(loaded.model),
                                                   truth.eval_thetas, truth.basis_at));
    } else {
      out << ",";
    }
    out << "\n";
    std::cout << "mean RMSE " << format_double(rmse) << " over " << data.size()
              << " observations; table: " << args.out << "\n";
    return 0;
  }

  if (args.train_data.empty()) {
    throw ConfigError("eval needs --model or --train-data");
  }
  const Dataset train_set = read_dataset_csv(args.train_data);
  const BinGrid grid = args.grid.make();
  train_set.validate_on(grid);
  data.validate_on(grid);

  const bool sweep_m = !args.sweep_lambda_m.empty();
  const bool sweep_v = !args.sweep_lambda_v.empty();
  if (sweep_m || sweep_v) {
    if (sweep_m && sweep_v) {
      throw ConfigError("give only one of --sweep-lambda-m / --sweep-lambda-v");
    }
    if (!truth_table.has_value()) throw ConfigError("penalty sweeps need --truth");
    const GroundTruth truth = truth_evaluators(*truth_table);
    const SweepAxis axis = sweep_m ? SweepAxis::mean_smoothness : SweepAxis::basis_smoothness;
    const std::vector<double> values = parse_double_list(
        sweep_m ? args.sweep_lambda_m : args.sweep_lambda_v,
        sweep_m ? "--sweep-lambda-m" : "--sweep-lambda-v");
    const SweepResult result =
        recovery_sweep(train_set, grid, args.components, args.train.make(), axis, values, truth);
    write_sweep_csv(args.out, result);
    std::cout << "sweep table: " << args.out << "\n";
    return 0;
  }

  CompareConfig config;
  config.components = args.components;
  config.train = args.train.make();
  config.seed = args.train.seed;
  config.methods.clear();
  std::stringstream stream(args.methods);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token == "pca") config.methods.push_back(Method::pca);
    else if (token == "ipca") config.methods.push_back(Method::ipca);
    else if (token == "ppca") config.methods.push_back(Method::ppca);
    else throw ConfigError("unknown method '" + token + "' (expected pca, ipca, ppca)");
  }
  if (!args.sizes.empty()) config.sizes_per_bin = parse_int_list(args.sizes, "--sizes");
  if (truth_table.has_value()) config.truth = truth_evaluators(*truth_table);

  const std::vector<CompareRow> rows = compare_methods(train_set, data, grid, config);
  write_compare_csv(args.out, rows);
  std::cout << rows.size() << " rows written to " << args.out << "\n";
  return 0;
}

// --- rate-grid ---------------------------------------------------------------

struct RateGridArgs {
  std::string data;
  std::string out;
  std::string mask;
  GridOptions grid;
  TrainOptions train;
  int components = 2;
  std::string alpha_m_grid = "1e-2,1e-3,1e-4,1e-5,1e-6";
  std::string alpha_v_grid = "1e-2,1e-3,1e-4,1e-5,1e-6";
};

int do_rate_grid(const RateGridArgs& args) {
  const Dataset data = read_dataset_csv(args.data);
  const BinGrid grid = args.grid.make();
  data.validate_on(grid);
  std::optional<MaskMatrix> masks;
  if (!args.mask.empty()) masks = read_mask_csv(args.mask);

  const std::vector<double> mean_rates = parse_double_list(args.alpha_m_grid, "--alpha-m-grid");
  const std::vector<double> basis_rates = parse_double_list(args.alpha_v_grid, "--alpha-v-grid");

  std::vector<RateGridCell> cells;
  const RateGridCell* best = nullptr;
  for (double am : mean_rates) {
    for (double av : basis_rates) {
      TrainConfig config = args.train.make();
      config.mean_rate = am;
      config.basis_rate = av;
      RateGridCell cell;
      cell.mean_rate = am;
      cell.basis_rate = av;
      try {
        const TrainResult result = train(data, grid, args.components, config, masks);
        cell.final_total = returned_energy(result.report).total;
      } catch (const DivergenceError&) {
        cell.diverged = true;
      }
      cells.push_back(cell);
    }
  }
  for (const RateGridCell& cell : cells) {
    if (cell.diverged) continue;
    // Minimal final energy; exact ties go to the smaller rate pair.
    if (best == nullptr || cell.final_total < best->final_total ||
        (cell.final_total == best->final_total &&
         (cell.mean_rate < best->mean_rate ||
          (cell.mean_rate == best->mean_rate && cell.basis_rate < best->basis_rate)))) {
      best = &cell;
    }
  }
  write_rate_grid_csv(args.out, cells);
  if (best == nullptr) {
    throw DivergenceError("every rate-grid cell diverged");
  }
  std::cout << "best alpha_m=" << format_double(best->mean_rate)
            << " alpha_v=" << format_double(best->basis_rate)
            << " total=" << format_double(best->final_total) << "\ntable: " << args.out
            << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"parameterized principal component analysis"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate the synthetic benchmark dataset");
  synth_cmd->add_option("--out", synth_args.out, "output dataset (csv)")->required();
  synth_cmd->add_option("--truth-out", synth_args.truth_out, "ground-truth output path");
  synth_cmd->add_option("--seed", synth_args.seed, "random seed");
  synth_cmd->add_option("--coeff", synth_args.coeff, "coefficient range bound");
  synth_cmd->add_option("--noise", synth_args.noise, "noise range bound");
  synth_cmd->add_option("--theta-start", synth_args.theta_start, "first parameter value");
  synth_cmd->add_option("--theta-step", synth_args.theta_step, "parameter step");
  synth_cmd->add_option("--theta-count", synth_args.theta_count, "number of observations");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--data", train_args.data, "training dataset (csv)")->required();
  train_cmd->add_option("--out", train_args.out, "output model path")->required();
  train_cmd->add_option("--trace", train_args.trace, "energy trace output (csv)");
  train_cmd->add_option("--mask", train_args.mask, "per-endpoint mask file (csv)");
  train_cmd->add_option("--components", train_args.components, "basis vectors per endpoint");
  train_cmd->add_option("--components-list", train_args.components_list,
                        "per-endpoint basis vector counts");
  train_cmd->add_flag("--strict", train_args.strict, "exit nonzero when training rolls back");
  train_args.grid.add_to(train_cmd);
  train_args.train.add_to(train_cmd);

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate models and compare methods");
  eval_cmd->add_option("--data", eval_args.data, "evaluation dataset (csv)")->required();
  eval_cmd->add_option("--out", eval_args.out, "output table (csv)")->required();
  eval_cmd->add_option("--model", eval_args.model, "saved model to evaluate");
  eval_cmd->add_option("--train-data", eval_args.train_data, "training dataset for comparisons");
  eval_cmd->add_option("--truth", eval_args.truth, "ground-truth table for recovery metrics");
  eval_cmd->add_option("--methods", eval_args.methods, "comma list of pca,ipca,ppca");
  eval_cmd->add_option("--sizes", eval_args.sizes, "training sizes per bin (comma list)");
  eval_cmd->add_option("--components", eval_args.components, "basis vectors per model");
  eval_cmd->add_option("--sweep-lambda-m", eval_args.sweep_lambda_m,
                       "sweep the mean smoothness penalty (comma list)");
  eval_cmd->add_option("--sweep-lambda-v", eval_args.sweep_lambda_v,
                       "sweep the basis smoothness penalty (comma list)");
  eval_args.grid.add_to(eval_cmd);
  eval_args.train.add_to(eval_cmd);

  RateGridArgs rate_args;
  CLI::App* rate_cmd = app.add_subcommand("rate-grid", "grid-search the learning rates");
  rate_cmd->add_option("--data", rate_args.data, "training dataset (csv)")->required();
  rate_cmd->add_option("--out", rate_args.out, "per-cell output table (csv)")->required();
  rate_cmd->add_option("--mask", rate_args.mask, "per-endpoint mask file (csv)");
  rate_cmd->add_option("--components", rate_args.components, "basis vectors per endpoint");
  rate_cmd->add_option("--alpha-m-grid", rate_args.alpha_m_grid, "mean rate grid (comma list)");
  rate_cmd->add_option("--alpha-v-grid", rate_args.alpha_v_grid, "basis rate grid (comma list)");
  rate_args.grid.add_to(rate_cmd);
  rate_args.train.add_to(rate_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth_cmd->parsed()) return do_synth(synth_args);
    if (train_cmd->parsed()) return do_train(train_args);
    if (eval_cmd->parsed()) return do_eval(eval_args);
    if (rate_cmd->parsed()) return do_rate_grid(rate_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool numerical =
        dynamic_cast<const SingularSystemError*>(&e) != nullptr ||
        dynamic_cast<const DivergenceError*>(&e) != nullptr ||
        dynamic_cast<const DegenerateBasisError*>(&e) != nullptr ||
        dynamic_cast<const EmptyEndpointError*>(&e) != nullptr ||
        dynamic_cast<const EmptyBinError*>(&e) != nullptr ||
        dynamic_cast<const ReorderError*>(&e) != nullptr;
    return numerical ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace ppca::cli
