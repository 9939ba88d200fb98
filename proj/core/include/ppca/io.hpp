#pragma once

#include <string>
#include <vector>

#include "ppca/dataset.hpp"
#include "ppca/energy.hpp"
#include "ppca/eval.hpp"
#include "ppca/model.hpp"
#include "ppca/optim.hpp"
#include "ppca/types.hpp"

namespace ppca {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// --- datasets: comma-separated text, header row, first column the
// parameter, remaining columns the features -------------------------------

void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

// --- synthetic ground truth: true mean, the two true basis vectors and the
// generating coefficients sampled at each parameter value ------------------

struct TruthTable {
  std::vector<double> thetas;
  Mat means;         // 3 x n
  Mat basis1;        // 3 x n
  Mat basis2;        // 3 x n
  Mat coefficients;  // 2 x n
};

TruthTable make_truth_table(const std::vector<double>& thetas, const Mat& coefficients);
void write_truth_csv(const std::string& path, const TruthTable& table);
TruthTable read_truth_csv(const std::string& path);

/// Recovery-metric hooks backed by the table; evaluators only accept the
/// tabulated parameter values.
GroundTruth truth_evaluators(const TruthTable& table);

// --- per-endpoint masks: one row per endpoint, 0/1 per dimension ----------

void write_mask_csv(const std::string& path, const MaskMatrix& masks);
MaskMatrix read_mask_csv(const std::string& path);

// --- models: versioned plain-text format; numeric fields survive a
// save/load/save round trip byte for byte ----------------------------------

struct TrainMetadata {
  Penalties penalties;
  double mean_rate = 0.0;
  double basis_rate = 0.0;
  int cycles = 0;
  int mean_steps = 0;
  int basis_steps = 0;
  MeanSolver mean_solver = MeanSolver::gradient_descent;
  std::uint64_t seed = kDefaultSeed;
  int cycles_run = 0;
  bool terminated_early = false;
  bool rolled_back = false;
  EnergyBreakdown final_energy;
};

struct ModelFile {
  PpcaModel model;
  TrainMetadata meta;
};

void save_model(const std::string& path, const PpcaModel& model,
                const TrainMetadata& meta);
ModelFile load_model(const std::string& path);

// --- result tables ---------------------------------------------------------

void write_energy_trace_csv(const std::string& path,
                            const std::vector<EnergyBreakdown>& trace);
void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows);
void write_sweep_csv(const std::string& path, const SweepResult& result);

struct RateGridCell {
  double mean_rate = 0.0;
  double basis_rate = 0.0;
  bool diverged = false;
  double final_total = 0.0;
};

void write_rate_grid_csv(const std::string& path, const std::vector<RateGridCell>& cells);

}  // namespace ppca
