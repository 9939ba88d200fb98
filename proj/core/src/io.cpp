#include "ppca/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ppca/errors.hpp"
#include "ppca/synth.hpp"

namespace ppca {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

double parse_double(const std::string& token, const std::string& path) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw IoError("bad numeric value '" + token + "' in '" + path + "'");
  }
  return value;
}

long long parse_int(const std::string& token, const std::string& path) {
  long long value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw IoError("bad integer value '" + token + "' in '" + path + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> tokens;
  std::string token;
  std::istringstream stream(line);
  while (std::getline(stream, token, sep)) tokens.push_back(token);
  if (!line.empty() && line.back() == sep) tokens.emplace_back();
  return tokens;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out = open_out(path);
  out << "theta";
  for (int k = 0; k < data.dim(); ++k) out << ",x" << k + 1;
  out << "\n";
  for (int i = 0; i < data.size(); ++i) {
    out << format_double(data.param(i));
    for (int k = 0; k < data.dim(); ++k) {
      out << "," << format_double(data.observations()(k, i));
    }
    out << "\n";
  }
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  const auto header = split(line, ',');
  if (header.size() < 2 || header[0] != "theta") {
    throw IoError("'" + path + "' must start with a 'theta,x1,...' header");
  }
  const int K = static_cast<int>(header.size()) - 1;

  std::vector<double> params;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tokens = split(line, ',');
    if (static_cast<int>(tokens.size()) != K + 1) {
      throw IoError("row with " + std::to_string(tokens.size()) +
                    " columns in '" + path + "' (expected " + std::to_string(K + 1) + ")");
    }
    params.push_back(parse_double(tokens[0], path));
    for (int k = 0; k < K; ++k) values.push_back(parse_double(tokens[static_cast<size_t>(k) + 1], path));
  }
  if (params.empty()) throw IoError("'" + path + "' has no data rows");
  Mat observations(K, static_cast<Eigen::Index>(params.size()));
  for (size_t i = 0; i < params.size(); ++i) {
    for (int k = 0; k < K; ++k) {
      observations(k, static_cast<Eigen::Index>(i)) = values[i * static_cast<size_t>(K) + static_cast<size_t>(k)];
    }
  }
  return Dataset(std::move(observations), std::move(params));
}

TruthTable make_truth_table(const std::vector<double>& thetas, const Mat& coefficients) {
  const int n = static_cast<int>(thetas.size());
  if (coefficients.cols() != n || coefficients.rows() != 2) {
    throw DimensionError("truth table needs a 2 x n coefficient matrix");
  }
  TruthTable table;
  table.thetas = thetas;
  table.means.resize(3, n);
  table.basis1.resize(3, n);
  table.basis2.resize(3, n);
  table.coefficients = coefficients;
  for (int i = 0; i < n; ++i) {
    table.means.col(i) = true_mean(thetas[static_cast<size_t>(i)]);
    const Mat basis = true_basis(thetas[static_cast<size_t>(i)]);
    table.basis1.col(i) = basis.col(0);
    table.basis2.col(i) = basis.col(1);
  }
  return table;
}

void write_truth_csv(const std::string& path, const TruthTable& table) {
  std::ofstream out = open_out(path);
  out << "theta,mu1,mu2,mu3,p1_1,p1_2,p1_3,p2_1,p2_2,p2_3,beta1,beta2\n";
  for (size_t i = 0; i < table.thetas.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    out << format_double(table.thetas[i]);
    for (int k = 0; k < 3; ++k) out << "," << format_double(table.means(k, col));
    for (int k = 0; k < 3; ++k) out << "," << format_double(table.basis1(k, col));
    for (int k = 0; k < 3; ++k) out << "," << format_double(table.basis2(k, col));
    for (int k = 0; k < 2; ++k) out << "," << format_double(table.coefficients(k, col));
    out << "\n";
  }
}

TruthTable read_truth_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  if (split(line, ',').size() != 12) {
    throw IoError("'" + path + "' does not look like a ground-truth table");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tokens = split(line, ',');
    if (tokens.size() != 12) throw IoError("short row in '" + path + "'");
    std::vector<double> row;
    row.reserve(12);
    for (const auto& token : tokens) row.push_back(parse_double(token, path));
    rows.push_back(std::move(row));
  }
  TruthTable table;
  const auto n = static_cast<Eigen::Index>(rows.size());
  table.means.resize(3, n);
  table.basis1.resize(3, n);
  table.basis2.resize(3, n);
  table.coefficients.resize(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<size_t>(i)];
    table.thetas.push_back(row[0]);
    for (int k = 0; k < 3; ++k) table.means(k, i) = row[static_cast<size_t>(1 + k)];
    for (int k = 0; k < 3; ++k) table.basis1(k, i) = row[static_cast<size_t>(4 + k)];
    for (int k = 0; k < 3; ++k) table.basis2(k, i) = row[static_cast<size_t>(7 + k)];
    for (int k = 0; k < 2; ++k) table.coefficients(k, i) = row[static_cast<size_t>(10 + k)];
  }
  return table;
}

GroundTruth truth_evaluators(const TruthTable& table) {
  const auto locate = [table](double theta) -> Eigen::Index {
    for (size_t i = 0; i < table.thetas.size(); ++i) {
      if (table.thetas[i] == theta) return static_cast<Eigen::Index>(i);
    }
    throw OutOfRangeError("parameter value " + format_double(theta) +
                          " is not tabulated in the ground-truth file");
  };
  GroundTruth truth;
  truth.eval_thetas = table.thetas;
  truth.mean_at = [table, locate](double theta) -> Vec {
    return table.means.col(locate(theta));
  };
  truth.basis_at = [table, locate](double theta) -> Mat {
    const Eigen::Index i = locate(theta);
    Mat basis(3, 2);
    basis.col(0) = table.basis1.col(i);
    basis.col(1) = table.basis2.col(i);
    return basis;
  };
  return truth;
}

void write_mask_csv(const std::string& path, const MaskMatrix& masks) {
  std::ofstream out = open_out(path);
  out << "endpoint";
  for (int k = 0; k < masks.rows(); ++k) out << ",m" << k + 1;
  out << "\n";
  for (int b = 0; b < masks.cols(); ++b) {
    out << b;
    for (int k = 0; k < masks.rows(); ++k) {
      out << "," << static_cast<int>(masks(k, b));
    }
    out << "\n";
  }
}

MaskMatrix read_mask_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  const auto header = split(line, ',');
  if (header.size() < 2 || header[0] != "endpoint") {
    throw IoError("'" + path + "' must start with an 'endpoint,m1,...' header");
  }
  const int K = static_cast<int>(header.size()) - 1;
  std::vector<std::pair<int, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tokens = split(line, ',');
    if (static_cast<int>(tokens.size()) != K + 1) throw IoError("short mask row in '" + path + "'");
    const int b = static_cast<int>(parse_int(tokens[0], path));
    std::vector<double> mask;
    for (int k = 0; k < K; ++k) {
      const double m = parse_double(tokens[static_cast<size_t>(k) + 1], path);
      if (m != 0.0 && m != 1.0) throw IoError("mask entries in '" + path + "' must be 0 or 1");
      mask.push_back(m);
    }
    rows.emplace_back(b, std::move(mask));
  }
  const int B = static_cast<int>(rows.size());
  if (B < 2) throw IoError("'" + path + "' must list at least two endpoints");
  MaskMatrix masks = MaskMatrix::Constant(K, B, -1.0);
  for (const auto& [b, mask] : rows) {
    if (b < 0 || b >= B) throw IoError("mask endpoint index " + std::to_string(b) + " out of range in '" + path + "'");
    if (masks(0, b) != -1.0) throw IoError("duplicate mask endpoint " + std::to_string(b) + " in '" + path + "'");
    for (int k = 0; k < K; ++k) masks(k, b) = mask[static_cast<size_t>(k)];
  }
  return masks;
}

void save_model(const std::string& path, const PpcaModel& model, const TrainMetadata& meta) {
  std::ofstream out = open_out(path);
  const int B = model.endpoint_count();
  const int K = model.dim();
  const int V = model.max_components();
  out << "ppca-model v1\n";
  out << "dim " << K << "\n";
  out << "endpoints " << B;
  for (int b = 0; b < B; ++b) out << " " << format_double(model.grid().endpoint(b));
  out << "\n";
  out << "components " << V << "\n";
  out << "counts";
  for (int b = 0; b < B; ++b) out << " " << model.basis_count(b);
  out << "\n";
  out << "masked " << (model.has_masks() ? 1 : 0) << "\n";
  for (int b = 0; b < B; ++b) {
    out << "mean " << b;
    for (int k = 0; k < K; ++k) out << " " << format_double(model.means()(k, b));
    out << "\n";
  }
  for (int b = 0; b < B; ++b) {
    for (int v = 0; v < V; ++v) {
      out << "basis " << b << " " << v;
      for (int k = 0; k < K; ++k) out << " " << format_double(model.basis(b)(k, v));
      out << "\n";
    }
  }
  if (model.has_masks()) {
    for (int b = 0; b < B; ++b) {
      out << "mask " << b;
      for (int k = 0; k < K; ++k) out << " " << static_cast<int>((*model.masks())(k, b));
      out << "\n";
    }
  }
  out << "meta lambda_m " << format_double(meta.penalties.mean_smoothness) << "\n";
  out << "meta lambda_v " << format_double(meta.penalties.basis_smoothness) << "\n";
  out << "meta lambda_o " << format_double(meta.penalties.orthonormality) << "\n";
  out << "meta alpha_m " << format_double(meta.mean_rate) << "\n";
  out << "meta alpha_v " << format_double(meta.basis_rate) << "\n";
  out << "meta cycles " << meta.cycles << "\n";
  out << "meta mean_steps " << meta.mean_steps << "\n";
  out << "meta basis_steps " << meta.basis_steps << "\n";
  out << "meta mean_solver "
      << (meta.mean_solver == MeanSolver::closed_form ? "closed_form" : "gradient_descent")
      << "\n";
  out << "meta seed " << meta.seed << "\n";
  out << "meta cycles_run " << meta.cycles_run << "\n";
  out << "meta terminated_early " << (meta.terminated_early ? 1 : 0) << "\n";
  out << "meta rolled_back " << (meta.rolled_back ? 1 : 0) << "\n";
  out << "meta energy_data " << format_double(meta.final_energy.data) << "\n";
  out << "meta energy_smoothness " << format_double(meta.final_energy.smoothness) << "\n";
  out << "meta energy_ortho " << format_double(meta.final_energy.ortho) << "\n";
  out << "meta energy_total " << format_double(meta.final_energy.total) << "\n";
  out << "end\n";
}

ModelFile load_model(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "ppca-model v1") {
    throw IoError("'" + path + "' is not a ppca-model v1 file");
  }

  int K = -1, B = -1, V = -1;
  bool masked = false;
  std::vector<double> endpoints;
  std::vector<int> counts;
  Mat means;
  std::vector<Mat> bases;
  MaskMatrix masks;
  TrainMetadata meta;
  bool saw_end = false;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream stream(line);
    std::string keyword;
    stream >> keyword;
    if (keyword == "end") {
      saw_end = true;
      break;
    } else if (keyword == "dim") {
      stream >> K;
    } else if (keyword == "endpoints") {
      stream >> B;
      endpoints.resize(static_cast<size_t>(B));
      for (int b = 0; b < B; ++b) {
        std::string token;
        stream >> token;
        endpoints[static_cast<size_t>(b)] = parse_double(token, path);
      }
    } else if (keyword == "components") {
      stream >> V;
      if (K < 0 || B < 0) throw IoError("'" + path + "': components before dim/endpoints");
      means = Mat::Zero(K, B);
      bases.assign(static_cast<size_t>(B), Mat::Zero(K, V));
    } else if (keyword == "counts") {
      counts.resize(static_cast<size_t>(B));
      for (int b = 0; b < B; ++b) stream >> counts[static_cast<size_t>(b)];
    } else if (keyword == "masked") {
      int flag = 0;
      stream >> flag;
      masked = flag != 0;
      if (masked) masks = MaskMatrix::Zero(K, B);
    } else if (keyword == "mean") {
      int b = 0;
      stream >> b;
      for (int k = 0; k < K; ++k) {
        std::string token;
        stream >> token;
        means(k, b) = parse_double(token, path);
      }
    } else if (keyword == "basis") {
      int b = 0, v = 0;
      stream >> b >> v;
      for (int k = 0; k < K; ++k) {
        std::string token;
        stream >> token;
        bases[static_cast<size_t>(b)](k, v) = parse_double(token, path);
      }
    } else if (keyword == "mask") {
      int b = 0;
      stream >> b;
      for (int k = 0; k < K; ++k) {
        std::string token;
        stream >> token;
        masks(k, b) = parse_double(token, path);
      }
    } else if (keyword == "meta") {
      std::string name, value;
      stream >> name >> value;
      if (name == "lambda_m") meta.penalties.mean_smoothness = parse_double(value, path);
      else if (name == "lambda_v") meta.penalties.basis_smoothness = parse_double(value, path);
      else if (name == "lambda_o") meta.penalties.orthonormality = parse_double(value, path);
      else if (name == "alpha_m") meta.mean_rate = parse_double(value, path);
      else if (name == "alpha_v") meta.basis_rate = parse_double(value, path);
      else if (name == "cycles") meta.cycles = static_cast<int>(parse_int(value, path));
      else if (name == "mean_steps") meta.mean_steps = static_cast<int>(parse_int(value, path));
      else if (name == "basis_steps") meta.basis_steps = static_cast<int>(parse_int(value, path));
      else if (name == "mean_solver") meta.mean_solver = value == "closed_form" ? MeanSolver::closed_form : MeanSolver::gradient_descent;
      else if (name == "seed") meta.seed = static_cast<std::uint64_t>(parse_int(value, path));
      else if (name == "cycles_run") meta.cycles_run = static_cast<int>(parse_int(value, path));
      else if (name == "terminated_early") meta.terminated_early = parse_int(value, path) != 0;
      else if (name == "rolled_back") meta.rolled_back = parse_int(value, path) != 0;
      else if (name == "energy_data") meta.final_energy.data = parse_double(value, path);
      else if (name == "energy_smoothness") meta.final_energy.smoothness = parse_double(value, path);
      else if (name == "energy_ortho") meta.final_energy.ortho = parse_double(value, path);
      else if (name == "energy_total") meta.final_energy.total = parse_double(value, path);
      else throw IoError("unknown meta field '" + name + "' in '" + path + "'");
    } else {
      throw IoError("unknown keyword '" + keyword + "' in '" + path + "'");
    }
    if (stream.fail()) throw IoError("malformed line '" + line + "' in '" + path + "'");
  }
  if (!saw_end) throw IoError("'" + path + "' is truncated (missing end marker)");
  if (K < 0 || B < 0 || V < 0) throw IoError("'" + path + "' is missing header fields");

  std::optional<MaskMatrix> mask_opt;
  if (masked) mask_opt = masks;
  return ModelFile{PpcaModel(BinGrid(std::move(endpoints)), std::move(means),
                             std::move(bases), std::move(counts), std::move(mask_opt)),
                   meta};
}

void write_energy_trace_csv(const std::string& path,
                            const std::vector<EnergyBreakdown>& trace) {
  std::ofstream out = open_out(path);
  out << "cycle,data,smoothness,ortho,total\n";
  for (size_t c = 0; c < trace.size(); ++c) {
    out << c << "," << format_double(trace[c].data) << ","
        << format_double(trace[c].smoothness) << "," << format_double(trace[c].ortho)
        << "," << format_double(trace[c].total) << "\n";
  }
}

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
  std::ofstream out = open_out(path);
  out << "method,size_per_bin,train_size,train_rmse,test_rmse,mean_recovery_sse,"
         "subspace_recovery_error\n";
  for (const CompareRow& row : rows) {
    out << method_name(row.method) << "," << row.size_per_bin << "," << row.train_size
        << "," << format_double(row.train_rmse) << "," << format_double(row.test_rmse)
        << ",";
    if (row.mean_sse.has_value()) out << format_double(*row.mean_sse);
    out << ",";
    if (row.subspace_error.has_value()) out << format_double(*row.subspace_error);
    out << "\n";
  }
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out = open_out(path);
  out << "method,lambda_m,lambda_v,final_energy,mean_recovery_sse,"
         "subspace_recovery_error,rolled_back\n";
  out << "ipca,,,," << format_double(result.ipca_mean_sse) << ","
      << format_double(result.ipca_subspace_error) << ",\n";
  for (const SweepPoint& point : result.ppca) {
    out << "ppca," << format_double(point.lambda_m) << "," << format_double(point.lambda_v)
        << "," << format_double(point.final_energy) << ","
        << format_double(point.mean_sse) << "," << format_double(point.subspace_error)
        << "," << (point.rolled_back ? 1 : 0) << "\n";
  }
}

void write_rate_grid_csv(const std::string& path, const std::vector<RateGridCell>& cells) {
  std::ofstream out = open_out(path);
  out << "alpha_m,alpha_v,status,final_total\n";
  for (const RateGridCell& cell : cells) {
    out << format_double(cell.mean_rate) << "," << format_double(cell.basis_rate) << ","
        << (cell.diverged ? "diverged" : "ok") << ",";
    if (!cell.diverged) out << format_double(cell.final_total);
    out << "\n";
  }
}

}  // namespace ppca
