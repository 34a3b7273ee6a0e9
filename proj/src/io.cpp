#include "mapdoa/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mapdoa {

namespace {

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

nlohmann::json complex_to_json(const Complex& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) return Complex(j[0].get<double>(), j[1].get<double>());
  throw std::invalid_argument("expected a number or an [re, im] pair");
}

}  // namespace

nlohmann::json scenario_to_json(const Scenario& scenario) {
  nlohmann::json j;
  j["true_frequencies"] = scenario.true_frequencies;
  if (scenario.source_variance.size() == 1) {
    j["source_variance"] = scenario.source_variance[0];
  } else {
    j["source_variance"] =
        std::vector<double>(scenario.source_variance.data(),
                            scenario.source_variance.data() + scenario.source_variance.size());
  }
  if (scenario.correlation) j["correlation"] = complex_to_json(*scenario.correlation);
  if (scenario.source_covariance) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < scenario.source_covariance->rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index k = 0; k < scenario.source_covariance->cols(); ++k) {
        row.push_back(complex_to_json((*scenario.source_covariance)(i, k)));
      }
      rows.push_back(std::move(row));
    }
    j["source_covariance"] = std::move(rows);
  }
  j["noise_variance"] = scenario.noise_variance;
  j["snapshots"] = scenario.snapshots;
  j["seed"] = scenario.seed;
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario scenario;
  scenario.true_frequencies = j.at("true_frequencies").get<std::vector<double>>();
  if (j.contains("source_variance")) {
    const auto& sv = j["source_variance"];
    if (sv.is_number()) {
      scenario.source_variance = RealVector::Constant(1, sv.get<double>());
    } else {
      auto values = sv.get<std::vector<double>>();
      scenario.source_variance =
          Eigen::Map<const RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
    }
  }
  if (j.contains("correlation")) scenario.correlation = complex_from_json(j["correlation"]);
  if (j.contains("source_covariance")) {
    const auto& rows = j["source_covariance"];
    const auto n = rows.size();
    ComplexMatrix cov(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) {
        throw std::invalid_argument("source_covariance must be square");
      }
      for (std::size_t k = 0; k < n; ++k) cov(i, k) = complex_from_json(rows[i][k]);
    }
    scenario.source_covariance = std::move(cov);
  }
  scenario.noise_variance = j.value("noise_variance", 1.0);
  scenario.snapshots = j.value("snapshots", 1);
  scenario.seed = j.value("seed", std::uint64_t{0});
  scenario.validate();
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  nlohmann::json j;
  in >> j;
  return scenario_from_json(j);
}

void write_complex_csv(const ComplexMatrix& matrix, std::ostream& out) {
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index k = 0; k < matrix.cols(); ++k) {
      if (k > 0) out << ',';
      out << format_double(matrix(i, k).real()) << ',' << format_double(matrix(i, k).imag());
    }
    out << '\n';
  }
}

ComplexMatrix read_complex_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("read_complex_csv: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty() || rows.front().size() % 2 != 0) {
    throw std::invalid_argument("read_complex_csv: expected nonempty re/im column pairs");
  }
  ComplexMatrix matrix(rows.size(), rows.front().size() / 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index k = 0; k < matrix.cols(); ++k) {
      matrix(static_cast<Eigen::Index>(i), k) = Complex(rows[i][2 * k], rows[i][2 * k + 1]);
    }
  }
  return matrix;
}

void save_complex_csv(const ComplexMatrix& matrix, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_complex_csv(matrix, out);
}

ComplexMatrix load_complex_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);
  return read_complex_csv(in);
}

}  // namespace mapdoa
