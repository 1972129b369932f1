#include "acee/bench/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace acee::bench {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace and a trailing \r
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, Eigen::Index row, const std::string& col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw std::runtime_error("csv: non-numeric cell at data row " + std::to_string(row + 1) +
                             ", column '" + col + "': '" + cell + "'");
  return value;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

effects::ObservationalDataset ingest_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
  const std::vector<std::string> header = split_line(line);

  auto column_of = [&](const std::string& name) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return static_cast<int>(c);
    throw std::runtime_error("csv: missing column '" + name + "' in " + path);
  };

  const int d_col = column_of(schema.treatment_col);
  const int y_col = column_of(schema.outcome_col);

  std::vector<std::string> covariates = schema.covariate_cols;
  if (covariates.empty()) {
    for (const std::string& name : header)
      if (name != schema.treatment_col && name != schema.outcome_col) covariates.push_back(name);
  }
  std::vector<int> x_cols;
  for (const std::string& name : covariates) x_cols.push_back(column_of(name));

  std::vector<std::vector<double>> x_rows;
  std::vector<int> d_rows;
  std::vector<double> y_rows;
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("csv: data row " + std::to_string(row + 1) + " has " +
                               std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(header.size()));
    std::vector<double> xr(x_cols.size());
    for (std::size_t c = 0; c < x_cols.size(); ++c)
      xr[c] = parse_cell(cells[x_cols[c]], row, covariates[c]);
    const double dv = parse_cell(cells[d_col], row, schema.treatment_col);
    if (dv != 0.0 && dv != 1.0)
      throw std::runtime_error("csv: treatment outside {0,1} at data row " +
                               std::to_string(row + 1) + ", column '" + schema.treatment_col +
                               "'");
    x_rows.push_back(std::move(xr));
    d_rows.push_back(static_cast<int>(dv));
    y_rows.push_back(parse_cell(cells[y_col], row, schema.outcome_col));
    ++row;
  }
  if (row == 0) throw std::runtime_error("csv: no data rows in " + path);

  effects::ObservationalDataset out;
  out.x.resize(row, static_cast<Eigen::Index>(x_cols.size()));
  out.d.resize(row);
  out.y.resize(row);
  for (Eigen::Index i = 0; i < row; ++i) {
    for (std::size_t c = 0; c < x_cols.size(); ++c)
      out.x(i, static_cast<Eigen::Index>(c)) = x_rows[i][c];
    out.d[i] = d_rows[i];
    out.y[i] = y_rows[i];
  }
  out.column_names = covariates;
  return out;
}

void write_dataset_csv(const effects::ObservationalDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  for (Eigen::Index c = 0; c < dataset.p(); ++c) {
    out << (dataset.column_names.empty() ? "x" + std::to_string(c + 1)
                                         : dataset.column_names[c]);
    out << ",";
  }
  out << "d,y\n";
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    for (Eigen::Index c = 0; c < dataset.p(); ++c) out << fmt(dataset.x(i, c)) << ",";
    out << dataset.d[i] << "," << fmt(dataset.y[i]) << "\n";
  }
}

void write_matrix_csv(const numerics::Matrix& m, const std::vector<std::string>& header,
                      const std::string& path) {
  if (!header.empty() && static_cast<Eigen::Index>(header.size()) != m.cols())
    throw std::invalid_argument("csv: header width mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      out << header[c] << (c + 1 < header.size() ? "," : "");
    out << "\n";
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << fmt(m(i, c)) << (c + 1 < m.cols() ? "," : "");
    out << "\n";
  }
}

}  // namespace acee::bench
