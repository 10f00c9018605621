#include "panelgls/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "panelgls/errors.hpp"

namespace panelgls {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& text, std::size_t line_no) {
  if (text == "nan" || text == "NaN") return std::nan("");
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError("line " + std::to_string(line_no) + ": '" + text + "' is not a number");
  }
  return v;
}

long long parse_label(const std::string& text, std::size_t line_no) {
  long long v = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError("line " + std::to_string(line_no) + ": '" + text + "' is not an integer label");
  }
  return v;
}

// Index in the `x<k>` / `d<k>` naming scheme, or -1.
int numbered_column(const std::string& name, char prefix) {
  if (name.size() < 2 || name[0] != prefix) return -1;
  int v = 0;
  auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
  if (ec != std::errc() || ptr != name.data() + name.size() || v < 1) return -1;
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_line(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " + std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw ParseError("'" + path + "' has no header");
  return table;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  return parse_number(rows.at(row).at(column(name)), row + 2);
}

PanelData load_panel_csv(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line != "\r") header = split_line(line);
  }
  if (header.empty()) throw ParseError("'" + path + "' has no header");

  std::size_t unit_col = header.size(), time_col = header.size(), y_col = header.size();
  std::map<int, std::size_t> x_cols, d_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h == "unit") unit_col = c;
    else if (h == "time") time_col = c;
    else if (h == "y") y_col = c;
    else if (int k = numbered_column(h, 'x'); k > 0) x_cols[k] = c;
    else if (int s = numbered_column(h, 'd'); s > 0) d_cols[s] = c;
    else throw ParseError("line 1: unexpected column '" + h + "'");
  }
  if (unit_col == header.size() || time_col == header.size() || y_col == header.size()) {
    throw ParseError("line 1: header must contain unit, time and y");
  }
  auto check_dense = [](const std::map<int, std::size_t>& cols, const char* what) {
    int expect = 1;
    for (const auto& [k, c] : cols) {
      if (k != expect++) throw ParseError(std::string("line 1: ") + what + " columns must be numbered 1..n");
    }
  };
  check_dense(x_cols, "x");
  check_dense(d_cols, "d");
  const auto k = static_cast<Eigen::Index>(x_cols.size());
  const auto s = static_cast<Eigen::Index>(d_cols.size());

  struct Row {
    double y;
    std::vector<double> x, d;
  };
  std::map<std::pair<long long, long long>, Row> cells;
  std::map<long long, int> unit_index, time_index;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    const long long unit = parse_label(fields[unit_col], line_no);
    const long long time = parse_label(fields[time_col], line_no);
    Row row;
    row.y = parse_number(fields[y_col], line_no);
    for (const auto& [idx, c] : x_cols) row.x.push_back(parse_number(fields[c], line_no));
    for (const auto& [idx, c] : d_cols) row.d.push_back(parse_number(fields[c], line_no));
    if (!cells.emplace(std::make_pair(unit, time), std::move(row)).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate row for unit " +
                       std::to_string(unit) + ", time " + std::to_string(time));
    }
    unit_index[unit] = 0;
    time_index[time] = 0;
  }
  if (cells.empty()) throw ParseError("'" + path + "' has no data rows");
  int next = 0;
  for (auto& [label, idx] : unit_index) idx = next++;
  next = 0;
  for (auto& [label, idx] : time_index) idx = next++;

  const auto n = static_cast<Eigen::Index>(unit_index.size());
  const auto t = static_cast<Eigen::Index>(time_index.size());
  PanelData panel;
  panel.y.resize(t, n);
  panel.d.resize(t, s);
  panel.x.assign(static_cast<std::size_t>(n), Matrix(t, k));
  for (const auto& [unit, i] : unit_index) {
    for (const auto& [time, r] : time_index) {
      const auto it = cells.find({unit, time});
      if (it == cells.end()) {
        throw UnbalancedPanel("no observation for unit " + std::to_string(unit) + ", time " +
                              std::to_string(time));
      }
      const Row& row = it->second;
      panel.y(r, i) = row.y;
      for (Eigen::Index j = 0; j < k; ++j) panel.x[static_cast<std::size_t>(i)](r, j) = row.x[static_cast<std::size_t>(j)];
      for (Eigen::Index j = 0; j < s; ++j) {
        const double v = row.d[static_cast<std::size_t>(j)];
        if (i == 0) {
          panel.d(r, j) = v;
        } else if (std::abs(v - panel.d(r, j)) > 1e-12 * std::max(1.0, std::abs(panel.d(r, j)))) {
          throw CommonRegressorMismatch("d" + std::to_string(j + 1) + " differs between units at time " +
                                        std::to_string(time) + " (unit " + std::to_string(unit) + ")");
        }
      }
    }
  }
  if (options.add_intercept) panel = with_intercept(std::move(panel));
  panel.validate();
  return panel;
}

void write_panel_csv(const PanelData& panel, const std::string& path) {
  auto out = open_out(path);
  out << "unit,time,y";
  for (Eigen::Index j = 0; j < panel.unit_cols(); ++j) out << ",x" << j + 1;
  for (Eigen::Index j = 0; j < panel.common_cols(); ++j) out << ",d" << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < panel.units(); ++i) {
    const Matrix& xi = panel.x[static_cast<std::size_t>(i)];
    for (Eigen::Index r = 0; r < panel.periods(); ++r) {
      out << i + 1 << ',' << r + 1 << ',' << format_double(panel.y(r, i));
      for (Eigen::Index j = 0; j < xi.cols(); ++j) out << ',' << format_double(xi(r, j));
      for (Eigen::Index j = 0; j < panel.d.cols(); ++j) out << ',' << format_double(panel.d(r, j));
      out << '\n';
    }
  }
  finish(out, path);
}

void write_truth_csv(const SimulatedPanel& sim, const std::string& path) {
  auto out = open_out(path);
  out << "unit,alpha";
  for (Eigen::Index j = 0; j < sim.beta.rows(); ++j) out << ",beta_" << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < sim.alpha.size(); ++i) {
    out << i + 1 << ',' << format_double(sim.alpha(i));
    for (Eigen::Index j = 0; j < sim.beta.rows(); ++j) out << ',' << format_double(sim.beta(j, i));
    out << '\n';
  }
  finish(out, path);
}

void write_estimates_csv(const EstimateSet& est, const InferenceSet* inf, const std::string& path) {
  const Eigen::Index s = est.alpha ? est.alpha->rows() : 0;
  const Eigen::Index k = est.beta.rows();
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < s; ++j) names.push_back("alpha_" + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < k; ++j) names.push_back("beta_" + std::to_string(j + 1));

  auto out = open_out(path);
  out << "unit,method";
  for (const auto& nm : names) out << ',' << nm;
  if (inf) {
    for (const auto& nm : names) out << ",se_" << nm;
    for (const auto& nm : names) out << ",t_" << nm;
    out << ",W_gamma,W_beta,W_joint";
  }
  out << '\n';

  // Row offset of beta_1 inside the inference coefficient vector.
  const Eigen::Index inf_offset = inf && inf->joint ? s : 0;
  const std::string method = method_name(est.method);
  for (Eigen::Index i = 0; i < est.beta.cols(); ++i) {
    out << i + 1 << ',' << method;
    for (Eigen::Index j = 0; j < s; ++j) out << ',' << format_double((*est.alpha)(j, i));
    for (Eigen::Index j = 0; j < k; ++j) out << ',' << format_double(est.beta(j, i));
    if (inf) {
      auto coef_stat = [&](const Matrix& m, Eigen::Index idx, bool is_alpha) {
        if (is_alpha && !inf->joint) return std::nan("");
        return m(is_alpha ? idx : inf_offset + idx, i);
      };
      for (Eigen::Index j = 0; j < s; ++j) out << ',' << format_double(coef_stat(inf->se, j, true));
      for (Eigen::Index j = 0; j < k; ++j) out << ',' << format_double(coef_stat(inf->se, j, false));
      for (Eigen::Index j = 0; j < s; ++j) out << ',' << format_double(coef_stat(inf->tstats, j, true));
      for (Eigen::Index j = 0; j < k; ++j) out << ',' << format_double(coef_stat(inf->tstats, j, false));
      if (inf->wald.size() == static_cast<std::size_t>(est.beta.cols())) {
        const WaldTriple& w = inf->wald[static_cast<std::size_t>(i)];
        out << ',' << format_double(w.gamma.value) << ',' << format_double(w.beta.value) << ','
            << format_double(w.joint.value);
      } else {
        out << ",nan,nan,nan";
      }
    }
    out << '\n';
  }
  finish(out, path);
}

void write_mc_summary_csv(const McSummary& summary, const std::string& path) {
  auto out = open_out(path);
  out << "estimator,group,mean,rmse,reps,dropped\n";
  for (const McCell& c : summary.cells) {
    out << c.estimator << ',' << c.group << ',' << format_double(c.mean) << ',' << format_double(c.rmse)
        << ',' << summary.reps << ',' << summary.dropped << '\n';
  }
  finish(out, path);
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  auto out = open_out(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
  finish(out, path);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    for (const auto& cell : split_line(line)) row.push_back(parse_number(cell, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("line " + std::to_string(line_no) + ": ragged matrix row");
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  return m;
}

}  // namespace panelgls
