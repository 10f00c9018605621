#pragma once

// CSV ingestion and report emission. Every file written here can be read
// back by the toolkit; decimals carry 17 significant digits so doubles
// round-trip exactly.

#include <optional>
#include <string>
#include <vector>

#include "panelgls/dgp.hpp"
#include "panelgls/estimators.hpp"
#include "panelgls/inference.hpp"
#include "panelgls/montecarlo.hpp"

namespace panelgls {

/// Shortest-safe decimal form of a double (17 significant digits).
std::string format_double(double v);

struct LoadOptions {
  /// Prepend a column of ones to D unless it already holds a constant column.
  bool add_intercept = true;
};

/// Reads a long-format panel with header `unit,time,y,x1..xK,d1..dS`.
/// Rows may come in any order; units and times are sorted numerically.
/// Throws ParseError, UnbalancedPanel, CommonRegressorMismatch or IoError.
PanelData load_panel_csv(const std::string& path, const LoadOptions& options = {});

/// Writes `panel` in the long format read by load_panel_csv (units and
/// periods numbered from 1).
void write_panel_csv(const PanelData& panel, const std::string& path);

/// unit,alpha,beta_1..beta_K
void write_truth_csv(const SimulatedPanel& sim, const std::string& path);

/// One row per unit: unit,method,alpha_1..alpha_S,beta_1..beta_K and, with
/// inference, se_/t_ columns for every coefficient followed by
/// W_gamma,W_beta,W_joint. Coefficients without a standard error are "nan".
void write_estimates_csv(const EstimateSet& est, const InferenceSet* inf, const std::string& path);

/// estimator,group,mean,rmse,reps,dropped
void write_mc_summary_csv(const McSummary& summary, const std::string& path);

/// Plain numeric matrix, no header.
void write_matrix_csv(const Matrix& m, const std::string& path);
Matrix read_matrix_csv(const std::string& path);

/// Generic parsed CSV: header plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace panelgls
