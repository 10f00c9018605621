#include "doctest.h"

#include <cmath>
#include <fstream>

#include "panelgls/errors.hpp"
#include "panelgls/io.hpp"
#include "support.hpp"

using namespace panelgls;
using testing::temp_path;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("panel csv round trip is exact") {
  std::mt19937_64 gen(61);
  auto draw = testing::random_panel(gen, 9, 4, 2, 2, 1.0);
  const std::string path = temp_path("roundtrip.csv");
  write_panel_csv(draw.panel, path);
  const PanelData back = load_panel_csv(path);
  CHECK(back.y == draw.panel.y);
  CHECK(back.d == draw.panel.d);
  CHECK(back.x[3] == draw.panel.x[3]);
}

TEST_CASE("rows may come in any order and an intercept is added") {
  const std::string path = temp_path("shuffled.csv");
  write_text(path,
             "unit,time,y,x1\n"
             "20,2,4.0,1.5\n10,1,1.0,0.5\n10,3,3.0,2.5\n20,1,2.0,0.25\n10,2,2.0,1.0\n20,3,6.0,2.0\n");
  const PanelData p = load_panel_csv(path);
  CHECK(p.units() == 2);
  CHECK(p.periods() == 3);
  CHECK(p.common_cols() == 1);
  CHECK(p.y(0, 1) == 2.0);
  CHECK(p.x[0](2, 0) == 2.5);
  CHECK(load_panel_csv(path, LoadOptions{false}).common_cols() == 0);
}

TEST_CASE("loader errors") {
  const std::string path = temp_path("bad.csv");

  write_text(path, "unit,time,y,x1\n1,1,1.0,2.0\n1,2,1.0,3.0\n2,1,0.5,1.0\n1,3,2,1\n2,3,1,1\n");
  CHECK_THROWS_AS(load_panel_csv(path), UnbalancedPanel);

  write_text(path, "unit,time,y,x1\n1,1,1.0,2.0\n1,2,abc,3.0\n");
  try {
    load_panel_csv(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  write_text(path, "unit,time,y,z1\n1,1,1.0,2.0\n");
  CHECK_THROWS_AS(load_panel_csv(path), ParseError);

  write_text(path, "unit,time,y,x2\n1,1,1.0,2.0\n");
  CHECK_THROWS_AS(load_panel_csv(path), ParseError);

  write_text(path, "unit,time,y,x1\n1,1,1.0\n");
  CHECK_THROWS_AS(load_panel_csv(path), ParseError);

  write_text(path, "unit,time,y,x1\n1,1,1.0,2.0\n1,1,1.0,2.0\n");
  CHECK_THROWS_AS(load_panel_csv(path), ParseError);

  write_text(path,
             "unit,time,y,x1,d1\n1,1,1,1,0.5\n1,2,2,3,0.7\n1,3,3,2,0.1\n"
             "2,1,1,2,0.5\n2,2,2,1,0.9\n2,3,3,5,0.1\n");
  CHECK_THROWS_AS(load_panel_csv(path), CommonRegressorMismatch);

  CHECK_THROWS_AS(load_panel_csv(temp_path("does_not_exist.csv")), IoError);
}

TEST_CASE("matrix csv round trip") {
  std::mt19937_64 gen(62);
  const Matrix m = testing::random_matrix(gen, 7, 5);
  const std::string path = temp_path("matrix.csv");
  write_matrix_csv(m, path);
  CHECK(read_matrix_csv(path) == m);
  write_text(path, "1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(path), ParseError);
}

TEST_CASE("estimates csv layout") {
  std::mt19937_64 gen(63);
  auto draw = testing::random_panel(gen, 30, 40, 2, 1, 1.0);
  const EstimateSet b = joint_breve(draw.panel);
  InferenceSet inf = hac_cov_breve(draw.panel, b, HacSpec{3});
  wald_tests(b, inf, 2, 0);
  const std::string path = temp_path("estimates.csv");
  write_estimates_csv(b, &inf, path);
  const CsvTable t = read_csv(path);
  CHECK(t.rows.size() == 40);
  CHECK(t.header.front() == "unit");
  CHECK(t.header.back() == "W_joint");
  CHECK(t.rows[4][t.column("method")] == "breve");
  CHECK(t.number(4, "beta_1") == b.beta(0, 4));
  CHECK(t.number(4, "alpha_2") == (*b.alpha)(1, 4));
  CHECK(t.number(4, "se_beta_1") == inf.se(2, 4));
  CHECK(t.number(4, "W_gamma") == inf.wald[4].gamma.value);

  const TransformedPanel tp = transform(draw.panel);
  EstimateSet g = fgls(tp);
  g.alpha = project_alpha(draw.panel, g.beta);
  InferenceSet ginf = hac_cov_fgls(tp, g, HacSpec{3});
  wald_tests(g, ginf, 2, 0);
  write_estimates_csv(g, &ginf, path);
  const CsvTable gt = read_csv(path);
  CHECK(std::isnan(gt.number(0, "se_alpha_1")));
  CHECK(gt.number(0, "se_beta_1") == ginf.se(0, 0));
  CHECK(std::isnan(gt.number(0, "W_joint")));

  write_estimates_csv(g, nullptr, path);
  CHECK(read_csv(path).header.size() == 5);
  CHECK_THROWS_AS(read_csv(path).column("W_beta"), ParseError);
}

TEST_CASE("truth and summary files") {
  SimulatedPanel sim;
  sim.alpha = Vector::Ones(2);
  sim.beta = Matrix(1, 2);
  sim.beta << 1.0, 3.0;
  const std::string path = temp_path("truth.csv");
  write_truth_csv(sim, path);
  const CsvTable t = read_csv(path);
  CHECK(t.number(1, "beta_1") == 3.0);

  McSummary s;
  s.reps = 5;
  s.cells.push_back({"gls", "alpha", 1.0, 0.95, 0.3});
  write_mc_summary_csv(s, path);
  const CsvTable m = read_csv(path);
  CHECK(m.rows[0][0] == "gls");
  CHECK(m.number(0, "rmse") == 0.3);
  CHECK(m.number(0, "reps") == 5.0);
}

TEST_CASE("writing to an unwritable path fails") {
  CHECK_THROWS_AS(write_matrix_csv(Matrix::Ones(1, 1), "/nonexistent_dir/x.csv"), IoError);
}
