#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sindy/csv.hpp"
#include "sindy/identify.hpp"

using namespace sindy;

namespace {

IdentifyOptions lorenz_options() {
  IdentifyOptions opt;
  opt.system = lorenz_system();
  opt.u0 = {-5.0, 10.0, 30.0};
  opt.h = 0.025;
  opt.t_end = 10.0;
  opt.dictionary = {.poly_order = 5};
  opt.params = {.lambda = 0.8};
  return opt;
}

IdentifyOptions thomas_options() {
  IdentifyOptions opt;
  opt.system = thomas_system();
  opt.u0 = {1.0, 1.0, 0.0};
  opt.h = 0.025;
  opt.t_end = 100.0;
  opt.dictionary = {.poly_order = 3, .sin_order = 1, .cos_order = 1};
  opt.params = {.lambda = 0.1};
  return opt;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("sindy_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("noise-free closed loop with analytic derivatives recovers the system exactly") {
  auto opt = lorenz_options();
  opt.analytic_derivatives = true;
  opt.params.lambda = 0.5;
  const IdentifyResult res = run_identify(opt);
  const auto truth = true_coefficients("lorenz", res.labels);
  REQUIRE(truth.has_value());
  for (std::size_t j = 0; j < res.labels.size(); ++j)
    for (std::size_t eq = 0; eq < 3; ++eq)
      CHECK(res.coefficients(j, eq) == Catch::Approx((*truth)(j, eq)).margin(1e-6));
  const auto supports = true_supports("lorenz", res.labels);
  REQUIRE(supports.has_value());
  for (std::size_t eq = 0; eq < 3; ++eq)
    CHECK(res.equations[eq].solution.support == (*supports)[eq]);
  CHECK_FALSE(res.snr_db.has_value());
  REQUIRE(res.relative_err.has_value());
  CHECK(*res.relative_err < 1e-8);
}

TEST_CASE("noise-free differenced run identifies the trigonometric system") {
  auto opt = thomas_options();
  const IdentifyResult res = run_identify(opt);
  const auto supports = true_supports("thomas", res.labels);
  REQUIRE(supports.has_value());
  for (std::size_t eq = 0; eq < 3; ++eq)
    CHECK(res.equations[eq].solution.support == (*supports)[eq]);
  REQUIRE(res.relative_err.has_value());
  CHECK(*res.relative_err < 1e-3);
}

TEST_CASE("noisy runs report an SNR and reuse the seed deterministically") {
  auto opt = lorenz_options();
  opt.noise = {.variance = 0.01, .seed = 11};
  const IdentifyResult a = run_identify(opt);
  const IdentifyResult b = run_identify(opt);
  REQUIRE(a.snr_db.has_value());
  CHECK(*a.snr_db == Catch::Approx(41.27).margin(1.0));  // std 0.1 on this trajectory
  CHECK(a.coefficients == b.coefficients);               // bitwise repeatability
}

TEST_CASE("unknown systems have no reference coefficients") {
  IdentifyOptions opt;
  opt.system = custom_system("decay", 2, [](std::span<const double> u, std::span<double> du) {
    du[0] = -u[0];
    du[1] = -2.0 * u[1];
  });
  opt.u0 = {1.0, 1.0};
  opt.h = 0.05;
  opt.t_end = 4.0;
  // Degree 1 only: u2(t) is proportional to u1(t)^2 along this flow, so a
  // quadratic block would make the dictionary genuinely rank deficient.
  opt.dictionary = {.poly_order = 1};
  opt.params = {.lambda = 0.4};
  const IdentifyResult res = run_identify(opt);
  CHECK_FALSE(res.relative_err.has_value());
  // The planted linear terms are still found.
  CHECK(res.equations[0].solution.support == SupportSet({1}));
  CHECK(res.equations[1].solution.support == SupportSet({2}));
}

TEST_CASE("identify supports a ridge weight via the augmented system") {
  auto opt = thomas_options();
  opt.params.gamma = 1e-8;  // vanishing ridge: same model as the plain run
  const IdentifyResult ridged = run_identify(opt);
  opt.params.gamma = 0.0;
  const IdentifyResult plain = run_identify(opt);
  const auto supports = true_supports("thomas", ridged.labels);
  REQUIRE(supports.has_value());
  for (std::size_t eq = 0; eq < 3; ++eq)
    CHECK(ridged.equations[eq].solution.support == (*supports)[eq]);
  for (std::size_t j = 0; j < ridged.labels.size(); ++j)
    for (std::size_t eq = 0; eq < 3; ++eq)
      CHECK(ridged.coefficients(j, eq) == Catch::Approx(plain.coefficients(j, eq)).margin(1e-6));
}

TEST_CASE("too-short series fail with an actionable dictionary error") {
  auto opt = lorenz_options();
  opt.t_end = 1.0;  // 41 samples < 56 columns
  CHECK_THROWS_WITH(run_identify(opt), Catch::Matchers::ContainsSubstring("56 columns"));
}

TEST_CASE("csv round trips") {
  TempDir tmp;
  SECTION("matrix is bitwise stable") {
    DenseMatrix m = DenseMatrix::from_rows({{1.0 / 3.0, -2.5e-17, 3.0}, {4.0, 5.5, 0.1 + 0.2}});
    const auto p = tmp.path / "m.csv";
    write_matrix_csv(p, m);
    CHECK(read_matrix_csv(p) == m);
  }
  SECTION("vector is bitwise stable") {
    DenseVector v{0.1, -1e300, 5e-324, 9.79807692307692};
    const auto p = tmp.path / "v.csv";
    write_vector_csv(p, v);
    CHECK(read_vector_csv(p) == v);
  }
  SECTION("time series keeps header, grid, and states") {
    const TimeSeries ts = rk4_integrate(lorenz_system(), {-5.0, 10.0, 30.0}, 0.025, 1.0);
    const auto p = tmp.path / "ts.csv";
    write_timeseries_csv(p, ts);
    std::ifstream in(p);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,u1,u2,u3");
    const TimeSeries back = read_timeseries_csv(p);
    CHECK(back.states == ts.states);
    CHECK(back.h == Catch::Approx(ts.h));
  }
  SECTION("parse errors carry file, row, and column") {
    const auto p = tmp.path / "bad.csv";
    std::ofstream(p) << "1.0,2.0\n3.0,oops\n";
    try {
      (void)read_matrix_csv(p);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row == 2);
      CHECK(e.col == 2);
      CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
    }
  }
  SECTION("empty files are parse errors") {
    const auto p = tmp.path / "empty.csv";
    std::ofstream(p) << "";
    CHECK_THROWS_AS(read_vector_csv(p), ParseError);
  }
  SECTION("coefficient table layout") {
    DenseMatrix states(60, 3);
    auto [a, labels] = assemble_dictionary(states, {.poly_order = 2});
    (void)a;
    DenseMatrix coeffs(labels.size(), 3);
    coeffs(1, 0) = -10.0;
    const auto p = tmp.path / "table.csv";
    write_coefficient_table_csv(p, labels, coeffs);
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    CHECK(line == "term,du1,du2,du3");
    std::getline(in, line);
    CHECK(line == "1,0,0,0");
    std::getline(in, line);
    CHECK(line == "u1,-10,0,0");
  }
}
