#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "kaclab/csv.hpp"
#include "kaclab/error.hpp"
#include "kaclab/experiments.hpp"

using namespace kac;
using namespace kac::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("kaclab_test_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" KACLAB_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

ExperimentConfig induction(std::uint64_t seed) {
  ExperimentConfig c;
  c.experiment = "induction-check";
  c.seed = seed;
  c.ns = {2, 3, 10, 1000};
  return c;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 2.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 123456789.125,
                   std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::max()}) {
    const std::string s = format_number(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_cell(Cell{std::int64_t{42}}) == "42");
}

TEST_CASE("CSV write and read") {
  Table t;
  t.header = {"N", "x", "label"};
  t.add_row({std::int64_t{3}, 0.1, std::string("a")});
  t.add_row({std::int64_t{-7}, 1e-17, std::string("b_c")});
  std::stringstream ss;
  write_csv(ss, t);
  const Table back = read_csv(ss);
  CHECK(back.header == t.header);
  REQUIRE(back.rows.size() == 2);
  CHECK(std::get<std::int64_t>(back.rows[1][0]) == -7);
  CHECK(std::get<double>(back.rows[1][1]) == 1e-17);
  CHECK(std::get<std::string>(back.rows[0][2]) == "a");
  CHECK_THROWS(t.add_row({1.0}));

  Table empty;
  empty.header = {"t", "mean"};
  std::stringstream e;
  write_csv(e, empty);
  CHECK(e.str() == "t,mean\n");
}

TEST_CASE("list and kernel parsing") {
  CHECK(parse_size_list("10,50,100") == std::vector<std::size_t>{10, 50, 100});
  CHECK(parse_size_list("3..6") == std::vector<std::size_t>{3, 4, 5, 6});
  CHECK(parse_size_list("2,4..5") == std::vector<std::size_t>{2, 4, 5});
  CHECK_THROWS_AS(parse_size_list("3.5"), ValidationError);
  CHECK_THROWS_AS(parse_size_list("6..3"), ValidationError);
  CHECK_THROWS_AS(parse_size_list("x"), ValidationError);

  const auto r = parse_double_list("0:1:0.25");
  REQUIRE(r.size() == 5);
  CHECK(r.back() == doctest::Approx(1.0));
  CHECK(parse_double_list("0.5,2") == std::vector<double>{0.5, 2.0});
  CHECK_THROWS_AS(parse_double_list("0:1:0"), ValidationError);

  CHECK(parse_kernel("uniform")(0.3) == doctest::Approx(1.0 / (2.0 * M_PI)));
  CHECK(parse_kernel("cos2")(0.0) == doctest::Approx(1.0 / M_PI));
  CHECK_NOTHROW(parse_kernel("bump:1.0:0.2"));
  CHECK_THROWS_AS(parse_kernel("gaussian"), ValidationError);
  CHECK_NOTHROW(parse_kernel3d("power:3"));
  CHECK_THROWS_AS(parse_kernel3d("nope"), ValidationError);
}

TEST_CASE("kernel tables are read and normalized") {
  const fs::path d = scratch_dir("table");
  {
    std::ofstream out(d / "rho.csv");
    out.precision(17);
    out << "theta,rho\n";
    for (int k = 0; k <= 64; ++k) out << -M_PI + 2 * M_PI * k / 64 << ",3\n";
  }
  const auto rho = parse_kernel("table:" + (d / "rho.csv").string());
  CHECK(rho(0.4) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-10));
  CHECK_THROWS(parse_kernel("table:" + (d / "missing.csv").string()));
}

TEST_CASE("experiment registry") {
  CHECK(experiments().size() >= 12);
  for (const auto& e : experiments()) CHECK_FALSE(e.columns.empty());
  CHECK_THROWS_AS(experiment_info("no-such-thing"), ValidationError);
  ExperimentConfig c;
  c.experiment = "no-such-thing";
  c.seed = 1;
  CHECK_THROWS_AS(run_experiment(c), ValidationError);
  c = induction(1);
  c.seed.reset();
  CHECK_THROWS_AS(run_experiment(c), ValidationError);
}

TEST_CASE("same seed gives byte-identical output") {
  ExperimentConfig c;
  c.experiment = "gap-check";
  c.seed = 77;
  c.ns = {4, 9};
  c.samples = 20;
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  auto r1 = run_experiment(c);
  auto r2 = run_experiment(c);
  emit(r1, a);
  emit(r2, b);
  CHECK(slurp(a / "gap-check.csv") == slurp(b / "gap-check.csv"));
  c.exec = Exec::serial;
  emit(run_experiment(c), b);
  CHECK(slurp(a / "gap-check.csv") == slurp(b / "gap-check.csv"));

  const Table t = read_csv(a / "gap-check.csv");
  CHECK(t.header == experiment_info("gap-check").columns);
  CHECK(t.rows.size() == 2);
  const std::string manifest = slurp(a / "gap-check.manifest.txt");
  CHECK(manifest.find("seed = 77") != std::string::npos);
  CHECK(manifest.find("wall_time_s") != std::string::npos);
}

TEST_CASE("induction-check output") {
  const auto rec = run_experiment(induction(5));
  CHECK(rec.failures.empty());
  REQUIRE(rec.table.rows.size() == 4);
  CHECK(std::get<std::int64_t>(rec.table.rows[3][4]) == 167);
  CHECK(std::get<std::int64_t>(rec.table.rows[3][5]) == 333);
}

TEST_CASE("command-line exit codes and output directory") {
  const fs::path d = scratch_dir("exe");
  CHECK(run_cli("list") == 0);
  CHECK(run_cli("induction-check --N 2,3") == 2);
  CHECK(run_cli("induction-check --seed 1 --N 1") == 2);
  CHECK(run_cli("no-such-experiment --seed 1") == 2);
  CHECK(run_cli("induction-check --seed 1 --N 2..5 --out \"" + (d / "flag").string() + "\"") == 0);
  CHECK(fs::exists(d / "flag" / "induction-check.csv"));
  CHECK(fs::exists(d / "flag" / "induction-check.manifest.txt"));
  // The environment variable wins over --out.
  CHECK(run_cli("induction-check --seed 1 --N 2..5 --name env --out \"" + (d / "flag").string() + "\"",
                "KACLAB_OUTPUT_DIR=\"" + (d / "env").string() + "\"") == 0);
  CHECK(fs::exists(d / "env" / "env.csv"));
  CHECK_FALSE(fs::exists(d / "flag" / "env.csv"));
}
