#include <doctest.h>

#include "qwalk/cli.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/io.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace qwalk;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "qwalk_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("angles") {
  CHECK(parse_angle("pi") == pi);
  CHECK(parse_angle("pi/2") == pi / 2);
  CHECK(parse_angle("3pi/4") == 3 * pi / 4);
  CHECK(parse_angle("3*pi/2") == 3 * pi / 2);
  CHECK(parse_angle("-pi/4") == -pi / 4);
  CHECK(parse_angle("2.5") == 2.5);
  CHECK_THROWS_AS(parse_angle("tau"), validation_error);
  CHECK_THROWS_AS(parse_angle("pi/0"), validation_error);
  CHECK_THROWS_AS(parse_angle(""), validation_error);
}

TEST_CASE("complex numbers and coins") {
  CHECK(parse_complex("1") == Complex<double>(1, 0));
  CHECK(parse_complex("i") == Complex<double>(0, 1));
  CHECK(parse_complex("-2i") == Complex<double>(0, -2));
  CHECK(parse_complex("0.3+0.4i") == Complex<double>(0.3, 0.4));
  CHECK(parse_complex("1e-3-2i") == Complex<double>(1e-3, -2));
  CHECK_THROWS_AS(parse_complex("1+"), validation_error);
  CHECK_THROWS_AS(parse_complex("x"), validation_error);

  const auto c = parse_coin("1,i");
  CHECK(c.alpha().real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(c.beta().imag() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK_THROWS_AS(parse_coin("0,0"), validation_error);
  CHECK_THROWS_AS(parse_coin("1"), validation_error);
}

TEST_CASE("defaults, file values and flag overrides") {
  auto c = parse_config("evolve", nullptr, {});
  CHECK(c.number("delta") == pi);
  CHECK(c.integer("n") == 6);
  CHECK(c.coin("coin") == CoinState::left());

  nlohmann::ordered_json file = {{"delta", 1.0}, {"n", 10}};
  c = parse_config("evolve", file, {{"n", "12"}});
  CHECK(c.number("delta") == 1.0);
  CHECK(c.integer("n") == 12);

  c = parse_config("detect-kink", nullptr, {});
  CHECK_FALSE(c.optional_number("threshold"));
  c = parse_config("detect-kink", nullptr, {{"threshold", "0.01"}});
  CHECK(*c.optional_number("threshold") == 0.01);
}

TEST_CASE("invalid configurations name the key") {
  auto message = [](auto &&f) {
    try {
      f();
    } catch (const validation_error &e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message([] { parse_config("bands", nullptr, {{"delta", "7"}}); }).find("delta") != std::string::npos);
  CHECK(message([] { parse_config("evolve", nullptr, {{"q", "0.3"}}); }).find("q") != std::string::npos);
  CHECK(message([] { parse_config("evolve", {{"bogus", 1}}, {}); }).find("bogus") != std::string::npos);
  CHECK(message([] { parse_config("winding", nullptr, {{"grid", "10"}}); }).find("grid") != std::string::npos);
  CHECK_THROWS_AS(parse_config("evolve", nullptr, {{"n", "1.5"}}), validation_error);
  CHECK_THROWS_AS(parse_config("evolve", nullptr, {{"format", "xml"}}), validation_error);
  CHECK_THROWS_AS(parse_config("sweep-ssh", nullptr, {{"tau", "0"}}), validation_error);
  CHECK_THROWS_AS(parse_config("nope", nullptr, {}), validation_error);
  CHECK_THROWS_AS(parse_config("evolve", nlohmann::ordered_json::array(), {}), validation_error);
  CHECK_THROWS_AS(parse_config("evolve", {{"command", "bands"}}, {}), validation_error);
  // pi sugar belongs to the command line; JSON angles are numbers.
  CHECK_THROWS_AS(parse_config("bands", {{"delta", "pi"}}, {}), validation_error);
}

TEST_CASE("print-config round trip for every command") {
  for (const auto &name : command_names()) {
    const auto r = cli({name, "--print-config"});
    REQUIRE(r.code == exit_ok);
    const auto parsed = parse_config_document(r.out);
    CHECK(parsed == parse_config(name, nullptr, {}));
    CHECK(parsed.to_json().dump(2) + "\n" == r.out);
  }
  const auto r = cli({"sweep-delta", "--coin", "1,i", "--delta-step", "pi/8", "--print-config"});
  REQUIRE(r.code == exit_ok);
  const auto back = parse_config_document(r.out);
  CHECK(back.number("delta-step") == pi / 8);
  CHECK(back.coin("coin") == parse_coin("1,i"));
}

TEST_CASE("config file then flags") {
  const auto path = scratch("cfg.json");
  std::ofstream(path) << R"({"delta": 2.0, "n": 4})";
  const auto r = cli({"evolve", "--config", path.string(), "--n", "3", "--print-config"});
  REQUIRE(r.code == exit_ok);
  const auto c = parse_config_document(r.out);
  CHECK(c.number("delta") == 2.0);
  CHECK(c.integer("n") == 3);
  CHECK(cli({"evolve", "--config", scratch("missing.json").string()}).code == exit_validation);
}

TEST_CASE("csv round trip keeps every bit") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  Table t{{"a", "b", "c"}, {}};
  for (int i = 0; i < 200; ++i) t.rows.push_back({u(rng), std::ldexp(u(rng), -900), u(rng) * 1e-300});
  t.rows.push_back({std::nan(""), 0.0, -0.0});
  t.rows.push_back({std::numeric_limits<double>::infinity(), 5e-324, 1.7976931348623157e308});

  const auto config = parse_config("bands", nullptr, {});
  std::stringstream buf;
  write_table(t, config, buf);
  const auto back = read_csv(buf);
  REQUIRE(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double a = t.rows[i][j];
      const double b = back.rows[i][j];
      if (std::isnan(a)) {
        CHECK(std::isnan(b));
      } else {
        CHECK(std::memcmp(&a, &b, sizeof a) == 0);
      }
    }
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("csv reader rejects malformed input") {
  std::stringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(ragged), validation_error);
  std::stringstream text("a\nhello\n");
  CHECK_THROWS_AS(read_csv(text), validation_error);
  std::stringstream empty("# only comments\n");
  CHECK_THROWS_AS(read_csv(empty), validation_error);
  CHECK_THROWS_AS(read_csv_file(scratch("absent.csv").string()), validation_error);
  const Table t{{"x"}, {{1.0}}};
  CHECK_THROWS_AS(t.column("y"), validation_error);
}

TEST_CASE("json output") {
  const auto config = parse_config("bands", nullptr, {{"format", "json"}});
  std::stringstream buf;
  write_table(Table{{"x", "y"}, {{1.5, std::nan("")}}}, config, buf);
  const auto doc = nlohmann::json::parse(buf.str());
  REQUIRE(doc.is_array());
  CHECK(doc[0]["x"] == 1.5);
  CHECK(doc[0]["y"].is_null());
}

} // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  CHECK(cli({}).code == exit_validation);
  CHECK(cli({"frobnicate"}).code == exit_validation);
  CHECK(cli({"bands", "--delta", "7.0"}).code == exit_validation);
  CHECK(cli({"bands", "--grid", "abc"}).code == exit_validation);
  CHECK(cli({"bands", "--unknown", "1"}).code == exit_validation);
  const auto w = cli({"winding", "--delta", "1.5707963"});
  CHECK(w.code == exit_validation);
  CHECK(w.err.find("winding undefined at transition") != std::string::npos);
  CHECK(cli({"--help"}).code == exit_ok);
  CHECK(cli({"--version"}).out.find("1.0.0") != std::string::npos);
  CHECK(cli({"bands", "--output", "/nonexistent/dir/x.csv"}).code == exit_runtime);
}

TEST_CASE("tables on stdout") {
  auto r = cli({"evolve", "--n", "1", "--delta", "pi"});
  REQUIRE(r.code == exit_ok);
  std::stringstream s(r.out);
  auto t = read_csv(s);
  CHECK(t.columns == std::vector<std::string>{"m", "P", "aL_re", "aL_im", "aR_re", "aR_im"});
  CHECK(t.rows.size() == 3);
  CHECK(std::abs(t.column("P")[0] - 0.5) < 1e-15);
  CHECK(t.column("P")[1] < 1e-30);

  r = cli({"spreading", "--delta", "pi"});
  REQUIRE(r.code == exit_ok);
  std::stringstream sp(r.out);
  t = read_csv(sp);
  CHECK(t.column("L_closed")[0] == doctest::Approx(1 - std::sqrt(0.5)));
  CHECK(std::abs(t.column("L_residue")[0] - t.column("L_closed")[0]) < 1e-9);

  r = cli({"spreading", "--delta", "0"});
  REQUIRE(r.code == exit_ok);
  CHECK(r.err.find("residue") != std::string::npos);

  r = cli({"detect-kink"});
  REQUIRE(r.code == exit_ok);
  std::stringstream dk(r.out);
  t = read_csv(dk);
  REQUIRE(t.rows.size() == 2);
  CHECK(std::abs(t.rows[0][0] - pi / 2) <= pi / 128);

  r = cli({"detect-kink", "--model", "ssh"});
  std::stringstream dk2(r.out);
  t = read_csv(dk2);
  REQUIRE(t.rows.size() == 1);
  CHECK(std::abs(t.rows[0][0] - 1.0) <= 0.02);
}

TEST_CASE("header-only output when nothing is found") {
  const auto r = cli({"detect-kink", "--model", "qw", "--delta-start", "0", "--delta-stop", "1"});
  REQUIRE(r.code == exit_ok);
  std::stringstream s(r.out);
  const auto t = read_csv(s);
  CHECK(t.columns == std::vector<std::string>{"kink"});
  CHECK(t.rows.empty());
}

TEST_CASE("files, output directory and reruns") {
  const auto a = scratch("a.csv");
  const auto b = scratch("b.csv");
  const std::vector<std::string> args = {"sweep-delta", "--n", "6", "--coin", "0,1", "--shots", "1000",
                                         "--seed", "7", "--threads", "3"};
  auto with = [](std::vector<std::string> v, const fs::path &p) {
    v.push_back("--output");
    v.push_back(p.string());
    return v;
  };
  REQUIRE(cli(with(args, a)).code == exit_ok);
  const std::string first = slurp(a);
  REQUIRE(cli(with(args, a)).code == exit_ok);
  CHECK(slurp(a) == first);
  // A different output path changes only the recorded config line.
  REQUIRE(cli(with(args, b)).code == exit_ok);
  auto body = [](const std::string &s) { return s.substr(s.find('\n', s.find("# config:"))); };
  CHECK(body(slurp(b)) == body(first));
  CHECK(slurp(a).rfind("# qwalk 1.0.0\n", 0) == 0);
  CHECK(slurp(a).find("# seed: 7") != std::string::npos);

  const auto t = read_csv_file(a.string());
  CHECK(t.rows.size() == 33);
  CHECK(t.columns.back() == "sqrtM2_over_n_sampled_err");

  // detect-kink reading a sweep file
  const auto r = cli({"detect-kink", "--input", a.string(), "--column", "L_closed"});
  REQUIRE(r.code == exit_ok);
  CHECK(cli({"detect-kink", "--input", a.string(), "--column", "nope"}).code == exit_validation);

  const fs::path dir = scratch("outdir");
  fs::create_directories(dir);
  ::setenv("QWALK_OUTPUT_DIR", dir.c_str(), 1);
  const auto w = cli({"winding", "--delta", "pi"});
  const auto j = cli({"ssh-bands", "--format", "json", "--grid", "8"});
  ::unsetenv("QWALK_OUTPUT_DIR");
  CHECK(w.code == exit_ok);
  CHECK(w.out.empty());
  CHECK(fs::exists(dir / "winding.csv"));
  CHECK(j.code == exit_ok);
  CHECK(nlohmann::json::parse(slurp(dir / "ssh-bands.json")).size() == 8);
}

} // TEST_SUITE
