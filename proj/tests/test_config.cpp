#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "qsafe/config.hpp"
#include "qsafe/errors.hpp"

using namespace qsafe;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& body) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream os(p);
  os << body;
  return p;
}

}  // namespace

TEST_CASE("defaults describe the full operating envelope") {
  RunConfig c;
  CHECK(c.q_pos == 500.0);
  CHECK(c.q_vel == 100.0);
  CHECK(c.q_theta_deg == 1.5);
  CHECK(c.vown_min == 100.0);
  CHECK(c.vown_max == 1200.0);
  CHECK(c.vint_min == 0.0);
  CHECK(c.vint_max == 1200.0);
  CHECK(c.tau_dot == "both");
  CHECK(c.max_depth == 300);
  CHECK(c.mc_batch == 1500000);
  CHECK_NOTHROW(c.validate());

  QuantParams qp = c.quant_params();
  CHECK(qp.q_theta == doctest::Approx(deg2rad(1.5)).epsilon(1e-15));
  CHECK(!qp.v_own_fixed.has_value());
  CHECK(!qp.v_int_fixed.has_value());
  CHECK(c.tau_mode() == TauDotMode::Both);
  CHECK(c.effective_jobs() >= 1);  // jobs=0 resolves to the hardware
}

TEST_CASE("set parses each value type and rejects junk") {
  RunConfig c;
  c.set("q_pos", "250");
  CHECK(c.q_pos == 250.0);
  c.set("jobs", "8");
  CHECK(c.jobs == 8);
  CHECK(c.effective_jobs() == 8);
  c.set("seed", "12345");
  CHECK(c.seed == 12345);
  c.set("out", "results/run1");
  CHECK(c.out == "results/run1");
  c.set("argmax_scores", "yes");
  CHECK(c.argmax_scores);
  c.set("argmax_scores", "off");
  CHECK(!c.argmax_scores);
  c.set("tau_dot", "-1");
  CHECK(c.tau_mode() == TauDotMode::MinusOne);
  c.set("tau_dot", "0");
  CHECK(c.tau_mode() == TauDotMode::Zero);

  CHECK_THROWS_AS(c.set("tau_dot", "2"), Error);
  CHECK_THROWS_AS(c.set("q_pos", "5oo"), Error);
  CHECK_THROWS_AS(c.set("jobs", "many"), Error);
  CHECK_THROWS_AS(c.set("argmax_scores", "maybe"), Error);
  CHECK_THROWS_AS(c.set("quantum", "1"), Error);
  try {
    c.set("quantum", "1");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
    CHECK(std::string(e.what()).find("quantum") != std::string::npos);
  }
}

TEST_CASE("config files allow comments and inline trailing notes") {
  fs::path p = temp_file("qsafe_cfg_ok.conf",
                         "# fixed-speed comparison setup\n"
                         "q_pos = 250\n"
                         "\n"
                         "vown_min=200  # pinned\n"
                         "vown_max=200\n"
                         "tau_dot = 0\n");
  RunConfig c;
  c.load_file(p.string());
  CHECK(c.q_pos == 250.0);
  CHECK(c.vown_min == 200.0);
  CHECK(c.vown_max == 200.0);
  CHECK(c.quant_params().v_own_fixed == 200.0);
  CHECK(c.tau_mode() == TauDotMode::Zero);
}

TEST_CASE("file errors carry the path and line number") {
  RunConfig c;
  CHECK_THROWS_AS(c.load_file("/no/such/qsafe.conf"), Error);

  fs::path p = temp_file("qsafe_cfg_bad.conf", "q_pos=250\njobs eight\n");
  try {
    c.load_file(p.string());
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  CHECK(c.q_pos == 250.0);  // lines before the error already applied

  fs::path v = temp_file("qsafe_cfg_badval.conf", "max_depth=soon\n");
  try {
    c.load_file(v.string());
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("max_depth") != std::string::npos);
  }
}

TEST_CASE("validate rejects inconsistent ranges and budgets") {
  RunConfig c;
  c.vown_min = 300;
  c.vown_max = 200;
  CHECK_THROWS_AS(c.validate(), Error);

  c = RunConfig{};
  c.vown_min = c.vown_max = 0;  // a parked ownship has no heading
  CHECK_THROWS_AS(c.validate(), Error);

  c = RunConfig{};
  c.set("jobs", "-2");
  CHECK_THROWS_AS(c.validate(), Error);

  c = RunConfig{};
  c.set("max_depth", "0");
  CHECK_THROWS_AS(c.validate(), Error);

  c = RunConfig{};
  c.set("q_theta_deg", "7");  // must divide the full circle
  CHECK_THROWS_AS(c.validate(), Error);

  c = RunConfig{};
  c.set("pos_floor", "0");
  CHECK_THROWS_AS(c.validate(), Error);
}
