#include "qsafe/config.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

#include "qsafe/errors.hpp"

namespace qsafe {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    fail(ErrorCode::ParseError, "config: bad number for " + key + ": '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    fail(ErrorCode::ParseError, "config: bad integer for " + key + ": '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::ParseError, "config: bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "nnet_dir") nnet_dir = value;
  else if (key == "q_pos") q_pos = parse_double(key, value);
  else if (key == "q_vel") q_vel = parse_double(key, value);
  else if (key == "q_theta_deg") q_theta_deg = parse_double(key, value);
  else if (key == "vown_min") vown_min = parse_double(key, value);
  else if (key == "vown_max") vown_max = parse_double(key, value);
  else if (key == "vint_min") vint_min = parse_double(key, value);
  else if (key == "vint_max") vint_max = parse_double(key, value);
  else if (key == "tau_dot") {
    if (value != "0" && value != "-1" && value != "both")
      fail(ErrorCode::ParseError, "config: tau_dot must be 0, -1 or both, got '" + value + "'");
    tau_dot = value;
  } else if (key == "jobs") jobs = static_cast<int>(parse_int(key, value));
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "out") out = value;
  else if (key == "resume") resume = value;
  else if (key == "max_depth") max_depth = static_cast<int>(parse_int(key, value));
  else if (key == "pos_floor") pos_floor = parse_double(key, value);
  else if (key == "vel_floor") vel_floor = parse_double(key, value);
  else if (key == "theta_floor_deg") theta_floor_deg = parse_double(key, value);
  else if (key == "argmax_scores") argmax_scores = parse_bool(key, value);
  else if (key == "max_steps") max_steps = static_cast<int>(parse_int(key, value));
  else if (key == "mc_batch") mc_batch = static_cast<std::uint64_t>(parse_int(key, value));
  else fail(ErrorCode::InvalidArgument, "config: unknown key '" + key + "'");
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "config: cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ParseError,
           path + ":" + std::to_string(lineno) + ": expected key=value, got '" + t + "'");
    set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

QuantParams RunConfig::quant_params() const {
  QuantParams qp;
  qp.q_pos = q_pos;
  qp.q_vel = q_vel;
  qp.q_theta = deg2rad(q_theta_deg);
  if (vown_min == vown_max) qp.v_own_fixed = vown_min;
  if (vint_min == vint_max) qp.v_int_fixed = vint_min;
  return qp;
}

TauDotMode RunConfig::tau_mode() const {
  if (tau_dot == "0") return TauDotMode::Zero;
  if (tau_dot == "-1") return TauDotMode::MinusOne;
  return TauDotMode::Both;
}

int RunConfig::effective_jobs() const {
  if (jobs > 0) return jobs;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void RunConfig::validate() const {
  quant_params().validate();
  if (vown_min < 0 || vown_max < vown_min)
    fail(ErrorCode::InvalidArgument, "config: bad ownship speed range");
  if (vint_min < 0 || vint_max < vint_min)
    fail(ErrorCode::InvalidArgument, "config: bad intruder speed range");
  if (vown_max <= 0)
    fail(ErrorCode::InvalidArgument, "config: ownship speed range must allow motion");
  if (jobs < 0) fail(ErrorCode::InvalidArgument, "config: jobs must be >= 0");
  if (max_depth <= 0) fail(ErrorCode::InvalidArgument, "config: max_depth must be positive");
  if (max_steps <= 0) fail(ErrorCode::InvalidArgument, "config: max_steps must be positive");
  if (pos_floor <= 0 || vel_floor <= 0 || theta_floor_deg <= 0)
    fail(ErrorCode::InvalidArgument, "config: refinement floors must be positive");
  if (mc_batch == 0) fail(ErrorCode::InvalidArgument, "config: mc_batch must be positive");
}

}  // namespace qsafe
