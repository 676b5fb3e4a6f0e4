// Acceptance gate. Runs each numbered criterion and prints exactly one
// PASS/FAIL/SKIP line per criterion; exits nonzero if anything FAILs.
// Criteria needing the distributed 45-network pack look for QSAFE_NNET_DIR
// and SKIP when it is absent. The CLI-driven checks find the binary through
// QSAFE_CLI (set by ctest).
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qsafe/backreach.hpp"
#include "qsafe/dynamics.hpp"
#include "qsafe/geometry.hpp"
#include "qsafe/nnet.hpp"
#include "qsafe/partition.hpp"
#include "qsafe/quant.hpp"
#include "qsafe/rng.hpp"
#include "qsafe/sim.hpp"
#include "reference_traces.hpp"
#include "support/oracles.hpp"
#include "support/stub_networks.hpp"

using namespace qsafe;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::Pass, std::move(d)}; }
Outcome failed(std::string d) { return {Status::Fail, std::move(d)}; }
Outcome skipped(std::string d) { return {Status::Skip, std::move(d)}; }

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- process and file helpers ------------------------------------------

struct CliResult {
  int exit = -1;
  std::string out;
};

std::string g_cli;  // from QSAFE_CLI

CliResult run_cli(const std::string& args) {
  CliResult r;
  std::string cmd = g_cli + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int rc = pclose(p);
  r.exit = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

std::optional<std::string> slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) return std::nullopt;
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  static fs::path root = [] {
    fs::path p = fs::temp_directory_path() / "qsafe_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  fs::path d = root / name;
  fs::create_directories(d);
  return d;
}

// Stub pack: every slot advises clear-of-conflict, so quantized chains are
// never opposed and the overtake fixture below has a known safe/unsafe split.
const std::string& stub_dir() {
  static std::string dir = [] {
    fs::path p = scratch("stub_nnet");
    stub::write_set_as_dir(stub::make_coc_set(), p.string());
    return p.string();
  }();
  return dir;
}

// A small configuration that stays fast offline: pinned speeds with a very
// fast intruder, 30 degree sectors. The tau-rate flag is appended per
// subcommand because montecarlo spells it as an integer, not a mode.
const char* kOvertakeFlags =
    "--q-pos 500 --q-vel 100 --q-theta-deg 30 --vown-min 200 --vown-max 200 "
    "--vint-min 6000 --vint-max 6000";

QuantParams overtake_params() {
  QuantParams qp;
  qp.q_pos = 500;
  qp.q_vel = 100;
  qp.q_theta = deg2rad(30);
  qp.v_own_fixed = 200;
  qp.v_int_fixed = 6000;
  return qp;
}

// ---- distributed assets -------------------------------------------------

struct Assets {
  std::string dir;
  std::optional<NetworkSet> nets;
  std::string note;  // why unavailable
};

const Assets& assets() {
  static Assets a = [] {
    Assets out;
    const char* env = std::getenv("QSAFE_NNET_DIR");
    if (!env || !*env) {
      out.note = "QSAFE_NNET_DIR not set";
      return out;
    }
    out.dir = env;
    try {
      NetworkSet set = NetworkSet::load_directory(out.dir);
      if (set.loaded_count() != 45) {
        out.note = fmt("only %d of 45 networks in %s", set.loaded_count(),
                       out.dir.c_str());
        return out;
      }
      out.nets = std::move(set);
    } catch (const std::exception& e) {
      out.note = e.what();
    }
    return out;
  }();
  return a;
}

// ---- criterion 1: partition count arithmetic ----------------------------

Outcome criterion_partition_counts() {
  double t0 = now_seconds();
  CliResult full = run_cli("partitions");
  CliResult fixed = run_cli(
      "partitions --q-pos 250 --vown-min 200 --vown-max 200 "
      "--vint-min 185 --vint-max 185");
  double dt = now_seconds() - t0;
  if (full.exit != 0 || fixed.exit != 0)
    return failed(fmt("cli exits %d/%d", full.exit, fixed.exit));
  if (full.out != "1267200\n")
    return failed("default count was '" + full.out + "'");
  if (fixed.out != "38400\n")
    return failed("fixed-speed count was '" + fixed.out + "'");
  if (dt >= 1.0) return failed(fmt("took %.2f s, budget 1 s", dt));
  return pass(fmt("1267200 and 38400 in %.3f s", dt));
}

// ---- criterion 2: geometry property suite -------------------------------

bool rel_eq(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

AhPolytope random_polytope(std::mt19937_64& g, int ambient, int params) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> uc(-5.0, 5.0);
  std::uniform_real_distribution<double> ub(0.5, 3.0);
  Eigen::MatrixXd basis(ambient, params);
  for (int i = 0; i < ambient; ++i)
    for (int j = 0; j < params; ++j) basis(i, j) = u(g);
  Eigen::VectorXd center(ambient);
  for (int i = 0; i < ambient; ++i) center(i) = uc(g);
  // Parameter box plus two random cuts through the interior (alpha = 0 stays
  // feasible because every right side is positive).
  int rows = 2 * params + 2;
  Eigen::MatrixXd cons = Eigen::MatrixXd::Zero(rows, params);
  Eigen::VectorXd rhs(rows);
  for (int j = 0; j < params; ++j) {
    double w = ub(g);
    cons(2 * j, j) = 1.0;
    rhs(2 * j) = w;
    cons(2 * j + 1, j) = -1.0;
    rhs(2 * j + 1) = w;
  }
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd row(params);
    for (int j = 0; j < params; ++j) row(j) = u(g);
    double norm = row.norm();
    if (norm < 1e-9) row(0) = norm = 1.0;
    cons.row(2 * params + k) = row.transpose() / norm;
    rhs(2 * params + k) = ub(g);
  }
  return AhPolytope(basis, center, cons, rhs);
}

Eigen::VectorXd random_direction(std::mt19937_64& g, int n) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = nd(g);
  double norm = w.norm();
  return norm > 1e-12 ? Eigen::VectorXd(w / norm) : Eigen::VectorXd::Unit(n, 0);
}

Outcome criterion_geometry_properties() {
  constexpr int kCases = 1000;
  constexpr double kTol = 1e-7;
  double t0 = now_seconds();
  std::mt19937_64 g(0xA11CE5u);

  // Affine images: the support function must transform as h_{MP+b}(w) =
  // h_P(M^T w) + w.b.
  for (int i = 0; i < kCases; ++i) {
    AhPolytope p = random_polytope(g, 4, 4);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Eigen::MatrixXd m(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = u(g);
    Eigen::VectorXd b = 5.0 * random_direction(g, 4);
    AhPolytope q = affine_map(p, m, b);
    Eigen::VectorXd w = random_direction(g, 4);
    double lhs = maximize(q, w).value;
    double rhs = maximize(p, m.transpose() * w).value + w.dot(b);
    if (!rel_eq(lhs, rhs, kTol))
      return failed(fmt("affine case %d: %.12g vs %.12g", i, lhs, rhs));
  }

  // Halfspace cuts: supports never grow, the cut direction is capped at the
  // cut level, and membership of extreme points flips exactly at the plane.
  for (int i = 0; i < kCases; ++i) {
    AhPolytope p = random_polytope(g, 4, 4);
    Eigen::VectorXd gdir = random_direction(g, 4);
    double hi = maximize(p, gdir).value, lo = minimize(p, gdir).value;
    double level = lo + 0.6 * (hi - lo);
    Eigen::MatrixXd lhs = gdir.transpose();
    Eigen::VectorXd rhs(1);
    rhs(0) = level;
    AhPolytope q = intersect_halfspaces(p, lhs, rhs);
    if (!is_feasible(q)) return failed(fmt("cut case %d: emptied", i));
    double scale = std::max(1.0, std::abs(level));
    if (maximize(q, gdir).value > level + kTol * scale)
      return failed(fmt("cut case %d: support exceeds the cut", i));
    Eigen::VectorXd w = random_direction(g, 4);
    if (maximize(q, w).value > maximize(p, w).value + kTol * 10)
      return failed(fmt("cut case %d: support grew", i));
    Eigen::VectorXd x = maximize(p, w).point;
    double side = gdir.dot(x) - level;
    if (std::abs(side) > 1e-6 * scale &&
        contains_point(q, x) != (side < 0))
      return failed(fmt("cut case %d: membership mismatch", i));
  }

  // Two-parameter sets: the LP optimum must agree with brute-force vertex
  // enumeration of the constraint polygon.
  for (int i = 0; i < kCases; ++i) {
    AhPolytope p = random_polytope(g, 2, 2);
    Eigen::VectorXd w = random_direction(g, 2);
    double via_lp = minimize(p, w).value;
    Eigen::Vector2d cost = p.basis().transpose() * w;
    auto via_vertices = oracle::min_over_vertices_2d(p.cons(), p.rhs(), cost);
    if (!via_vertices) return failed(fmt("vertex case %d: no vertices", i));
    double expected = *via_vertices + w.dot(p.center());
    if (!rel_eq(via_lp, expected, kTol))
      return failed(fmt("vertex case %d: %.12g vs %.12g", i, via_lp, expected));
  }

  // One-second predecessor then forward step is the identity on supports.
  {
    std::uniform_real_distribution<double> ctr(-20000.0, 20000.0);
    std::uniform_real_distribution<double> wid(10.0, 500.0);
    std::uniform_int_distribution<int> adv(0, kAdvisoryCount - 1);
    for (int i = 0; i < kCases; ++i) {
      Eigen::VectorXd lo(8), hi(8);
      for (int d = 0; d < 8; ++d) {
        double c = d % 4 < 2 ? ctr(g) : ctr(g) / 20.0;  // positions then speeds
        double w = wid(g);
        lo(d) = c - w;
        hi(d) = c + w;
      }
      AhPolytope s = AhPolytope::box(lo, hi);
      Advisory a = static_cast<Advisory>(adv(g));
      AhPolytope round_trip =
          linear_transform(backreach_step(s, a), step_matrix(a, 1.0));
      Eigen::VectorXd w = random_direction(g, 8);
      double got = maximize(round_trip, w).value;
      double want = maximize(s, w).value;
      if (!rel_eq(got, want, kTol))
        return failed(fmt("round-trip case %d: %.12g vs %.12g", i, got, want));
    }
  }

  double dt = now_seconds() - t0;
  if (dt >= 30.0) return failed(fmt("took %.1f s, budget 30 s", dt));
  return pass(fmt("4x%d randomized cases in %.1f s", kCases, dt));
}

// ---- criterion 3: dynamics against independent integrators --------------

Outcome criterion_dynamics_oracles() {
  double t0 = now_seconds();
  std::mt19937_64 g(0xD15C0u);
  std::uniform_real_distribution<double> pos(-30000.0, 30000.0);
  std::uniform_real_distribution<double> vel(-1200.0, 1200.0);
  std::uniform_real_distribution<double> dts(0.1, 2.0);

  for (Advisory a : kAllAdvisories) {
    Eigen::MatrixXd gen = oracle::turn_generator(turn_rate_rad(a));
    for (int i = 0; i < 100; ++i) {
      double dt = dts(g);
      Eigen::MatrixXd diff = step_matrix(a, dt) - oracle::expm(gen * dt);
      if (diff.cwiseAbs().maxCoeff() > 1e-9)
        return failed(fmt("%s: matrix mismatch %.3g at dt %.3f",
                          advisory_name(a), diff.cwiseAbs().maxCoeff(), dt));
    }
    for (int i = 0; i < 100; ++i) {
      PlantState s;
      s.x_own = pos(g); s.y_own = pos(g);
      s.vx_own = vel(g); s.vy_own = vel(g);
      s.x_int = pos(g); s.y_int = pos(g);
      s.vx_int = vel(g); s.vy_int = vel(g);
      Eigen::VectorXd via_rk4 = oracle::rk4(gen, s.vec(), 1.0, 1e-4);
      Eigen::Matrix<double, 8, 1> got = propagate(s, a, 1.0).vec();
      double err = (got - via_rk4).cwiseAbs().maxCoeff();
      if (err > 1e-6)
        return failed(fmt("%s: state %d differs from rk4 by %.3g",
                          advisory_name(a), i, err));
    }
  }
  double dt = now_seconds() - t0;
  if (dt >= 10.0) return failed(fmt("took %.1f s, budget 10 s", dt));
  return pass(fmt("5 advisories x (100 matrices + 100 rk4 states) in %.1f s", dt));
}

// ---- criterion 4: recorded trace replay ---------------------------------

EncounterSpec spec_of(const reftrace::Encounter& e) {
  EncounterSpec s;
  s.rho = e.rho;
  s.theta = e.theta;
  s.psi = e.psi;
  s.v_own = e.v_own;
  s.v_int = e.v_int;
  s.tau0 = e.tau0;
  s.tau_dot = e.tau_dot;
  s.max_steps = 400;
  return s;
}

Outcome criterion_trace_replay() {
  if (!assets().nets) return skipped(assets().note);
  double t0 = now_seconds();
  const NetworkSet& nets = *assets().nets;

  CounterexampleTrace turn = simulate(spec_of(reftrace::kImmediateTurn), nets,
                                      SimMode::Exact);
  size_t want = std::size(reftrace::kImmediateTurnRows);
  if (turn.rows.size() != want || turn.stop != StopReason::Collision)
    return failed(fmt("turn trace: %zu rows, stop %s (want %zu, collision)",
                      turn.rows.size(), stop_reason_name(turn.stop), want));
  for (size_t i = 0; i < want; ++i) {
    const TraceRow& r = turn.rows[i];
    const reftrace::TurnRow& e = reftrace::kImmediateTurnRows[i];
    if (std::string(advisory_name_lower(r.cmd)) != e.cmd ||
        std::string(advisory_name_lower(r.alpha_prev)) != e.alpha_prev)
      return failed(fmt("turn row %d: command %s/%s, recorded %s/%s", e.step,
                        advisory_name_lower(r.alpha_prev),
                        advisory_name_lower(r.cmd), e.alpha_prev, e.cmd));
    if (std::abs(r.rho_ft - e.rho) > 0.5)
      return failed(fmt("turn row %d: rho %.2f vs recorded %.1f", e.step,
                        r.rho_ft, e.rho));
  }

  CounterexampleTrace fast = simulate(spec_of(reftrace::kFastOwnship), nets,
                                      SimMode::Exact);
  size_t want5 = std::size(reftrace::kFastOwnshipRows);
  if (fast.rows.size() != want5 || fast.stop != StopReason::Collision)
    return failed(fmt("descending-tau trace: %zu rows, stop %s (want %zu)",
                      fast.rows.size(), stop_reason_name(fast.stop), want5));
  for (size_t i = 0; i < want5; ++i) {
    const TraceRow& r = fast.rows[i];
    const reftrace::NetRow& e = reftrace::kFastOwnshipRows[i];
    int a = static_cast<int>(r.alpha_prev) + 1;
    int t = NetworkSet::tau_grid_index(r.tau) + 1;
    if (a != e.net_a || t != e.net_t)
      return failed(fmt("descending-tau row %d: network %d,%d vs recorded %d,%d",
                        e.step, a, t, e.net_a, e.net_t));
  }
  double final_rho = fast.rows.back().rho_ft;
  if (std::abs(final_rho - 498.5) > 0.5)
    return failed(fmt("descending-tau final rho %.2f, recorded 498.5", final_rho));

  double dt = now_seconds() - t0;
  if (dt >= 5.0) return failed(fmt("took %.1f s, budget 5 s", dt));
  return pass(fmt("59 + 76 rows replayed in %.2f s", dt));
}

// ---- criterion 5: falsification at default ranges -----------------------

Outcome criterion_falsify_defaults() {
  if (!assets().nets) return skipped(assets().note);
  fs::path out = scratch("falsify_defaults");
  double t0 = now_seconds();
  CliResult r = run_cli("falsify --nnet-dir " + assets().dir + " --out " +
                        out.string());
  double dt = now_seconds() - t0;
  if (r.exit != 0) return failed(fmt("falsify exit %d after %.0f s", r.exit, dt));
  auto csv = slurp(out / "counterexample.csv");
  if (!csv) return failed("no counterexample.csv");
  // Last data line carries the final separation in its fourth column.
  std::istringstream is(*csv);
  std::string line, last;
  while (std::getline(is, line))
    if (!line.empty()) last = line;
  double rho = -1;
  int step = 0;
  char a[16], c[16];
  if (std::sscanf(last.c_str(), "%d,%15[^,],%15[^,],%lf", &step, a, c, &rho) != 4)
    return failed("unparseable final row: " + last);
  if (!(rho < 500.0)) return failed(fmt("final separation %.1f not below 500", rho));
  return pass(fmt("confirmed, final separation %.1f ft in %.0f s", rho, dt));
}

// ---- criterion 6: restricted-range all-safe proof -----------------------

Outcome criterion_restricted_proof() {
  if (!assets().nets) return skipped(assets().note);
  fs::path out = scratch("restricted_proof");
  double t0 = now_seconds();
  CliResult r = run_cli("verify --nnet-dir " + assets().dir +
                        " --q-pos 250 --vown-min 200 --vown-max 200"
                        " --vint-min 185 --vint-max 185 --out " + out.string());
  double dt = now_seconds() - t0;
  if (r.exit != 0) return failed(fmt("verify exit %d after %.0f s", r.exit, dt));
  auto report = slurp(out / "verify_report.json");
  if (!report) return failed("no verify_report.json");
  if (report->find("\"total\": 38400") == std::string::npos)
    return failed("report total is not 38400");
  if (report->find("\"unsafe\": 0") == std::string::npos ||
      report->find("\"inconclusive\": 0") == std::string::npos)
    return failed("not all partitions proved safe");
  return pass(fmt("38400 partitions all safe in %.0f s", dt));
}

// ---- criterion 7: quantized-loop soundness cross-check ------------------

Outcome criterion_quantized_soundness() {
  double t0 = now_seconds();
  NetworkSet nets = stub::make_coc_set();
  QuantParams qp = overtake_params();
  PartitionScheme scheme =
      PartitionScheme::make(qp, 200, 200, 6000, 6000, TauDotMode::Zero);

  CheckContext base;
  base.nets = &nets;
  base.params = qp;
  VerifyOptions opts;
  opts.jobs = 1;
  VerifyReport report = verify_all(scheme, nets, base, opts);
  std::set<std::uint64_t> unsafe;
  for (const UnsafeRecord& u : report.unsafe_records) unsafe.insert(u.index);
  if (unsafe.empty()) return failed("verifier found nothing unsafe to cross-check");

  const int kSims = 10000;
  int collisions = 0, violations = 0;
  for (int i = 0; i < kSims; ++i) {
    SplitMix64 rng = sample_stream(20260823, static_cast<std::uint64_t>(i));
    EncounterSpec e;
    e.rho = rng.uniform(60760.0, 63160.0);
    e.theta = rng.uniform(-kPi, kPi);
    // Aim the intruder near the ownship so a useful fraction of rollouts
    // actually collide; the soundness claim is per-collision, so the initial
    // state distribution only controls how many collisions get cross-checked.
    e.psi = e.theta + kPi + rng.uniform(-0.05, 0.05);
    e.v_own = 200;
    e.v_int = 6000;
    e.tau0 = 0;
    e.tau_dot = 0;
    CounterexampleTrace t = simulate(e, nets, SimMode::Quantized, &qp);
    if (t.stop != StopReason::Collision) continue;
    ++collisions;
    const TraceRow& last = t.rows.back();
    PlantState canonical = canonicalize_frame(last.state);
    std::vector<std::uint64_t> hits =
        scheme.locate_all(canonical, last.alpha_prev, 0);
    bool covered = false;
    for (std::uint64_t idx : hits)
      if (unsafe.count(idx)) covered = true;
    if (!covered) ++violations;
  }
  double dt = now_seconds() - t0;
  if (collisions == 0)
    return failed("no collisions in 10000 quantized rollouts; nothing checked");
  if (violations > 0)
    return failed(fmt("%d of %d collisions landed in partitions not marked unsafe",
                      violations, collisions));
  return pass(fmt("%d collisions in %d rollouts, all in unsafe partitions, %.1f s",
                  collisions, kSims, dt));
}

// ---- criterion 8: large monte carlo batch -------------------------------

Outcome criterion_monte_carlo() {
  if (!assets().nets) return skipped(assets().note);
  fs::path out = scratch("mc_large");
  double t0 = now_seconds();
  CliResult r = run_cli("montecarlo --nnet-dir " + assets().dir +
                        " --batch 1500000 --tau-dot 0 --out " + out.string());
  double dt = now_seconds() - t0;
  if (r.exit != 0) return failed(fmt("montecarlo exit %d", r.exit));
  auto j = slurp(out / "montecarlo.json");
  if (!j) return failed("no montecarlo.json");
  size_t at = j->find("\"collisions\": ");
  if (at == std::string::npos) return failed("no collision count in report");
  long n = std::strtol(j->c_str() + at + 14, nullptr, 10);
  if (n < 3 || n > 60)
    return failed(fmt("%ld collisions outside the expected band [3, 60]", n));
  return pass(fmt("%ld collisions in 1.5M samples, %.0f s", n, dt));
}

// ---- criterion 9: worker-count determinism ------------------------------

Outcome criterion_determinism() {
  double t0 = now_seconds();
  std::string common = std::string("--nnet-dir ") + stub_dir() + " " + kOvertakeFlags;

  CliResult d1 = run_cli(std::string("partitions --descriptors ") + kOvertakeFlags);
  CliResult d8 = run_cli(std::string("partitions --descriptors ") + kOvertakeFlags);
  if (d1.exit != 0 || d8.exit != 0 || d1.out != d8.out)
    return failed("descriptor stream not reproducible");

  auto compare = [&](const std::string& sub, int want_exit,
                     const std::vector<std::string>& files,
                     const std::string& extra) -> std::optional<std::string> {
    fs::path o1 = scratch("det_" + sub + "_j1");
    fs::path o8 = scratch("det_" + sub + "_j8");
    CliResult r1 = run_cli(sub + " " + common + " " + extra + " --jobs 1 --out " +
                           o1.string());
    CliResult r8 = run_cli(sub + " " + common + " " + extra + " --jobs 8 --out " +
                           o8.string());
    if (r1.exit != want_exit || r8.exit != want_exit)
      return fmt("%s exits %d/%d, want %d", sub.c_str(), r1.exit, r8.exit,
                 want_exit);
    for (const std::string& f : files) {
      auto a = slurp(o1 / f), b = slurp(o8 / f);
      if (!a || !b) return sub + "/" + f + " missing";
      if (*a != *b) return sub + "/" + f + " differs between --jobs 1 and 8";
    }
    return std::nullopt;
  };

  if (auto err = compare("verify", 1, {"verify_report.json", "unsafe.jsonl"},
                         "--tau-dot 0"))
    return failed(*err);
  if (auto err = compare("falsify", 0,
                         {"falsify_outcome.json", "counterexample.csv",
                          "counterexample.json", "counterexample.svg"},
                         "--tau-dot 0"))
    return failed(*err);
  if (auto err = compare("montecarlo", 0, {"montecarlo.json"},
                         "--batch 3000 --seed 9 --tau-dot 0"))
    return failed(*err);

  double dt = now_seconds() - t0;
  return pass(fmt("verify, falsify, monte carlo and descriptors byte-stable, %.1f s",
                  dt));
}

}  // namespace

int main() {
  const char* cli = std::getenv("QSAFE_CLI");
  g_cli = cli ? cli : "";

  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
    bool needs_cli;
  };
  const Entry entries[] = {
      {1, "partition count arithmetic", criterion_partition_counts, true},
      {2, "geometry property suite", criterion_geometry_properties, false},
      {3, "dynamics oracle agreement", criterion_dynamics_oracles, false},
      {4, "recorded trace replay", criterion_trace_replay, false},
      {5, "default-range falsification", criterion_falsify_defaults, true},
      {6, "restricted-range safety proof", criterion_restricted_proof, true},
      {7, "quantized-loop soundness cross-check", criterion_quantized_soundness,
       false},
      {8, "large monte carlo batch", criterion_monte_carlo, true},
      {9, "worker-count determinism", criterion_determinism, true},
  };

  int fails = 0;
  for (const Entry& e : entries) {
    Outcome o;
    if (e.needs_cli && g_cli.empty()) {
      o = failed("QSAFE_CLI is not set");
    } else {
      try {
        o = e.run();
      } catch (const std::exception& ex) {
        o = failed(std::string("exception: ") + ex.what());
      }
    }
    const char* tag = o.status == Status::Pass   ? "PASS"
                      : o.status == Status::Fail ? "FAIL"
                                                 : "SKIP";
    if (o.status == Status::Fail) ++fails;
    std::printf("criterion %d %s  %s (%s)\n", e.id, tag, e.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return fails == 0 ? 0 : 1;
}
