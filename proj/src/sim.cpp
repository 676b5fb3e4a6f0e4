#include "qsafe/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>

#include <json.hpp>

#include "qsafe/errors.hpp"
#include "qsafe/parallel.hpp"
#include "qsafe/partition.hpp"
#include "qsafe/rng.hpp"

namespace qsafe {
namespace {

constexpr double kTauZero = 1e-9;
constexpr int kDivergeRun = 10;

using json = nlohmann::ordered_json;

json state_json(const PlantState& s) {
  return json::array({s.x_own, s.y_own, s.vx_own, s.vy_own, s.x_int, s.y_int,
                      s.vx_int, s.vy_int});
}

}  // namespace

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Collision: return "collision";
    case StopReason::MaxSteps: return "max_steps";
    case StopReason::Diverged: return "diverged";
  }
  return "?";
}

PlantState spec_to_state(const EncounterSpec& e) {
  if (!(e.rho >= 0.0) || !(e.v_own > 0.0) || !(e.v_int >= 0.0))
    fail(ErrorCode::InvalidArgument, "spec_to_state: bad encounter values");
  PlantState s;
  s.vx_own = e.v_own;
  s.vy_own = 0.0;
  s.x_int = e.rho * std::cos(e.theta);
  s.y_int = e.rho * std::sin(e.theta);
  s.vx_int = e.v_int * std::cos(e.psi);
  s.vy_int = e.v_int * std::sin(e.psi);
  return s;
}

CounterexampleTrace simulate_from_state(const PlantState& initial, double tau0,
                                        int tau_dot, int max_steps,
                                        const NetworkSet& nets, SimMode mode,
                                        const QuantParams* qp, bool argmax_scores) {
  if (tau_dot != 0 && tau_dot != -1)
    fail(ErrorCode::InvalidArgument, "simulate: tau_dot must be 0 or -1");
  QuantParams default_qp;
  if (mode == SimMode::Quantized && !qp) qp = &default_qp;

  CounterexampleTrace trace;
  PlantState s = mode == SimMode::Quantized ? canonicalize_frame(initial) : initial;
  trace.initial = s;
  trace.tau0 = tau0;
  trace.tau_dot = tau_dot;
  trace.stop = StopReason::MaxSteps;

  double tau = tau0;
  Advisory prev = Advisory::Coc;
  double last_rho = 0.0;
  int rising = 0;

  for (int step = 1; step <= max_steps; ++step) {
    NetworkInput true_in = state_to_network_inputs(s);
    NetworkInput used = mode == SimMode::Exact
                            ? true_in
                            : dequantize_to_inputs(quantize_state(s, *qp), *qp);
    Advisory cmd;
    if (used.rho > kSensorRange) {
      cmd = Advisory::Coc;  // beyond sensor range, no network consulted
    } else {
      const Network& net = nets.select(prev, tau);
      cmd = select_advisory(run_network(net, used), argmax_scores);
      ++trace.network_evals;
    }
    trace.rows.push_back({step, prev, cmd, true_in.rho, rad2deg(true_in.theta),
                          rad2deg(true_in.psi), tau, s});

    if (true_in.rho < kCollisionRange && tau <= kTauZero) {
      trace.stop = StopReason::Collision;
      break;
    }
    if (tau <= kTauZero && true_in.rho > kSensorRange && step > 1 &&
        true_in.rho > last_rho) {
      if (++rising >= kDivergeRun) {
        trace.stop = StopReason::Diverged;
        break;
      }
    } else {
      rising = 0;
    }
    last_rho = true_in.rho;

    s = propagate(s, cmd, 1.0);
    prev = cmd;
    tau = std::max(0.0, tau + tau_dot);
  }
  return trace;
}

CounterexampleTrace simulate(const EncounterSpec& e, const NetworkSet& nets,
                             SimMode mode, const QuantParams* qp, bool argmax_scores) {
  return simulate_from_state(spec_to_state(e), e.tau0, e.tau_dot, e.max_steps, nets,
                             mode, qp, argmax_scores);
}

McStats monte_carlo(std::uint64_t batch_size, int tau_dot, std::uint64_t seed,
                    const NetworkSet& nets, int jobs, int max_steps, SimMode mode,
                    const QuantParams* qp, bool argmax_scores) {
  if (tau_dot != 0 && tau_dot != -1)
    fail(ErrorCode::InvalidArgument, "monte_carlo: tau_dot must be 0 or -1");
  McStats stats;
  stats.samples = batch_size;
  std::mutex mu;
  parallel_for(batch_size, jobs, [&](std::uint64_t i) {
    SplitMix64 rng = sample_stream(seed, i);
    EncounterSpec e;
    e.rho = rng.uniform(60760.0, 63160.0);
    e.theta = kPi - rng.uniform01() * 2.0 * kPi;  // (-pi, pi]
    e.psi = kPi - rng.uniform01() * 2.0 * kPi;
    e.v_own = rng.uniform(100.0, 1200.0);
    e.v_int = rng.uniform(0.0, 1200.0);
    e.tau0 = tau_dot == -1 ? rng.uniform(25.0, 160.0) : 0.0;
    e.tau_dot = tau_dot;
    e.max_steps = max_steps;
    CounterexampleTrace t = simulate(e, nets, mode, qp, argmax_scores);
    if (t.stop == StopReason::Collision) {
      std::lock_guard<std::mutex> lock(mu);
      ++stats.unsafe_count;
      stats.cases.push_back({i, e.v_own, e.v_int, e.tau0});
    }
  });
  std::sort(stats.cases.begin(), stats.cases.end(),
            [](const McCase& a, const McCase& b) { return a.sample_index < b.sample_index; });
  return stats;
}

void write_trace_csv(const CounterexampleTrace& t, std::ostream& os) {
  os << "step,alpha_prev,cmd,rho_ft,theta_deg,psi_deg\n";
  char buf[160];
  for (const TraceRow& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%d,%s,%s,%.10g,%.10g,%.10g\n", r.step,
                  advisory_name_lower(r.alpha_prev), advisory_name_lower(r.cmd),
                  r.rho_ft, r.theta_deg, r.psi_deg);
    os << buf;
  }
}

void write_trace_json(const CounterexampleTrace& t, std::ostream& os) {
  json j;
  j["initial"] = state_json(t.initial);
  j["tau0"] = t.tau0;
  j["tau_dot"] = t.tau_dot;
  j["stop"] = stop_reason_name(t.stop);
  j["network_evals"] = t.network_evals;
  j["rows"] = json::array();
  for (const TraceRow& r : t.rows) {
    j["rows"].push_back({{"step", r.step},
                         {"alpha_prev", advisory_name_lower(r.alpha_prev)},
                         {"cmd", advisory_name_lower(r.cmd)},
                         {"rho_ft", r.rho_ft},
                         {"theta_deg", r.theta_deg},
                         {"psi_deg", r.psi_deg},
                         {"tau", r.tau},
                         {"state", state_json(r.state)}});
  }
  os << j.dump(2) << '\n';
}

}  // namespace qsafe
