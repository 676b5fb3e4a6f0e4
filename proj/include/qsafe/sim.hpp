#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qsafe/dynamics.hpp"
#include "qsafe/nnet.hpp"
#include "qsafe/quant.hpp"

namespace qsafe {

// Polar initial-encounter description; the canonical frame puts the ownship
// at the origin heading east.
struct EncounterSpec {
  double rho = 0;
  double theta = 0;   // rad
  double psi = 0;     // rad
  double v_own = 0;
  double v_int = 0;
  double tau0 = 0;    // s
  int tau_dot = 0;    // 0 or -1
  int max_steps = 1000;
};

PlantState spec_to_state(const EncounterSpec& e);

enum class SimMode { Exact, Quantized };
enum class StopReason { Collision, MaxSteps, Diverged };

const char* stop_reason_name(StopReason r);

struct TraceRow {
  int step = 0;             // 1-based
  Advisory alpha_prev = Advisory::Coc;
  Advisory cmd = Advisory::Coc;
  double rho_ft = 0;        // true (unquantized) separation
  double theta_deg = 0;
  double psi_deg = 0;
  double tau = 0;
  PlantState state;
};

struct CounterexampleTrace {
  PlantState initial;
  double tau0 = 0;
  int tau_dot = 0;
  StopReason stop = StopReason::MaxSteps;
  int network_evals = 0;    // advisories actually computed by a network
  std::vector<TraceRow> rows;
};

// One-second closed loop: choose an advisory from the current row's inputs
// (exact features, or cell-center features of the quantized state), then
// propagate. Beyond sensor range the advisory is forced to clear-of-conflict
// without running a network. Collision and divergence tests always use the
// true separation. Quantized mode first rotates the frame so the intruder
// flies east, matching the quantizer's convention.
CounterexampleTrace simulate_from_state(const PlantState& initial, double tau0,
                                        int tau_dot, int max_steps,
                                        const NetworkSet& nets, SimMode mode,
                                        const QuantParams* qp = nullptr,
                                        bool argmax_scores = false);

CounterexampleTrace simulate(const EncounterSpec& e, const NetworkSet& nets,
                             SimMode mode, const QuantParams* qp = nullptr,
                             bool argmax_scores = false);

struct McCase {
  std::uint64_t sample_index = 0;
  double v_own = 0, v_int = 0, tau0 = 0;
};

struct McStats {
  std::uint64_t samples = 0;
  std::uint64_t unsafe_count = 0;
  std::vector<McCase> cases;  // sorted by sample index
};

// Uniform encounter sampling: rho in [60760, 63160], theta and psi in
// (-pi, pi], v_own in [100, 1200], v_int in [0, 1200]; tau0 in [25, 160] when
// tau_dot is -1, otherwise 0. One splitmix64 stream per sample index, so
// results never depend on how samples shard across workers.
McStats monte_carlo(std::uint64_t batch_size, int tau_dot, std::uint64_t seed,
                    const NetworkSet& nets, int jobs = 1, int max_steps = 1000,
                    SimMode mode = SimMode::Exact, const QuantParams* qp = nullptr,
                    bool argmax_scores = false);

void write_trace_csv(const CounterexampleTrace& t, std::ostream& os);
void write_trace_json(const CounterexampleTrace& t, std::ostream& os);

}  // namespace qsafe
