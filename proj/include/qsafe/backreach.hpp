#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qsafe/nnet.hpp"
#include "qsafe/partition.hpp"
#include "qsafe/sim.hpp"

namespace qsafe {

enum class Verdict { Safe, Unsafe, Inconclusive };

const char* verdict_name(Verdict v);

struct CheckContext {
  const NetworkSet* nets = nullptr;
  QuantParams params;
  int tau_dot = 0;
  int max_depth = 300;      // backward steps before giving up as inconclusive
  bool argmax_scores = false;
};

struct CheckResult {
  Verdict verdict = Verdict::Safe;
  // Unsafe payload: the beyond-sensor-range predecessor region, the advisory
  // sequence from it to the collision (oldest first), and the tau clock value
  // at the start of that path.
  std::optional<AhPolytope> witness_region;
  std::vector<Advisory> command_sequence;
  double tau_init = 0;
  int depth = 0;
};

// Exact one-second predecessor set.
AhPolytope backreach_step(const AhPolytope& s, Advisory alpha_prev);

// Recursive quantized backreachability from an unsafe region. Walks the
// predecessor sets cell by cell, keeping only cells whose quantized network
// decision reproduces the advisory that was actually taken, and declares
// unsafe as soon as a consistent predecessor lies beyond sensor range.
CheckResult check_state(const AhPolytope& s, Advisory alpha_prev, double tau,
                        const CheckContext& ctx);

struct UnsafeRecord {
  std::uint64_t index = 0;
  std::string descriptor;
  CheckResult result;
};

struct VerifyReport {
  std::uint64_t total = 0;
  std::uint64_t safe = 0;
  std::uint64_t unsafe_count = 0;
  std::uint64_t inconclusive = 0;
  std::uint64_t resumed = 0;  // skipped via resume file (included in safe)
  double wall_seconds = 0;
  std::vector<UnsafeRecord> unsafe_records;          // sorted by index
  std::vector<std::uint64_t> inconclusive_indices;   // sorted
};

struct VerifyOptions {
  int jobs = 1;
  const std::set<std::string>* resume_skip = nullptr;  // already-proven-safe descriptors
  std::ostream* resume_out = nullptr;  // newly proven safe descriptors, appended live
  std::atomic<bool>* cancel = nullptr;
  std::atomic<std::uint64_t>* progress = nullptr;      // partitions completed
};

// Checks every partition; verdict counts and unsafe records are independent
// of jobs and scheduling. The resume stream is the one unordered artifact
// (it is a crash checkpoint, appended as proofs complete).
VerifyReport verify_all(const PartitionScheme& scheme, const NetworkSet& nets,
                        const CheckContext& base, const VerifyOptions& opts);

void write_unsafe_jsonl(const VerifyReport& report, std::ostream& os);

// Chebyshev center of the witness region with the pinned-at-zero intruder
// dimensions dropped.
PlantState extract_witness(const CheckResult& r);

// Replays the witness on the exact (unquantized) closed loop; a trace is
// returned only if it actually ends in a collision.
std::optional<CounterexampleTrace> replay_and_confirm(const PlantState& witness,
                                                      const CheckResult& r,
                                                      const NetworkSet& nets,
                                                      int tau_dot,
                                                      bool argmax_scores = false);

enum class FalsifyStatus { Confirmed, QuantizedSafe, FloorReached, Cancelled };

const char* falsify_status_name(FalsifyStatus s);

struct FalsifySettings {
  QuantParams params;
  double vown_lo = 100, vown_hi = 1200;
  double vint_lo = 0, vint_hi = 1200;
  TauDotMode tau_mode = TauDotMode::Both;
  int jobs = 1;
  int max_depth = 300;
  bool argmax_scores = false;
  double pos_floor = 1.0;               // ft; refinement gives up below this
  double vel_floor = 1e-3;              // ft/s
  double theta_floor = deg2rad(1e-3);   // rad
  std::uint64_t chunk = 8192;  // confirmation batch; fixed so --jobs cannot
                               // change which counterexample is found
  std::atomic<bool>* cancel = nullptr;
  std::atomic<std::uint64_t>* progress = nullptr;
};

struct FalsifyOutcome {
  FalsifyStatus status = FalsifyStatus::QuantizedSafe;
  std::optional<CounterexampleTrace> trace;   // set when Confirmed
  std::optional<CheckResult> quantized_result;
  PlantState witness;
  std::string partition_descriptor;
  QuantParams final_params;
  int rounds = 0;  // quantum halvings performed
  std::uint64_t partitions_checked = 0;
  std::uint64_t unsafe_found = 0;
  std::uint64_t replays = 0;
};

// Counterexample search: check partitions in index order (chunked), replay
// each quantized counterexample's witness, and on failure halve quanta in the
// rotation position -> velocity -> heading, refining previously-unsafe
// regions first. A full all-safe pass ends the search as quantized-safe.
FalsifyOutcome falsify(const NetworkSet& nets, const FalsifySettings& settings);

}  // namespace qsafe
