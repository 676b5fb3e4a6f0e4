#include "qsafe/backreach.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <ostream>

#include <json.hpp>

#include "qsafe/errors.hpp"
#include "qsafe/parallel.hpp"

namespace qsafe {
namespace {

using json = nlohmann::ordered_json;

// The witness center is sought over the six live dimensions; the intruder
// y-position and y-velocity are identically zero in every region we build.
constexpr int kDropYInt = 5, kDropVyInt = 7;

struct Checker {
  const NetworkSet& nets;
  const QuantParams& params;
  int tau_dot;
  int max_depth;
  bool argmax;

  // The quantized controller's decision for one cell: clear-of-conflict
  // beyond sensor range, otherwise the network picked by (previous advisory,
  // tau) scored on the cell-center features.
  Advisory cell_command(const NetworkInput& in, Advisory net_prev, double tau) const {
    if (in.rho > kSensorRange) return Advisory::Coc;
    return select_advisory(run_network(nets.select(net_prev, tau), in), argmax);
  }

  // Relative-position support interval of the predecessor set, used to pick
  // a witness cell the set overlaps generously (a sliver overlap would park
  // the witness on a cell face and spoil the exact replay).
  struct RelBounds {
    double x_lo, x_hi, y_lo, y_hi;
  };

  static RelBounds rel_bounds(const AhPolytope& pred) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(8);
    dir(4) = 1.0;
    dir(0) = -1.0;
    RelBounds b{};
    b.x_lo = minimize(pred, dir).value;
    b.x_hi = maximize(pred, dir).value;
    dir.setZero();
    dir(5) = 1.0;
    dir(1) = -1.0;
    b.y_lo = minimize(pred, dir).value;
    b.y_hi = maximize(pred, dir).value;
    return b;
  }

  const QuantizedState* pick_witness_cell(const std::vector<const QuantizedState*>& beyond,
                                          const RelBounds& b) const {
    auto overlap = [](double lo, double hi, double cell_lo, double cell_hi) {
      return std::min(hi, cell_hi) - std::max(lo, cell_lo);
    };
    const QuantizedState* best = nullptr;
    double best_width = -1.0, best_dist = 0.0;
    double mx = 0.5 * (b.x_lo + b.x_hi), my = 0.5 * (b.y_lo + b.y_hi);
    for (const QuantizedState* q : beyond) {
      double wx = overlap(b.x_lo, b.x_hi, q->dx * params.q_pos, (q->dx + 1) * params.q_pos);
      double wy = overlap(b.y_lo, b.y_hi, q->dy * params.q_pos, (q->dy + 1) * params.q_pos);
      double width = std::min(wx, wy);
      double cx = (q->dx + 0.5) * params.q_pos, cy = (q->dy + 0.5) * params.q_pos;
      double dist = std::hypot(cx - mx, cy - my);
      if (!best || width > best_width + 1e-9 ||
          (width > best_width - 1e-9 && dist < best_dist - 1e-9)) {
        best = q;
        best_width = width;
        best_dist = dist;
      }
    }
    return best;
  }

  CheckResult run(const AhPolytope& s, Advisory alpha_prev, double tau, int depth) const {
    if (depth >= max_depth) {
      CheckResult r;
      r.verdict = Verdict::Inconclusive;
      r.depth = depth;
      return r;
    }
    AhPolytope pred = backreach_step(s, alpha_prev);
    double tau_prev = tau - tau_dot;
    std::vector<QuantizedState> cells = possible_quantized_states(pred, params);

    CheckResult aggregate;  // Safe until a branch says otherwise
    aggregate.depth = depth;
    for (Advisory prev_prev : kAllAdvisories) {
      std::vector<const QuantizedState*> matching, beyond;
      matching.reserve(cells.size());
      for (const QuantizedState& q : cells) {
        NetworkInput in = dequantize_to_inputs(q, params);
        if (cell_command(in, prev_prev, tau_prev) != alpha_prev) continue;
        matching.push_back(&q);
        if (rho_min(q, params) > kSensorRange) beyond.push_back(&q);
      }
      if (!beyond.empty()) {
        // A consistent predecessor entirely outside sensor range is a valid
        // initial state: unsafe, witness where the best-covered such cell
        // meets the predecessor set.
        const QuantizedState* q = pick_witness_cell(beyond, rel_bounds(pred));
        HalfspaceSet cut = cell_halfspaces(*q, params);
        CheckResult r;
        r.verdict = Verdict::Unsafe;
        r.witness_region = intersect_halfspaces(pred, cut.lhs, cut.rhs);
        r.command_sequence = {alpha_prev};
        r.tau_init = tau_prev;
        r.depth = depth + 1;
        return r;
      }
      if (matching.empty()) continue;

      if (matching.size() == cells.size()) {
        // Every quantized predecessor is consistent: step back over the
        // whole set without splitting.
        CheckResult r = run(pred, prev_prev, tau_prev, depth + 1);
        if (r.verdict == Verdict::Unsafe) {
          r.command_sequence.push_back(alpha_prev);
          return r;
        }
        if (r.verdict == Verdict::Inconclusive) aggregate.verdict = Verdict::Inconclusive;
      } else {
        for (const QuantizedState* q : matching) {
          HalfspaceSet cut = cell_halfspaces(*q, params);
          AhPolytope part = intersect_halfspaces(pred, cut.lhs, cut.rhs);
          CheckResult r = run(part, prev_prev, tau_prev, depth + 1);
          if (r.verdict == Verdict::Unsafe) {
            r.command_sequence.push_back(alpha_prev);
            return r;
          }
          if (r.verdict == Verdict::Inconclusive) aggregate.verdict = Verdict::Inconclusive;
        }
      }
    }
    return aggregate;
  }
};

json check_result_json(const UnsafeRecord& rec) {
  json j;
  j["partition"] = rec.index;
  j["descriptor"] = rec.descriptor;
  j["verdict"] = verdict_name(rec.result.verdict);
  j["depth"] = rec.result.depth;
  j["tau_init"] = rec.result.tau_init;
  std::string cmds;
  for (Advisory a : rec.result.command_sequence) {
    if (!cmds.empty()) cmds.push_back(' ');
    cmds += advisory_name_lower(a);
  }
  j["commands"] = cmds;
  return j;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Safe: return "safe";
    case Verdict::Unsafe: return "unsafe";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* falsify_status_name(FalsifyStatus s) {
  switch (s) {
    case FalsifyStatus::Confirmed: return "confirmed";
    case FalsifyStatus::QuantizedSafe: return "quantized_safe";
    case FalsifyStatus::FloorReached: return "floor_reached";
    case FalsifyStatus::Cancelled: return "cancelled";
  }
  return "?";
}

AhPolytope backreach_step(const AhPolytope& s, Advisory alpha_prev) {
  return linear_transform(s, back_step_matrix(alpha_prev));
}

CheckResult check_state(const AhPolytope& s, Advisory alpha_prev, double tau,
                        const CheckContext& ctx) {
  if (!ctx.nets) fail(ErrorCode::InvalidArgument, "check_state: no networks");
  if (ctx.tau_dot != 0 && ctx.tau_dot != -1)
    fail(ErrorCode::InvalidArgument, "check_state: tau_dot must be 0 or -1");
  Checker checker{*ctx.nets, ctx.params, ctx.tau_dot, ctx.max_depth, ctx.argmax_scores};
  return checker.run(s, alpha_prev, tau, 0);
}

VerifyReport verify_all(const PartitionScheme& scheme, const NetworkSet& nets,
                        const CheckContext& base, const VerifyOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  VerifyReport report;
  report.total = scheme.count();

  std::atomic<std::uint64_t> safe{0}, unsafe{0}, inconclusive{0}, resumed{0};
  std::mutex mu;

  parallel_for(report.total, opts.jobs, [&](std::uint64_t i) {
    UnsafePartition part = scheme.at(i);
    std::string desc = part.descriptor();
    if (opts.resume_skip && opts.resume_skip->count(desc)) {
      safe.fetch_add(1, std::memory_order_relaxed);
      resumed.fetch_add(1, std::memory_order_relaxed);
      if (opts.progress) opts.progress->fetch_add(1, std::memory_order_relaxed);
      return;
    }
    CheckContext ctx = base;
    ctx.nets = &nets;
    ctx.tau_dot = part.tau_dot;
    CheckResult r = check_state(part.region, part.alpha_prev, 0.0, ctx);
    switch (r.verdict) {
      case Verdict::Safe: {
        safe.fetch_add(1, std::memory_order_relaxed);
        if (opts.resume_out) {
          std::lock_guard<std::mutex> lock(mu);
          (*opts.resume_out) << desc << '\n';
          opts.resume_out->flush();
        }
        break;
      }
      case Verdict::Unsafe: {
        unsafe.fetch_add(1, std::memory_order_relaxed);
        std::lock_guard<std::mutex> lock(mu);
        report.unsafe_records.push_back({i, std::move(desc), std::move(r)});
        break;
      }
      case Verdict::Inconclusive: {
        inconclusive.fetch_add(1, std::memory_order_relaxed);
        std::lock_guard<std::mutex> lock(mu);
        report.inconclusive_indices.push_back(i);
        break;
      }
    }
    if (opts.progress) opts.progress->fetch_add(1, std::memory_order_relaxed);
  }, opts.cancel);

  report.safe = safe.load();
  report.unsafe_count = unsafe.load();
  report.inconclusive = inconclusive.load();
  report.resumed = resumed.load();
  std::sort(report.unsafe_records.begin(), report.unsafe_records.end(),
            [](const UnsafeRecord& a, const UnsafeRecord& b) { return a.index < b.index; });
  std::sort(report.inconclusive_indices.begin(), report.inconclusive_indices.end());
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

void write_unsafe_jsonl(const VerifyReport& report, std::ostream& os) {
  for (const UnsafeRecord& rec : report.unsafe_records)
    os << check_result_json(rec).dump() << '\n';
}

PlantState extract_witness(const CheckResult& r) {
  if (r.verdict != Verdict::Unsafe || !r.witness_region)
    fail(ErrorCode::InvalidArgument, "extract_witness: result is not unsafe");
  Eigen::VectorXd x = deep_center(*r.witness_region, {kDropYInt, kDropVyInt});
  return PlantState::from_vec(x);
}

std::optional<CounterexampleTrace> replay_and_confirm(const PlantState& witness,
                                                      const CheckResult& r,
                                                      const NetworkSet& nets,
                                                      int tau_dot, bool argmax_scores) {
  int steps = r.depth + 100;
  CounterexampleTrace t = simulate_from_state(witness, r.tau_init, tau_dot, steps,
                                              nets, SimMode::Exact, nullptr,
                                              argmax_scores);
  if (t.stop == StopReason::Collision) return t;
  return std::nullopt;
}

namespace {

struct Level {
  PartitionScheme scheme;
  std::vector<std::uint64_t> frontier;  // unsafe partitions, ascending
};

// Child partitions at the refined scheme whose tuple ranges nest inside the
// parent partition's.
std::vector<std::uint64_t> refine_children(const PartitionScheme& parent_scheme,
                                           const UnsafePartition& parent,
                                           const PartitionScheme& child_scheme) {
  constexpr double tol = 1e-9;
  const QuantParams& pq = parent_scheme.params();
  const QuantParams& cq = child_scheme.params();

  std::vector<std::uint64_t> pos_ids;
  const auto& cells = child_scheme.pos_cells();
  for (std::uint64_t i = 0; i < cells.size(); ++i) {
    double lox = cells[i].first * cq.q_pos, hix = (cells[i].first + 1) * cq.q_pos;
    double loy = cells[i].second * cq.q_pos, hiy = (cells[i].second + 1) * cq.q_pos;
    if (lox >= parent.pos_ix * pq.q_pos - tol && hix <= (parent.pos_ix + 1) * pq.q_pos + tol &&
        loy >= parent.pos_iy * pq.q_pos - tol && hiy <= (parent.pos_iy + 1) * pq.q_pos + tol)
      pos_ids.push_back(i);
  }
  auto nested_speeds = [&](const std::vector<SpeedInterval>& child,
                           const SpeedInterval& p) {
    std::vector<int> ids;
    for (int i = 0; i < static_cast<int>(child.size()); ++i)
      if (child[i].lo >= p.lo - tol && child[i].hi <= p.hi + tol) ids.push_back(i);
    return ids;
  };
  std::vector<int> vo_ids = nested_speeds(child_scheme.vown_intervals(),
                                          parent_scheme.vown_intervals()[parent.vown_idx]);
  std::vector<int> vi_ids = nested_speeds(child_scheme.vint_intervals(),
                                          parent_scheme.vint_intervals()[parent.vint_idx]);
  std::vector<long> th_ids;
  double plo = parent.sector * pq.q_theta, phi = (parent.sector + 1) * pq.q_theta;
  long sectors = cq.heading_sectors();
  for (long k = 0; k < sectors; ++k)
    if (k * cq.q_theta >= plo - tol && (k + 1) * cq.q_theta <= phi + tol)
      th_ids.push_back(k);

  auto tau_pos = std::find(child_scheme.tau_dots().begin(), child_scheme.tau_dots().end(),
                           parent.tau_dot) - child_scheme.tau_dots().begin();
  std::vector<std::uint64_t> out;
  for (std::uint64_t p : pos_ids)
    for (int vo : vo_ids)
      for (int vi : vi_ids)
        for (long th : th_ids) {
          std::uint64_t idx = p;
          idx = idx * child_scheme.vown_intervals().size() + vo;
          idx = idx * child_scheme.vint_intervals().size() + vi;
          idx = idx * sectors + th;
          idx = idx * kAdvisoryCount + static_cast<int>(parent.alpha_prev);
          idx = idx * child_scheme.tau_dots().size() + tau_pos;
          out.push_back(idx);
        }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

FalsifyOutcome falsify(const NetworkSet& nets, const FalsifySettings& settings) {
  FalsifyOutcome out;
  out.final_params = settings.params;

  QuantParams params = settings.params;
  auto make_scheme = [&](const QuantParams& qp) {
    return PartitionScheme::make(qp, settings.vown_lo, settings.vown_hi,
                                 settings.vint_lo, settings.vint_hi, settings.tau_mode);
  };

  // Checks the listed partitions (all of them when `subset` is null) chunk by
  // chunk in ascending index order; replays each unsafe witness in order and
  // stops the whole search at the first confirmed collision.
  auto sweep = [&](const PartitionScheme& scheme,
                   const std::vector<std::uint64_t>* subset,
                   std::vector<std::uint64_t>& unsafe_out) -> bool {
    std::uint64_t n = subset ? subset->size() : scheme.count();
    std::uint64_t chunk = std::max<std::uint64_t>(1, settings.chunk);
    for (std::uint64_t base = 0; base < n; base += chunk) {
      std::uint64_t end = std::min(n, base + chunk);
      std::vector<std::pair<std::uint64_t, CheckResult>> found;
      std::mutex mu;
      parallel_for(end - base, settings.jobs, [&](std::uint64_t k) {
        std::uint64_t idx = subset ? (*subset)[base + k] : base + k;
        UnsafePartition part = scheme.at(idx);
        CheckContext ctx;
        ctx.nets = &nets;
        ctx.params = scheme.params();
        ctx.tau_dot = part.tau_dot;
        ctx.max_depth = settings.max_depth;
        ctx.argmax_scores = settings.argmax_scores;
        CheckResult r = check_state(part.region, part.alpha_prev, 0.0, ctx);
        if (settings.progress) settings.progress->fetch_add(1, std::memory_order_relaxed);
        std::lock_guard<std::mutex> lock(mu);
        out.partitions_checked += 1;
        if (r.verdict == Verdict::Unsafe) found.emplace_back(idx, std::move(r));
      }, settings.cancel);
      if (settings.cancel && settings.cancel->load()) return false;

      std::sort(found.begin(), found.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& [idx, result] : found) {
        unsafe_out.push_back(idx);
        ++out.unsafe_found;
        PlantState w = extract_witness(result);
        ++out.replays;
        auto trace = replay_and_confirm(w, result, nets, scheme.at(idx).tau_dot,
                                        settings.argmax_scores);
        if (trace) {
          out.status = FalsifyStatus::Confirmed;
          out.trace = std::move(trace);
          out.quantized_result = std::move(result);
          out.witness = w;
          out.partition_descriptor = scheme.at(idx).descriptor();
          out.final_params = scheme.params();
          return true;
        }
      }
    }
    return false;
  };

  Level level{make_scheme(params), {}};
  if (sweep(level.scheme, nullptr, level.frontier)) return out;
  if (settings.cancel && settings.cancel->load()) {
    out.status = FalsifyStatus::Cancelled;
    return out;
  }
  if (level.frontier.empty()) {
    out.status = FalsifyStatus::QuantizedSafe;
    out.final_params = params;
    return out;
  }

  for (int round = 0;; ++round) {
    QuantParams next = params;
    switch (round % 3) {  // fixed rotation: position, velocity, heading
      case 0:
        next.q_pos /= 2.0;
        if (next.q_pos < settings.pos_floor) {
          out.status = FalsifyStatus::FloorReached;
          out.final_params = params;
          out.rounds = round;
          return out;
        }
        break;
      case 1:
        if (next.v_own_fixed && next.v_int_fixed) { params = next; continue; }
        next.q_vel /= 2.0;
        if (next.q_vel < settings.vel_floor) {
          out.status = FalsifyStatus::FloorReached;
          out.final_params = params;
          out.rounds = round;
          return out;
        }
        break;
      case 2:
        next.q_theta /= 2.0;
        if (next.q_theta < settings.theta_floor) {
          out.status = FalsifyStatus::FloorReached;
          out.final_params = params;
          out.rounds = round;
          return out;
        }
        break;
    }
    out.rounds = round + 1;

    PartitionScheme child_scheme = make_scheme(next);
    std::vector<std::uint64_t> children;
    for (std::uint64_t idx : level.frontier) {
      UnsafePartition parent = level.scheme.at(idx);
      auto kids = refine_children(level.scheme, parent, child_scheme);
      children.insert(children.end(), kids.begin(), kids.end());
    }
    std::sort(children.begin(), children.end());
    children.erase(std::unique(children.begin(), children.end()), children.end());

    std::vector<std::uint64_t> unsafe_children;
    if (sweep(child_scheme, &children, unsafe_children)) return out;
    if (settings.cancel && settings.cancel->load()) {
      out.status = FalsifyStatus::Cancelled;
      return out;
    }

    if (unsafe_children.empty()) {
      // The refined offspring all proved safe; only a full pass at the new
      // quanta can justify a quantized-safe claim.
      std::vector<std::uint64_t> full_unsafe;
      if (sweep(child_scheme, nullptr, full_unsafe)) return out;
      if (settings.cancel && settings.cancel->load()) {
        out.status = FalsifyStatus::Cancelled;
        return out;
      }
      if (full_unsafe.empty()) {
        out.status = FalsifyStatus::QuantizedSafe;
        out.final_params = next;
        return out;
      }
      unsafe_children = std::move(full_unsafe);
    }
    params = next;
    level = Level{std::move(child_scheme), std::move(unsafe_children)};
  }
}

}  // namespace qsafe
