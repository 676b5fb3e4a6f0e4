#include "qsafe.h"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qsafe/backreach.hpp"
#include "qsafe/config.hpp"
#include "qsafe/errors.hpp"
#include "qsafe/nnet.hpp"
#include "qsafe/partition.hpp"
#include "qsafe/sim.hpp"
#include "qsafe/svg.hpp"

using nlohmann::ordered_json;
namespace fs = std::filesystem;

struct qsafe_ctx {
  qsafe::RunConfig cfg;
  std::optional<qsafe::NetworkSet> nets;
  std::string last_error;
  std::atomic<bool> cancel{false};
  std::atomic<std::uint64_t> progress{0};

  // Scheme cache, invalidated whenever an option changes.
  std::uint64_t cfg_generation = 0;
  std::uint64_t scheme_generation = 0;
  std::optional<qsafe::PartitionScheme> scheme;
};

namespace {

qsafe_status map_code(qsafe::ErrorCode c) {
  switch (c) {
    case qsafe::ErrorCode::InvalidArgument: return QSAFE_ERR_INVALID_ARGUMENT;
    case qsafe::ErrorCode::ParseError: return QSAFE_ERR_PARSE;
    case qsafe::ErrorCode::IoError: return QSAFE_ERR_IO;
    case qsafe::ErrorCode::EmptySet: return QSAFE_ERR_EMPTY_SET;
    case qsafe::ErrorCode::DegenerateBasis: return QSAFE_ERR_DEGENERATE;
    case qsafe::ErrorCode::LpFailure: return QSAFE_ERR_LP_FAILURE;
    case qsafe::ErrorCode::MissingNetwork: return QSAFE_ERR_MISSING_NETWORK;
  }
  return QSAFE_ERR_UNKNOWN;
}

template <typename Fn>
qsafe_status guarded(qsafe_ctx* ctx, Fn&& fn) {
  if (!ctx) return QSAFE_ERR_INVALID_ARGUMENT;
  ctx->last_error.clear();
  try {
    return fn();
  } catch (const qsafe::Error& e) {
    ctx->last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return QSAFE_ERR_UNKNOWN;
  }
}

const qsafe::NetworkSet& need_nets(qsafe_ctx* ctx) {
  if (!ctx->nets)
    qsafe::fail(qsafe::ErrorCode::MissingNetwork,
                "no networks loaded; call qsafe_load_networks first");
  return *ctx->nets;
}

const qsafe::PartitionScheme& scheme_of(qsafe_ctx* ctx) {
  if (!ctx->scheme || ctx->scheme_generation != ctx->cfg_generation) {
    const qsafe::RunConfig& c = ctx->cfg;
    c.validate();
    ctx->scheme = qsafe::PartitionScheme::make(c.quant_params(), c.vown_min,
                                               c.vown_max, c.vint_min,
                                               c.vint_max, c.tau_mode());
    ctx->scheme_generation = ctx->cfg_generation;
  }
  return *ctx->scheme;
}

// Output files go under cfg.out ("" means the current directory).
fs::path artifact_path(const qsafe_ctx* ctx, const char* name) {
  if (ctx->cfg.out.empty()) return fs::path(name);
  fs::create_directories(ctx->cfg.out);
  return fs::path(ctx->cfg.out) / name;
}

std::ofstream open_artifact(const qsafe_ctx* ctx, const char* name) {
  fs::path p = artifact_path(ctx, name);
  std::ofstream os(p);
  if (!os)
    qsafe::fail(qsafe::ErrorCode::IoError, "cannot open " + p.string() + " for writing");
  return os;
}

int check_tau_dot(int tau_dot) {
  if (tau_dot != 0 && tau_dot != -1)
    qsafe::fail(qsafe::ErrorCode::InvalidArgument,
                "tau_dot must be 0 or -1, got " + std::to_string(tau_dot));
  return tau_dot;
}

// Run settings echoed into reports so artifacts are self-describing. Timing
// and job counts are deliberately left out: files must be byte-identical
// across reruns and worker counts.
ordered_json settings_json(const qsafe::RunConfig& c) {
  ordered_json j;
  j["q_pos"] = c.q_pos;
  j["q_vel"] = c.q_vel;
  j["q_theta_deg"] = c.q_theta_deg;
  j["vown"] = {c.vown_min, c.vown_max};
  j["vint"] = {c.vint_min, c.vint_max};
  j["tau_dot"] = c.tau_dot;
  j["max_depth"] = c.max_depth;
  j["argmax_scores"] = c.argmax_scores;
  return j;
}

ordered_json quanta_json(const qsafe::QuantParams& qp) {
  ordered_json j;
  j["q_pos"] = qp.q_pos;
  j["q_vel"] = qp.q_vel;
  j["q_theta_deg"] = qsafe::rad2deg(qp.q_theta);
  return j;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

extern "C" {

const char* qsafe_version(void) { return "0.1.0"; }

qsafe_ctx* qsafe_ctx_new(void) {
  try {
    return new qsafe_ctx;
  } catch (...) {
    return nullptr;
  }
}

void qsafe_ctx_free(qsafe_ctx* ctx) { delete ctx; }

const char* qsafe_last_error(const qsafe_ctx* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

qsafe_status qsafe_set_option(qsafe_ctx* ctx, const char* key, const char* value) {
  return guarded(ctx, [&] {
    if (!key || !value)
      qsafe::fail(qsafe::ErrorCode::InvalidArgument, "null option key or value");
    ctx->cfg.set(key, value);
    ++ctx->cfg_generation;
    return QSAFE_OK;
  });
}

qsafe_status qsafe_load_config(qsafe_ctx* ctx, const char* path) {
  return guarded(ctx, [&] {
    if (!path) qsafe::fail(qsafe::ErrorCode::InvalidArgument, "null config path");
    ctx->cfg.load_file(path);
    ++ctx->cfg_generation;
    return QSAFE_OK;
  });
}

qsafe_status qsafe_load_networks(qsafe_ctx* ctx, const char* dir) {
  return guarded(ctx, [&] {
    std::string d = (dir && *dir) ? dir : ctx->cfg.nnet_dir;
    if (d.empty())
      qsafe::fail(qsafe::ErrorCode::InvalidArgument,
                  "no network directory given and nnet_dir is unset");
    ctx->nets = qsafe::NetworkSet::load_directory(d);
    return QSAFE_OK;
  });
}

int qsafe_networks_loaded(const qsafe_ctx* ctx) {
  return ctx && ctx->nets ? ctx->nets->loaded_count() : 0;
}

void qsafe_cancel(qsafe_ctx* ctx) {
  if (ctx) ctx->cancel.store(true, std::memory_order_relaxed);
}

int qsafe_cancelled(const qsafe_ctx* ctx) {
  return ctx && ctx->cancel.load(std::memory_order_relaxed) ? 1 : 0;
}

uint64_t qsafe_progress(const qsafe_ctx* ctx) {
  return ctx ? ctx->progress.load(std::memory_order_relaxed) : 0;
}

qsafe_status qsafe_partition_count(qsafe_ctx* ctx, uint64_t* count) {
  return guarded(ctx, [&] {
    if (!count) qsafe::fail(qsafe::ErrorCode::InvalidArgument, "null count pointer");
    *count = scheme_of(ctx).count();
    return QSAFE_OK;
  });
}

qsafe_status qsafe_partition_descriptor(qsafe_ctx* ctx, uint64_t index,
                                        char* buf, size_t cap) {
  return guarded(ctx, [&] {
    if (!buf) qsafe::fail(qsafe::ErrorCode::InvalidArgument, "null buffer");
    const qsafe::PartitionScheme& s = scheme_of(ctx);
    if (index >= s.count())
      qsafe::fail(qsafe::ErrorCode::InvalidArgument,
                  "partition index " + std::to_string(index) + " out of range");
    std::string d = s.at(index).descriptor();
    if (d.size() + 1 > cap) {
      ctx->last_error = "descriptor needs " + std::to_string(d.size() + 1) + " bytes";
      return QSAFE_ERR_BUFFER_TOO_SMALL;
    }
    std::memcpy(buf, d.c_str(), d.size() + 1);
    return QSAFE_OK;
  });
}

qsafe_status qsafe_verify(qsafe_ctx* ctx, qsafe_verify_summary* out) {
  return guarded(ctx, [&] {
    const qsafe::NetworkSet& nets = need_nets(ctx);
    const qsafe::PartitionScheme& scheme = scheme_of(ctx);
    const qsafe::RunConfig& cfg = ctx->cfg;

    qsafe::CheckContext base;
    base.nets = &nets;
    base.params = cfg.quant_params();
    base.max_depth = cfg.max_depth;
    base.argmax_scores = cfg.argmax_scores;

    qsafe::VerifyOptions opts;
    opts.jobs = cfg.effective_jobs();
    opts.cancel = &ctx->cancel;
    opts.progress = &ctx->progress;

    std::set<std::string> skip;
    std::ofstream resume_out;
    if (!cfg.resume.empty()) {
      std::ifstream in(cfg.resume);
      for (std::string line; std::getline(in, line);)
        if (!line.empty()) skip.insert(line);
      resume_out.open(cfg.resume, std::ios::app);
      if (!resume_out)
        qsafe::fail(qsafe::ErrorCode::IoError,
                    "cannot open resume file " + cfg.resume + " for append");
      opts.resume_skip = &skip;
      opts.resume_out = &resume_out;
    }

    ctx->cancel.store(false);
    ctx->progress.store(0);
    qsafe::VerifyReport report = qsafe::verify_all(scheme, nets, base, opts);

    {
      std::ofstream os = open_artifact(ctx, "unsafe.jsonl");
      qsafe::write_unsafe_jsonl(report, os);
    }
    {
      ordered_json j;
      j["total"] = report.total;
      j["safe"] = report.safe;
      j["unsafe"] = report.unsafe_count;
      j["inconclusive"] = report.inconclusive;
      j["resumed"] = report.resumed;
      j["cancelled"] = ctx->cancel.load();
      j["inconclusive_indices"] = report.inconclusive_indices;
      j["settings"] = settings_json(cfg);
      std::ofstream os = open_artifact(ctx, "verify_report.json");
      os << j.dump(2) << "\n";
    }

    if (out) {
      out->total = report.total;
      out->safe = report.safe;
      out->unsafe_count = report.unsafe_count;
      out->inconclusive = report.inconclusive;
      out->resumed = report.resumed;
      out->wall_seconds = report.wall_seconds;
    }
    return QSAFE_OK;
  });
}

qsafe_status qsafe_falsify(qsafe_ctx* ctx, qsafe_falsify_summary* out) {
  return guarded(ctx, [&] {
    const qsafe::NetworkSet& nets = need_nets(ctx);
    const qsafe::RunConfig& cfg = ctx->cfg;
    cfg.validate();

    qsafe::FalsifySettings s;
    s.params = cfg.quant_params();
    s.vown_lo = cfg.vown_min;
    s.vown_hi = cfg.vown_max;
    s.vint_lo = cfg.vint_min;
    s.vint_hi = cfg.vint_max;
    s.tau_mode = cfg.tau_mode();
    s.jobs = cfg.effective_jobs();
    s.max_depth = cfg.max_depth;
    s.argmax_scores = cfg.argmax_scores;
    s.pos_floor = cfg.pos_floor;
    s.vel_floor = cfg.vel_floor;
    s.theta_floor = qsafe::deg2rad(cfg.theta_floor_deg);
    s.cancel = &ctx->cancel;
    s.progress = &ctx->progress;

    ctx->cancel.store(false);
    ctx->progress.store(0);
    auto t0 = std::chrono::steady_clock::now();
    qsafe::FalsifyOutcome res = qsafe::falsify(nets, s);
    double wall = elapsed_since(t0);

    {
      ordered_json j;
      j["status"] = qsafe::falsify_status_name(res.status);
      j["rounds"] = res.rounds;
      j["partitions_checked"] = res.partitions_checked;
      j["unsafe_found"] = res.unsafe_found;
      j["replays"] = res.replays;
      j["final_quanta"] = quanta_json(res.final_params);
      if (!res.partition_descriptor.empty())
        j["partition"] = res.partition_descriptor;
      if (res.status == qsafe::FalsifyStatus::Confirmed && res.trace) {
        const qsafe::CounterexampleTrace& t = *res.trace;
        j["tau0"] = t.tau0;
        j["tau_dot"] = t.tau_dot;
        j["steps"] = t.rows.size();
        j["final_rho_ft"] = t.rows.back().rho_ft;
        Eigen::Matrix<double, 8, 1> w = res.witness.vec();
        j["witness"] = std::vector<double>(w.data(), w.data() + 8);
      }
      j["settings"] = settings_json(cfg);
      std::ofstream os = open_artifact(ctx, "falsify_outcome.json");
      os << j.dump(2) << "\n";
    }
    if (res.status == qsafe::FalsifyStatus::Confirmed && res.trace) {
      {
        std::ofstream os = open_artifact(ctx, "counterexample.csv");
        qsafe::write_trace_csv(*res.trace, os);
      }
      {
        std::ofstream os = open_artifact(ctx, "counterexample.json");
        qsafe::write_trace_json(*res.trace, os);
      }
      {
        std::ofstream os = open_artifact(ctx, "counterexample.svg");
        qsafe::write_trace_svg(*res.trace, os);
      }
    }

    if (out) {
      switch (res.status) {
        case qsafe::FalsifyStatus::Confirmed: out->result = QSAFE_FALSIFY_CONFIRMED; break;
        case qsafe::FalsifyStatus::QuantizedSafe: out->result = QSAFE_FALSIFY_QUANTIZED_SAFE; break;
        case qsafe::FalsifyStatus::FloorReached: out->result = QSAFE_FALSIFY_FLOOR_REACHED; break;
        case qsafe::FalsifyStatus::Cancelled: out->result = QSAFE_FALSIFY_CANCELLED; break;
      }
      out->rounds = res.rounds;
      out->partitions_checked = res.partitions_checked;
      out->unsafe_found = res.unsafe_found;
      out->replays = res.replays;
      out->trace_steps = res.trace ? static_cast<int>(res.trace->rows.size()) : 0;
      out->final_rho_ft = res.trace && !res.trace->rows.empty()
                              ? res.trace->rows.back().rho_ft
                              : -1.0;
      out->wall_seconds = wall;
    }
    return QSAFE_OK;
  });
}

qsafe_status qsafe_simulate(qsafe_ctx* ctx, double rho_ft, double theta_rad,
                            double psi_rad, double v_own, double v_int,
                            double tau0, int tau_dot, int quantized,
                            qsafe_sim_summary* out, char** csv_text) {
  return guarded(ctx, [&] {
    const qsafe::NetworkSet& nets = need_nets(ctx);
    const qsafe::RunConfig& cfg = ctx->cfg;
    check_tau_dot(tau_dot);

    qsafe::EncounterSpec e;
    e.rho = rho_ft;
    e.theta = theta_rad;
    e.psi = psi_rad;
    e.v_own = v_own;
    e.v_int = v_int;
    e.tau0 = tau0;
    e.tau_dot = tau_dot;
    e.max_steps = cfg.max_steps;

    qsafe::QuantParams qp;
    const qsafe::QuantParams* qpp = nullptr;
    if (quantized) {
      qp = cfg.quant_params();
      qp.validate();
      qpp = &qp;
    }
    qsafe::CounterexampleTrace t =
        qsafe::simulate(e, nets,
                        quantized ? qsafe::SimMode::Quantized : qsafe::SimMode::Exact,
                        qpp, cfg.argmax_scores);

    std::ostringstream csv;
    qsafe::write_trace_csv(t, csv);
    {
      std::ofstream os = open_artifact(ctx, "trace.csv");
      os << csv.str();
    }
    {
      std::ofstream os = open_artifact(ctx, "trace.json");
      qsafe::write_trace_json(t, os);
    }
    {
      std::ofstream os = open_artifact(ctx, "trace.svg");
      qsafe::write_trace_svg(t, os);
    }
    if (csv_text) {
      std::string body = csv.str();
      char* copy = static_cast<char*>(std::malloc(body.size() + 1));
      if (!copy) qsafe::fail(qsafe::ErrorCode::IoError, "out of memory");
      std::memcpy(copy, body.c_str(), body.size() + 1);
      *csv_text = copy;
    }

    if (out) {
      out->stop = static_cast<int>(t.stop);
      out->steps = static_cast<int>(t.rows.size());
      out->network_evals = t.network_evals;
      out->final_rho_ft =
          t.rows.empty() ? qsafe::separation(t.initial) : t.rows.back().rho_ft;
      out->final_tau = t.rows.empty() ? t.tau0 : t.rows.back().tau;
    }
    return QSAFE_OK;
  });
}

qsafe_status qsafe_montecarlo(qsafe_ctx* ctx, int tau_dot, qsafe_mc_summary* out) {
  return guarded(ctx, [&] {
    const qsafe::NetworkSet& nets = need_nets(ctx);
    const qsafe::RunConfig& cfg = ctx->cfg;
    check_tau_dot(tau_dot);

    auto t0 = std::chrono::steady_clock::now();
    qsafe::McStats stats =
        qsafe::monte_carlo(cfg.mc_batch, tau_dot, cfg.seed, nets,
                           cfg.effective_jobs(), cfg.max_steps,
                           qsafe::SimMode::Exact, nullptr, cfg.argmax_scores);
    double wall = elapsed_since(t0);

    {
      ordered_json j;
      j["samples"] = stats.samples;
      j["tau_dot"] = tau_dot;
      j["seed"] = cfg.seed;
      j["max_steps"] = cfg.max_steps;
      j["collisions"] = stats.unsafe_count;
      ordered_json cases = ordered_json::array();
      for (const qsafe::McCase& c : stats.cases) {
        ordered_json cj;
        cj["sample"] = c.sample_index;
        cj["v_own"] = c.v_own;
        cj["v_int"] = c.v_int;
        cj["tau0"] = c.tau0;
        cases.push_back(std::move(cj));
      }
      j["cases"] = std::move(cases);
      std::ofstream os = open_artifact(ctx, "montecarlo.json");
      os << j.dump(2) << "\n";
    }

    if (out) {
      out->samples = stats.samples;
      out->collisions = stats.unsafe_count;
      out->wall_seconds = wall;
    }
    return QSAFE_OK;
  });
}

void qsafe_free(char* p) { std::free(p); }

}  // extern "C"
