// Command-line front end over the shared C API (qsafe.h). Exit codes:
//   verify     0 all safe, 1 unsafe found, 2 inconclusive or interrupted
//   falsify    0 counterexample confirmed, 1 quantized-safe, 2 floor/interrupted
//   simulate, montecarlo, partitions: 0 on success
//   any error: 3 with a diagnostic on stderr
#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qsafe.h"

namespace {

qsafe_ctx* g_ctx = nullptr;

void on_sigint(int) {
  if (g_ctx) qsafe_cancel(g_ctx);  // single atomic store, signal safe
}

// A flag that forwards verbatim to a config key when given on the command
// line, so flags override config-file values.
struct KeyFlag {
  CLI::Option* opt = nullptr;
  std::string key;
  std::string value;
};

struct SubOpts {
  std::string config_path;
  std::vector<std::unique_ptr<KeyFlag>> flags;

  void add(CLI::App* sub, const std::string& flag, const std::string& key,
           const std::string& desc) {
    auto kf = std::make_unique<KeyFlag>();
    kf->key = key;
    kf->opt = sub->add_option(flag, kf->value, desc);
    flags.push_back(std::move(kf));
  }

  // Config file first, then explicit flags on top.
  bool apply(qsafe_ctx* ctx) const {
    if (!config_path.empty() &&
        qsafe_load_config(ctx, config_path.c_str()) != QSAFE_OK)
      return false;
    for (const auto& kf : flags) {
      if (kf->opt->count() == 0) continue;
      if (qsafe_set_option(ctx, kf->key.c_str(), kf->value.c_str()) != QSAFE_OK)
        return false;
    }
    return true;
  }
};

int die(qsafe_ctx* ctx, const char* what) {
  std::fprintf(stderr, "qsafe: %s: %s\n", what, qsafe_last_error(ctx));
  return 3;
}

void add_common(CLI::App* sub, SubOpts& o, bool with_tau_mode) {
  sub->add_option("--config", o.config_path, "key=value settings file");
  o.add(sub, "--nnet-dir", "nnet_dir", "directory with the 45 .nnet files");
  o.add(sub, "--q-pos", "q_pos", "position quantum, ft");
  o.add(sub, "--q-vel", "q_vel", "speed quantum, ft/s");
  o.add(sub, "--q-theta-deg", "q_theta_deg", "heading quantum, deg");
  o.add(sub, "--vown-min", "vown_min", "ownship speed lower bound, ft/s");
  o.add(sub, "--vown-max", "vown_max", "ownship speed upper bound, ft/s");
  o.add(sub, "--vint-min", "vint_min", "intruder speed lower bound, ft/s");
  o.add(sub, "--vint-max", "vint_max", "intruder speed upper bound, ft/s");
  if (with_tau_mode)
    o.add(sub, "--tau-dot", "tau_dot", "tau rate: 0, -1 or both");
  o.add(sub, "--jobs", "jobs", "worker threads (0 = all cores)");
  o.add(sub, "--seed", "seed", "random seed");
  o.add(sub, "--out", "out", "output directory for result files");
  o.add(sub, "--resume", "resume", "safe-partition checkpoint file");
  o.add(sub, "--max-depth", "max_depth", "backward steps before inconclusive");
}

int load_networks(qsafe_ctx* ctx) {
  if (qsafe_load_networks(ctx, nullptr) != QSAFE_OK)
    return die(ctx, "loading networks");
  return 0;
}

int run_verify(qsafe_ctx* ctx) {
  if (int rc = load_networks(ctx)) return rc;
  qsafe_verify_summary s{};
  if (qsafe_verify(ctx, &s) != QSAFE_OK) return die(ctx, "verify");
  std::printf("checked %llu partitions in %.1fs: %llu safe (%llu resumed), "
              "%llu unsafe, %llu inconclusive\n",
              (unsigned long long)s.total, s.wall_seconds,
              (unsigned long long)s.safe, (unsigned long long)s.resumed,
              (unsigned long long)s.unsafe_count,
              (unsigned long long)s.inconclusive);
  if (qsafe_cancelled(ctx)) {
    std::fprintf(stderr, "qsafe: interrupted; progress checkpointed\n");
    return 2;
  }
  if (s.unsafe_count > 0) {
    std::printf("unsafe partitions listed in unsafe.jsonl\n");
    return 1;
  }
  return s.inconclusive > 0 ? 2 : 0;
}

int run_falsify(qsafe_ctx* ctx) {
  if (int rc = load_networks(ctx)) return rc;
  qsafe_falsify_summary s{};
  if (qsafe_falsify(ctx, &s) != QSAFE_OK) return die(ctx, "falsify");
  const char* name = s.result == QSAFE_FALSIFY_CONFIRMED      ? "confirmed"
                     : s.result == QSAFE_FALSIFY_QUANTIZED_SAFE ? "quantized-safe"
                     : s.result == QSAFE_FALSIFY_FLOOR_REACHED  ? "floor-reached"
                                                                : "cancelled";
  std::printf("%s after %d refinement rounds in %.1fs "
              "(%llu partitions checked, %llu unsafe, %llu replays)\n",
              name, s.rounds, s.wall_seconds,
              (unsigned long long)s.partitions_checked,
              (unsigned long long)s.unsafe_found,
              (unsigned long long)s.replays);
  if (s.result == QSAFE_FALSIFY_CONFIRMED) {
    std::printf("counterexample: %d steps to separation %.1f ft; "
                "wrote counterexample.csv/.json/.svg\n",
                s.trace_steps, s.final_rho_ft);
    return 0;
  }
  return s.result == QSAFE_FALSIFY_QUANTIZED_SAFE ? 1 : 2;
}

struct SimArgs {
  double rho = 0, theta_deg = 0, psi_deg = 0, v_own = 0, v_int = 0, tau0 = 0;
  int tau_dot = 0;
  bool quantized = false;
};

int run_simulate(qsafe_ctx* ctx, const SimArgs& a) {
  if (int rc = load_networks(ctx)) return rc;
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  qsafe_sim_summary s{};
  char* csv = nullptr;
  if (qsafe_simulate(ctx, a.rho, a.theta_deg * kDegToRad, a.psi_deg * kDegToRad,
                     a.v_own, a.v_int, a.tau0, a.tau_dot,
                     a.quantized ? 1 : 0, &s, &csv) != QSAFE_OK)
    return die(ctx, "simulate");
  std::fputs(csv, stdout);
  qsafe_free(csv);
  const char* stop = s.stop == 0 ? "collision" : s.stop == 1 ? "max-steps" : "diverged";
  std::fprintf(stderr,
               "qsafe: %s after %d steps (%d network evals), "
               "final separation %.1f ft; wrote trace.csv/.json/.svg\n",
               stop, s.steps, s.network_evals, s.final_rho_ft);
  return 0;
}

int run_montecarlo(qsafe_ctx* ctx, int tau_dot) {
  if (int rc = load_networks(ctx)) return rc;
  qsafe_mc_summary s{};
  if (qsafe_montecarlo(ctx, tau_dot, &s) != QSAFE_OK) return die(ctx, "montecarlo");
  std::printf("%llu samples, %llu collisions in %.1fs; wrote montecarlo.json\n",
              (unsigned long long)s.samples, (unsigned long long)s.collisions,
              s.wall_seconds);
  return 0;
}

int run_partitions(qsafe_ctx* ctx, bool descriptors) {
  std::uint64_t n = 0;
  if (qsafe_partition_count(ctx, &n) != QSAFE_OK)
    return die(ctx, "counting partitions");
  std::printf("%llu\n", (unsigned long long)n);
  if (descriptors) {
    char buf[256];
    for (std::uint64_t i = 0; i < n; ++i) {
      if (qsafe_partition_descriptor(ctx, i, buf, sizeof buf) != QSAFE_OK)
        return die(ctx, "partition descriptor");
      std::fputs(buf, stdout);
      std::fputc('\n', stdout);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized closed-loop safety checker for neural "
               "collision-avoidance advisories"};
  app.require_subcommand(1);

  SubOpts vo, fo, so, mo, po;
  SimArgs sim;
  int mc_tau_dot = 0;
  bool descriptors = false;

  CLI::App* verify = app.add_subcommand(
      "verify", "prove every unsafe partition unreachable, or list the holes");
  add_common(verify, vo, true);

  CLI::App* falsify = app.add_subcommand(
      "falsify", "hunt for a confirmed collision trace, refining quanta as needed");
  add_common(falsify, fo, true);
  fo.add(falsify, "--pos-floor", "pos_floor", "smallest position quantum, ft");
  fo.add(falsify, "--vel-floor", "vel_floor", "smallest speed quantum, ft/s");
  fo.add(falsify, "--theta-floor-deg", "theta_floor_deg", "smallest heading quantum, deg");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "one closed-loop rollout; CSV trace on stdout");
  add_common(simulate, so, false);
  so.add(simulate, "--max-steps", "max_steps", "rollout step budget");
  simulate->add_option("--rho", sim.rho, "initial separation, ft")->required();
  simulate->add_option("--theta-deg", sim.theta_deg, "intruder bearing, deg");
  simulate->add_option("--psi-deg", sim.psi_deg, "intruder relative heading, deg");
  simulate->add_option("--v-own", sim.v_own, "ownship speed, ft/s")->required();
  simulate->add_option("--v-int", sim.v_int, "intruder speed, ft/s")->required();
  simulate->add_option("--tau0", sim.tau0, "initial vertical-separation clock, s");
  simulate->add_option("--tau-dot", sim.tau_dot, "tau rate: 0 or -1")
      ->check(CLI::IsMember({0, -1}));
  simulate->add_flag("--quantized", sim.quantized,
                     "feed the networks cell-center features");

  CLI::App* montecarlo = app.add_subcommand(
      "montecarlo", "random encounter batch on the exact closed loop");
  add_common(montecarlo, mo, false);
  mo.add(montecarlo, "--batch", "mc_batch", "number of encounters");
  mo.add(montecarlo, "--max-steps", "max_steps", "rollout step budget");
  montecarlo->add_option("--tau-dot", mc_tau_dot, "tau rate: 0 or -1")
      ->check(CLI::IsMember({0, -1}));

  CLI::App* partitions = app.add_subcommand(
      "partitions", "print the unsafe-partition count for the current settings");
  add_common(partitions, po, true);
  partitions->add_flag("--descriptors", descriptors,
                       "also stream every partition descriptor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);       // prints the message or the help text
    return code == 0 ? 0 : 3;     // usage problems share the error exit code
  }

  qsafe_ctx* ctx = qsafe_ctx_new();
  if (!ctx) {
    std::fprintf(stderr, "qsafe: out of memory\n");
    return 3;
  }
  g_ctx = ctx;
  std::signal(SIGINT, on_sigint);

  int rc = 3;
  if (*verify) {
    rc = vo.apply(ctx) ? run_verify(ctx) : die(ctx, "options");
  } else if (*falsify) {
    rc = fo.apply(ctx) ? run_falsify(ctx) : die(ctx, "options");
  } else if (*simulate) {
    rc = so.apply(ctx) ? run_simulate(ctx, sim) : die(ctx, "options");
  } else if (*montecarlo) {
    rc = mo.apply(ctx) ? run_montecarlo(ctx, mc_tau_dot) : die(ctx, "options");
  } else if (*partitions) {
    rc = po.apply(ctx) ? run_partitions(ctx, descriptors) : die(ctx, "options");
  }

  g_ctx = nullptr;
  qsafe_ctx_free(ctx);
  return rc;
}
