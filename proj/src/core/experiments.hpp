#pragma once
// Experiment runner: preset catalogue, config interpretation, and the kind
// dispatcher behind the CLI. Every run writes a manifest that can be fed back
// as a config to reproduce it.
#include <string>
#include <vector>

#include "core/activation.hpp"
#include "core/config.hpp"
#include "core/dynamics.hpp"
#include "core/fourier.hpp"

namespace msplab {

inline constexpr const char* kVersion = "0.1.0";

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 invalid config, 3 divergence, 4 verification failure
  std::string report;
  std::vector<std::string> files;
};

std::vector<std::string> preset_names();
Config preset_config(const std::string& name);  // ConfigError if unknown

// [target]: inline P/S lines, or preset = <name> pointing at a preset's target
FourierFunction target_from_config(const Config& c);
// [activation]: kind = shifted-sigmoid | truncated-power | polynomial | tanh | perturbed
Activation activation_from_config(const Config& c);
// [dynamics] interpretation shared by the runners
Schedules schedules_from_config(const Config& c);
EffectiveEnsemble ensemble_from_config(const Config& c, const FourierFunction& h);
DfpdeOptions dfpde_options_from_config(const Config& c);
BsgdParams bsgd_params_from_config(const Config& c, std::uint64_t seed);

RunResult run_experiment(const Config& c, const std::string& outdir);

// integrate in record_dt chunks so blocked coordinates and symmetry gaps can
// be monitored at every record, not just at the end; when the start state lies
// exactly on a detected symmetry manifold it is re-projected there after each
// chunk (gaps are always measured first)
struct ChunkedRun {
  TrainingTrace trace;
  EffectiveEnsemble final;
  bool diverged = false;
  double max_blocked = 0.0;
  std::vector<double> max_sym_gap;
  double min_risk_margin = 0.0;  // min over records of risk - stuck bound
  std::vector<EffectiveEnsemble> snapshots;  // one per record when requested
};

ChunkedRun dfpde_chunked(const FourierFunction& h, EffectiveEnsemble e, const Schedules& sch,
                         const Activation& act, const DfpdeOptions& opt,
                         std::uint32_t blocked_mask,
                         const std::vector<std::vector<int>>& perms, double stuck_bound,
                         bool keep_snapshots = false);

// blocked-coordinate and symmetry diagnostics on an evolved ensemble
double max_abs_blocked(const EffectiveEnsemble& e, std::uint32_t blocked_mask);
double symmetry_gap(const EffectiveEnsemble& e, const std::vector<int>& perm);

// orbit-average each particle's u over perms + identity; the exact flow keeps
// a symmetric state on the fixed manifold, so this only removes roundoff drift
// (which the saddle otherwise amplifies exponentially)
void symmetrize(EffectiveEnsemble& e, const std::vector<std::vector<int>>& perms);

// sup over shared records/columns of |coefficient difference| when the
// hypercube-valued predictions are re-evaluated under the SGD run's own finite
// test measure (predictions[r][z_mask], one row per record)
double shared_measure_gap(const std::vector<std::vector<double>>& predictions,
                          const BsgdResult& sgd);

}  // namespace msplab
