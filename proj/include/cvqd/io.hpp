#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cvqd/trainer.hpp"
#include "cvqd/types.hpp"

namespace cvqd::io {

// %.17g rendering used by every numeric file we emit.
std::string format_g17(double v);

// Write-temp-then-rename; throws IoError on any filesystem failure.
void atomic_write_file(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

// State files: {"version":1,"modes":m,"cutoff":c,"data":[[re,im],...]} with
// data row-major over the full matrix.
void save_state(const std::string& path, const DensityMatrix& rho);
DensityMatrix load_state(const std::string& path);

// Flat key = value config text (TOML-compatible grammar: comments with #,
// quoted or bare scalar values, no sections).
class ConfigMap {
 public:
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_text(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& def) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Profile defaults; config keys override them field by field.
trainer::TrainConfig desk_gen_profile();
trainer::TrainConfig paper_gen_profile();
trainer::TrainConfig desk_restore_profile();
trainer::TrainConfig paper_restore_profile();

// Recognized keys: cutoff, layers, total_timesteps, nbar, eta_0, eta_T,
// beta_start, beta_end, batch_size, max_iters, learning_rate, decay_steps,
// decay_rate, lambda, gamma, grad_mode, fd_step, seed, alpha_embed, s_max,
// init_scale, spsa_avg. Explicit eta endpoints win; beta endpoints are used
// only when no eta endpoint is given.
trainer::TrainConfig apply_config(const ConfigMap& cfg, trainer::TrainConfig base);

struct TargetDescriptor {
  std::string kind;  // coherent | fock | cat | squeezed; empty for restoration
  double alpha_re = 0, alpha_im = 0;
  int fock_n = 0;
  std::string parity = "even";
  double squeeze_r = 0;
};

// Requires the target key plus its kind-specific parameters.
TargetDescriptor target_from_config(const ConfigMap& cfg);
DensityMatrix build_target(const TargetDescriptor& td, int cutoff);

struct TrainingSummary {
  double final_loss = 0, best_loss = 0;
  int iterations = 0;
  bool converged = false;
};

struct Checkpoint {
  std::string format_version = "cvqd-ckpt-1";
  std::string layout = "cvqnn-16p-v1";
  std::string role;  // generative | restoration
  trainer::TrainConfig cfg;
  Eigen::VectorXd theta;
  TargetDescriptor target;  // kind empty for restoration checkpoints
  TrainingSummary summary;
};

// Round trips are bit-exact; any other format_version or layout is refused.
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

// CSV emission, LF line endings, header row first, %.17g floats.
std::string metrics_csv(const std::vector<trainer::MetricsRow>& rows);
std::string curve_csv(const std::vector<std::pair<int, double>>& rows,
                      const std::string& value_column);
std::string schedule_csv(const diffusion::NoiseSchedule& sched);

struct SweepRow {
  double param = 0;
  double nbar = 0;
  double fidelity = 0;
  int iters = 0;
};
std::string sweep_csv(const std::vector<SweepRow>& rows);

// One manifest per command run, listing every file the run produced.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string started_at;   // ISO 8601 UTC
  std::string finished_at;
  std::vector<std::string> outputs;
};
std::string utc_timestamp();
void save_manifest(const std::string& path, const RunManifest& mf);

}  // namespace cvqd::io
