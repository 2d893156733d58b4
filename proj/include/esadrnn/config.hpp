#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace esadrnn {

struct NetSizes {
  int state_size = 100;       // gate and c-state width of the plain cells
  int hidden_size = 40;       // controlling state width, shared by all cells
  int block_output_size = 40; // width each block emits
  int embedding_size = 10;    // calendar embedding width
  bool shortcuts = true;      // block-to-block and block-to-head additions
};

// Everything that shapes a training run. A flat key=value file maps
// one key per field; command-line flags override file values, which
// override these defaults.
struct TrainConfig {
  uint64_t seed = 1;
  int epochs = 9;
  int updates_per_epoch = 2500;
  int steps_per_batch = 50;    // daily steps that contribute loss, per walk
  int warmup_weeks_train = 3;
  int warmup_weeks_test = 5;

  double gamma = 0.3;          // weight of the two interval penalties
  double q_center = 0.485;
  double q_lower = 0.035;
  double q_upper = 0.96;

  // Piecewise-constant by epoch: each entry is "from this epoch on".
  std::vector<std::pair<int, int>> batch_schedule{{1, 2}, {4, 5}};
  std::vector<std::pair<int, double>> lr_schedule{
      {1, 3e-3}, {5, 1e-3}, {6, 3e-4}, {7, 1e-4}};

  NetSizes net;
  double alpha_logit_init = -3.5;
  double beta_logit_init = -3.5;
  double grad_clip = 0.0;      // L2 norm ceiling per update; 0 disables
  std::string ensemble_combine = "mean";  // or "median"
  int ensemble_members = 5;

  int batch_size_for_epoch(int epoch) const;
  double lr_for_epoch(int epoch) const;
  void validate() const;
};

// One key per line, '#' comments, blank lines ignored. Unknown keys and
// unparseable values throw ConfigError naming the offender.
TrainConfig parse_config_text(const std::string& text);
TrainConfig load_config_file(const std::string& path);
void apply_config_entry(TrainConfig& cfg, const std::string& key,
                        const std::string& value);
std::string config_to_text(const TrainConfig& cfg);

}  // namespace esadrnn
