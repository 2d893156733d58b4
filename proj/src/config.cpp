#include "esadrnn/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "esadrnn/errors.hpp"

namespace esadrnn {

namespace {

template <typename T>
T schedule_value(const std::vector<std::pair<int, T>>& entries, int epoch) {
  T value = entries.front().second;
  for (const auto& [from, v] : entries) {
    if (epoch >= from) value = v;
  }
  return value;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    int64_t v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' needs an integer, got '" +
                      value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' needs a number, got '" +
                      value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: key '" + key + "' needs true/false, got '" +
                    value + "'");
}

// "1:3e-3,5:1e-3" -> {{1,3e-3},{5,1e-3}}
template <typename T, typename Parse>
std::vector<std::pair<int, T>> parse_schedule(const std::string& key,
                                              const std::string& value,
                                              Parse parse_one) {
  std::vector<std::pair<int, T>> entries;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("config: key '" + key +
                        "' needs epoch:value pairs, got '" + value + "'");
    int epoch = static_cast<int>(parse_int(key, trim(item.substr(0, colon))));
    entries.emplace_back(epoch, parse_one(trim(item.substr(colon + 1))));
  }
  if (entries.empty())
    throw ConfigError("config: key '" + key + "' is empty");
  return entries;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

template <typename T>
std::string fmt_schedule(const std::vector<std::pair<int, T>>& entries) {
  std::string out;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(entries[i].first) + ':';
    if constexpr (std::is_same_v<T, double>)
      out += fmt_double(entries[i].second);
    else
      out += std::to_string(entries[i].second);
  }
  return out;
}

}  // namespace

int TrainConfig::batch_size_for_epoch(int epoch) const {
  return schedule_value(batch_schedule, epoch);
}

double TrainConfig::lr_for_epoch(int epoch) const {
  return schedule_value(lr_schedule, epoch);
}

void TrainConfig::validate() const {
  if (epochs < 1 || updates_per_epoch < 1 || steps_per_batch < 1)
    throw ConfigError("config: epochs, updates_per_epoch and steps_per_batch "
                      "must be positive");
  if (warmup_weeks_train < 1 || warmup_weeks_test < 1)
    throw ConfigError("config: warm-up lengths must be at least one week");
  if (!(0.0 < q_lower && q_lower < q_center && q_center < q_upper &&
        q_upper < 1.0))
    throw ConfigError("config: quantile orders must satisfy "
                      "0 < q_lower < q_center < q_upper < 1");
  if (gamma < 0.0) throw ConfigError("config: gamma must be nonnegative");
  if (grad_clip < 0.0) throw ConfigError("config: grad_clip must be >= 0");
  if (net.state_size < 1 || net.hidden_size < 1 ||
      net.block_output_size < 1 || net.embedding_size < 1)
    throw ConfigError("config: network sizes must be positive");
  if (net.block_output_size + net.hidden_size > net.state_size)
    throw ConfigError("config: block_output_size + hidden_size must fit in "
                      "state_size");
  if (ensemble_combine != "mean" && ensemble_combine != "median")
    throw ConfigError("config: ensemble_combine must be mean or median");
  if (ensemble_members < 1)
    throw ConfigError("config: ensemble_members must be positive");
  for (const auto* name : {"batch_schedule", "lr_schedule"}) {
    bool is_batch = std::string(name) == "batch_schedule";
    size_t n = is_batch ? batch_schedule.size() : lr_schedule.size();
    int prev = 0;
    for (size_t i = 0; i < n; ++i) {
      int from = is_batch ? batch_schedule[i].first : lr_schedule[i].first;
      if (i == 0 && from != 1)
        throw ConfigError(std::string("config: ") + name +
                          " must start at epoch 1");
      if (from <= prev && i > 0)
        throw ConfigError(std::string("config: ") + name +
                          " epochs must increase");
      prev = from;
    }
  }
  for (const auto& [e, b] : batch_schedule)
    if (b < 1) throw ConfigError("config: batch sizes must be positive");
  for (const auto& [e, lr] : lr_schedule)
    if (lr <= 0.0) throw ConfigError("config: learning rates must be positive");
}

void apply_config_entry(TrainConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "seed")
    cfg.seed = static_cast<uint64_t>(parse_int(key, value));
  else if (key == "epochs")
    cfg.epochs = static_cast<int>(parse_int(key, value));
  else if (key == "updates_per_epoch")
    cfg.updates_per_epoch = static_cast<int>(parse_int(key, value));
  else if (key == "steps_per_batch")
    cfg.steps_per_batch = static_cast<int>(parse_int(key, value));
  else if (key == "warmup_weeks_train")
    cfg.warmup_weeks_train = static_cast<int>(parse_int(key, value));
  else if (key == "warmup_weeks_test")
    cfg.warmup_weeks_test = static_cast<int>(parse_int(key, value));
  else if (key == "gamma")
    cfg.gamma = parse_double(key, value);
  else if (key == "q_center")
    cfg.q_center = parse_double(key, value);
  else if (key == "q_lower")
    cfg.q_lower = parse_double(key, value);
  else if (key == "q_upper")
    cfg.q_upper = parse_double(key, value);
  else if (key == "batch_schedule")
    cfg.batch_schedule = parse_schedule<int>(key, value, [&](const std::string& v) {
      return static_cast<int>(parse_int(key, v));
    });
  else if (key == "lr_schedule")
    cfg.lr_schedule = parse_schedule<double>(key, value, [&](const std::string& v) {
      return parse_double(key, v);
    });
  else if (key == "state_size")
    cfg.net.state_size = static_cast<int>(parse_int(key, value));
  else if (key == "hidden_size")
    cfg.net.hidden_size = static_cast<int>(parse_int(key, value));
  else if (key == "block_output_size")
    cfg.net.block_output_size = static_cast<int>(parse_int(key, value));
  else if (key == "embedding_size")
    cfg.net.embedding_size = static_cast<int>(parse_int(key, value));
  else if (key == "shortcuts")
    cfg.net.shortcuts = parse_bool(key, value);
  else if (key == "alpha_logit_init")
    cfg.alpha_logit_init = parse_double(key, value);
  else if (key == "beta_logit_init")
    cfg.beta_logit_init = parse_double(key, value);
  else if (key == "grad_clip")
    cfg.grad_clip = parse_double(key, value);
  else if (key == "ensemble_combine")
    cfg.ensemble_combine = value;
  else if (key == "ensemble_members")
    cfg.ensemble_members = static_cast<int>(parse_int(key, value));
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

TrainConfig parse_config_text(const std::string& text) {
  TrainConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + t + "'");
    apply_config_entry(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

TrainConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_text(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "seed=" << cfg.seed << '\n'
      << "epochs=" << cfg.epochs << '\n'
      << "updates_per_epoch=" << cfg.updates_per_epoch << '\n'
      << "steps_per_batch=" << cfg.steps_per_batch << '\n'
      << "warmup_weeks_train=" << cfg.warmup_weeks_train << '\n'
      << "warmup_weeks_test=" << cfg.warmup_weeks_test << '\n'
      << "gamma=" << fmt_double(cfg.gamma) << '\n'
      << "q_center=" << fmt_double(cfg.q_center) << '\n'
      << "q_lower=" << fmt_double(cfg.q_lower) << '\n'
      << "q_upper=" << fmt_double(cfg.q_upper) << '\n'
      << "batch_schedule=" << fmt_schedule(cfg.batch_schedule) << '\n'
      << "lr_schedule=" << fmt_schedule(cfg.lr_schedule) << '\n'
      << "state_size=" << cfg.net.state_size << '\n'
      << "hidden_size=" << cfg.net.hidden_size << '\n'
      << "block_output_size=" << cfg.net.block_output_size << '\n'
      << "embedding_size=" << cfg.net.embedding_size << '\n'
      << "shortcuts=" << (cfg.net.shortcuts ? "true" : "false") << '\n'
      << "alpha_logit_init=" << fmt_double(cfg.alpha_logit_init) << '\n'
      << "beta_logit_init=" << fmt_double(cfg.beta_logit_init) << '\n'
      << "grad_clip=" << fmt_double(cfg.grad_clip) << '\n'
      << "ensemble_combine=" << cfg.ensemble_combine << '\n'
      << "ensemble_members=" << cfg.ensemble_members << '\n';
  return out.str();
}

}  // namespace esadrnn
