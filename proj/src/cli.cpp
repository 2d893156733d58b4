#include "esadrnn/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "esadrnn/calendar.hpp"
#include "esadrnn/data.hpp"
#include "esadrnn/errors.hpp"
#include "esadrnn/evaluation.hpp"
#include "esadrnn/forecast.hpp"
#include "esadrnn/training.hpp"

namespace esadrnn {

namespace {

TrainConfig make_config(const std::string& config_path) {
  if (config_path.empty()) return TrainConfig{};
  return load_config_file(config_path);
}

TrainHooks progress_hooks() {
  TrainHooks hooks;
  hooks.on_update = [](int epoch, int update, double loss, double lr) {
    if (update % 100 == 0 || update == 1)
      std::printf("epoch %d update %d loss %.6f lr %g\n", epoch, update, loss,
                  lr);
  };
  hooks.on_log = [](const std::string& msg) {
    std::fprintf(stderr, "%s\n", msg.c_str());
  };
  return hooks;
}

const LoadSeries& find_series(const std::vector<LoadSeries>& data,
                              const std::string& id) {
  for (const LoadSeries& s : data)
    if (s.id == id) return s;
  std::string known;
  for (const LoadSeries& s : data)
    known += (known.empty() ? "" : ", ") + s.id;
  throw DataError("series " + id + " not in the load file (have: " + known +
                  ")");
}

void report_ingest(const IngestReport& report) {
  for (const std::string& note : report.notes)
    std::fprintf(stderr, "%s\n", note.c_str());
}

int cmd_train(const std::string& data_path, const std::string& config_path,
              const std::string& out_path, const CLI::App* cmd) {
  TrainConfig cfg = make_config(config_path);
  if (cmd->count("--seed"))
    apply_config_entry(cfg, "seed", cmd->get_option("--seed")->as<std::string>());
  if (cmd->count("--epochs"))
    apply_config_entry(cfg, "epochs",
                       cmd->get_option("--epochs")->as<std::string>());
  if (cmd->count("--updates-per-epoch"))
    apply_config_entry(
        cfg, "updates_per_epoch",
        cmd->get_option("--updates-per-epoch")->as<std::string>());
  cfg.validate();

  IngestReport ingest;
  std::vector<LoadSeries> data = load_csv(data_path, &ingest);
  report_ingest(ingest);

  ParamStore store;
  ModelParams params = create_model_params(store, cfg);
  TrainResult result = train(store, params, data, cfg, progress_hooks());

  CheckpointMeta meta;
  meta.config_text = config_to_text(cfg);
  meta.seed = cfg.seed;
  meta.loss_trace = result.loss_trace;
  save_checkpoint(out_path, store, meta);
  std::printf("saved %s after %zu updates, final loss %.6f\n",
              out_path.c_str(), result.loss_trace.size(),
              result.loss_trace.back());
  return 0;
}

int cmd_ensemble(const std::string& data_path, const std::string& config_path,
                 const std::string& out_dir, int members,
                 const CLI::App* cmd) {
  TrainConfig cfg = make_config(config_path);
  if (cmd->count("--seed"))
    apply_config_entry(cfg, "seed", cmd->get_option("--seed")->as<std::string>());
  if (cmd->count("--epochs"))
    apply_config_entry(cfg, "epochs",
                       cmd->get_option("--epochs")->as<std::string>());
  if (cmd->count("--updates-per-epoch"))
    apply_config_entry(
        cfg, "updates_per_epoch",
        cmd->get_option("--updates-per-epoch")->as<std::string>());
  if (members <= 0) members = cfg.ensemble_members;
  cfg.validate();

  IngestReport ingest;
  std::vector<LoadSeries> data = load_csv(data_path, &ingest);
  report_ingest(ingest);

  std::filesystem::create_directories(out_dir);
  auto trained = ensemble_train(data, cfg, members, progress_hooks());
  for (size_t i = 0; i < trained.size(); ++i) {
    CheckpointMeta meta;
    meta.config_text = config_to_text(trained[i]->cfg);
    meta.seed = trained[i]->cfg.seed;
    meta.loss_trace = trained[i]->result.loss_trace;
    std::string path =
        (std::filesystem::path(out_dir) / ("member_" + std::to_string(i) +
                                           ".ckpt"))
            .string();
    save_checkpoint(path, trained[i]->store, meta);
    std::printf("saved %s, final loss %.6f\n", path.c_str(),
                meta.loss_trace.back());
  }
  return 0;
}

int cmd_forecast(const std::vector<std::string>& ckpts,
                 const std::string& data_path, const std::string& series_id,
                 const std::string& from_text, int days,
                 const std::string& out_path) {
  IngestReport ingest;
  std::vector<LoadSeries> data = load_csv(data_path, &ingest);
  report_ingest(ingest);
  const LoadSeries& s = find_series(data, series_id);
  int64_t from_hour = parse_date_or_timestamp(from_text);

  std::vector<ForecastResult> member_results;
  std::string combine_rule = "mean";
  for (const std::string& path : ckpts) {
    ParamStore store;
    CheckpointMeta meta = load_checkpoint(path, store);
    TrainConfig cfg = parse_config_text(meta.config_text);
    combine_rule = cfg.ensemble_combine;
    ModelParams params = bind_model_params(store, cfg);
    member_results.push_back(forecast_series(params, s, from_hour, days, cfg));
  }
  ForecastResult final_result =
      member_results.size() == 1
          ? member_results.front()
          : combine_forecasts(member_results, combine_rule);
  write_forecast_csv(out_path, final_result);
  std::printf("wrote %zu day(s) for %s to %s\n", final_result.days.size(),
              series_id.c_str(), out_path.c_str());
  return 0;
}

void print_metrics_table(std::ostream& out, const std::string& label,
                         const PointMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-8s MAPE %7.3f  MdAPE %7.3f  IqrAPE %7.3f  RMSE %10.3f  "
                "MPE %8.3f  StdPE %7.3f\n",
                label.c_str(), m.mape, m.mdape, m.iqrape, m.rmse, m.mpe,
                m.stdpe);
  out << buf;
}

int cmd_evaluate(const std::string& forecast_path,
                 const std::string& data_path, const std::string& out_path) {
  ForecastResult f = read_forecast_csv(forecast_path);
  IngestReport ingest;
  std::vector<LoadSeries> data = load_csv(data_path, &ingest);
  report_ingest(ingest);
  const LoadSeries& s = find_series(data, f.series_id);

  EvalReport report = evaluate_forecast(f, s);
  int64_t from_hour = f.days.front().start_hour;
  int days = static_cast<int>(f.days.size());

  std::ostringstream table;
  table << "series " << s.id << ", " << days << " day(s) from "
        << format_timestamp(from_hour) << "\n";
  print_metrics_table(table, "model", report.point);
  bool have_naive = from_hour - s.start_hour >= kWeekHours &&
                    from_hour + days * 24 - s.start_hour <= s.hours();
  if (have_naive) {
    std::vector<double> naive = naive_forecast(s, from_hour, days);
    std::vector<double> actual =
        actual_slice(s, from_hour, static_cast<int64_t>(days) * 24);
    print_metrics_table(table, "naive", point_metrics(actual, naive));
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "interval coverage %.3f%% (below %.3f%%, above %.3f%%)\n",
                report.coverage.inside, report.coverage.below,
                report.coverage.above);
  table << buf;

  std::cout << table.str();
  if (!out_path.empty()) {
    std::ofstream human(out_path);
    if (!human) throw DataError("cannot write " + out_path);
    human << table.str();
    std::string machine_path = out_path + ".csv";
    std::ofstream machine(machine_path);
    if (!machine) throw DataError("cannot write " + machine_path);
    machine << "metric,value\n";
    auto row = [&machine](const char* name, double value) {
      char line[64];
      std::snprintf(line, sizeof(line), "%s,%.17g\n", name, value);
      machine << line;
    };
    row("mape", report.point.mape);
    row("mdape", report.point.mdape);
    row("iqrape", report.point.iqrape);
    row("rmse", report.point.rmse);
    row("mpe", report.point.mpe);
    row("stdpe", report.point.stdpe);
    row("coverage", report.coverage.inside);
    row("below", report.coverage.below);
    row("above", report.coverage.above);
    machine << "hours," << report.point.hours << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Load forecasting with smoothing-coupled recurrent networks"};
  app.require_subcommand(1);

  std::string data_path, config_path, out_path, out_dir;
  std::string series_id, from_text, forecast_path;
  std::vector<std::string> ckpts;
  int days = 1;
  int members = 0;

  CLI::App* train_cmd = app.add_subcommand("train", "Train one model");
  train_cmd->add_option("--data", data_path, "Hourly load CSV")->required();
  train_cmd->add_option("--config", config_path, "key=value config file");
  train_cmd->add_option("--out", out_path, "Checkpoint to write")->required();
  train_cmd->add_option("--seed", "Override the seed");
  train_cmd->add_option("--epochs", "Override the epoch count");
  train_cmd->add_option("--updates-per-epoch", "Override updates per epoch");

  CLI::App* ens_cmd =
      app.add_subcommand("ensemble", "Train several reseeded models");
  ens_cmd->add_option("--data", data_path, "Hourly load CSV")->required();
  ens_cmd->add_option("--config", config_path, "key=value config file");
  ens_cmd->add_option("--out-dir", out_dir, "Directory for member checkpoints")
      ->required();
  ens_cmd->add_option("--members", members, "Member count (default from config)");
  ens_cmd->add_option("--seed", "Override the seed");
  ens_cmd->add_option("--epochs", "Override the epoch count");
  ens_cmd->add_option("--updates-per-epoch", "Override updates per epoch");

  CLI::App* fc_cmd = app.add_subcommand("forecast", "Forecast days ahead");
  fc_cmd->add_option("--ckpt", ckpts, "Checkpoint(s); several form an ensemble")
      ->required();
  fc_cmd->add_option("--data", data_path, "Hourly load CSV")->required();
  fc_cmd->add_option("--series", series_id, "Series id")->required();
  fc_cmd->add_option("--from", from_text, "First forecast day (date or timestamp)")
      ->required();
  fc_cmd->add_option("--days", days, "Days to forecast")
      ->check(CLI::PositiveNumber);
  fc_cmd->add_option("--out", out_path, "Forecast CSV to write")->required();

  CLI::App* ev_cmd =
      app.add_subcommand("evaluate", "Score a forecast against actuals");
  ev_cmd->add_option("--forecast", forecast_path, "Forecast CSV")->required();
  ev_cmd->add_option("--data", data_path, "Hourly load CSV")->required();
  ev_cmd->add_option("--out", out_path,
                     "Report file; a machine-readable .csv sibling is added");

  try {
    app.parse(argc, argv);
    if (train_cmd->parsed())
      return cmd_train(data_path, config_path, out_path, train_cmd);
    if (ens_cmd->parsed())
      return cmd_ensemble(data_path, config_path, out_dir, members, ens_cmd);
    if (fc_cmd->parsed())
      return cmd_forecast(ckpts, data_path, series_id, from_text, days,
                          out_path);
    if (ev_cmd->parsed())
      return cmd_evaluate(forecast_path, data_path, out_path);
    return 1;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace esadrnn
