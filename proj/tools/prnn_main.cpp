// Copyright 2026 The prnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// prnn: command-line driver for pruning experiments.
//
//   prnn calibrate  --config exp.toml
//   prnn train      --config exp.toml [--compare]
//   prnn hard-prune --config exp.toml --set prune.hard_prune_epoch=5
//   prnn bench      --config bench.toml
//   prnn compress   runs/x/model.sprn
//   prnn curves     runs/a/metrics.csv runs/b/metrics.csv --out plots
//
// Exit codes: 0 success, 2 config error, 3 divergence, 4 IO/format error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prnn/csv.hpp"
#include "prnn/errors.hpp"
#include "prnn/experiments.hpp"

namespace {

using namespace prnn;
using namespace prnn::harness;

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "Experiment config file (TOML)");
    app->add_option("--seed", seed, "Override the seed");
    app->add_option("--out", out, "Override the output directory");
    app->add_option("--set", overrides, "Override a config key, key=value")
        ->take_all();
  }

  ExperimentConfig load() const {
    Table table;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw IoError("cannot open config " + config);
      std::stringstream ss;
      ss << in.rdbuf();
      table = parse_toml(ss.str());
    }
    for (const auto& o : overrides) apply_override(table, o);
    ExperimentConfig c = config_from_table(table);
    if (seed) c.seed = *seed;
    if (out) c.out_dir = *out;
    c.validate();
    return c;
  }
};

void print_summary(const char* name, const TrainResult& r) {
  std::printf("%s: final val loss %.6g, overall sparsity %.4f, "
              "params remaining %zu of %zu\n",
              name, r.final_val_loss, r.report.overall, r.report.remaining(),
              r.report.total);
}

int run(int argc, char** argv) {
  CLI::App app{"Gradual magnitude pruning for recurrent networks"};
  app.require_subcommand(1);

  CommonFlags calibrate_flags, train_flags, hard_flags, bench_flags;
  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "Measure q and derive schedule slopes");
  calibrate_flags.attach(calibrate_cmd);

  auto* train_cmd = app.add_subcommand("train", "Train one model");
  train_flags.attach(train_cmd);
  bool compare = false;
  train_cmd->add_flag("--compare", compare,
                      "Run dense, gradual and hard-pruned models side by side");

  auto* hard_cmd =
      app.add_subcommand("hard-prune", "Train dense, prune once, fine-tune");
  hard_flags.attach(hard_cmd);

  auto* bench_cmd =
      app.add_subcommand("bench", "Time dense vs sparse matrix-vector products");
  bench_flags.attach(bench_cmd);

  auto* compress_cmd =
      app.add_subcommand("compress", "Report the size of a model file");
  std::string model_file;
  compress_cmd->add_option("model", model_file, "Model file")->required();

  auto* curves_cmd =
      app.add_subcommand("curves", "Render SVG charts from metrics files");
  std::vector<std::string> metrics_files;
  std::string curves_out = ".";
  curves_cmd->add_option("metrics", metrics_files, "metrics.csv files")
      ->required();
  curves_cmd->add_option("--out", curves_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (*calibrate_cmd) {
    const ExperimentConfig c = calibrate_flags.load();
    const CalibrationFile cal = run_calibrate(c);
    std::cout << to_toml(cal);
  } else if (*train_cmd && compare) {
    const ExperimentConfig c = train_flags.load();
    const ComparisonResult r = run_comparison(c);
    std::cout << comparison_csv(r);
    std::printf("hard pruned after %ld iterations; gradual vs hard gap %.2f%%\n",
                r.hard_prune_itr, r.gap_percent());
  } else if (*train_cmd) {
    const ExperimentConfig c = train_flags.load();
    print_summary("train", run_train(c));
  } else if (*hard_cmd) {
    const ExperimentConfig c = hard_flags.load();
    print_summary("hard-prune", run_hard_prune(c));
  } else if (*bench_cmd) {
    const ExperimentConfig c = bench_flags.load();
    std::ostringstream o;
    write_bench_csv(o, run_bench(c));
    std::cout << o.str();
  } else if (*compress_cmd) {
    std::cout << format_report(run_compress(model_file));
  } else if (*curves_cmd) {
    std::vector<std::filesystem::path> paths(metrics_files.begin(),
                                             metrics_files.end());
    for (const auto& p : emit_curves(paths, curves_out)) {
      std::cout << p.string() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const prnn::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const prnn::DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kExitDivergence;
  } catch (const prnn::FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kExitIo;
  } catch (const prnn::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const prnn::ParameterError& e) {
    std::fprintf(stderr, "invalid parameter: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
