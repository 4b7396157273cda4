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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "prnn/config.hpp"
#include "prnn/csv.hpp"
#include "prnn/errors.hpp"
#include "prnn/experiments.hpp"
#include "prnn/serialize.hpp"
#include "prnn/sparse_model.hpp"
#include "prnn/svg.hpp"
#include "prnn/trainer.hpp"
#include "support/xml_check.hpp"

namespace prnn::harness {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("prnn_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A run that finishes in well under a second.
ExperimentConfig small_config(std::uint64_t seed = 3) {
  ExperimentConfig c;
  c.seed = seed;
  c.out_dir.clear();
  c.epochs = 6;
  c.iters_per_epoch = 50;
  c.task.seq_len = 8;
  c.task.batch_size = 4;
  c.task.val_size = 32;
  c.model.hidden = 12;
  c.prune.hard_prune_epoch = 3;
  for (auto& s : c.prune.schedule) {
    s.start_itr = 50;
    s.ramp_itr = 100;
    s.end_itr = 200;
    s.freq = 10;
  }
  return c;
}

std::string metrics_text(const TrainResult& r) {
  std::ostringstream o;
  write_metrics_csv(o, r.layer_names, r.metrics);
  return o.str();
}

std::string config_error_field(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

// --- parsing ----------------------------------------------------------------

TEST(ParseToml, SectionsCommentsAndTypes) {
  const Table t = parse_toml(
      "# experiment\n"
      "seed = 7\n"
      "out = \"runs/a # not a comment\"  # trailing\n"
      "\n"
      "[optim]\n"
      "learning_rate = 2.5e-3\n"
      "[bench]\n"
      "sizes = [256, 512]\n"
      "sparsities = [0.0, 0.9]\n"
      "[prune.recurrent]\n"
      "enabled = false\n");
  EXPECT_EQ(std::get<std::int64_t>(t.at("seed")), 7);
  EXPECT_EQ(std::get<std::string>(t.at("out")), "runs/a # not a comment");
  EXPECT_DOUBLE_EQ(std::get<double>(t.at("optim.learning_rate")), 2.5e-3);
  EXPECT_EQ(std::get<std::vector<Scalar>>(t.at("bench.sizes")).size(), 2u);
  EXPECT_FALSE(std::get<bool>(t.at("prune.recurrent.enabled")));
}

TEST(ParseToml, ErrorsNameTheLine) {
  auto field = [](const char* text) {
    try {
      parse_toml(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<no error>");
  };
  EXPECT_EQ(field("seed = 1\nbogus\n"), "line 2");
  EXPECT_EQ(field("seed = 1\nseed = 2\n"), "line 2");
  EXPECT_EQ(field("[task\n"), "line 1");
  EXPECT_EQ(field("a = \"open\n"), "line 1 (a)");
  EXPECT_EQ(field("a = [1, 2\n"), "line 1 (a)");
  EXPECT_EQ(field("a = @\n"), "line 1 (a)");
}

TEST(Config, DefaultsMatchDeskScaleProtocol) {
  const ExperimentConfig c = parse_config("");
  EXPECT_EQ(c.task.kind, nn::TaskKind::kAdding);
  EXPECT_EQ(c.model.hidden, 128u);
  EXPECT_EQ(c.epochs, 20);
  EXPECT_EQ(c.iters_per_epoch, 500);
  EXPECT_EQ(c.prune.mode, PruneMode::kNone);
  EXPECT_DOUBLE_EQ(c.prune.percentile, 0.9);
  EXPECT_EQ(c.prune.calibration_epochs, 1);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, FieldLevelErrors) {
  EXPECT_EQ(config_error_field("[model]\nhiden = 3\n"), "model.hiden");
  EXPECT_EQ(config_error_field("[prune]\nramp_factor = 1.2\n"),
            "prune.ramp_factor");
  EXPECT_EQ(config_error_field("[prune]\nramp_factor = 2.5\n"),
            "prune.ramp_factor");
  EXPECT_EQ(config_error_field(
                "epochs = 5\n[prune]\nmode = \"hard\"\nhard_prune_epoch = 5\n"),
            "prune.hard_prune_epoch");
  EXPECT_EQ(config_error_field("epochs = 5\n"), "<no error>");
  EXPECT_EQ(config_error_field("[model]\nhidden = \"big\"\n"), "model.hidden");
  EXPECT_EQ(config_error_field("[model]\ncell = \"lstm\"\n"), "model.cell");
  EXPECT_EQ(config_error_field("[prune]\nmode = \"sometimes\"\n"), "prune.mode");
  EXPECT_EQ(config_error_field("[optim]\nmomentum = 1.0\n"), "optim.momentum");
  EXPECT_EQ(config_error_field("[bench]\nrepetitions = 10\n"),
            "bench.repetitions");
  EXPECT_EQ(config_error_field("[prune]\nhard_keep = 10\nhard_sparsity = 0.5\n"),
            "prune.hard_keep");
}

TEST(Config, RampFactorBoundsAreInclusive) {
  EXPECT_NO_THROW(parse_config("[prune]\nramp_factor = 1.5\n"));
  EXPECT_NO_THROW(parse_config("[prune]\nramp_factor = 2.0\n"));
}

TEST(Config, OverridesTakePrecedence) {
  Table t = parse_toml("seed = 1\n[model]\nhidden = 64\n");
  apply_override(t, "model.hidden=32");
  apply_override(t, "prune.mode = \"gradual\"");
  apply_override(t, "prune.recurrent.freq=50");
  const ExperimentConfig c = config_from_table(t);
  EXPECT_EQ(c.model.hidden, 32u);
  EXPECT_EQ(c.prune.mode, PruneMode::kGradual);
  EXPECT_EQ(c.prune.schedule[0].freq, 50);
  EXPECT_THROW(apply_override(t, "no_equals_sign"), ConfigError);
}

TEST(Config, TomlRoundTrip) {
  ExperimentConfig c = small_config(99);
  c.out_dir = "runs/x \"quoted\"";
  c.task.kind = nn::TaskKind::kCharLm;
  c.model.cell = nn::CellType::kGru;
  c.model.depth = 2;
  c.optim.learning_rate = 0.003f;
  c.prune.mode = PruneMode::kHard;
  c.prune.ramp_factor = 1.75;
  c.prune.hard_sparsity = 0.85;
  c.prune.schedule[1].enabled = false;
  c.prune.schedule[0].start_slope = 1e-5;
  c.bench.sizes = {128, 1760};
  const std::string text = to_toml(c);
  const ExperimentConfig back = parse_config(text);
  EXPECT_EQ(to_toml(back), text);
  EXPECT_EQ(back.optim.learning_rate, c.optim.learning_rate);
  EXPECT_EQ(back.prune.schedule[0].start_slope, c.prune.schedule[0].start_slope);
}

TEST(FormatDouble, ShortestRoundTrip) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.uniform_index(80)) - 40);
    const std::string s = format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(format_double(3.0), "3.0");
  EXPECT_EQ(format_double(0.1), "0.1");
}

// --- calibration ------------------------------------------------------------

TEST(Calibrate, FrozenWarmupGivesInitializerPercentile) {
  ExperimentConfig c = small_config(11);
  c.optim.learning_rate = 0.0f;
  c.prune.mode = PruneMode::kGradual;
  const CalibrationFile cal = calibrate(c);

  // Oracle: the same initializer stream, sorted magnitudes, nearest rank.
  const nn::Task task = make_task(c.task);
  Rng root(c.seed);
  Rng init = root.split();
  const nn::Network net = nn::init_network(make_network_spec(c, task), init);
  for (std::size_t t = 0; t < nn::kLayerTypeCount; ++t) {
    std::vector<double> mags;
    for (const auto& p : net.parameters()) {
      if (!p.prunable || static_cast<std::size_t>(p.type) != t) continue;
      for (float v : p.values) mags.push_back(std::fabs(static_cast<double>(v)));
    }
    std::sort(mags.begin(), mags.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.9 * static_cast<double>(mags.size())));
    ASSERT_TRUE(cal.layers[t].has_value());
    EXPECT_DOUBLE_EQ(cal.layers[t]->q, mags[rank - 1]) << "type " << t;
  }
}

TEST(Calibrate, SameSeedSameFile) {
  ExperimentConfig c = small_config(12);
  c.prune.mode = PruneMode::kGradual;
  EXPECT_EQ(to_toml(calibrate(c)), to_toml(calibrate(c)));
  c.seed = 13;
  const std::string other = to_toml(calibrate(c));
  c.seed = 12;
  EXPECT_NE(to_toml(calibrate(c)), other);
}

TEST(Calibrate, ScheduleLandsOnQ) {
  ExperimentConfig c = small_config(14);
  c.prune.mode = PruneMode::kGradual;
  const CalibrationFile cal = calibrate(c);
  for (const auto& l : cal.layers) {
    ASSERT_TRUE(l.has_value());
    EXPECT_NEAR(l->schedule.ramp_slope, 1.5 * l->schedule.start_slope, 1e-15);
    EXPECT_EQ(l->schedule.start_itr, 50);
    EXPECT_EQ(l->schedule.end_itr, 200);
  }
}

TEST(Calibrate, RejectsRampFactorOutsideRange) {
  ExperimentConfig c = small_config();
  c.prune.ramp_factor = 1.25;
  EXPECT_THROW(calibrate(c), ConfigError);
  c.prune.ramp_factor = 2.01;
  EXPECT_THROW(calibrate(c), ConfigError);
}

TEST(Calibrate, FileRoundTripAndUnwritableDir) {
  TempDir tmp;
  ExperimentConfig c = small_config(15);
  c.prune.mode = PruneMode::kGradual;
  c.out_dir = (tmp.path() / "cal").string();
  const CalibrationFile cal = run_calibrate(c);
  const CalibrationFile back = read_calibration(tmp.path() / "cal" / "calibration.toml");
  EXPECT_EQ(to_toml(back), to_toml(cal));
  for (std::size_t t = 0; t < nn::kLayerTypeCount; ++t) {
    EXPECT_EQ(back.layers[t]->q, cal.layers[t]->q);
    EXPECT_EQ(back.layers[t]->schedule, cal.layers[t]->schedule);
  }

  // A regular file where the output directory should be.
  write_text_file(tmp.path() / "blocker", "x");
  c.out_dir = (tmp.path() / "blocker" / "sub").string();
  EXPECT_THROW(run_calibrate(c), IoError);
}

TEST(Calibrate, CalibrationFileFeedsTraining) {
  TempDir tmp;
  ExperimentConfig c = small_config(16);
  c.prune.mode = PruneMode::kGradual;
  c.out_dir = (tmp.path() / "cal").string();
  run_calibrate(c);
  ExperimentConfig t = c;
  t.out_dir.clear();
  t.prune.calibration_file = (tmp.path() / "cal" / "calibration.toml").string();
  const TrainResult from_file = run_train(t);
  t.prune.calibration_file.clear();
  const TrainResult inline_cal = run_train(t);
  EXPECT_EQ(metrics_text(from_file), metrics_text(inline_cal));
}

TEST(Plan, GradualWithoutSlopeOrCalibrationNeedsCalibration) {
  ExperimentConfig c = small_config();
  c.prune.mode = PruneMode::kGradual;
  EXPECT_TRUE(needs_calibration(c));
  EXPECT_THROW(resolve_schedules(c, nullptr), ConfigError);
  for (auto& s : c.prune.schedule) s.start_slope = 1e-4;
  EXPECT_FALSE(needs_calibration(c));
  const auto set = resolve_schedules(c, nullptr);
  ASSERT_TRUE(set[0].has_value());
  EXPECT_DOUBLE_EQ(set[0]->ramp_slope, 1.5e-4);
}

TEST(Plan, DefaultBreakpointsFollowEpochs) {
  ExperimentConfig c;
  c.prune.mode = PruneMode::kGradual;
  for (auto& s : c.prune.schedule) s.start_slope = 1e-4;
  const auto set = resolve_schedules(c, nullptr);
  ASSERT_TRUE(set[1].has_value());
  EXPECT_EQ(set[1]->start_itr, 500);
  EXPECT_EQ(set[1]->ramp_itr, 2500);
  EXPECT_EQ(set[1]->end_itr, 5000);
  EXPECT_EQ(set[1]->freq, 100);
}

TEST(Plan, DisabledTypeHasNoSchedule) {
  ExperimentConfig c = small_config();
  c.prune.mode = PruneMode::kGradual;
  c.prune.schedule[1].enabled = false;
  const PruningPlan plan = make_plan(c);
  EXPECT_TRUE(plan.schedules[0].has_value());
  EXPECT_FALSE(plan.schedules[1].has_value());
}

// --- training ---------------------------------------------------------------

TEST(Train, SameSeedIsByteIdentical) {
  TempDir tmp;
  ExperimentConfig c = small_config(21);
  c.prune.mode = PruneMode::kGradual;
  c.out_dir = (tmp.path() / "a").string();
  run_train(c);
  c.out_dir = (tmp.path() / "b").string();
  run_train(c);
  for (const char* f : {"metrics.csv", "schedule.csv", "model.sprn"}) {
    EXPECT_EQ(slurp(tmp.path() / "a" / f), slurp(tmp.path() / "b" / f)) << f;
  }
  EXPECT_TRUE(fs::exists(tmp.path() / "a" / "calibration.toml"));
}

TEST(Train, DenseModeHasZeroThresholdsAndDenseModel) {
  TempDir tmp;
  ExperimentConfig c = small_config(22);
  c.out_dir = tmp.path().string();
  const TrainResult r = run_train(c);
  ASSERT_FALSE(r.schedule.empty());
  for (const auto& row : r.schedule) {
    EXPECT_EQ(row.eps[0], 0.0);
    EXPECT_EQ(row.eps[1], 0.0);
    EXPECT_EQ(row.pruned_count, 0u);
  }
  const auto model = sparse::read_model(tmp.path() / "model.sprn");
  for (const auto& l : model.layers()) {
    for (const auto& t : l.tensors) EXPECT_FALSE(t.is_csr());
  }
  EXPECT_EQ(r.report.pruned, 0u);
}

TEST(Train, MetricsRowInvariants) {
  ExperimentConfig c = small_config(23);
  c.prune.mode = PruneMode::kGradual;
  const TrainResult r = run_train(c);
  ASSERT_FALSE(r.metrics.empty());
  EXPECT_EQ(r.log_freq, 10);
  EXPECT_EQ(r.metrics.size(), static_cast<std::size_t>(c.total_iters() / 10));
  const std::size_t total = r.report.total;
  long prev_itr = 0;
  prune::EpsilonSet prev_eps{};
  for (const auto& m : r.metrics) {
    EXPECT_GT(m.iteration, prev_itr);
    EXPECT_DOUBLE_EQ(m.epoch, static_cast<double>(m.iteration) / 50.0);
    EXPECT_GE(m.sparsity_overall, 0.0);
    EXPECT_LE(m.sparsity_overall, 1.0);
    for (std::size_t t = 0; t < 2; ++t) EXPECT_GE(m.eps[t], prev_eps[t]);
    const double expected = static_cast<double>(total) * (1.0 - m.sparsity_overall);
    EXPECT_NEAR(static_cast<double>(m.params_remaining), expected, 0.5);
    EXPECT_EQ(m.wall_seconds, 0.0);
    EXPECT_EQ(m.layer_sparsity.size(), r.layer_names.size());
    prev_itr = m.iteration;
    prev_eps = m.eps;
  }
  EXPECT_EQ(r.metrics.back().iteration, c.total_iters());
  EXPECT_GT(r.metrics.back().sparsity_overall, 0.5);
  EXPECT_DOUBLE_EQ(r.final_val_loss, r.metrics.back().val_loss);
}

TEST(Train, GradualModelIsStoredCsrWhenSparse) {
  TempDir tmp;
  ExperimentConfig c = small_config(24);
  c.prune.mode = PruneMode::kGradual;
  c.out_dir = tmp.path().string();
  const TrainResult r = run_train(c);
  const auto model = sparse::read_model(tmp.path() / "model.sprn");
  const auto params = r.network.parameters();
  std::size_t k = 0;
  for (const auto& l : model.layers()) {
    for (const auto& t : l.tensors) {
      ASSERT_LT(k, params.size());
      std::size_t zeros = 0;
      for (float v : params[k].values) zeros += v == 0.0f;
      const double s = static_cast<double>(zeros) /
                       static_cast<double>(params[k].values.size());
      EXPECT_EQ(t.is_csr(), params[k].prunable && s > 0.5) << params[k].name;
      ++k;
    }
  }
  EXPECT_EQ(sparse::to_network(model).parameters().size(), params.size());
}

TEST(Train, HardPruneAtZeroKeepingAllEqualsDense) {
  ExperimentConfig c = small_config(25);
  const TrainResult dense = run_train(c);
  c.prune.mode = PruneMode::kHard;
  c.prune.hard_prune_epoch = 0;
  c.prune.hard_sparsity = 0.0;
  const TrainResult hard = run_train(c);
  EXPECT_EQ(metrics_text(dense), metrics_text(hard));
  EXPECT_EQ(dense.final_val_loss, hard.final_val_loss);
}

TEST(Train, HardPruneKeepsExactlyTarget) {
  ExperimentConfig c = small_config(26);
  c.prune.hard_keep = 40;
  const TrainResult r = run_hard_prune(c);
  EXPECT_EQ(r.final_kept_prunable, 40u);
  for (const auto& m : r.metrics) {
    if (m.iteration < 150) {
      EXPECT_EQ(m.sparsity_overall, 0.0) << m.iteration;
    } else {
      EXPECT_GT(m.sparsity_overall, 0.5) << m.iteration;
    }
  }
}

TEST(Train, HardPruneErrors) {
  ExperimentConfig c = small_config();
  c.prune.mode = PruneMode::kHard;
  EXPECT_THROW(run_train(c), ConfigError);  // neither keep nor sparsity
  c.prune.hard_sparsity = 0.9;
  c.prune.hard_prune_epoch = c.epochs;
  EXPECT_THROW(run_train(c), ConfigError);
  c.prune.hard_prune_epoch = 1;
  c.prune.hard_sparsity.reset();
  c.prune.hard_keep = 1u << 30;
  EXPECT_THROW(run_train(c), ConfigError);

  PruningPlan plan;
  plan.mode = PruneMode::kHard;
  plan.hard_prune_itr = c.total_iters();
  plan.hard_keep = 10;
  EXPECT_THROW(train(c, plan), ParameterError);
}

TEST(Train, DivergenceReportsLastFiniteIteration) {
  ExperimentConfig c = small_config(27);
  c.optim.learning_rate = 1e30f;
  c.optim.clip_norm = 0.0f;
  c.model.activation = nn::Activation::kIdentity;
  try {
    run_train(c);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.last_finite_iteration(), 0);
    EXPECT_LT(e.last_finite_iteration(), c.total_iters());
    EXPECT_NE(std::string(e.what()).find(std::to_string(e.last_finite_iteration())),
              std::string::npos);
  }
}

TEST(Train, GruAndCharTaskRun) {
  ExperimentConfig c = small_config(28);
  c.model.cell = nn::CellType::kGru;
  c.task.kind = nn::TaskKind::kCharLm;
  c.prune.mode = PruneMode::kGradual;
  const TrainResult r = run_train(c);
  EXPECT_TRUE(std::isfinite(r.final_val_loss));
  EXPECT_LT(r.final_val_loss, r.initial_val_loss);
  EXPECT_GT(r.report.overall, 0.5);
}

TEST(Train, LearnsTheAddingProblem) {
  ExperimentConfig c = small_config(29);
  c.epochs = 10;
  c.iters_per_epoch = 100;
  c.task.seq_len = 10;
  c.model.hidden = 32;
  const TrainResult r = run_train(c);
  // An untrained net sits near the target variance of 2/3.
  EXPECT_LT(r.final_val_loss, 0.25 * r.initial_val_loss);
}

TEST(Train, PruningLateHurtsMoreThanPruningMidway) {
  // Same sparsity, pruned halfway through training versus with one epoch
  // left to recover.
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<double> mid, late;
  for (auto seed : seeds) {
    ExperimentConfig c;
    c.seed = seed;
    c.out_dir.clear();
    c.epochs = 8;
    c.iters_per_epoch = 200;
    c.model.hidden = 64;
    c.prune.mode = PruneMode::kHard;
    c.prune.hard_sparsity = 0.9;
    c.prune.hard_prune_epoch = 4;
    mid.push_back(run_train(c).final_val_loss);
    c.prune.hard_prune_epoch = 7;
    late.push_back(run_train(c).final_val_loss);
  }
  std::sort(mid.begin(), mid.end());
  std::sort(late.begin(), late.end());
  EXPECT_LT(mid[1], late[1]);
}

TEST(Train, GradualDefaultsLandInTargetBand) {
  // The default 20 x 500 adding run calibrated for the 90th percentile.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ExperimentConfig c;
    c.seed = seed;
    c.out_dir.clear();
    c.prune.mode = PruneMode::kGradual;
    const TrainResult r = run_train(c);
    EXPECT_GE(r.report.overall, 0.85) << "seed " << seed;
    EXPECT_LE(r.report.overall, 0.92) << "seed " << seed;
  }
}

TEST(Comparison, PairedRunsShareEverythingButPruning) {
  TempDir tmp;
  ExperimentConfig c = small_config(31);
  c.out_dir = tmp.path().string();
  const ComparisonResult r = run_comparison(c);
  EXPECT_EQ(r.hard_prune_itr, 100);  // end_itr 200, halved, epoch aligned
  EXPECT_EQ(r.hard.final_kept_prunable, r.gradual.final_kept_prunable);
  EXPECT_EQ(r.hard.report.pruned, r.gradual.report.pruned);
  EXPECT_DOUBLE_EQ(r.hard.report.overall, r.gradual.report.overall);
  EXPECT_EQ(r.dense.initial_val_loss, r.gradual.initial_val_loss);
  EXPECT_EQ(r.dense.initial_val_loss, r.hard.initial_val_loss);
  for (const char* d : {"dense", "gradual", "hard"}) {
    EXPECT_TRUE(fs::exists(tmp.path() / d / "metrics.csv")) << d;
  }
  const std::string table = slurp(tmp.path() / "comparison.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')),
            "run,final_val_loss,sparsity_overall,params_remaining,kept_prunable");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  EXPECT_NEAR(r.gap_percent(),
              (r.hard.final_val_loss - r.gradual.final_val_loss) /
                  r.hard.final_val_loss * 100.0,
              1e-12);
}

// --- csv and curves ---------------------------------------------------------

TEST(Csv, MetricsRoundTrip) {
  TempDir tmp;
  ExperimentConfig c = small_config(41);
  c.prune.mode = PruneMode::kGradual;
  c.out_dir = tmp.path().string();
  const TrainResult r = run_train(c);
  const MetricsTable back = read_metrics_csv(tmp.path() / "metrics.csv");
  EXPECT_EQ(back.layer_names, r.layer_names);
  ASSERT_EQ(back.records.size(), r.metrics.size());
  for (std::size_t i = 0; i < back.records.size(); ++i) {
    const auto& a = back.records[i];
    const auto& b = r.metrics[i];
    EXPECT_EQ(a.iteration, b.iteration);
    EXPECT_EQ(a.train_loss, b.train_loss);
    EXPECT_EQ(a.val_loss, b.val_loss);
    EXPECT_EQ(a.eps, b.eps);
    EXPECT_EQ(a.params_remaining, b.params_remaining);
    EXPECT_EQ(a.layer_sparsity, b.layer_sparsity);
  }
  const auto rows = read_schedule_csv(tmp.path() / "schedule.csv");
  ASSERT_EQ(rows.size(), r.schedule.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].pruned_count, r.schedule[i].pruned_count);
    EXPECT_EQ(rows[i].regrown_count, r.schedule[i].regrown_count);
    EXPECT_EQ(rows[i].eps, r.schedule[i].eps);
  }
  const std::string text = slurp(tmp.path() / "metrics.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "iteration,epoch,train_loss,val_loss,eps_recurrent,eps_linear,"
            "sparsity_overall,params_remaining,wall_seconds,sparsity_rnn0,"
            "sparsity_fc");
}

TEST(Csv, ReadErrors) {
  TempDir tmp;
  EXPECT_THROW(read_metrics_csv(tmp.path() / "missing.csv"), IoError);
  write_text_file(tmp.path() / "bad.csv",
                  "iteration,epoch,train_loss,val_loss,eps_recurrent,eps_linear,"
                  "sparsity_overall,params_remaining,wall_seconds\n1,x,2\n");
  EXPECT_THROW(read_metrics_csv(tmp.path() / "bad.csv"), IoError);
}

TEST(Curves, DenseRunHasOnlyLossCurve) {
  TempDir tmp;
  ExperimentConfig c = small_config(42);
  c.out_dir = (tmp.path() / "dense").string();
  run_train(c);
  const auto written = emit_curves({tmp.path() / "dense" / "metrics.csv"},
                                   tmp.path() / "plots");
  ASSERT_EQ(written.size(), 1u);
  EXPECT_EQ(written[0].filename(), "loss.svg");
  EXPECT_FALSE(fs::exists(tmp.path() / "plots" / "sparsity.svg"));
  EXPECT_EQ(prnn::testing::xml_error(slurp(written[0])), "");
}

TEST(Curves, GradualRunEmitsAllChartsWellFormed) {
  TempDir tmp;
  ExperimentConfig c = small_config(43);
  c.out_dir = (tmp.path() / "dense").string();
  run_train(c);
  c.prune.mode = PruneMode::kGradual;
  c.out_dir = (tmp.path() / "gradual").string();
  run_train(c);
  const auto written = emit_curves({tmp.path() / "dense" / "metrics.csv",
                                    tmp.path() / "gradual" / "metrics.csv"},
                                   tmp.path() / "plots");
  ASSERT_EQ(written.size(), 3u);
  for (const auto& p : written) {
    const std::string svg = slurp(p);
    EXPECT_EQ(prnn::testing::xml_error(svg), "") << p;
    EXPECT_NE(svg.find("<svg"), std::string::npos);
  }
  EXPECT_NE(slurp(tmp.path() / "plots" / "loss.svg").find("gradual val"),
            std::string::npos);
}

TEST(Curves, FrozenPrunedCountGrowsFasterAfterRamp) {
  // With frozen weights the emitted pruned counts follow the threshold.
  TempDir tmp;
  ExperimentConfig c = small_config(44);
  c.optim.learning_rate = 0.0f;
  c.model.hidden = 48;
  c.prune.mode = PruneMode::kGradual;
  c.out_dir = tmp.path().string();
  run_train(c);
  const auto rows = read_schedule_csv(tmp.path() / "schedule.csv");
  std::size_t prev = 0;
  double before = 0.0, after = 0.0;
  for (const auto& r : rows) {
    EXPECT_GE(r.pruned_count, prev) << r.iteration;
    if (r.iteration <= 50) {
      EXPECT_EQ(r.pruned_count, 0u);
    }
    if (r.iteration >= 200) {
      EXPECT_EQ(r.pruned_count, rows.back().pruned_count);
    }
    if (r.iteration == 60) before = static_cast<double>(r.pruned_count);
    if (r.iteration == 100) after = static_cast<double>(r.pruned_count);
    prev = r.pruned_count;
  }
  const double early_slope = (after - before) / 40.0;
  double end_count = 0.0;
  for (const auto& r : rows) {
    if (r.iteration == 190) end_count = static_cast<double>(r.pruned_count);
  }
  const double late_slope = (end_count - after) / 90.0;
  EXPECT_GT(late_slope, early_slope);
}

TEST(Curves, RejectsEmptyInput) {
  TempDir tmp;
  EXPECT_THROW(emit_curves({}, tmp.path()), ParameterError);
  write_text_file(tmp.path() / "empty.csv",
                  "iteration,epoch,train_loss,val_loss,eps_recurrent,eps_linear,"
                  "sparsity_overall,params_remaining,wall_seconds\n");
  EXPECT_THROW(emit_curves({tmp.path() / "empty.csv"}, tmp.path()), ParameterError);
}

TEST(Svg, EscapesAndRejectsDegenerateInput) {
  EXPECT_EQ(svg::escape("a<b & \"c\">"), "a&lt;b &amp; &quot;c&quot;&gt;");
  const std::string chart =
      svg::line_chart("t <1>", "x & y", "y", {{"s\"1\"", {0, 1, 2}, {1, NAN, 3}}});
  EXPECT_EQ(prnn::testing::xml_error(chart), "");
  EXPECT_THROW(svg::line_chart("t", "x", "y", {}), ParameterError);
  EXPECT_THROW(svg::line_chart("t", "x", "y", {{"s", {0, 1}, {1}}}), ParameterError);
  const std::string bars = svg::bar_chart("b", "y", {"a", "b"},
                                          {{"rnn0", {0.9, 0.8}}, {"fc", {0.5, 0.4}}});
  EXPECT_EQ(prnn::testing::xml_error(bars), "");
  EXPECT_THROW(svg::bar_chart("b", "y", {"a"}, {{"g", {1, 2}}}), ParameterError);
}

TEST(XmlCheck, CatchesMalformedDocuments) {
  using prnn::testing::xml_error;
  EXPECT_EQ(xml_error("<a><b/></a>"), "");
  EXPECT_NE(xml_error("<a><b></a>"), "");
  EXPECT_NE(xml_error("<a x=1></a>"), "");
  EXPECT_NE(xml_error("<a>&bogus;</a>"), "");
  EXPECT_NE(xml_error("<a></a><b></b>"), "");
}

// --- compression ------------------------------------------------------------

sparse::SparseModel pruned_model(std::size_t input, std::size_t hidden,
                                 double sparsity, std::uint64_t seed) {
  nn::NetworkSpec spec{nn::CellType::kRnn, nn::Activation::kClippedRelu, input,
                       hidden, 1, 1, nn::OutputMode::kLastStep};
  Rng rng(seed);
  nn::Network net = nn::init_network(spec, rng);
  for (auto& p : net.mutable_parameters()) {
    if (!p.prunable) continue;
    // Zero exactly round(sparsity * n) entries: the smallest magnitudes.
    std::vector<std::size_t> idx(p.values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::fabs(p.values[a]) < std::fabs(p.values[b]);
    });
    const auto drop = static_cast<std::size_t>(
        std::llround(sparsity * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < drop; ++i) p.values[idx[i]] = 0.0f;
  }
  return sparse::from_network(net);
}

TEST(Compress, DenseModelRatioIsOne) {
  const auto model = pruned_model(1, 64, 0.0, 1);
  const CompressReport r = compress_report(model);
  EXPECT_EQ(r.dense_bytes, r.actual_bytes);
  EXPECT_DOUBLE_EQ(r.ratio(), 1.0);
}

TEST(Compress, LargeRecurrentLayerAtNinetyFivePercent) {
  const auto model = pruned_model(1, 1760, 0.95, 2);
  const CompressReport r = compress_report(model);
  const TensorBytes& wh = r.layers[0].tensors[1];
  ASSERT_TRUE(wh.csr);
  EXPECT_EQ(wh.nonzeros, 154880u);
  const double tensor_ratio =
      static_cast<double>(wh.dense_bytes) / static_cast<double>(wh.bytes);
  EXPECT_NEAR(tensor_ratio, 9.9, 0.05);
  // The 1760-entry input, bias and head tensors dilute it a little.
  EXPECT_GT(r.ratio(), 9.5);
}

TEST(Compress, ReportMatchesFormatArithmeticAndFile) {
  TempDir tmp;
  const auto model = pruned_model(3, 40, 0.9, 3);
  sparse::write_model(tmp.path() / "m.sprn", model);
  const CompressReport r = run_compress(tmp.path() / "m.sprn");
  EXPECT_EQ(r.actual_bytes, fs::file_size(tmp.path() / "m.sprn"));
  std::size_t dense = sparse::kFileHeaderBytes;
  std::size_t actual = sparse::kFileHeaderBytes;
  for (const auto& l : r.layers) {
    std::size_t ld = sparse::kLayerHeaderBytes, la = sparse::kLayerHeaderBytes;
    for (const auto& t : l.tensors) {
      EXPECT_EQ(t.dense_bytes, 9 + 4 * t.rows * t.cols);
      EXPECT_EQ(t.bytes, t.csr ? 13 + 4 * (t.rows + 1) + 8 * t.nonzeros
                               : 9 + 4 * t.rows * t.cols);
      ld += t.dense_bytes;
      la += t.bytes;
    }
    EXPECT_EQ(l.dense_bytes, ld);
    EXPECT_EQ(l.actual_bytes, la);
    dense += ld;
    actual += la;
  }
  EXPECT_EQ(r.dense_bytes, dense);
  EXPECT_EQ(r.actual_bytes, actual);
  const std::string text = format_report(r);
  EXPECT_NE(text.find(std::to_string(r.actual_bytes)), std::string::npos);
}

TEST(Compress, EightyEightPercentToyModelIsSevenTimesSmaller) {
  // Toy model: hidden 128, all weight matrices 88% sparse, biases dense.
  const auto model = pruned_model(1, 128, 0.88, 4);
  const CompressReport r = compress_report(model);
  EXPECT_GE(r.ratio(), 7.0) << "dense " << r.dense_bytes << " actual "
                            << r.actual_bytes;
}

TEST(Compress, MalformedFileIsFormatError) {
  TempDir tmp;
  write_text_file(tmp.path() / "junk.sprn", "not a model");
  EXPECT_THROW(run_compress(tmp.path() / "junk.sprn"), FormatError);
  EXPECT_THROW(run_compress(tmp.path() / "absent.sprn"), IoError);
}

TEST(Bench, SvgAndCsvFromSmallGrid) {
  TempDir tmp;
  ExperimentConfig c;
  c.out_dir = tmp.path().string();
  c.bench.sizes = {64};
  c.bench.sparsities = {0.0, 0.9};
  const auto records = run_bench(c);
  EXPECT_EQ(records.size(), 2u);
  EXPECT_EQ(prnn::testing::xml_error(slurp(tmp.path() / "bench.svg")), "");
  const std::string csv = slurp(tmp.path() / "bench.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "layer_size,sparsity,layer_type,dense_us,sparse_us,speedup,rows,"
            "cols,nnz,dense_q1_us,dense_q3_us,sparse_q1_us,sparse_q3_us");
}

}  // namespace
}  // namespace prnn::harness
