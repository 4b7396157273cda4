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

#include "prnn/experiments.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "prnn/csv.hpp"
#include "prnn/sparse_model.hpp"
#include "prnn/svg.hpp"

namespace prnn::harness {

namespace fs = std::filesystem;

namespace {

std::string type_name(std::size_t t) {
  return std::string(nn::to_string(static_cast<nn::LayerType>(t)));
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + ": " +
                  ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

prune::PruneHyperParams schedule_for(const ExperimentConfig& config,
                                     std::size_t t, std::optional<double> q) {
  const ScheduleOverrides& ov = config.prune.schedule[t];
  const long total = config.total_iters();
  prune::PruneHyperParams hp;
  hp.start_itr = ov.start_itr.value_or(config.iters_per_epoch);
  hp.ramp_itr = ov.ramp_itr.value_or(total / 4);
  hp.end_itr = ov.end_itr.value_or(total / 2);
  hp.freq = ov.freq.value_or(prune::kDefaultFreq);
  const std::string field = "prune." + type_name(t);
  try {
    if (ov.start_slope) {
      hp.start_slope = *ov.start_slope;
    } else if (q) {
      hp.start_slope = prune::compute_start_slope(*q, hp.start_itr,
                                                  hp.ramp_itr, hp.end_itr,
                                                  hp.freq);
    } else {
      throw ConfigError(field + ".start_slope",
                        "no slope given and no calibration available");
    }
    hp.ramp_slope =
        ov.ramp_slope.value_or(config.prune.ramp_factor * hp.start_slope);
    hp.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(field, e.what());
  }
  return hp;
}

double get_number(const Table& t, const std::string& key) {
  const auto it = t.find(key);
  if (it == t.end()) throw ConfigError(key, "missing from calibration file");
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
    return static_cast<double>(*i);
  }
  throw ConfigError(key, "expected a number");
}

long get_integer(const Table& t, const std::string& key) {
  const auto it = t.find(key);
  if (it == t.end()) throw ConfigError(key, "missing from calibration file");
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
    return static_cast<long>(*i);
  }
  throw ConfigError(key, "expected an integer");
}

std::string_view kind_name(sparse::LayerKind k) {
  switch (k) {
    case sparse::LayerKind::kRnn:
      return "rnn";
    case sparse::LayerKind::kGru:
      return "gru";
    case sparse::LayerKind::kFc:
      return "fc";
  }
  return "?";
}

}  // namespace

std::string to_toml(const CalibrationFile& c) {
  std::ostringstream o;
  o << "seed = " << c.seed << "\n"
    << "percentile = " << format_double(c.percentile) << "\n"
    << "ramp_factor = " << format_double(c.ramp_factor) << "\n";
  for (std::size_t t = 0; t < nn::kLayerTypeCount; ++t) {
    if (!c.layers[t]) continue;
    const auto& l = *c.layers[t];
    o << "\n[" << type_name(t) << "]\n"
      << "q = " << format_double(l.q) << "\n"
      << "start_itr = " << l.schedule.start_itr << "\n"
      << "ramp_itr = " << l.schedule.ramp_itr << "\n"
      << "end_itr = " << l.schedule.end_itr << "\n"
      << "freq = " << l.schedule.freq << "\n"
      << "start_slope = " << format_double(l.schedule.start_slope) << "\n"
      << "ramp_slope = " << format_double(l.schedule.ramp_slope) << "\n";
  }
  return o.str();
}

CalibrationFile parse_calibration(std::string_view text) {
  const Table t = parse_toml(text);
  CalibrationFile c;
  c.seed = static_cast<std::uint64_t>(get_integer(t, "seed"));
  c.percentile = get_number(t, "percentile");
  c.ramp_factor = get_number(t, "ramp_factor");
  for (std::size_t k = 0; k < nn::kLayerTypeCount; ++k) {
    const std::string p = type_name(k) + ".";
    if (!t.contains(p + "q")) continue;
    LayerCalibration l;
    l.q = get_number(t, p + "q");
    l.schedule.start_itr = get_integer(t, p + "start_itr");
    l.schedule.ramp_itr = get_integer(t, p + "ramp_itr");
    l.schedule.end_itr = get_integer(t, p + "end_itr");
    l.schedule.freq = get_integer(t, p + "freq");
    l.schedule.start_slope = get_number(t, p + "start_slope");
    l.schedule.ramp_slope = get_number(t, p + "ramp_slope");
    try {
      l.schedule.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(type_name(k), e.what());
    }
    c.layers[k] = l;
  }
  return c;
}

CalibrationFile read_calibration(const fs::path& path) {
  return parse_calibration(read_file(path));
}

CalibrationFile calibrate(const ExperimentConfig& config) {
  config.validate();
  ExperimentConfig warm = config;
  warm.epochs = config.prune.calibration_epochs;
  warm.prune.mode = PruneMode::kNone;
  warm.prune.hard_prune_epoch = 0;
  const TrainResult r = train(warm, PruningPlan{});

  CalibrationFile c;
  c.seed = config.seed;
  c.percentile = config.prune.percentile;
  c.ramp_factor = config.prune.ramp_factor;
  const auto params = r.network.parameters();
  for (std::size_t t = 0; t < nn::kLayerTypeCount; ++t) {
    if (!config.prune.schedule[t].enabled) continue;
    std::vector<std::span<const float>> spans;
    for (const auto& p : params) {
      if (p.prunable && static_cast<std::size_t>(p.type) == t) {
        spans.push_back(p.values);
      }
    }
    if (spans.empty()) continue;
    const double q = prune::percentile_q(spans, config.prune.percentile);
    c.layers[t] = LayerCalibration{q, schedule_for(config, t, q)};
  }
  return c;
}

bool needs_calibration(const ExperimentConfig& config) {
  if (config.prune.mode != PruneMode::kGradual) return false;
  for (const auto& s : config.prune.schedule) {
    if (s.enabled && !s.start_slope) return true;
  }
  return false;
}

prune::ScheduleSet resolve_schedules(const ExperimentConfig& config,
                                     const CalibrationFile* calibration) {
  prune::ScheduleSet out;
  for (std::size_t t = 0; t < nn::kLayerTypeCount; ++t) {
    if (!config.prune.schedule[t].enabled) continue;
    std::optional<double> q;
    if (calibration && calibration->layers[t]) q = calibration->layers[t]->q;
    out[t] = schedule_for(config, t, q);
  }
  return out;
}

std::size_t prunable_weight_count(const ExperimentConfig& config) {
  const nn::Task task = make_task(config.task);
  const nn::Network net(make_network_spec(config, task));
  std::size_t n = 0;
  for (const auto& p : net.parameters()) {
    if (p.prunable) n += p.values.size();
  }
  return n;
}

PruningPlan make_plan(const ExperimentConfig& config,
                      std::optional<CalibrationFile>* calibration_used) {
  config.validate();
  PruningPlan plan;
  plan.mode = config.prune.mode;
  if (plan.mode == PruneMode::kGradual) {
    std::optional<CalibrationFile> cal;
    if (needs_calibration(config)) {
      cal = config.prune.calibration_file.empty()
                ? calibrate(config)
                : read_calibration(config.prune.calibration_file);
    }
    plan.schedules = resolve_schedules(config, cal ? &*cal : nullptr);
    if (calibration_used) *calibration_used = cal;
  } else if (plan.mode == PruneMode::kHard) {
    const std::size_t prunable = prunable_weight_count(config);
    plan.hard_prune_itr =
        static_cast<long>(config.prune.hard_prune_epoch) *
        config.iters_per_epoch;
    if (config.prune.hard_keep) {
      plan.hard_keep = *config.prune.hard_keep;
      if (plan.hard_keep > prunable) {
        throw ConfigError("prune.hard_keep",
                          "exceeds the " + std::to_string(prunable) +
                              " prunable weights");
      }
    } else if (config.prune.hard_sparsity) {
      const auto drop = static_cast<std::size_t>(std::llround(
          *config.prune.hard_sparsity * static_cast<double>(prunable)));
      plan.hard_keep = prunable - drop;
      if (plan.hard_keep == 0) {
        throw ConfigError("prune.hard_sparsity", "would remove every weight");
      }
    } else {
      throw ConfigError("prune.hard_keep",
                        "hard pruning needs hard_keep or hard_sparsity");
    }
  }
  return plan;
}

void write_run(const fs::path& dir, const ExperimentConfig& config,
               const TrainResult& result) {
  make_dir(dir);
  {
    std::ostringstream o;
    write_metrics_csv(o, result.layer_names, result.metrics);
    write_text_file(dir / "metrics.csv", o.str());
  }
  {
    std::ostringstream o;
    write_schedule_csv(o, result.schedule);
    write_text_file(dir / "schedule.csv", o.str());
  }
  sparse::write_model(dir / "model.sprn", sparse::from_network(result.network));
  write_text_file(dir / "config.toml", to_toml(config));
}

CalibrationFile run_calibrate(const ExperimentConfig& config) {
  CalibrationFile c = calibrate(config);
  if (!config.out_dir.empty()) {
    make_dir(config.out_dir);
    write_text_file(fs::path(config.out_dir) / "calibration.toml", to_toml(c));
  }
  return c;
}

TrainResult run_train(const ExperimentConfig& config) {
  std::optional<CalibrationFile> cal;
  const PruningPlan plan = make_plan(config, &cal);
  TrainResult r = train(config, plan);
  if (!config.out_dir.empty()) {
    write_run(config.out_dir, config, r);
    if (cal) {
      write_text_file(fs::path(config.out_dir) / "calibration.toml",
                      to_toml(*cal));
    }
  }
  return r;
}

TrainResult run_hard_prune(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.prune.mode = PruneMode::kHard;
  return run_train(c);
}

double ComparisonResult::gap_percent() const noexcept {
  return (hard.final_val_loss - gradual.final_val_loss) /
         hard.final_val_loss * 100.0;
}

ComparisonResult run_comparison(const ExperimentConfig& config) {
  ComparisonResult out;

  ExperimentConfig gradual_cfg = config;
  gradual_cfg.prune.mode = PruneMode::kGradual;
  std::optional<CalibrationFile> cal;
  const PruningPlan gradual_plan = make_plan(gradual_cfg, &cal);
  out.gradual = train(gradual_cfg, gradual_plan);

  long end_itr = 0;
  for (const auto& s : gradual_plan.schedules) {
    if (s) end_itr = std::max(end_itr, s->end_itr);
  }
  const long ipe = config.iters_per_epoch;
  out.hard_prune_itr = (end_itr / 2) / ipe * ipe;

  ExperimentConfig dense_cfg = config;
  dense_cfg.prune.mode = PruneMode::kNone;
  out.dense = train(dense_cfg, PruningPlan{});

  ExperimentConfig hard_cfg = config;
  hard_cfg.prune.mode = PruneMode::kHard;
  hard_cfg.prune.hard_prune_epoch = static_cast<int>(out.hard_prune_itr / ipe);
  hard_cfg.prune.hard_keep = out.gradual.final_kept_prunable;
  hard_cfg.prune.hard_sparsity.reset();
  PruningPlan hard_plan;
  hard_plan.mode = PruneMode::kHard;
  hard_plan.hard_prune_itr = out.hard_prune_itr;
  hard_plan.hard_keep = out.gradual.final_kept_prunable;
  out.hard = train(hard_cfg, hard_plan);

  if (!config.out_dir.empty()) {
    const fs::path dir = config.out_dir;
    write_run(dir / "dense", dense_cfg, out.dense);
    write_run(dir / "gradual", gradual_cfg, out.gradual);
    write_run(dir / "hard", hard_cfg, out.hard);
    if (cal) write_text_file(dir / "calibration.toml", to_toml(*cal));
    write_text_file(dir / "comparison.csv", comparison_csv(out));
  }
  return out;
}

std::string comparison_csv(const ComparisonResult& r) {
  std::ostringstream o;
  o << "run,final_val_loss,sparsity_overall,params_remaining,kept_prunable\n";
  const std::pair<const char*, const TrainResult*> rows[] = {
      {"dense", &r.dense}, {"gradual", &r.gradual}, {"hard", &r.hard}};
  for (const auto& [name, t] : rows) {
    o << name << ',' << format_double(t->final_val_loss) << ','
      << format_double(t->report.overall) << ',' << t->report.remaining()
      << ',' << t->final_kept_prunable << '\n';
  }
  return o.str();
}

std::vector<sparse::BenchRecord> run_bench(const ExperimentConfig& config) {
  config.validate();
  sparse::BenchOptions opts;
  opts.repetitions = config.bench.repetitions;
  opts.warmup = config.bench.warmup;
  opts.threads = config.bench.threads;
  opts.seed = config.seed;
  auto records = sparse::bench_matvec(config.bench.sizes,
                                      config.bench.sparsities,
                                      config.bench.layer_type, opts);
  if (!config.out_dir.empty()) {
    make_dir(config.out_dir);
    std::ostringstream o;
    write_bench_csv(o, records);
    write_text_file(fs::path(config.out_dir) / "bench.csv", o.str());
    write_text_file(fs::path(config.out_dir) / "bench.svg", bench_svg(records));
  }
  return records;
}

std::string bench_svg(const std::vector<sparse::BenchRecord>& records) {
  std::vector<svg::Series> series;
  std::vector<std::size_t> sizes;
  for (const auto& r : records) {
    if (std::find(sizes.begin(), sizes.end(), r.layer_size) == sizes.end()) {
      sizes.push_back(r.layer_size);
    }
  }
  for (std::size_t n : sizes) {
    svg::Series dense{"dense n=" + std::to_string(n), {}, {}};
    svg::Series sparse{"sparse n=" + std::to_string(n), {}, {}};
    for (const auto& r : records) {
      if (r.layer_size != n) continue;
      dense.x.push_back(r.sparsity);
      dense.y.push_back(r.dense.median_us);
      sparse.x.push_back(r.sparsity);
      sparse.y.push_back(r.sparse.median_us);
    }
    series.push_back(std::move(dense));
    series.push_back(std::move(sparse));
  }
  return svg::line_chart("Matrix-vector time vs sparsity", "sparsity",
                         "median time (us)", series);
}

CompressReport compress_report(const sparse::SparseModel& model) {
  CompressReport r;
  r.dense_bytes = sparse::kFileHeaderBytes;
  r.actual_bytes = sparse::kFileHeaderBytes;
  for (const auto& l : model.layers()) {
    LayerBytes lb;
    lb.kind = l.kind;
    lb.dense_bytes = sparse::kLayerHeaderBytes;
    lb.actual_bytes = sparse::kLayerHeaderBytes;
    for (const auto& t : l.tensors) {
      TensorBytes tb;
      tb.csr = t.is_csr();
      tb.rows = t.rows();
      tb.cols = t.cols();
      tb.nonzeros = t.nonzeros();
      tb.bytes = sparse::serialized_size(t);
      tb.dense_bytes = sparse::dense_tensor_bytes(t.rows(), t.cols());
      lb.dense_bytes += tb.dense_bytes;
      lb.actual_bytes += tb.bytes;
      lb.tensors.push_back(tb);
    }
    r.dense_bytes += lb.dense_bytes;
    r.actual_bytes += lb.actual_bytes;
    r.layers.push_back(std::move(lb));
  }
  return r;
}

CompressReport run_compress(const fs::path& model_file) {
  return compress_report(sparse::read_model(model_file));
}

std::string format_report(const CompressReport& r) {
  std::ostringstream o;
  char ratio[32];
  std::snprintf(ratio, sizeof(ratio), "%.3f", r.ratio());
  o << "dense-equivalent bytes: " << r.dense_bytes << "\n"
    << "actual bytes:           " << r.actual_bytes << "\n"
    << "ratio:                  " << ratio << "\n";
  for (std::size_t i = 0; i < r.layers.size(); ++i) {
    const auto& l = r.layers[i];
    o << "layer " << i << " (" << kind_name(l.kind) << "): dense "
      << l.dense_bytes << " bytes, actual " << l.actual_bytes << " bytes\n";
    for (std::size_t k = 0; k < l.tensors.size(); ++k) {
      const auto& t = l.tensors[k];
      o << "  tensor " << k << ": " << (t.csr ? "csr  " : "dense") << ' '
        << t.rows << 'x' << t.cols << " nnz " << t.nonzeros << ", "
        << t.bytes << " bytes (dense " << t.dense_bytes << ")\n";
    }
  }
  return o.str();
}

std::vector<fs::path> emit_curves(const std::vector<fs::path>& metrics_files,
                                  const fs::path& out_dir) {
  if (metrics_files.empty()) {
    throw ParameterError("emit_curves needs at least one metrics file");
  }
  struct Run {
    std::string label;
    MetricsTable table;
    std::vector<ScheduleRow> schedule;
  };
  std::vector<Run> runs;
  std::set<std::string> labels;
  for (const auto& path : metrics_files) {
    Run run;
    run.table = read_metrics_csv(path);
    if (run.table.records.empty()) {
      throw ParameterError("metrics file " + path.string() + " has no rows");
    }
    std::string label = path.parent_path().filename().string();
    if (label.empty()) label = path.stem().string();
    for (int k = 2; labels.contains(label); ++k) {
      label = path.parent_path().filename().string() + "-" + std::to_string(k);
    }
    labels.insert(label);
    run.label = label;
    const fs::path sched = path.parent_path() / "schedule.csv";
    if (fs::exists(sched)) run.schedule = read_schedule_csv(sched);
    runs.push_back(std::move(run));
  }

  make_dir(out_dir);
  std::vector<fs::path> written;

  std::vector<svg::Series> loss;
  for (const auto& run : runs) {
    svg::Series tr{run.label + " train", {}, {}};
    svg::Series va{run.label + " val", {}, {}};
    for (const auto& m : run.table.records) {
      tr.x.push_back(m.epoch);
      tr.y.push_back(m.train_loss);
      if (m.epoch == std::floor(m.epoch) ||
          &m == &run.table.records.back()) {
        va.x.push_back(m.epoch);
        va.y.push_back(m.val_loss);
      }
    }
    loss.push_back(std::move(tr));
    loss.push_back(std::move(va));
  }
  written.push_back(out_dir / "loss.svg");
  write_text_file(written.back(),
                  svg::line_chart("Training and validation loss", "epoch",
                                  "loss", loss));

  std::vector<const Run*> sparse_runs;
  for (const auto& run : runs) {
    for (const auto& m : run.table.records) {
      if (m.sparsity_overall > 0.0) {
        sparse_runs.push_back(&run);
        break;
      }
    }
  }
  if (sparse_runs.empty()) return written;

  std::vector<std::string> names;
  std::vector<svg::BarGroup> groups;
  for (const auto& layer : sparse_runs.front()->table.layer_names) {
    groups.push_back({layer, {}});
  }
  for (const Run* run : sparse_runs) {
    names.push_back(run->label);
    const auto& last = run->table.records.back();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      groups[g].values.push_back(g < last.layer_sparsity.size()
                                     ? last.layer_sparsity[g]
                                     : std::nan(""));
    }
  }
  written.push_back(out_dir / "sparsity.svg");
  write_text_file(written.back(),
                  svg::bar_chart("Final sparsity per layer", "sparsity",
                                 names, groups));

  std::vector<svg::Series> pruned;
  for (const Run* run : sparse_runs) {
    svg::Series s{run->label, {}, {}};
    if (!run->schedule.empty()) {
      for (const auto& row : run->schedule) {
        s.x.push_back(static_cast<double>(row.iteration));
        s.y.push_back(static_cast<double>(row.pruned_count));
      }
    } else {
      for (const auto& m : run->table.records) {
        s.x.push_back(static_cast<double>(m.iteration));
        s.y.push_back(std::round(static_cast<double>(m.params_remaining) *
                                 m.sparsity_overall /
                                 (1.0 - m.sparsity_overall)));
      }
    }
    pruned.push_back(std::move(s));
  }
  written.push_back(out_dir / "pruned.svg");
  write_text_file(written.back(),
                  svg::line_chart("Pruned weights vs iteration", "iteration",
                                  "pruned weights", pruned));
  return written;
}

}  // namespace prnn::harness
