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

// CSV files written by the harness. Floating-point fields use the shortest
// text that round-trips, so identical runs produce identical bytes.
//
// metrics.csv:  iteration,epoch,train_loss,val_loss,eps_recurrent,
//               eps_linear,sparsity_overall,params_remaining,wall_seconds,
//               sparsity_<layer>...
// schedule.csv: iteration,epsilon_recurrent,epsilon_linear,pruned_count,
//               regrown_count,sparsity_overall
// bench.csv:    layer_size,sparsity,layer_type,dense_us,sparse_us,speedup,
//               rows,cols,nnz,dense_q1_us,dense_q3_us,sparse_q1_us,
//               sparse_q3_us (times are medians and quartiles in us)

#ifndef PRNN_CSV_HPP_
#define PRNN_CSV_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "prnn/bench.hpp"
#include "prnn/trainer.hpp"

namespace prnn::harness {

struct MetricsTable {
  std::vector<std::string> layer_names;
  std::vector<MetricsRecord> records;
};

void write_metrics_csv(std::ostream& out,
                       const std::vector<std::string>& layer_names,
                       const std::vector<MetricsRecord>& records);
void write_schedule_csv(std::ostream& out, const std::vector<ScheduleRow>& rows);
void write_bench_csv(std::ostream& out,
                     const std::vector<sparse::BenchRecord>& records);

// Throw IoError when the file cannot be opened or a row does not parse.
MetricsTable read_metrics_csv(const std::filesystem::path& path);
std::vector<ScheduleRow> read_schedule_csv(const std::filesystem::path& path);

// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace prnn::harness

#endif  // PRNN_CSV_HPP_
