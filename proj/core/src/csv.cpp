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

#include "prnn/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace prnn::harness {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class RowParser {
 public:
  RowParser(const std::filesystem::path& path, std::size_t line,
            std::vector<std::string> cells)
      : path_(path), line_(line), cells_(std::move(cells)) {}

  std::size_t size() const noexcept { return cells_.size(); }

  double number(std::size_t i) const {
    double v = 0.0;
    const std::string& s = cells_.at(i);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(i);
    return v;
  }
  template <typename I>
  I integer(std::size_t i) const {
    I v = 0;
    const std::string& s = cells_.at(i);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(i);
    return v;
  }

 private:
  [[noreturn]] void fail(std::size_t i) const {
    throw IoError(path_.string() + " line " + std::to_string(line_) +
                  ": cannot parse field " + std::to_string(i + 1) + " '" +
                  cells_[i] + "'");
  }

  const std::filesystem::path& path_;
  std::size_t line_;
  std::vector<std::string> cells_;
};

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

const char* const kMetricsFixed[] = {
    "iteration",        "epoch",            "train_loss",
    "val_loss",         "eps_recurrent",    "eps_linear",
    "sparsity_overall", "params_remaining", "wall_seconds"};
constexpr std::size_t kMetricsFixedCount = std::size(kMetricsFixed);

}  // namespace

void write_metrics_csv(std::ostream& out,
                       const std::vector<std::string>& layer_names,
                       const std::vector<MetricsRecord>& records) {
  for (std::size_t i = 0; i < kMetricsFixedCount; ++i) {
    out << (i ? "," : "") << kMetricsFixed[i];
  }
  for (const auto& n : layer_names) out << ",sparsity_" << n;
  out << '\n';
  for (const auto& r : records) {
    if (r.layer_sparsity.size() != layer_names.size()) {
      throw ShapeError("metrics row has " +
                       std::to_string(r.layer_sparsity.size()) +
                       " layer columns, header has " +
                       std::to_string(layer_names.size()));
    }
    out << r.iteration << ',' << format_double(r.epoch) << ','
        << format_double(r.train_loss) << ',' << format_double(r.val_loss)
        << ',' << format_double(r.eps[0]) << ',' << format_double(r.eps[1])
        << ',' << format_double(r.sparsity_overall) << ','
        << r.params_remaining << ',' << format_double(r.wall_seconds);
    for (double s : r.layer_sparsity) out << ',' << format_double(s);
    out << '\n';
  }
}

void write_schedule_csv(std::ostream& out,
                        const std::vector<ScheduleRow>& rows) {
  out << "iteration,epsilon_recurrent,epsilon_linear,pruned_count,"
         "regrown_count,sparsity_overall\n";
  for (const auto& r : rows) {
    out << r.iteration << ',' << format_double(r.eps[0]) << ','
        << format_double(r.eps[1]) << ',' << r.pruned_count << ','
        << r.regrown_count << ',' << format_double(r.sparsity_overall) << '\n';
  }
}

void write_bench_csv(std::ostream& out,
                     const std::vector<sparse::BenchRecord>& records) {
  out << "layer_size,sparsity,layer_type,dense_us,sparse_us,speedup,rows,"
         "cols,nnz,dense_q1_us,dense_q3_us,sparse_q1_us,sparse_q3_us\n";
  for (const auto& r : records) {
    out << r.layer_size << ',' << format_double(r.sparsity) << ','
        << sparse::to_string(r.layer_type) << ','
        << format_double(r.dense.median_us) << ','
        << format_double(r.sparse.median_us) << ','
        << format_double(r.speedup) << ',' << r.rows << ',' << r.cols << ','
        << r.nnz << ',' << format_double(r.dense.q1_us) << ','
        << format_double(r.dense.q3_us) << ','
        << format_double(r.sparse.q1_us) << ','
        << format_double(r.sparse.q3_us) << '\n';
  }
}

MetricsTable read_metrics_csv(const std::filesystem::path& path) {
  auto in = open(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = split(line);
  if (header.size() < kMetricsFixedCount) {
    throw IoError(path.string() + ": not a metrics file");
  }
  for (std::size_t i = 0; i < kMetricsFixedCount; ++i) {
    if (header[i] != kMetricsFixed[i]) {
      throw IoError(path.string() + ": unexpected column '" + header[i] + "'");
    }
  }
  MetricsTable t;
  for (std::size_t i = kMetricsFixedCount; i < header.size(); ++i) {
    const std::string& h = header[i];
    if (h.rfind("sparsity_", 0) != 0) {
      throw IoError(path.string() + ": unexpected column '" + h + "'");
    }
    t.layer_names.push_back(h.substr(9));
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    RowParser p(path, line_no, split(line));
    if (p.size() != header.size()) {
      throw IoError(path.string() + " line " + std::to_string(line_no) +
                    ": expected " + std::to_string(header.size()) +
                    " fields");
    }
    MetricsRecord r;
    r.iteration = p.integer<long>(0);
    r.epoch = p.number(1);
    r.train_loss = p.number(2);
    r.val_loss = p.number(3);
    r.eps = {p.number(4), p.number(5)};
    r.sparsity_overall = p.number(6);
    r.params_remaining = p.integer<std::size_t>(7);
    r.wall_seconds = p.number(8);
    for (std::size_t i = kMetricsFixedCount; i < header.size(); ++i) {
      r.layer_sparsity.push_back(p.number(i));
    }
    t.records.push_back(std::move(r));
  }
  return t;
}

std::vector<ScheduleRow> read_schedule_csv(const std::filesystem::path& path) {
  auto in = open(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("iteration,epsilon_", 0) != 0) {
    throw IoError(path.string() + ": not a schedule file");
  }
  std::vector<ScheduleRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    RowParser p(path, line_no, split(line));
    if (p.size() != 6) {
      throw IoError(path.string() + " line " + std::to_string(line_no) +
                    ": expected 6 fields");
    }
    rows.push_back({p.integer<long>(0),
                    {p.number(1), p.number(2)},
                    p.integer<std::size_t>(3),
                    p.integer<std::size_t>(4),
                    p.number(5)});
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace prnn::harness
