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

#include "prnn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace prnn::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return k.front() != '.' && k.back() != '.';
}

Scalar parse_scalar(std::string_view s, const std::string& where) {
  s = trim(s);
  if (s.empty()) throw ConfigError(where, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') {
      throw ConfigError(where, "unterminated string");
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        const char n = s[++i];
        out.push_back(n == 'n' ? '\n' : n == 't' ? '\t' : n);
      } else {
        out.push_back(s[i]);
      }
    }
    return out;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  const bool floating = s.find_first_of(".eEn") != std::string_view::npos;
  if (!floating) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
  } else {
    double v = 0;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [p, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
  }
  throw ConfigError(where, "cannot parse value '" + std::string(s) + "'");
}

Value parse_value(std::string_view s, const std::string& where) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError(where, "unterminated array");
    std::vector<Scalar> items;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      items.push_back(parse_scalar(body.substr(0, comma), where));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    return items;
  }
  return std::visit([](auto&& v) -> Value { return v; }, parse_scalar(s, where));
}

// Typed accessors over a table, remembering which keys were consumed.
class Reader {
 public:
  explicit Reader(const Table& t) : table_(t) {}

  template <typename Fn>
  void with(const std::string& key, Fn&& fn) {
    const auto it = table_.find(key);
    if (it == table_.end()) return;
    used_.insert(key);
    fn(it->second);
  }

  void integer(const std::string& key, auto& out) {
    with(key, [&](const Value& v) {
      if (const auto* i = std::get_if<std::int64_t>(&v)) {
        out = static_cast<std::remove_reference_t<decltype(out)>>(*i);
      } else {
        throw ConfigError(key, "expected an integer");
      }
    });
  }
  template <typename T>
  void opt_integer(const std::string& key, std::optional<T>& out) {
    with(key, [&](const Value& v) {
      if (const auto* i = std::get_if<std::int64_t>(&v)) {
        out = static_cast<T>(*i);
      } else {
        throw ConfigError(key, "expected an integer");
      }
    });
  }
  void unsigned_integer(const std::string& key, auto& out) {
    with(key, [&](const Value& v) {
      const auto* i = std::get_if<std::int64_t>(&v);
      if (!i || *i < 0) throw ConfigError(key, "expected a non-negative integer");
      out = static_cast<std::remove_reference_t<decltype(out)>>(*i);
    });
  }
  static double as_double(const Value& v, const std::string& key) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      return static_cast<double>(*i);
    }
    throw ConfigError(key, "expected a number");
  }
  void number(const std::string& key, auto& out) {
    with(key, [&](const Value& v) {
      out = static_cast<std::remove_reference_t<decltype(out)>>(
          as_double(v, key));
    });
  }
  void opt_number(const std::string& key, std::optional<double>& out) {
    with(key, [&](const Value& v) { out = as_double(v, key); });
  }
  void boolean(const std::string& key, bool& out) {
    with(key, [&](const Value& v) {
      if (const auto* b = std::get_if<bool>(&v)) {
        out = *b;
      } else {
        throw ConfigError(key, "expected true or false");
      }
    });
  }
  void string(const std::string& key, std::string& out) {
    with(key, [&](const Value& v) {
      if (const auto* s = std::get_if<std::string>(&v)) {
        out = *s;
      } else {
        throw ConfigError(key, "expected a string");
      }
    });
  }
  template <typename Fn>
  void enumeration(const std::string& key, Fn&& parse) {
    with(key, [&](const Value& v) {
      const auto* s = std::get_if<std::string>(&v);
      if (!s) throw ConfigError(key, "expected a string");
      try {
        parse(*s);
      } catch (const ParameterError& e) {
        throw ConfigError(key, e.what());
      }
    });
  }
  template <typename T>
  void array(const std::string& key, std::vector<T>& out) {
    with(key, [&](const Value& v) {
      const auto* a = std::get_if<std::vector<Scalar>>(&v);
      if (!a) throw ConfigError(key, "expected an array");
      out.clear();
      for (const Scalar& s : *a) {
        if constexpr (std::is_floating_point_v<T>) {
          if (const auto* d = std::get_if<double>(&s)) {
            out.push_back(static_cast<T>(*d));
          } else if (const auto* i = std::get_if<std::int64_t>(&s)) {
            out.push_back(static_cast<T>(*i));
          } else {
            throw ConfigError(key, "expected numbers");
          }
        } else {
          const auto* i = std::get_if<std::int64_t>(&s);
          if (!i || *i < 0) throw ConfigError(key, "expected non-negative integers");
          out.push_back(static_cast<T>(*i));
        }
      }
    });
  }

  void reject_unknown() const {
    for (const auto& [k, v] : table_) {
      if (!used_.contains(k)) throw ConfigError(k, "unknown configuration key");
    }
  }

 private:
  const Table& table_;
  std::set<std::string> used_;
};

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

Table parse_toml(std::string_view text) {
  Table table;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where, "malformed section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_key(name)) throw ConfigError(where, "invalid section name");
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw ConfigError(where, "invalid key");
    const std::string full =
        section.empty() ? std::string(key) : section + "." + std::string(key);
    if (table.contains(full)) throw ConfigError(where, "duplicate key " + full);
    table[full] = parse_value(line.substr(eq + 1), where + " (" + full + ")");
  }
  return table;
}

void apply_override(Table& table, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(std::string(assignment), "override must be key=value");
  }
  const std::string key(trim(assignment.substr(0, eq)));
  if (!valid_key(key)) throw ConfigError(key, "invalid key");
  table[key] = parse_value(assignment.substr(eq + 1), key);
}

std::string_view to_string(PruneMode m) noexcept {
  switch (m) {
    case PruneMode::kNone:
      return "none";
    case PruneMode::kGradual:
      return "gradual";
    case PruneMode::kHard:
      return "hard";
  }
  return "none";
}

ExperimentConfig config_from_table(const Table& table) {
  ExperimentConfig c;
  Reader r(table);
  r.unsigned_integer("seed", c.seed);
  r.string("out", c.out_dir);
  r.integer("epochs", c.epochs);
  r.integer("iters_per_epoch", c.iters_per_epoch);
  r.boolean("record_wall_time", c.record_wall_time);

  r.enumeration("task.kind",
                [&](const std::string& s) { c.task.kind = nn::parse_task(s); });
  r.unsigned_integer("task.seq_len", c.task.seq_len);
  r.unsigned_integer("task.batch_size", c.task.batch_size);
  r.unsigned_integer("task.val_size", c.task.val_size);

  r.enumeration("model.cell",
                [&](const std::string& s) { c.model.cell = nn::parse_cell(s); });
  r.enumeration("model.activation", [&](const std::string& s) {
    c.model.activation = nn::parse_activation(s);
  });
  r.unsigned_integer("model.hidden", c.model.hidden);
  r.unsigned_integer("model.depth", c.model.depth);

  r.number("optim.learning_rate", c.optim.learning_rate);
  r.number("optim.momentum", c.optim.momentum);
  r.number("optim.clip_norm", c.optim.clip_norm);

  r.enumeration("prune.mode", [&](const std::string& s) {
    if (s == "none") {
      c.prune.mode = PruneMode::kNone;
    } else if (s == "gradual") {
      c.prune.mode = PruneMode::kGradual;
    } else if (s == "hard") {
      c.prune.mode = PruneMode::kHard;
    } else {
      throw ParameterError("expected none, gradual or hard");
    }
  });
  r.number("prune.ramp_factor", c.prune.ramp_factor);
  r.number("prune.percentile", c.prune.percentile);
  r.integer("prune.calibration_epochs", c.prune.calibration_epochs);
  r.string("prune.calibration_file", c.prune.calibration_file);
  r.integer("prune.hard_prune_epoch", c.prune.hard_prune_epoch);
  r.opt_integer("prune.hard_keep", c.prune.hard_keep);
  r.opt_number("prune.hard_sparsity", c.prune.hard_sparsity);
  for (std::size_t t = 0; t < nn::kLayerTypeCount; ++t) {
    const std::string p =
        "prune." + std::string(nn::to_string(static_cast<nn::LayerType>(t))) +
        ".";
    auto& s = c.prune.schedule[t];
    r.boolean(p + "enabled", s.enabled);
    r.opt_integer(p + "start_itr", s.start_itr);
    r.opt_integer(p + "ramp_itr", s.ramp_itr);
    r.opt_integer(p + "end_itr", s.end_itr);
    r.opt_integer(p + "freq", s.freq);
    r.opt_number(p + "start_slope", s.start_slope);
    r.opt_number(p + "ramp_slope", s.ramp_slope);
  }

  r.array("bench.sizes", c.bench.sizes);
  r.array("bench.sparsities", c.bench.sparsities);
  r.enumeration("bench.layer_type", [&](const std::string& s) {
    c.bench.layer_type = sparse::parse_bench_layer(s);
  });
  r.integer("bench.repetitions", c.bench.repetitions);
  r.integer("bench.warmup", c.bench.warmup);
  r.unsigned_integer("bench.threads", c.bench.threads);

  r.reject_unknown();
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  require(epochs >= 1, "epochs", "must be >= 1");
  require(iters_per_epoch >= 1, "iters_per_epoch", "must be >= 1");
  require(task.seq_len >= 2, "task.seq_len", "must be >= 2");
  require(task.batch_size >= 1, "task.batch_size", "must be >= 1");
  require(task.val_size >= 1, "task.val_size", "must be >= 1");
  require(model.hidden >= 1, "model.hidden", "must be >= 1");
  require(model.depth >= 1, "model.depth", "must be >= 1");
  require(std::isfinite(optim.learning_rate) && optim.learning_rate >= 0.0f,
          "optim.learning_rate", "must be finite and >= 0");
  require(optim.momentum >= 0.0f && optim.momentum < 1.0f, "optim.momentum",
          "must lie in [0, 1)");
  require(optim.clip_norm >= 0.0f, "optim.clip_norm", "must be >= 0");
  require(prune.ramp_factor >= prune::kMinRampFactor &&
              prune.ramp_factor <= prune::kMaxRampFactor,
          "prune.ramp_factor", "must lie in [1.5, 2.0]");
  require(prune.percentile > 0.0 && prune.percentile <= 1.0,
          "prune.percentile", "must lie in (0, 1]");
  require(prune.calibration_epochs >= 1, "prune.calibration_epochs",
          "must be >= 1");
  require(prune.hard_prune_epoch >= 0, "prune.hard_prune_epoch", "must be >= 0");
  if (prune.mode == PruneMode::kHard) {
    require(prune.hard_prune_epoch < epochs, "prune.hard_prune_epoch",
            "must lie in [0, epochs)");
  }
  require(!(prune.hard_keep && prune.hard_sparsity), "prune.hard_keep",
          "give at most one of hard_keep and hard_sparsity");
  if (prune.hard_keep) {
    require(*prune.hard_keep >= 1, "prune.hard_keep", "must be >= 1");
  }
  if (prune.hard_sparsity) {
    require(*prune.hard_sparsity >= 0.0 && *prune.hard_sparsity < 1.0,
            "prune.hard_sparsity", "must lie in [0, 1)");
  }
  for (std::size_t t = 0; t < nn::kLayerTypeCount; ++t) {
    const auto& s = prune.schedule[t];
    const std::string p =
        "prune." + std::string(nn::to_string(static_cast<nn::LayerType>(t)));
    if (s.freq) require(*s.freq >= 1, (p + ".freq").c_str(), "must be >= 1");
    if (s.start_slope) {
      require(*s.start_slope >= 0.0, (p + ".start_slope").c_str(),
              "must be >= 0");
    }
  }
  require(!bench.sizes.empty(), "bench.sizes", "must not be empty");
  for (std::size_t s : bench.sizes) require(s >= 1, "bench.sizes", "must be >= 1");
  for (double s : bench.sparsities) {
    require(s >= 0.0 && s < 1.0, "bench.sparsities", "must lie in [0, 1)");
  }
  require(bench.repetitions >= 30, "bench.repetitions", "must be >= 30");
  require(bench.warmup >= 5, "bench.warmup", "must be >= 5");
  require(bench.threads >= 1, "bench.threads", "must be >= 1");
}

ExperimentConfig parse_config(std::string_view text) {
  return config_from_table(parse_toml(text));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, p);
  if (std::isfinite(v) && s.find_first_of(".eE") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string to_toml(const ExperimentConfig& c) {
  std::ostringstream o;
  auto flt = [](float v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, p);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  };
  auto str = [](std::string_view s) {
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') out.push_back('\\');
      out.push_back(ch);
    }
    return out + "\"";
  };
  o << "seed = " << c.seed << "\n"
    << "out = " << str(c.out_dir) << "\n"
    << "epochs = " << c.epochs << "\n"
    << "iters_per_epoch = " << c.iters_per_epoch << "\n"
    << "record_wall_time = " << (c.record_wall_time ? "true" : "false") << "\n"
    << "\n[task]\n"
    << "kind = " << str(nn::to_string(c.task.kind)) << "\n"
    << "seq_len = " << c.task.seq_len << "\n"
    << "batch_size = " << c.task.batch_size << "\n"
    << "val_size = " << c.task.val_size << "\n"
    << "\n[model]\n"
    << "cell = " << str(nn::to_string(c.model.cell)) << "\n"
    << "activation = " << str(nn::to_string(c.model.activation)) << "\n"
    << "hidden = " << c.model.hidden << "\n"
    << "depth = " << c.model.depth << "\n"
    << "\n[optim]\n"
    << "learning_rate = " << flt(c.optim.learning_rate) << "\n"
    << "momentum = " << flt(c.optim.momentum) << "\n"
    << "clip_norm = " << flt(c.optim.clip_norm) << "\n"
    << "\n[prune]\n"
    << "mode = " << str(to_string(c.prune.mode)) << "\n"
    << "ramp_factor = " << format_double(c.prune.ramp_factor) << "\n"
    << "percentile = " << format_double(c.prune.percentile) << "\n"
    << "calibration_epochs = " << c.prune.calibration_epochs << "\n"
    << "calibration_file = " << str(c.prune.calibration_file) << "\n"
    << "hard_prune_epoch = " << c.prune.hard_prune_epoch << "\n";
  if (c.prune.hard_keep) o << "hard_keep = " << *c.prune.hard_keep << "\n";
  if (c.prune.hard_sparsity) {
    o << "hard_sparsity = " << format_double(*c.prune.hard_sparsity) << "\n";
  }
  for (std::size_t t = 0; t < nn::kLayerTypeCount; ++t) {
    const auto& s = c.prune.schedule[t];
    o << "\n[prune." << nn::to_string(static_cast<nn::LayerType>(t)) << "]\n"
      << "enabled = " << (s.enabled ? "true" : "false") << "\n";
    if (s.start_itr) o << "start_itr = " << *s.start_itr << "\n";
    if (s.ramp_itr) o << "ramp_itr = " << *s.ramp_itr << "\n";
    if (s.end_itr) o << "end_itr = " << *s.end_itr << "\n";
    if (s.freq) o << "freq = " << *s.freq << "\n";
    if (s.start_slope) o << "start_slope = " << format_double(*s.start_slope) << "\n";
    if (s.ramp_slope) o << "ramp_slope = " << format_double(*s.ramp_slope) << "\n";
  }
  o << "\n[bench]\nsizes = [";
  for (std::size_t i = 0; i < c.bench.sizes.size(); ++i) {
    o << (i ? ", " : "") << c.bench.sizes[i];
  }
  o << "]\nsparsities = [";
  for (std::size_t i = 0; i < c.bench.sparsities.size(); ++i) {
    o << (i ? ", " : "") << format_double(c.bench.sparsities[i]);
  }
  o << "]\n"
    << "layer_type = " << str(sparse::to_string(c.bench.layer_type)) << "\n"
    << "repetitions = " << c.bench.repetitions << "\n"
    << "warmup = " << c.bench.warmup << "\n"
    << "threads = " << c.bench.threads << "\n";
  return o.str();
}

}  // namespace prnn::harness
