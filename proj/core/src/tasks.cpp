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

#include "prnn/tasks.hpp"

#include <algorithm>
#include <array>

namespace prnn::nn {

namespace {

constexpr std::string_view kCorpus =
    "the harbour wakes before the town does. gulls circle the breakwater "
    "while the first boats slip their moorings and turn toward the open "
    "water. a man on the quay counts crates of ice, loses his place, and "
    "starts again from one. the tide is low and the air smells of salt and "
    "diesel and wet rope.\n"
    "by seven the market stalls are up. there are baskets of mussels and "
    "flat grey fish laid out on beds of crushed ice, bunches of parsley, "
    "sacks of onions, a table of knives that catch the light. a woman sells "
    "bread from the back of a van and knows every customer by name. the "
    "children who should be in school linger by the fountain and pretend "
    "not to notice the clock.\n"
    "when the wind comes round to the north the whole town changes. doors "
    "are shut, shutters are latched, and the old men who sit outside the "
    "cafe move their chairs to the sheltered side of the square. the sea "
    "turns the colour of slate. out past the point the waves break white "
    "over the reef, and the boats that went out at dawn come home early, "
    "one after another, riding low with whatever they managed to catch.\n"
    "in the evening the lamps along the front are lit one by one. the "
    "restaurants put out their chalk boards and the smell of frying garlic "
    "drifts down to the water. somebody is always playing music from an "
    "upstairs window, badly, and somebody else is always complaining about "
    "it. the lighthouse begins its slow turning, and the beam crosses the "
    "bay, the roofs, the hill behind the town, and the bay again.\n"
    "late at night the harbour is quiet except for the creak of hulls "
    "against the fenders and the slap of small waves on the steps. a cat "
    "walks the length of the quay as if it owns it. the ice man is asleep. "
    "the crates are stacked and counted, and tomorrow he will count them "
    "again, and lose his place, and start again from one.\n"
    "in winter the season ends and half the shops close. the hotel on the "
    "hill puts sheets over its furniture and leaves a single light burning "
    "in the office. the people who stay are the people who always stay: the "
    "fishermen, the baker, the priest, the teacher, the doctor who drives "
    "too fast on the coast road. they see each other every day and have "
    "long since run out of things to say, so they talk about the weather, "
    "which is never the same two days running and so never runs out.\n"
    "spring arrives in small ways. a window box of red flowers on the "
    "harbour master's office. the first painter of the year setting up an "
    "easel on the breakwater and squinting at the light. boats hauled up on "
    "the slipway and scraped and painted blue and white and green. the "
    "ferry timetable pinned to the board by the ticket hut, curling at the "
    "corners by the end of the first week.\n";

}  // namespace

std::string_view to_string(TaskKind k) noexcept {
  return k == TaskKind::kAdding ? "adding" : "char-lm";
}

TaskKind parse_task(std::string_view name) {
  if (name == "adding" || name == "adding-problem") return TaskKind::kAdding;
  if (name == "char-lm" || name == "char_lm") return TaskKind::kCharLm;
  throw ParameterError("unknown task '" + std::string(name) + "'");
}

std::string_view Task::embedded_corpus() noexcept { return kCorpus; }

Task Task::adding(std::size_t seq_len) {
  if (seq_len < 2) throw ParameterError("adding problem needs seq_len >= 2");
  return Task(TaskKind::kAdding, seq_len);
}

Task Task::char_lm(std::size_t seq_len, std::string corpus) {
  if (seq_len < 1) throw ParameterError("char-lm needs seq_len >= 1");
  if (corpus.size() < seq_len + 1) {
    throw ParameterError("char-lm corpus shorter than seq_len + 1");
  }
  if (corpus.size() > 100 * 1024) {
    throw ParameterError("char-lm corpus exceeds 100 KB");
  }
  Task t(TaskKind::kCharLm, seq_len);
  std::array<bool, 256> seen{};
  for (unsigned char ch : corpus) seen[ch] = true;
  for (std::size_t c = 0; c < seen.size(); ++c) {
    if (seen[c]) t.vocab_.push_back(static_cast<char>(c));
  }
  std::array<std::uint32_t, 256> index{};
  for (std::size_t i = 0; i < t.vocab_.size(); ++i) {
    index[static_cast<unsigned char>(t.vocab_[i])] =
        static_cast<std::uint32_t>(i);
  }
  t.encoded_.reserve(corpus.size());
  for (unsigned char ch : corpus) t.encoded_.push_back(index[ch]);
  t.corpus_ = std::move(corpus);
  return t;
}

std::size_t Task::input_size() const noexcept {
  return kind_ == TaskKind::kAdding ? 2 : vocab_.size();
}

std::size_t Task::output_size() const noexcept {
  return kind_ == TaskKind::kAdding ? 1 : vocab_.size();
}

OutputMode Task::output_mode() const noexcept {
  return kind_ == TaskKind::kAdding ? OutputMode::kLastStep
                                    : OutputMode::kEveryStep;
}

Batch Task::generate_batch(Rng& rng, std::size_t batch_size) const {
  Batch batch;
  batch.inputs.assign(seq_len_, DenseMatrix(batch_size, input_size()));
  if (kind_ == TaskKind::kAdding) {
    batch.regression_targets = DenseMatrix(batch_size, 1);
    const std::size_t half = seq_len_ / 2;
    for (std::size_t b = 0; b < batch_size; ++b) {
      for (std::size_t t = 0; t < seq_len_; ++t) {
        batch.inputs[t](b, 0) = rng.uniform(-1.0f, 1.0f);
      }
      const std::size_t first = rng.uniform_index(half);
      const std::size_t second = half + rng.uniform_index(seq_len_ - half);
      batch.inputs[first](b, 1) = 1.0f;
      batch.inputs[second](b, 1) = 1.0f;
      batch.regression_targets(b, 0) =
          batch.inputs[first](b, 0) + batch.inputs[second](b, 0);
    }
    return batch;
  }

  batch.class_targets.assign(seq_len_, std::vector<std::uint32_t>(batch_size));
  const std::size_t span = encoded_.size() - seq_len_;
  for (std::size_t b = 0; b < batch_size; ++b) {
    const std::size_t start = rng.uniform_index(span);
    for (std::size_t t = 0; t < seq_len_; ++t) {
      batch.inputs[t](b, encoded_[start + t]) = 1.0f;
      batch.class_targets[t][b] = encoded_[start + t + 1];
    }
  }
  return batch;
}

LossAndGrad<float> Task::loss(std::span<const DenseMatrix> outputs,
                              const Batch& batch) const {
  if (kind_ == TaskKind::kAdding) {
    return mse_loss<float>(outputs, batch.regression_targets);
  }
  return softmax_cross_entropy<float>(outputs, batch.class_targets);
}

}  // namespace prnn::nn
