// Copyright 2026 The HM-SGE Authors.
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

#include "hmsge/datamodel.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstring>
#include <sstream>

#include "hmsge/error.h"
#include "hmsge/tsv.h"

namespace hmsge {

Vocabulary::Vocabulary(std::vector<std::string> words)
    : words_(std::move(words)) {
  if (words_.size() < 2) {
    throw ValidationError("vocabulary needs at least 2 words, got " +
                          std::to_string(words_.size()));
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto [it, inserted] = index_.emplace(words_[i], i);
    if (!inserted) {
      throw ValidationError("duplicate word '" + words_[i] +
                            "' at positions " + std::to_string(it->second) +
                            " and " + std::to_string(i));
    }
  }
}

std::optional<std::size_t> Vocabulary::IndexOf(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::At(std::string_view word) const {
  auto index = IndexOf(word);
  if (!index) {
    throw ValidationError("unknown word '" + std::string(word) + "'");
  }
  return *index;
}

void FeatureMatrix::Validate() const {
  if (rows() != vocab.size()) {
    throw ValidationError("feature matrix '" + modality + "' has " +
                          std::to_string(rows()) + " rows for " +
                          std::to_string(vocab.size()) + " words");
  }
  if (cols() < 1) {
    throw ValidationError("feature matrix '" + modality + "' has no columns");
  }
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (!std::isfinite(data(r, c))) {
        throw ValidationError("non-finite feature for word '" +
                              vocab.word(static_cast<std::size_t>(r)) +
                              "' in column " + std::to_string(c));
      }
    }
  }
}

namespace {

void CheckUnit(double value, std::string_view what, std::string_view name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError(std::string(name) + "." + std::string(what) +
                          " must lie in [0, 1]");
  }
}

}  // namespace

void ModalityConfig::Validate(std::string_view name) const {
  const std::string prefix(name);
  CheckUnit(alpha, "alpha", name);
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ValidationError(prefix + ".beta must be >= 0");
  }
  if (!(mu > 0.0 && mu < 1.0)) {
    throw ValidationError(prefix + ".mu must lie in (0, 1)");
  }
  if (n_clusters < 1) {
    throw ValidationError(prefix + ".n_clusters must be positive");
  }
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ValidationError(prefix + ".bandwidth must be positive");
  }
  if (embed_dim < 1) {
    throw ValidationError(prefix + ".embed_dim must be positive");
  }
}

void OptimizerConfig::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("optimizer.learning_rate must be positive");
  }
  if (max_steps < 0) {
    throw ValidationError("optimizer.max_steps must be non-negative");
  }
  if (!(tolerance >= 0.0)) {
    throw ValidationError("optimizer.tolerance must be non-negative");
  }
  if (!(growth >= 1.0) || !std::isfinite(growth)) {
    throw ValidationError("optimizer.growth must be >= 1");
  }
}

void PipelineConfig::Validate() const {
  modality_x.Validate("modality_x");
  modality_y.Validate("modality_y");
  joint.Validate("joint");
  if (k1 < 1) throw ValidationError("k1 must be >= 1");
  if (k2 < 1) throw ValidationError("k2 must be >= 1");
  if (kmeans_restarts < 1) {
    throw ValidationError("kmeans_restarts must be >= 1");
  }
  optimizer.Validate();
}

void PipelineConfig::ValidateFor(std::size_t n_words) const {
  Validate();
  const auto check = [n_words](const ModalityConfig& m, const char* name) {
    if (static_cast<std::size_t>(m.n_clusters) >= n_words) {
      throw ValidationError(std::string(name) + ".n_clusters (" +
                            std::to_string(m.n_clusters) +
                            ") must be smaller than the vocabulary size (" +
                            std::to_string(n_words) + ")");
    }
  };
  check(modality_x, "modality_x");
  check(modality_y, "modality_y");
  check(joint, "joint");
}

std::string_view BranchName(Branch branch) {
  switch (branch) {
    case Branch::kX:
      return "x";
    case Branch::kY:
      return "y";
    case Branch::kJoint:
      return "joint";
  }
  return "?";
}

const EmbeddingState& TrainedModel::Embedding(Branch branch) const {
  switch (branch) {
    case Branch::kX:
      return x_embed;
    case Branch::kY:
      return y_embed;
    case Branch::kJoint:
      return z_embed;
  }
  return z_embed;
}

const ModalityConfig& TrainedModel::StageConfig(Branch branch) const {
  switch (branch) {
    case Branch::kX:
      return config.modality_x;
    case Branch::kY:
      return config.modality_y;
    case Branch::kJoint:
      return config.joint;
  }
  return config.joint;
}

bool BitIdentical(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.size() == 0) return true;
  return std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

bool BitIdentical(const TrainedModel& a, const TrainedModel& b) {
  if (!(a.vocab == b.vocab) || !(a.config == b.config)) return false;
  if (a.trace.size() != b.trace.size()) return false;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    const TraceEntry& ta = a.trace[i];
    const TraceEntry& tb = b.trace[i];
    if (ta.branch != tb.branch || ta.iteration != tb.iteration ||
        ta.step != tb.step ||
        std::memcmp(&ta.objective, &tb.objective, sizeof(double)) != 0) {
      return false;
    }
  }
  return a.x_embed.iteration == b.x_embed.iteration &&
         a.y_embed.iteration == b.y_embed.iteration &&
         a.z_embed.iteration == b.z_embed.iteration &&
         BitIdentical(a.x_embed.embedding, b.x_embed.embedding) &&
         BitIdentical(a.y_embed.embedding, b.y_embed.embedding) &&
         BitIdentical(a.z0, b.z0) &&
         BitIdentical(a.z_embed.embedding, b.z_embed.embedding) &&
         BitIdentical(a.graph_x.weights, b.graph_x.weights) &&
         BitIdentical(a.graph_y.weights, b.graph_y.weights) &&
         BitIdentical(a.graph_z.weights, b.graph_z.weights);
}

FeatureMatrix ParseFeatures(std::string_view text, std::string modality) {
  const auto lines = SplitLines(text);
  std::vector<std::string> words;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, std::size_t> first_line;
  std::size_t width = 0;
  std::size_t width_line = 0;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    const auto fields = SplitTabs(lines[i]);
    if (fields.size() < 2) {
      throw ValidationError(modality + ": line " + std::to_string(line_no) +
                            ": expected a word followed by features");
    }
    const std::string word(fields[0]);
    if (word.empty()) {
      throw ValidationError(modality + ": line " + std::to_string(line_no) +
                            ": empty word");
    }
    auto [it, inserted] = first_line.emplace(word, line_no);
    if (!inserted) {
      throw ValidationError(modality + ": duplicate word '" + word +
                            "' on lines " + std::to_string(it->second) +
                            " and " + std::to_string(line_no));
    }
    const std::size_t n = fields.size() - 1;
    if (width == 0) {
      width = n;
      width_line = line_no;
    } else if (n != width) {
      throw ValidationError(
          modality + ": line " + std::to_string(line_no) + ": ragged row with " +
          std::to_string(n) + " features, line " + std::to_string(width_line) +
          " has " + std::to_string(width));
    }
    std::vector<double> values(n);
    for (std::size_t c = 0; c < n; ++c) {
      auto value = ParseDouble(fields[c + 1]);
      if (!value) {
        throw ValidationError(modality + ": line " + std::to_string(line_no) +
                              ": non-numeric field '" +
                              std::string(fields[c + 1]) + "'");
      }
      values[c] = *value;
    }
    words.push_back(word);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ValidationError(modality + ": empty feature file");

  FeatureMatrix m;
  m.modality = std::move(modality);
  m.vocab = Vocabulary(std::move(words));
  m.data.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      m.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    }
  }
  m.Validate();
  return m;
}

FeatureMatrix LoadFeatures(const std::string& path, std::string modality) {
  return ParseFeatures(ReadFile(path), std::move(modality));
}

FeatureMatrix ScaleFeatures(const FeatureMatrix& m) {
  return ScaleFeatures(m, std::vector<bool>(m.rows(), true));
}

FeatureMatrix ScaleFeatures(const FeatureMatrix& m,
                            const std::vector<bool>& use_row) {
  FeatureMatrix out = m;
  for (Eigen::Index c = 0; c < m.data.cols(); ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index r = 0; r < m.data.rows(); ++r) {
      if (!use_row[static_cast<std::size_t>(r)]) continue;
      lo = std::min(lo, m.data(r, c));
      hi = std::max(hi, m.data(r, c));
    }
    if (lo > hi) continue;                   // no rows in use
    if (lo == -1.0 && hi == 1.0) continue;  // already on the target range
    for (Eigen::Index r = 0; r < m.data.rows(); ++r) {
      if (!use_row[static_cast<std::size_t>(r)]) continue;
      out.data(r, c) =
          hi > lo ? 2.0 * (m.data(r, c) - lo) / (hi - lo) - 1.0 : 0.0;
    }
  }
  return out;
}

void WriteFeatures(const std::string& path, const Vocabulary& vocab,
                   const Matrix& data) {
  std::string text;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    text += vocab.word(static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      text += '\t';
      text += FormatDouble(data(r, c));
    }
    text += '\n';
  }
  WriteFile(path, text);
}

}  // namespace hmsge
