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

#ifndef HMSGE_DATAMODEL_H_
#define HMSGE_DATAMODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace hmsge {

// Row-major so that row j is contiguous and maps directly onto the model
// file layout.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Ordered set of unique words. Row j of every matrix in the toolkit refers to
// word(j).
class Vocabulary {
 public:
  Vocabulary() = default;

  // Throws ValidationError on duplicates or fewer than two words.
  explicit Vocabulary(std::vector<std::string> words);

  std::size_t size() const { return words_.size(); }
  const std::string& word(std::size_t i) const { return words_[i]; }
  const std::vector<std::string>& words() const { return words_; }

  std::optional<std::size_t> IndexOf(std::string_view word) const;
  bool Contains(std::string_view word) const {
    return IndexOf(word).has_value();
  }

  // Throws ValidationError naming the word if it is not in the vocabulary.
  std::size_t At(std::string_view word) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct FeatureMatrix {
  Vocabulary vocab;
  Matrix data;
  std::string modality;

  std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(data.cols()); }

  // Row count matches the vocabulary, at least one column, all finite.
  void Validate() const;
};

// Dense symmetric edge weights in [0, 1]. The vocabulary lives with the
// owning model; graphs are addressed by row index.
struct SimilarityGraph {
  Matrix weights;

  std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
};

struct ModalityConfig {
  double alpha = 0.1;
  double beta = 0.0;
  double mu = 0.7;
  int n_clusters = 5;
  double bandwidth = 1.0;
  int embed_dim = 15;

  // Range checks that do not depend on the vocabulary size.
  void Validate(std::string_view name) const;
  friend bool operator==(const ModalityConfig&,
                         const ModalityConfig&) = default;
};

struct OptimizerConfig {
  double learning_rate = 0.05;
  int max_steps = 200;
  // Stop once the relative objective decrease of an accepted step drops
  // below this value.
  double tolerance = 1e-6;
  // Step multiplier applied after every accepted step; rejected steps halve.
  double growth = 2.0;

  void Validate() const;
  friend bool operator==(const OptimizerConfig&,
                         const OptimizerConfig&) = default;
};

enum class InitMethod { kSvd, kRandom };

// Which side of the cross-entropy the embedding affinity occupies.
enum class LossOrder {
  kEmbeddingIsModel,  // L(p = S_l(E), q = graph)
  kGraphIsModel,      // L(p = graph, q = S_l(E))
};

struct PipelineConfig {
  ModalityConfig modality_x;
  ModalityConfig modality_y;
  ModalityConfig joint;  // beta is ignored
  int k1 = 4;
  int k2 = 2;
  OptimizerConfig optimizer;
  int kmeans_restarts = 10;
  InitMethod init = InitMethod::kSvd;
  LossOrder loss_order = LossOrder::kEmbeddingIsModel;
  std::uint64_t seed = 0;

  void Validate() const;
  // Additionally checks n_clusters < n_words for every stage.
  void ValidateFor(std::size_t n_words) const;
  friend bool operator==(const PipelineConfig&,
                         const PipelineConfig&) = default;
};

struct EmbeddingState {
  Matrix embedding;
  int iteration = 0;
};

enum class Branch : std::uint8_t { kX = 0, kY = 1, kJoint = 2 };

std::string_view BranchName(Branch branch);

// One accepted (or initial) objective value inside an embedding step.
struct TraceEntry {
  Branch branch = Branch::kX;
  int iteration = 0;
  int step = 0;
  double objective = 0.0;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct TrainedModel {
  Vocabulary vocab;
  PipelineConfig config;
  EmbeddingState x_embed;
  EmbeddingState y_embed;
  Matrix z0;  // row-normalized concatenation feeding the joint layer
  EmbeddingState z_embed;
  SimilarityGraph graph_x;
  SimilarityGraph graph_y;
  SimilarityGraph graph_z;
  std::vector<TraceEntry> trace;

  const EmbeddingState& Embedding(Branch branch) const;
  const ModalityConfig& StageConfig(Branch branch) const;
};

// Field-by-field comparison; matrices are compared bit for bit.
bool BitIdentical(const Matrix& a, const Matrix& b);
bool BitIdentical(const TrainedModel& a, const TrainedModel& b);

// Parses `word \t v1 \t ... \t vn` lines. Errors carry the line number.
FeatureMatrix LoadFeatures(const std::string& path, std::string modality);
FeatureMatrix ParseFeatures(std::string_view text, std::string modality);

// Per-column affine map onto [-1, 1]; constant columns map to 0.
FeatureMatrix ScaleFeatures(const FeatureMatrix& m);
// Same, but only rows flagged in `use_row` define and receive the scaling;
// the remaining rows are copied through untouched.
FeatureMatrix ScaleFeatures(const FeatureMatrix& m,
                            const std::vector<bool>& use_row);

// Writes a feature TSV that LoadFeatures reads back bit-exactly.
void WriteFeatures(const std::string& path, const Vocabulary& vocab,
                   const Matrix& data);

}  // namespace hmsge

#endif  // HMSGE_DATAMODEL_H_
