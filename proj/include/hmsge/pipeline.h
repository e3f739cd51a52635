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

#ifndef HMSGE_PIPELINE_H_
#define HMSGE_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "hmsge/datamodel.h"
#include "hmsge/sge.h"

namespace hmsge {

// Words whose features are absent in one modality. A word may appear in at
// most one of the two lists.
struct MissingModalitySpec {
  std::vector<std::string> missing_x;
  std::vector<std::string> missing_y;

  bool empty() const { return missing_x.empty() && missing_y.empty(); }

  // Throws ValidationError for unknown words or words missing in both
  // modalities.
  void Validate(const Vocabulary& vocab) const;
};

// Reads `word \t x|y` lines.
MissingModalitySpec ParseMissingSpec(std::string_view text);
MissingModalitySpec LoadMissingSpec(const std::string& path);

// Reorders Y onto X's vocabulary. Words present in only one file must be
// declared missing in the other modality; they get zero placeholder rows and
// are appended after X's words.
std::pair<FeatureMatrix, FeatureMatrix> AlignModalities(
    const FeatureMatrix& x, const FeatureMatrix& y,
    const MissingModalitySpec& missing = {});

// Column-centered thin SVD, E0 = U_d * diag(sigma_d). Columns beyond the
// rank are zero.
Matrix SvdInit(const Matrix& features, int dim);
Matrix RandomInit(Eigen::Index rows, int dim, std::uint64_t seed);

// Sub-seed used by each branch of the hierarchy.
std::uint64_t BranchSeed(std::uint64_t seed, Branch branch);

struct Layer1Result {
  EmbeddingState x;
  EmbeddingState y;
  SimilarityGraph graph_x;
  SimilarityGraph graph_y;
  SimilarityGraph initial_x;
  SimilarityGraph initial_y;
  std::vector<TraceEntry> trace;
  std::vector<ClusterAssignment> communities_x;
  std::vector<ClusterAssignment> communities_y;
};

// K1 coupled iterations. Both branches read the other's graph from the
// previous iteration (Jacobi order), so running them on two threads gives
// the same result as running them sequentially.
Layer1Result RunLayer1(const FeatureMatrix& x, const FeatureMatrix& y,
                       const PipelineConfig& config,
                       const MissingModalitySpec& missing = {},
                       int threads = 1);

struct Layer2Result {
  Matrix z0;
  SimilarityGraph initial;
  EmbeddingState z;
  SimilarityGraph graph;
  std::vector<TraceEntry> trace;
};

// Concatenates the row-normalized layer-1 embeddings and runs an uncoupled
// SGE for K2 iterations at dimension joint.embed_dim.
Layer2Result RunLayer2(const EmbeddingState& x, const EmbeddingState& y,
                       const PipelineConfig& config);

TrainedModel RunPipeline(const FeatureMatrix& x, const FeatureMatrix& y,
                         const PipelineConfig& config, int threads = 1);

// RunPipeline where the targets of missing words in the branch lacking them
// are taken from the other modality's graphs, and their start embeddings
// from the other modality's initialization. Requires equal layer-1
// dimensions when any word is missing.
TrainedModel InductiveInfer(const FeatureMatrix& x, const FeatureMatrix& y,
                            const MissingModalitySpec& missing,
                            const PipelineConfig& config, int threads = 1);

}  // namespace hmsge

#endif  // HMSGE_PIPELINE_H_
