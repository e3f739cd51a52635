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

#ifndef HMSGE_SGE_H_
#define HMSGE_SGE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hmsge/clustering.h"
#include "hmsge/datamodel.h"
#include "hmsge/similarity.h"

namespace hmsge {

// Inputs of the coupled embedding objective
//
//   (1 - alpha) L(S_l(E), g_prev) + alpha L(S_l(E), g_init)
//       + beta L(S_l(E), g_other)
//
// The graphs are borrowed and must outlive this struct. g_other must be set
// exactly when beta > 0.
struct SgeObjectiveSpec {
  double alpha = 0.0;
  double beta = 0.0;
  const SimilarityGraph* g_prev = nullptr;
  const SimilarityGraph* g_init = nullptr;
  const SimilarityGraph* g_other = nullptr;
  double bandwidth = 1.0;
  LossOrder order = LossOrder::kEmbeddingIsModel;
};

// Objective with its targets normalized once, for repeated evaluation.
class SgeObjective {
 public:
  explicit SgeObjective(const SgeObjectiveSpec& spec);

  std::size_t size() const { return n_; }

  // Throws ValidationError on a dimension mismatch or a zero row.
  double Value(const Matrix& e) const;
  double ValueAndGradient(const Matrix& e, Matrix& gradient) const;

 private:
  struct Term {
    double weight;
    NormalizedAffinity target;
    Matrix log_target;  // only for LossOrder::kGraphIsModel
  };

  void CheckShape(const Matrix& e) const;
  double Evaluate(const NormalizedAffinity& model) const;

  std::size_t n_ = 0;
  double bandwidth_ = 1.0;
  LossOrder order_ = LossOrder::kEmbeddingIsModel;
  std::vector<Term> terms_;
  Matrix combined_target_;      // sum of weight * target
  Matrix combined_log_target_;  // sum of weight * log target (kGraphIsModel)
};

double Objective(const EmbeddingState& e, const SgeObjectiveSpec& spec);
Matrix ObjectiveGradient(const EmbeddingState& e, const SgeObjectiveSpec& spec);

// Scales every row to unit length. The objective is invariant under it.
Matrix NormalizeRows(const Matrix& e);

struct EmbeddingStepResult {
  EmbeddingState state;
  // Objective of the starting point followed by every accepted step; empty
  // when max_steps is 0.
  std::vector<double> trace;
};

// Gradient descent over row directions: every row keeps its starting norm
// (the objective ignores norms) and each trial E - step * grad is retracted
// back onto those norms. A trial is accepted only if the objective does not
// increase; rejected trials halve the step, accepted ones multiply it by
// opt.growth. The initial step is learning_rate * N because the objective is
// a per-word mean. A zero starting row gets a seeded random direction and the
// mean norm of the other rows. Throws NumericError if a trial objective is
// not finite.
EmbeddingStepResult EmbeddingStep(const EmbeddingState& start,
                                  const SgeObjectiveSpec& spec,
                                  const OptimizerConfig& opt,
                                  std::uint64_t seed);

// Multiplies weights[j][k] by mu wherever communities differ.
SimilarityGraph AttenuateCrossCommunity(const SimilarityGraph& g,
                                        const ClusterAssignment& communities,
                                        double mu);

struct GraphUpdateResult {
  SimilarityGraph graph;
  ClusterAssignment communities;
};

// S_l(E) followed by cross-community attenuation over kmeans(E; n_clusters).
GraphUpdateResult GraphUpdate(const EmbeddingState& e, int n_clusters,
                              double mu, double bandwidth, int restarts,
                              std::uint64_t seed);

// Copies rows and columns `rows` of `source` into `target`.
SimilarityGraph ReplaceRowsAndColumns(const SimilarityGraph& target,
                                      const std::vector<std::size_t>& rows,
                                      const SimilarityGraph& source);

struct SgeConfig {
  ModalityConfig modality;
  int iterations = 1;
  int kmeans_restarts = 10;
  LossOrder order = LossOrder::kEmbeddingIsModel;
};

// Graphs of the other modality used when rows of this branch's targets are
// substituted (missing-modality words).
struct TargetSubstitution {
  std::vector<std::size_t> rows;
  const SimilarityGraph* source_prev = nullptr;  // other branch, G_{i-1}
  const SimilarityGraph* source_init = nullptr;  // other branch, G_0
};

// One SGE branch advanced one iteration at a time so that coupled branches
// can exchange graphs between iterations.
class SgeBranch {
 public:
  SgeBranch(Branch tag, EmbeddingState init, SimilarityGraph g0,
            SgeConfig config, OptimizerConfig opt, std::uint64_t seed);

  // Runs iteration i = iteration() + 1: embedding step against G_{i-1}, G_0
  // and `other_prev` (required iff beta > 0), then the graph update.
  void Step(const SimilarityGraph* other_prev,
            const TargetSubstitution* substitution = nullptr);

  Branch tag() const { return tag_; }
  int iteration() const { return state_.iteration; }
  const EmbeddingState& state() const { return state_; }
  const SimilarityGraph& graph() const { return graph_; }
  const SimilarityGraph& initial_graph() const { return g0_; }
  const std::vector<TraceEntry>& trace() const { return trace_; }
  const std::vector<ClusterAssignment>& communities() const {
    return communities_;
  }
  const SgeConfig& config() const { return config_; }

 private:
  Branch tag_;
  EmbeddingState state_;
  SimilarityGraph g0_;
  SimilarityGraph graph_;
  SgeConfig config_;
  OptimizerConfig opt_;
  std::uint64_t seed_;
  std::vector<TraceEntry> trace_;
  std::vector<ClusterAssignment> communities_;
};

// Returns the other branch's graph G_{i-1} for iteration i (1-based).
using OtherGraphProvider = std::function<const SimilarityGraph*(int)>;

struct SgeResult {
  EmbeddingState state;
  SimilarityGraph graph;
  std::vector<TraceEntry> trace;
  std::vector<ClusterAssignment> communities;
};

// K alternations of EmbeddingStep and GraphUpdate starting from G_0 = g0.
// The provider is consulted only when beta > 0.
SgeResult RunSge(const EmbeddingState& init, const SimilarityGraph& g0,
                 const SgeConfig& config, const OptimizerConfig& opt,
                 std::uint64_t seed, const OtherGraphProvider& other = {},
                 Branch tag = Branch::kX);

}  // namespace hmsge

#endif  // HMSGE_SGE_H_
