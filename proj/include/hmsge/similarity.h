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

#ifndef HMSGE_SIMILARITY_H_
#define HMSGE_SIMILARITY_H_

#include <span>

#include "hmsge/datamodel.h"

namespace hmsge {

// Probabilities below this are raised to it (and the row renormalized) so the
// cross-entropy never takes log(0).
inline constexpr double kProbabilityFloor = 1e-12;

// Row-stochastic affinity with a zero diagonal: row j is a distribution over
// the other N - 1 nodes.
struct NormalizedAffinity {
  Matrix probs;

  std::size_t size() const { return static_cast<std::size_t>(probs.rows()); }
};

// Cosine of the angle between u and v, clamped to [-1, 1]. Throws
// ValidationError on length mismatch or a zero vector.
double CosineSimilarity(std::span<const double> u, std::span<const double> v);

// Matrix of row cosines. Identical rows give exactly 1 and the result is
// exactly symmetric. `names` only decorates the error for a zero row.
Matrix CosineMatrix(const Matrix& e, const Vocabulary* names = nullptr);

// S_l(E): weights exp(-(1 - cos(e_j, e_k)) / l), unit diagonal.
SimilarityGraph PairwiseSimilarity(const Matrix& e, double bandwidth,
                                   const Vocabulary* names = nullptr);

// Zeroes the diagonal, divides each row by its sum, then applies the
// probability floor. Throws ValidationError if a row has no positive
// off-diagonal weight.
NormalizedAffinity RowNormalize(const SimilarityGraph& g);
// Same, reusing the graph's storage.
NormalizedAffinity RowNormalize(SimilarityGraph&& g);

// -(1/N) sum_j sum_{k != j} target[j][k] * log(model[j][k]).
double CrossEntropy(const NormalizedAffinity& model,
                    const NormalizedAffinity& target);

}  // namespace hmsge

#endif  // HMSGE_SIMILARITY_H_
