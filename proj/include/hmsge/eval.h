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

#ifndef HMSGE_EVAL_H_
#define HMSGE_EVAL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hmsge/clustering.h"
#include "hmsge/datamodel.h"

namespace hmsge {

enum class RatingKind { kSemantic, kVisual };

struct RatedPair {
  std::string word_a;
  std::string word_b;
  double rating = 0.0;
};

struct RatingSet {
  std::vector<RatedPair> pairs;
  RatingKind kind = RatingKind::kSemantic;
};

// `word_a \t word_b \t rating`; duplicate unordered pairs are rejected.
RatingSet ParseRatings(std::string_view text,
                       RatingKind kind = RatingKind::kSemantic);
RatingSet LoadRatings(const std::string& path,
                      RatingKind kind = RatingKind::kSemantic);

// word -> category label; may cover a subset of the vocabulary.
using GoldCategories = std::map<std::string, std::string>;

// `word \t category`.
GoldCategories ParseGold(std::string_view text);
GoldCategories LoadGold(const std::string& path);

// Mid-rank for ties, 1-based.
std::vector<double> AverageRanks(std::span<const double> values);

// Pearson correlation of the average ranks. Throws ValidationError for
// unequal lengths, fewer than two values or a constant input.
double Spearman(std::span<const double> a, std::span<const double> b);

struct SimilarityEvaluation {
  double spearman = 0.0;
  std::size_t pairs_used = 0;
  std::vector<std::string> skipped_words;
};

// Spearman between embedding cosines and human ratings. Unknown words throw
// ValidationError listing them unless skip_missing is set, in which case the
// affected pairs are dropped and the words reported.
SimilarityEvaluation EvaluateSimilarity(const Matrix& vectors,
                                        const Vocabulary& vocab,
                                        const RatingSet& ratings,
                                        bool skip_missing = false);

// Class-weighted best-match F-score: sum_c |c|/N * max_k F(c, k), computed
// over the words covered by `gold`.
double SemEvalFScore(const ClusterAssignment& clusters, const Vocabulary& vocab,
                     const GoldCategories& gold);

struct CategorizationParams {
  int top_k = 10;
  int max_iters = 50;
  double bandwidth = 1.0;
};

struct CategorizationResult {
  ClusterAssignment clusters;
  double fscore = 0.0;
};

// Chinese Whispers on S_l(vectors) over the full vocabulary, scored against
// the covered gold words.
CategorizationResult CategorizeAndScore(const Matrix& vectors,
                                        const Vocabulary& vocab,
                                        const GoldCategories& gold,
                                        const CategorizationParams& params,
                                        std::uint64_t seed);

struct Neighbor {
  std::string word;
  double cosine = 0.0;
};

// Every other word with cosine >= ratio * best cosine, best first. When the
// best cosine is not positive only the best word(s) are returned.
std::vector<Neighbor> NearestNeighbors(const Matrix& vectors,
                                       const Vocabulary& vocab,
                                       std::string_view word,
                                       double threshold_ratio = 0.9);

// The k nearest words by cosine, best first (ties by word).
std::vector<Neighbor> TopNeighbors(const Matrix& vectors,
                                   const Vocabulary& vocab,
                                   std::string_view word, std::size_t k);

struct ScoredPair {
  std::string word_a;
  std::string word_b;
  double cosine = 0.0;
};

// Highest-cosine unordered pairs; word_a precedes word_b in vocabulary
// order; ties are ordered lexicographically by (word_a, word_b).
std::vector<ScoredPair> TopPairs(const Matrix& vectors, const Vocabulary& vocab,
                                 std::size_t count);

}  // namespace hmsge

#endif  // HMSGE_EVAL_H_
