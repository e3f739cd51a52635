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

#include "hmsge/eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "hmsge/error.h"
#include "hmsge/similarity.h"
#include "hmsge/tsv.h"

namespace hmsge {
namespace {

std::span<const double> Row(const Matrix& m, std::size_t r) {
  return {m.data() + r * static_cast<std::size_t>(m.cols()),
          static_cast<std::size_t>(m.cols())};
}

void CheckVectors(const Matrix& vectors, const Vocabulary& vocab) {
  if (static_cast<std::size_t>(vectors.rows()) != vocab.size()) {
    throw ValidationError("vector count does not match the vocabulary");
  }
}

}  // namespace

RatingSet ParseRatings(std::string_view text, RatingKind kind) {
  RatingSet set;
  set.kind = kind;
  std::set<std::pair<std::string, std::string>> seen;
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = SplitTabs(lines[i]);
    const std::string where = "ratings: line " + std::to_string(i + 1);
    if (fields.size() != 3) {
      throw ValidationError(where + ": expected word_a, word_b, rating");
    }
    const auto rating = ParseDouble(fields[2]);
    if (!rating || !std::isfinite(*rating)) {
      throw ValidationError(where + ": bad rating '" + std::string(fields[2]) +
                            "'");
    }
    std::string a(fields[0]), b(fields[1]);
    const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    if (!seen.insert(key).second) {
      throw ValidationError(where + ": duplicate pair (" + a + ", " + b + ")");
    }
    set.pairs.push_back({std::move(a), std::move(b), *rating});
  }
  return set;
}

RatingSet LoadRatings(const std::string& path, RatingKind kind) {
  return ParseRatings(ReadFile(path), kind);
}

GoldCategories ParseGold(std::string_view text) {
  GoldCategories gold;
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = SplitTabs(lines[i]);
    if (fields.size() != 2) {
      throw ValidationError("gold: line " + std::to_string(i + 1) +
                            ": expected word, category");
    }
    auto [it, inserted] =
        gold.emplace(std::string(fields[0]), std::string(fields[1]));
    if (!inserted) {
      throw ValidationError("gold: line " + std::to_string(i + 1) +
                            ": word '" + it->first + "' listed twice");
    }
  }
  if (gold.empty()) throw ValidationError("gold: no categories");
  return gold;
}

GoldCategories LoadGold(const std::string& path) {
  return ParseGold(ReadFile(path));
}

std::vector<double> AverageRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("spearman: inputs have different lengths");
  }
  if (a.size() < 2) throw ValidationError("spearman: need at least 2 values");
  const auto ra = AverageRanks(a);
  const auto rb = AverageRanks(b);
  const double n = static_cast<double>(ra.size());
  const double mean_a = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mean_b = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - mean_a;
    const double db = rb[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    throw ValidationError("spearman: constant input, correlation undefined");
  }
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

SimilarityEvaluation EvaluateSimilarity(const Matrix& vectors,
                                        const Vocabulary& vocab,
                                        const RatingSet& ratings,
                                        bool skip_missing) {
  CheckVectors(vectors, vocab);
  SimilarityEvaluation result;
  std::set<std::string> unknown;
  std::vector<double> model, human;
  for (const RatedPair& p : ratings.pairs) {
    const auto a = vocab.IndexOf(p.word_a);
    const auto b = vocab.IndexOf(p.word_b);
    if (!a) unknown.insert(p.word_a);
    if (!b) unknown.insert(p.word_b);
    if (!a || !b) continue;
    model.push_back(CosineSimilarity(Row(vectors, *a), Row(vectors, *b)));
    human.push_back(p.rating);
  }
  if (!unknown.empty() && !skip_missing) {
    std::string list;
    for (const auto& w : unknown) list += (list.empty() ? "" : ", ") + w;
    throw ValidationError("ratings mention words without embeddings: " + list);
  }
  result.skipped_words.assign(unknown.begin(), unknown.end());
  result.pairs_used = model.size();
  result.spearman = Spearman(model, human);
  return result;
}

double SemEvalFScore(const ClusterAssignment& clusters, const Vocabulary& vocab,
                     const GoldCategories& gold) {
  if (clusters.size() != vocab.size()) {
    throw ValidationError("f-score: cluster labels do not match vocabulary");
  }
  // class -> cluster -> overlap, over covered words only
  std::map<std::string, std::map<int, double>> overlap;
  std::map<std::string, double> class_size;
  std::map<int, double> cluster_size;
  double covered = 0.0;
  for (const auto& [word, category] : gold) {
    const auto index = vocab.IndexOf(word);
    if (!index) {
      throw ValidationError("gold category word '" + word +
                            "' is not in the vocabulary");
    }
    const int cluster = clusters.labels[*index];
    overlap[category][cluster] += 1.0;
    class_size[category] += 1.0;
    cluster_size[cluster] += 1.0;
    covered += 1.0;
  }
  double score = 0.0;
  for (const auto& [category, row] : overlap) {
    double best = 0.0;
    for (const auto& [cluster, count] : row) {
      const double precision = count / cluster_size[cluster];
      const double recall = count / class_size[category];
      best = std::max(best, 2.0 * precision * recall / (precision + recall));
    }
    score += class_size[category] / covered * best;
  }
  return score;
}

CategorizationResult CategorizeAndScore(const Matrix& vectors,
                                        const Vocabulary& vocab,
                                        const GoldCategories& gold,
                                        const CategorizationParams& params,
                                        std::uint64_t seed) {
  CheckVectors(vectors, vocab);
  if (gold.empty()) throw ValidationError("categorization: empty gold set");
  const SimilarityGraph g = PairwiseSimilarity(vectors, params.bandwidth, &vocab);
  CategorizationResult result;
  result.clusters =
      ChineseWhispers(g, {.top_k = params.top_k, .max_iters = params.max_iters},
                      seed)
          .assignment;
  result.fscore = SemEvalFScore(result.clusters, vocab, gold);
  return result;
}

namespace {

std::vector<Neighbor> RankedNeighbors(const Matrix& vectors,
                                      const Vocabulary& vocab,
                                      std::string_view word) {
  CheckVectors(vectors, vocab);
  const std::size_t target = vocab.At(word);
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (i == target) continue;
    all.push_back({vocab.word(i),
                   CosineSimilarity(Row(vectors, target), Row(vectors, i))});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Neighbor& a, const Neighbor& b) {
                     if (a.cosine != b.cosine) return a.cosine > b.cosine;
                     return a.word < b.word;
                   });
  return all;
}

}  // namespace

std::vector<Neighbor> NearestNeighbors(const Matrix& vectors,
                                       const Vocabulary& vocab,
                                       std::string_view word,
                                       double threshold_ratio) {
  if (!(threshold_ratio > 0.0 && threshold_ratio <= 1.0)) {
    throw ValidationError("neighbors: ratio must lie in (0, 1]");
  }
  std::vector<Neighbor> all = RankedNeighbors(vectors, vocab, word);
  const double best = all.front().cosine;
  const double threshold = best > 0.0 ? threshold_ratio * best : best;
  std::vector<Neighbor> out;
  for (const Neighbor& n : all) {
    if (n.cosine < threshold) break;
    out.push_back(n);
  }
  return out;
}

std::vector<Neighbor> TopNeighbors(const Matrix& vectors,
                                   const Vocabulary& vocab,
                                   std::string_view word, std::size_t k) {
  std::vector<Neighbor> all = RankedNeighbors(vectors, vocab, word);
  if (all.size() > k) all.resize(k);
  return all;
}

std::vector<ScoredPair> TopPairs(const Matrix& vectors, const Vocabulary& vocab,
                                 std::size_t count) {
  CheckVectors(vectors, vocab);
  if (count < 1) throw ValidationError("top pairs: count must be >= 1");
  std::vector<ScoredPair> pairs;
  for (std::size_t a = 0; a < vocab.size(); ++a) {
    for (std::size_t b = a + 1; b < vocab.size(); ++b) {
      pairs.push_back({vocab.word(a), vocab.word(b),
                       CosineSimilarity(Row(vectors, a), Row(vectors, b))});
    }
  }
  const std::size_t keep = std::min(count, pairs.size());
  const auto better = [](const ScoredPair& x, const ScoredPair& y) {
    if (x.cosine != y.cosine) return x.cosine > y.cosine;
    if (x.word_a != y.word_a) return x.word_a < y.word_a;
    return x.word_b < y.word_b;
  };
  std::partial_sort(pairs.begin(), pairs.begin() + keep, pairs.end(), better);
  pairs.resize(keep);
  return pairs;
}

}  // namespace hmsge
