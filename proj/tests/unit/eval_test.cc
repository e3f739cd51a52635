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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common/oracles.h"
#include "common/test_support.h"
#include "hmsge/error.h"
#include "hmsge/similarity.h"

namespace hmsge {
namespace {

double Spear(std::vector<double> a, std::vector<double> b) {
  return Spearman(a, b);
}

TEST(SpearmanTest, ReferenceValues) {
  EXPECT_DOUBLE_EQ(Spear({1, 2, 3}, {10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(Spear({1, 2, 3}, {3, 2, 1}), -1.0);
  // Tie-averaged ranks (1, 2.5, 2.5, 4) and (1, 3, 2, 4): 3 / sqrt(10).
  EXPECT_NEAR(Spear({1, 2, 2, 4}, {1, 3, 2, 4}), 0.9486832980505139, 1e-15);
}

TEST(SpearmanTest, AverageRanksHandleTies) {
  const std::vector<double> v{5, 1, 5, 3};
  EXPECT_EQ(AverageRanks(v), (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(SpearmanTest, InvalidInput) {
  EXPECT_THROW(Spear({1, 1, 1}, {1, 2, 3}), ValidationError);
  EXPECT_THROW(Spear({1}, {1}), ValidationError);
  EXPECT_THROW(Spear({1, 2}, {1, 2, 3}), ValidationError);
}

TEST(SpearmanTest, MatchesOracleSymmetricAndMonotoneInvariant) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> small(0, 5);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(15), b(15);
    for (auto& v : a) v = small(rng) - 2.5;
    for (auto& v : b) v = small(rng);
    const double s = Spear(a, b);
    EXPECT_NEAR(s, testing::BruteForceSpearman(a, b), 1e-12);
    EXPECT_EQ(s, Spear(b, a));
    std::vector<double> cubed = a, exped = b;
    for (auto& v : cubed) v = v * v * v;
    for (auto& v : exped) v = std::exp(v);
    EXPECT_EQ(s, Spear(cubed, exped));
  }
}

struct Fixture {
  Vocabulary vocab = testing::NumberedVocab(8);
  Matrix vectors;
  RatingSet self;
  Fixture() {
    std::mt19937_64 rng(13);
    vectors = testing::RandomMatrix(8, 3, rng);
    const Matrix c = CosineMatrix(vectors);
    for (int a = 0; a < 8; ++a) {
      for (int b = a + 1; b < 8; ++b) {
        self.pairs.push_back({vocab.word(a), vocab.word(b), c(a, b)});
      }
    }
  }
};

TEST(EvaluateSimilarityTest, SelfConsistency) {
  Fixture f;
  EXPECT_DOUBLE_EQ(EvaluateSimilarity(f.vectors, f.vocab, f.self).spearman, 1.0);
  RatingSet negated = f.self;
  for (auto& p : negated.pairs) p.rating = -p.rating;
  EXPECT_DOUBLE_EQ(EvaluateSimilarity(f.vectors, f.vocab, negated).spearman,
                   -1.0);
}

TEST(EvaluateSimilarityTest, InvariantToRowRescaling) {
  Fixture f;
  RatingSet noisy = f.self;
  std::mt19937_64 rng(14);
  std::normal_distribution<double> n(0, 0.3);
  for (auto& p : noisy.pairs) p.rating += n(rng);
  Matrix scaled = f.vectors;
  for (int r = 0; r < 8; ++r) scaled.row(r) *= 0.5 + r;
  EXPECT_EQ(EvaluateSimilarity(f.vectors, f.vocab, noisy).spearman,
            EvaluateSimilarity(scaled, f.vocab, noisy).spearman);
}

TEST(EvaluateSimilarityTest, MissingWordsAbortOrSkip) {
  Fixture f;
  RatingSet r = f.self;
  r.pairs.push_back({"w0", "zebra", 1.0});
  try {
    EvaluateSimilarity(f.vectors, f.vocab, r);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("zebra"), std::string::npos);
  }
  const SimilarityEvaluation e =
      EvaluateSimilarity(f.vectors, f.vocab, r, /*skip_missing=*/true);
  EXPECT_EQ(e.pairs_used, f.self.pairs.size());
  EXPECT_EQ(e.skipped_words, (std::vector<std::string>{"zebra"}));
}

TEST(ParseRatingsTest, RejectsDuplicatePairs) {
  EXPECT_THROW(ParseRatings("a\tb\t1\nb\ta\t2\n"), ValidationError);
  EXPECT_EQ(ParseRatings("a\tb\t1\na\tc\t2\n").pairs.size(), 2u);
}

TEST(FScoreTest, PerfectAndSingleCluster) {
  const Vocabulary vocab = testing::NumberedVocab(8);
  GoldCategories gold;
  for (int i = 0; i < 8; ++i) gold[vocab.word(i)] = "c" + std::to_string(i / 2);
  const auto perfect =
      ClusterAssignment::FromLabels({0, 0, 1, 1, 2, 2, 3, 3});
  EXPECT_DOUBLE_EQ(SemEvalFScore(perfect, vocab, gold), 1.0);
  const auto single = ClusterAssignment::FromLabels(std::vector<int>(8, 0));
  EXPECT_DOUBLE_EQ(SemEvalFScore(single, vocab, gold), 0.4);
}

TEST(FScoreTest, MatchesOracleOnCoveredWords) {
  const Vocabulary vocab = testing::NumberedVocab(12);
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> label(0, 3);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> clusters(12);
    for (auto& v : clusters) v = label(rng);
    GoldCategories gold;
    std::vector<int> covered_clusters;
    std::vector<std::string> covered_classes;
    for (int i = 0; i < 12; ++i) {
      if (i % 4 == 3) continue;
      const std::string c = "g" + std::to_string(label(rng) % 3);
      gold[vocab.word(i)] = c;
      covered_clusters.push_back(clusters[i]);
      covered_classes.push_back(c);
    }
    const double f =
        SemEvalFScore(ClusterAssignment::FromLabels(clusters), vocab, gold);
    EXPECT_NEAR(f, testing::BruteForceFScore(covered_clusters, covered_classes),
                1e-12);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
}

TEST(NeighborsTest, DuplicateRowComesFirst) {
  std::mt19937_64 rng(16);
  Matrix v = testing::RandomMatrix(6, 3, rng);
  v.row(4) = v.row(1) * 2.0;
  const Vocabulary vocab = testing::NumberedVocab(6);
  const auto nn = NearestNeighbors(v, vocab, "w1");
  ASSERT_FALSE(nn.empty());
  EXPECT_EQ(nn[0].word, "w4");
  EXPECT_DOUBLE_EQ(nn[0].cosine, 1.0);
  const auto only = NearestNeighbors(v, vocab, "w1", 1.0);
  ASSERT_EQ(only.size(), 1u);
  EXPECT_EQ(only[0].word, "w4");
  EXPECT_THROW(NearestNeighbors(v, vocab, "nope"), ValidationError);
}

TEST(NeighborsTest, ThresholdAndOrdering) {
  std::mt19937_64 rng(17);
  const Matrix v = testing::RandomMatrix(20, 4, rng);
  const Vocabulary vocab = testing::NumberedVocab(20);
  const auto nn = NearestNeighbors(v, vocab, "w0", 0.5);
  ASSERT_FALSE(nn.empty());
  for (std::size_t i = 1; i < nn.size(); ++i) {
    EXPECT_GE(nn[i - 1].cosine, nn[i].cosine);
    EXPECT_GE(nn[i].cosine, 0.5 * nn[0].cosine);
  }
  const auto top = TopNeighbors(v, vocab, "w0", 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].word, nn[0].word);
}

TEST(TopPairsTest, DuplicateFirstAndClamp) {
  std::mt19937_64 rng(18);
  Matrix v = testing::RandomMatrix(5, 3, rng);
  v.row(3) = v.row(0);
  const Vocabulary vocab = testing::NumberedVocab(5);
  const auto pairs = TopPairs(v, vocab, 100);
  ASSERT_EQ(pairs.size(), 10u);
  EXPECT_EQ(pairs[0].word_a, "w0");
  EXPECT_EQ(pairs[0].word_b, "w3");
  EXPECT_EQ(pairs[0].cosine, 1.0);
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    EXPECT_GE(pairs[i - 1].cosine, pairs[i].cosine);
  }
}

TEST(CategorizeTest, PerfectOnSeparatedGroups) {
  Matrix v(6, 2);
  v << 1, 0, 1, 0.01, 1, -0.01, 0, 1, 0.01, 1, -0.01, 1;
  const Vocabulary vocab = testing::NumberedVocab(6);
  GoldCategories gold{{"w0", "a"}, {"w1", "a"}, {"w2", "a"},
                      {"w3", "b"}, {"w4", "b"}, {"w5", "b"}};
  CategorizationParams params;
  params.bandwidth = 0.1;
  const auto r = CategorizeAndScore(v, vocab, gold, params, 0);
  EXPECT_EQ(r.clusters.k_effective, 2);
  EXPECT_DOUBLE_EQ(r.fscore, 1.0);
}

}  // namespace
}  // namespace hmsge
