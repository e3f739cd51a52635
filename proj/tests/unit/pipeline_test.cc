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

#include "hmsge/pipeline.h"

#include <gtest/gtest.h>

#include <chrono>

#include "common/test_support.h"
#include "hmsge/clustering.h"
#include "hmsge/config.h"
#include "hmsge/error.h"
#include "hmsge/similarity.h"
#include "hmsge/synth.h"

namespace hmsge {
namespace {

PipelineConfig SmallConfig() {
  PipelineConfig c = TattribPreset();
  for (ModalityConfig* m : {&c.modality_x, &c.modality_y, &c.joint}) {
    m->n_clusters = 3;
    m->bandwidth = 0.2;
    m->embed_dim = 5;
  }
  c.k1 = 2;
  c.k2 = 2;
  c.optimizer.max_steps = 20;
  c.kmeans_restarts = 5;
  c.seed = 3;
  return c;
}

PlantedData SmallData(std::uint64_t seed = 42) {
  PlantedSpec spec;
  spec.n_words = 30;
  spec.n_communities = 3;
  spec.dim_x = 6;
  spec.dim_y = 6;
  spec.noise_x = spec.noise_y = 0.2;
  spec.seed = seed;
  return GeneratePlanted(spec);
}

TEST(SvdInitTest, PreservesCenteredGramMatrix) {
  std::mt19937_64 rng(40);
  const Matrix f = testing::RandomMatrix(12, 4, rng);
  const Matrix e = SvdInit(f, 4);
  const Matrix centered = f.rowwise() - f.colwise().mean();
  EXPECT_LT((e * e.transpose() - centered * centered.transpose())
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
  const Matrix wide = SvdInit(f, 6);
  EXPECT_EQ(wide.cols(), 6);
  EXPECT_EQ(wide.rightCols(2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Layer1Test, UncoupledEqualsIndependentRuns) {
  const PlantedData data = SmallData();
  PipelineConfig config = SmallConfig();
  config.modality_x.beta = config.modality_y.beta = 0.0;
  const Layer1Result l1 = RunLayer1(data.x, data.y, config);

  const auto solo = [&](const FeatureMatrix& f, const ModalityConfig& m,
                        Branch tag) {
    const Matrix scaled = ScaleFeatures(f).data;
    SgeConfig sc{m, config.k1, config.kmeans_restarts, config.loss_order};
    return RunSge({SvdInit(scaled, m.embed_dim), 0},
                  PairwiseSimilarity(scaled, m.bandwidth), sc,
                  config.optimizer, BranchSeed(config.seed, tag), {}, tag);
  };
  const SgeResult x = solo(data.x, config.modality_x, Branch::kX);
  const SgeResult y = solo(data.y, config.modality_y, Branch::kY);
  EXPECT_TRUE(BitIdentical(l1.x.embedding, x.state.embedding));
  EXPECT_TRUE(BitIdentical(l1.y.embedding, y.state.embedding));
  EXPECT_TRUE(BitIdentical(l1.graph_x.weights, x.graph.weights));
  EXPECT_TRUE(BitIdentical(l1.graph_y.weights, y.graph.weights));
}

TEST(Layer1Test, ThreadCountDoesNotChangeResults) {
  const PlantedData data = SmallData();
  const PipelineConfig config = SmallConfig();
  const TrainedModel a = RunPipeline(data.x, data.y, config, 1);
  const TrainedModel b = RunPipeline(data.x, data.y, config, 2);
  EXPECT_TRUE(BitIdentical(a, b));
}

TEST(Layer1Test, SwappingModalitiesSwapsOutputs) {
  const PlantedData data = SmallData();
  PipelineConfig config = SmallConfig();
  config.modality_x.beta = 0.05;
  config.modality_y.beta = 0.2;
  config.modality_y.alpha = 0.3;
  FeatureMatrix x = data.x, y = data.y;
  PipelineConfig swapped = config;
  std::swap(swapped.modality_x, swapped.modality_y);
  const Layer1Result a = RunLayer1(x, y, config);
  const Layer1Result b = RunLayer1(y, x, swapped);
  // The branches draw k-means seeds by position, but these well-separated
  // inputs make every restart agree on the partition.
  EXPECT_TRUE(BitIdentical(a.x.embedding, b.y.embedding));
  EXPECT_TRUE(BitIdentical(a.y.embedding, b.x.embedding));
  EXPECT_TRUE(BitIdentical(a.graph_x.weights, b.graph_y.weights));
  EXPECT_TRUE(BitIdentical(a.graph_y.weights, b.graph_x.weights));
}

TEST(Layer1Test, TraceIsMonotone) {
  const PlantedData data = SmallData();
  const Layer1Result l1 = RunLayer1(data.x, data.y, SmallConfig());
  std::string violation;
  EXPECT_TRUE(testing::TraceNonIncreasing(l1.trace, &violation)) << violation;
}

TEST(Layer1Test, RejectsMisalignedVocabularies) {
  const PlantedData data = SmallData();
  FeatureMatrix y = data.y;
  std::vector<std::string> words = y.vocab.words();
  std::swap(words[0], words[1]);
  y.vocab = Vocabulary(words);
  EXPECT_THROW(RunLayer1(data.x, y, SmallConfig()), ValidationError);
}

TEST(Layer2Test, NoOptimizerStepsLeavesSvdInit) {
  const PlantedData data = SmallData();
  PipelineConfig config = SmallConfig();
  const Layer1Result l1 = RunLayer1(data.x, data.y, config);
  config.optimizer.max_steps = 0;
  const Layer2Result l2 = RunLayer2(l1.x, l1.y, config);
  EXPECT_EQ(l2.z0.cols(), 10);
  EXPECT_TRUE(BitIdentical(l2.z.embedding, SvdInit(l2.z0, 5)));
}

TEST(Layer2Test, DuplicatedModalityKeepsCosines) {
  std::mt19937_64 rng(41);
  const EmbeddingState x{testing::RandomMatrix(15, 4, rng), 0};
  PipelineConfig config = SmallConfig();
  config.optimizer.max_steps = 0;
  const Layer2Result l2 = RunLayer2(x, x, config);
  EXPECT_LT((CosineMatrix(l2.z0) - CosineMatrix(x.embedding))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
}

TEST(PipelineTest, DeterministicAndFast) {
  PlantedSpec spec;
  const PlantedData data = GeneratePlanted(spec);
  PipelineConfig config = TattribPreset();
  config.k1 = 1;
  config.k2 = 1;
  config.optimizer.max_steps = 1;
  const auto start = std::chrono::steady_clock::now();
  const TrainedModel a = RunPipeline(data.x, data.y, config);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  EXPECT_LT(seconds, 5.0);
  EXPECT_TRUE(BitIdentical(a, RunPipeline(data.x, data.y, config)));
}

TEST(InductiveTest, EmptySpecMatchesPipeline) {
  const PlantedData data = SmallData();
  const PipelineConfig config = SmallConfig();
  EXPECT_TRUE(BitIdentical(InductiveInfer(data.x, data.y, {}, config),
                           RunPipeline(data.x, data.y, config)));
}

TEST(InductiveTest, DroppedWordLandsInItsCommunity) {
  PlantedSpec spec;
  spec.n_words = 60;
  spec.n_communities = 3;
  spec.noise_x = spec.noise_y = 0.2;
  const PlantedData data = GeneratePlanted(spec);
  const std::string word = data.x.vocab.word(7);
  auto [y, missing] = DropModality(data.y, {word}, Branch::kY);
  PipelineConfig config = SmallConfig();
  config.modality_y.embed_dim = config.modality_x.embed_dim;
  const TrainedModel m = InductiveInfer(data.x, y, missing, config);
  const Matrix c = CosineMatrix(m.y_embed.embedding);
  std::vector<std::pair<double, int>> order;
  for (int k = 0; k < 60; ++k) {
    if (k != 7) order.push_back({-c(7, k), k});
  }
  std::sort(order.begin(), order.end());
  int same = 0;
  for (int i = 0; i < 5; ++i) {
    same += data.gold.labels[order[i].second] == data.gold.labels[7];
  }
  EXPECT_GE(same, 4);
}

TEST(InductiveTest, NeedsEqualDimensions) {
  const PlantedData data = SmallData();
  auto [y, missing] = DropModality(data.y, {data.y.vocab.word(0)}, Branch::kY);
  PipelineConfig config = SmallConfig();
  config.modality_y.embed_dim = 4;
  EXPECT_THROW(InductiveInfer(data.x, y, missing, config), ValidationError);
}

TEST(MissingSpecTest, ParseAndValidate) {
  const MissingModalitySpec s = ParseMissingSpec("a\tx\nb\ty\n");
  EXPECT_EQ(s.missing_x, (std::vector<std::string>{"a"}));
  EXPECT_EQ(s.missing_y, (std::vector<std::string>{"b"}));
  EXPECT_THROW(ParseMissingSpec("a\tz\n"), ValidationError);
  const Vocabulary vocab({"a", "b", "c"});
  EXPECT_NO_THROW(s.Validate(vocab));
  MissingModalitySpec both{{"a"}, {"a"}};
  EXPECT_THROW(both.Validate(vocab), ValidationError);
  MissingModalitySpec unknown{{"zebra"}, {}};
  try {
    unknown.Validate(vocab);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("zebra"), std::string::npos);
  }
}

TEST(AlignTest, ReordersAndAppendsOneSidedWords) {
  const FeatureMatrix x = ParseFeatures("a\t1\nb\t2\nc\t3\n", "X");
  const FeatureMatrix y = ParseFeatures("c\t30\na\t10\nd\t40\n", "Y");
  MissingModalitySpec missing{{"d"}, {"b"}};
  const auto [ax, ay] = AlignModalities(x, y, missing);
  EXPECT_EQ(ax.vocab.words(), (std::vector<std::string>{"a", "b", "c", "d"}));
  EXPECT_EQ(ay.vocab, ax.vocab);
  EXPECT_EQ(ay.data(0, 0), 10.0);
  EXPECT_EQ(ay.data(1, 0), 0.0);
  EXPECT_EQ(ax.data(3, 0), 0.0);
  EXPECT_THROW(AlignModalities(x, y), ValidationError);
}

}  // namespace
}  // namespace hmsge
