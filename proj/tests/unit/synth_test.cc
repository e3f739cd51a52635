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

#include "hmsge/synth.h"

#include <gtest/gtest.h>

#include "common/test_support.h"
#include "hmsge/clustering.h"
#include "hmsge/error.h"
#include "hmsge/similarity.h"
#include "hmsge/tsv.h"

namespace hmsge {
namespace {

TEST(SynthTest, ZeroNoiseGivesIdenticalCommunityRows) {
  PlantedSpec spec;
  spec.noise_x = spec.noise_y = 0.0;
  const PlantedData d = GeneratePlanted(spec);
  const Matrix c = CosineMatrix(d.x.data);
  for (int j = 0; j < spec.n_words; ++j) {
    for (int k = 0; k < spec.n_words; ++k) {
      if (d.gold.labels[j] == d.gold.labels[k]) {
        EXPECT_EQ(c(j, k), 1.0);
      }
    }
  }
}

TEST(SynthTest, SingleCommunity) {
  PlantedSpec spec;
  spec.n_communities = 1;
  const PlantedData d = GeneratePlanted(spec);
  EXPECT_EQ(d.gold.k_effective, 1);
  const auto any = KMeans(d.x.data, 1, 1, 0).assignment;
  EXPECT_EQ(AdjustedRandIndex(any, d.gold), 1.0);
}

TEST(SynthTest, DeterministicAndSeedSensitive) {
  PlantedSpec spec;
  const PlantedData a = GeneratePlanted(spec);
  const PlantedData b = GeneratePlanted(spec);
  EXPECT_TRUE(BitIdentical(a.x.data, b.x.data));
  EXPECT_TRUE(BitIdentical(a.y.data, b.y.data));
  EXPECT_EQ(a.gold.labels, b.gold.labels);
  spec.seed = 43;
  EXPECT_FALSE(BitIdentical(a.x.data, GeneratePlanted(spec).x.data));
}

TEST(SynthTest, ShapesAndBalancedCommunities) {
  PlantedSpec spec;
  spec.dim_x = 7;
  spec.dim_y = 3;
  const PlantedData d = GeneratePlanted(spec);
  EXPECT_EQ(d.x.rows(), 100u);
  EXPECT_EQ(d.x.cols(), 7u);
  EXPECT_EQ(d.y.cols(), 3u);
  std::vector<int> sizes(5, 0);
  for (int l : d.gold.labels) ++sizes[l];
  for (int s : sizes) EXPECT_EQ(s, 20);
}

TEST(SynthTest, InconsistentCommunitiesDisagreeInY) {
  PlantedSpec spec;
  spec.noise_x = spec.noise_y = 0.05;
  spec.consistency = 0.4;
  const PlantedData d = GeneratePlanted(spec);
  const double ari_x =
      AdjustedRandIndex(KMeans(d.x.data, 5, 20, 0).assignment, d.gold);
  const double ari_y =
      AdjustedRandIndex(KMeans(d.y.data, 5, 20, 0).assignment, d.gold);
  EXPECT_GT(ari_x, 0.95);
  EXPECT_LT(ari_y, ari_x);
}

TEST(SynthTest, InvalidSpecs) {
  PlantedSpec spec;
  spec.n_communities = 0;
  EXPECT_THROW(spec.Validate(), ValidationError);
  spec = PlantedSpec{};
  spec.consistency = 1.5;
  EXPECT_THROW(spec.Validate(), ValidationError);
  spec = PlantedSpec{};
  spec.noise_x = -1;
  EXPECT_THROW(spec.Validate(), ValidationError);
}

TEST(DropModalityTest, EmptyOneAndTenPercent) {
  const PlantedData d = GeneratePlanted(PlantedSpec{});
  auto [same, none] = DropModality(d.y, {}, Branch::kY);
  EXPECT_TRUE(none.empty());
  EXPECT_TRUE(BitIdentical(same.data, d.y.data));

  auto [one, spec_one] = DropModality(d.y, {"w0003"}, Branch::kY);
  int zero_rows = 0;
  for (int r = 0; r < one.data.rows(); ++r) zero_rows += one.data.row(r).norm() == 0;
  EXPECT_EQ(zero_rows, 1);
  EXPECT_EQ(spec_one.missing_y, (std::vector<std::string>{"w0003"}));

  std::vector<std::string> tenth;
  for (int i = 0; i < 100; i += 10) tenth.push_back(d.y.vocab.word(i));
  auto [dropped, spec_ten] = DropModality(d.x, tenth, Branch::kX);
  EXPECT_EQ(spec_ten.missing_x.size(), 10u);
  EXPECT_THROW(DropModality(d.x, {"nope"}, Branch::kX), ValidationError);
}

TEST(WritePlantedTest, WritesThreeFiles) {
  testing::TempDir dir;
  const PlantedData d = GeneratePlanted(PlantedSpec{});
  WritePlanted(dir.File("out"), d);
  const FeatureMatrix x = LoadFeatures(dir.File("out/X.tsv"), "X");
  EXPECT_EQ(x.rows(), 100u);
  EXPECT_TRUE(BitIdentical(x.data, d.x.data));
  EXPECT_EQ(SplitLines(ReadFile(dir.File("out/gold.tsv"))).size(), 100u);
}

}  // namespace
}  // namespace hmsge
