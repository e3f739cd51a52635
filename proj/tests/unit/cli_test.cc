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

#include "hmsge/cli.h"

#include <gtest/gtest.h>

#include <sstream>

#include "common/test_support.h"
#include "hmsge/eval.h"
#include "hmsge/model_io.h"
#include "hmsge/similarity.h"
#include "hmsge/synth.h"
#include "hmsge/tsv.h"

namespace hmsge {
namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hmsge");
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

// Synthesizes a small data set and trains a model once for the suite.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir();
    ASSERT_EQ(Cli({"synth", "--n", "40", "--k", "4", "--noise", "0.2",
                   "--out-dir", Path("data")})
                  .code,
              0);
    WriteFile(Path("small.json"),
              R"({"modality_x": {"n_clusters": 4, "bandwidth": 0.2},
                  "modality_y": {"n_clusters": 4, "bandwidth": 0.2},
                  "joint": {"n_clusters": 4, "bandwidth": 0.2},
                  "k1": 2, "k2": 2, "optimizer": {"max_steps": 20}})");
    const CliResult train = Cli({"train", "--x", Path("data/X.tsv"), "--y",
                           Path("data/Y.tsv"), "--config", Path("small.json"),
                           "--out", Path("model.bin")});
    ASSERT_EQ(train.code, 0) << train.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string Path(const std::string& name) { return dir_->File(name); }

  static testing::TempDir* dir_;
};

testing::TempDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, SynthDefaultsWriteThreeFiles) {
  const CliResult r = Cli({"synth", "--out-dir", Path("defaults")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"X.tsv", "Y.tsv", "gold.tsv"}) {
    EXPECT_EQ(SplitLines(ReadFile(Path(std::string("defaults/") + f))).size(),
              100u);
  }
}

TEST_F(CliTest, SynthIsReproducible) {
  ASSERT_EQ(Cli({"synth", "--seed", "7", "--out-dir", Path("s1")}).code, 0);
  ASSERT_EQ(Cli({"synth", "--seed", "7", "--out-dir", Path("s2")}).code, 0);
  for (const char* f : {"/X.tsv", "/Y.tsv", "/gold.tsv"}) {
    EXPECT_EQ(ReadFile(Path("s1") + f), ReadFile(Path("s2") + f));
  }
}

TEST_F(CliTest, UsageErrorsExitNonzero) {
  EXPECT_EQ(Cli({"synth", "--k", "0", "--out-dir", Path("bad")}).code,
            kExitValidation);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitValidation);
  EXPECT_EQ(Cli({"train", "--x", Path("data/X.tsv")}).code, kExitValidation);
  EXPECT_EQ(Cli({"eval", "--model", Path("model.bin")}).code, kExitValidation);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, MissingFilesAreIoErrors) {
  EXPECT_EQ(Cli({"export", "--model", Path("absent.bin"), "--what",
                 "embeddings", "--out", Path("e.tsv")})
                .code,
            kExitIo);
}

TEST_F(CliTest, TrainEchoesPreset) {
  const CliResult r = Cli({"train", "--x", Path("data/X.tsv"), "--y",
                     Path("data/Y.tsv"), "--preset", "skipgram", "--config",
                     Path("small.json"), "--out", Path("sg.bin"), "--verbose"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"k1\": 2"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"k2\": 2"), std::string::npos);
  EXPECT_NE(r.err.find("branch joint iteration 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, TrainRejectsUnknownMissingWord) {
  WriteFile(Path("missing.tsv"), "zebra\ty\n");
  const CliResult r = Cli({"train", "--x", Path("data/X.tsv"), "--y",
                     Path("data/Y.tsv"), "--config", Path("small.json"),
                     "--missing", Path("missing.tsv"), "--out", Path("m2.bin")});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("zebra"), std::string::npos) << r.err;
}

TEST_F(CliTest, EvalSelfConsistentRatingsAndGold) {
  const TrainedModel m = LoadModel(Path("model.bin"));
  const Matrix c = CosineMatrix(m.z_embed.embedding);
  std::string ratings;
  for (int a = 0; a < 10; ++a) {
    for (int b = a + 1; b < 10; ++b) {
      ratings += m.vocab.word(a) + "\t" + m.vocab.word(b) + "\t" +
                 FormatDouble(c(a, b)) + "\n";
    }
  }
  WriteFile(Path("ratings.tsv"), ratings);
  const CliResult r = Cli({"eval", "--model", Path("model.bin"), "--ratings",
                     Path("ratings.tsv"), "--out", Path("report.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("joint\tspearman\t1\t"), std::string::npos) << r.out;
  EXPECT_EQ(ReadFile(Path("report.tsv")), r.out);

  // Gold equal to the clustering that eval itself produces.
  const auto cw = CategorizeAndScore(
      m.z_embed.embedding, m.vocab, LoadGold(Path("data/gold.tsv")),
      {.bandwidth = m.config.joint.bandwidth}, 0);
  std::string gold;
  for (std::size_t i = 0; i < m.vocab.size(); ++i) {
    gold += m.vocab.word(i) + "\tk" + std::to_string(cw.clusters.labels[i]) +
            "\n";
  }
  WriteFile(Path("cw_gold.tsv"), gold);
  const CliResult g = Cli({"eval", "--model", Path("model.bin"), "--gold",
                     Path("cw_gold.tsv")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_NE(g.out.find("joint\tfscore\t1\t"), std::string::npos) << g.out;
}

TEST_F(CliTest, EvalUnknownRatingWord) {
  WriteFile(Path("bad_ratings.tsv"), "w0000\tzebra\t1\nw0000\tw0001\t2\n");
  const CliResult r = Cli({"eval", "--model", Path("model.bin"), "--ratings",
                     Path("bad_ratings.tsv")});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("zebra"), std::string::npos);
}

TEST_F(CliTest, NeighborsTable) {
  const CliResult r = Cli({"neighbors", "--model", Path("model.bin"), "--word",
                     "w0000", "--which", "x", "--ratio", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = SplitLines(r.out);
  ASSERT_GE(lines.size(), 2u);
  EXPECT_EQ(lines[0], "word\tcosine");
  EXPECT_EQ(Cli({"neighbors", "--model", Path("model.bin"), "--word", "zebra"})
                .code,
            kExitValidation);
}

TEST_F(CliTest, ExportAffinityIsSymmetricWithUnitDiagonal) {
  ASSERT_EQ(Cli({"export", "--model", Path("model.bin"), "--what", "affinity",
                 "--out", Path("aff.tsv")})
                .code,
            0);
  const std::string text = ReadFile(Path("aff.tsv"));
  const auto lines = SplitLines(text);
  ASSERT_EQ(lines.size(), 41u);
  std::vector<std::vector<double>> w;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = SplitTabs(lines[i]);
    ASSERT_EQ(fields.size(), 41u);
    w.emplace_back();
    for (std::size_t k = 1; k < fields.size(); ++k) {
      w.back().push_back(*ParseDouble(fields[k]));
    }
  }
  for (std::size_t j = 0; j < w.size(); ++j) {
    EXPECT_EQ(w[j][j], 1.0);
    for (std::size_t k = 0; k < w.size(); ++k) EXPECT_EQ(w[j][k], w[k][j]);
  }

  // Community blocks: intra-community cells exceed inter-community cells.
  const GoldCategories gold = LoadGold(Path("data/gold.tsv"));
  const auto header = SplitTabs(lines[0]);
  double intra = 0, inter = 0;
  int ni = 0, nx = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (j == k) continue;
      const bool same = gold.at(std::string(header[j + 1])) ==
                        gold.at(std::string(header[k + 1]));
      (same ? intra : inter) += w[j][k];
      ++(same ? ni : nx);
    }
  }
  EXPECT_GT(intra / ni, inter / nx);
}

TEST_F(CliTest, ExportEmbeddingsRoundTrip) {
  for (const char* which : {"x", "y", "joint"}) {
    ASSERT_EQ(Cli({"export", "--model", Path("model.bin"), "--what",
                   "embeddings", "--which", which, "--out", Path("emb.tsv")})
                  .code,
              0);
    const TrainedModel m = LoadModel(Path("model.bin"));
    const FeatureMatrix e = LoadFeatures(Path("emb.tsv"), "E");
    EXPECT_EQ(e.vocab, m.vocab);
    const Branch b = std::string(which) == "x"   ? Branch::kX
                     : std::string(which) == "y" ? Branch::kY
                                                 : Branch::kJoint;
    EXPECT_TRUE(BitIdentical(e.data, m.Embedding(b).embedding));
  }
}

TEST_F(CliTest, ExportTraceListsEveryStep) {
  ASSERT_EQ(Cli({"export", "--model", Path("model.bin"), "--what", "trace",
                 "--out", Path("trace.tsv")})
                .code,
            0);
  const std::string text = ReadFile(Path("trace.tsv"));
  const auto lines = SplitLines(text);
  EXPECT_EQ(lines[0], "branch\titeration\tstep\tobjective");
  EXPECT_EQ(lines.size(), LoadModel(Path("model.bin")).trace.size() + 1);
}

}  // namespace
}  // namespace hmsge
