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

#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <set>
#include <thread>

#include "hmsge/error.h"
#include "hmsge/seed.h"
#include "hmsge/similarity.h"
#include "hmsge/tsv.h"

namespace hmsge {
namespace {

constexpr std::uint64_t kInitTag = 0x1417;

std::vector<std::size_t> Indices(const std::vector<std::string>& words,
                                 const Vocabulary& vocab) {
  std::vector<std::size_t> rows;
  for (const auto& w : words) rows.push_back(vocab.At(w));
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::vector<bool> PresentMask(std::size_t n,
                              const std::vector<std::size_t>& missing) {
  std::vector<bool> present(n, true);
  for (std::size_t r : missing) present[r] = false;
  return present;
}

std::vector<Eigen::Index> PresentRows(const std::vector<bool>& present) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < present.size(); ++i) {
    if (present[i]) rows.push_back(static_cast<Eigen::Index>(i));
  }
  return rows;
}

// S_l over present rows; pairs touching an absent row are NaN.
SimilarityGraph GraphOnPresent(const Matrix& features,
                               const std::vector<bool>& present,
                               double bandwidth, const Vocabulary& vocab) {
  const auto rows = PresentRows(present);
  const Eigen::Index n = features.rows();
  SimilarityGraph g;
  g.weights = Matrix::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  if (static_cast<Eigen::Index>(rows.size()) == n) {
    return PairwiseSimilarity(features, bandwidth, &vocab);
  }
  Matrix sub(static_cast<Eigen::Index>(rows.size()), features.cols());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sub.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
    names.push_back(vocab.word(static_cast<std::size_t>(rows[i])));
  }
  const Vocabulary sub_vocab(names);
  const SimilarityGraph sg = PairwiseSimilarity(sub, bandwidth, &sub_vocab);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < rows.size(); ++b) {
      g.weights(rows[a], rows[b]) = sg.weights(static_cast<Eigen::Index>(a),
                                               static_cast<Eigen::Index>(b));
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) g.weights(j, j) = 1.0;
  return g;
}

// Substitutes missing rows from the other modality's graph. Pairs of words
// missing one modality each have no observed similarity anywhere; they get
// the kernel value of orthogonal vectors.
SimilarityGraph FillMissing(const SimilarityGraph& own,
                            const std::vector<std::size_t>& missing,
                            const SimilarityGraph& other, double bandwidth) {
  SimilarityGraph g = ReplaceRowsAndColumns(own, missing, other);
  const double neutral = std::exp(-1.0 / bandwidth);
  for (Eigen::Index j = 0; j < g.weights.rows(); ++j) {
    for (Eigen::Index k = 0; k < g.weights.cols(); ++k) {
      if (std::isnan(g.weights(j, k))) g.weights(j, k) = neutral;
    }
  }
  return g;
}

Matrix InitOnPresent(const Matrix& features, const std::vector<bool>& present,
                     int dim, InitMethod method, std::uint64_t seed) {
  if (method == InitMethod::kRandom) {
    return RandomInit(features.rows(), dim, seed);
  }
  const auto rows = PresentRows(present);
  if (static_cast<Eigen::Index>(rows.size()) == features.rows()) {
    return SvdInit(features, dim);
  }
  Matrix sub(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sub.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
  }
  const Matrix sub_init = SvdInit(sub, dim);
  Matrix init = Matrix::Zero(features.rows(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    init.row(rows[i]) = sub_init.row(static_cast<Eigen::Index>(i));
  }
  return init;
}

void CopyRows(Matrix& target, const Matrix& source,
              const std::vector<std::size_t>& rows) {
  for (std::size_t r : rows) {
    target.row(static_cast<Eigen::Index>(r)) =
        source.row(static_cast<Eigen::Index>(r));
  }
}

SgeConfig StageConfig(const ModalityConfig& m, int iterations,
                      const PipelineConfig& config) {
  return {.modality = m,
          .iterations = iterations,
          .kmeans_restarts = config.kmeans_restarts,
          .order = config.loss_order};
}

}  // namespace

void MissingModalitySpec::Validate(const Vocabulary& vocab) const {
  std::set<std::string> x_set;
  for (const auto& w : missing_x) {
    if (!vocab.Contains(w)) {
      throw ValidationError("missing-modality word '" + w +
                            "' is not in the vocabulary");
    }
    if (!x_set.insert(w).second) {
      throw ValidationError("word '" + w + "' listed twice as missing x");
    }
  }
  std::set<std::string> y_set;
  for (const auto& w : missing_y) {
    if (!vocab.Contains(w)) {
      throw ValidationError("missing-modality word '" + w +
                            "' is not in the vocabulary");
    }
    if (x_set.count(w) != 0) {
      throw ValidationError("word '" + w +
                            "' is listed as missing in both modalities");
    }
    if (!y_set.insert(w).second) {
      throw ValidationError("word '" + w + "' listed twice as missing y");
    }
  }
}

MissingModalitySpec ParseMissingSpec(std::string_view text) {
  MissingModalitySpec spec;
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = SplitTabs(lines[i]);
    if (fields.size() != 2 || (fields[1] != "x" && fields[1] != "y")) {
      throw ValidationError("missing list: line " + std::to_string(i + 1) +
                            ": expected 'word<TAB>x' or 'word<TAB>y'");
    }
    (fields[1] == "x" ? spec.missing_x : spec.missing_y)
        .emplace_back(fields[0]);
  }
  return spec;
}

MissingModalitySpec LoadMissingSpec(const std::string& path) {
  return ParseMissingSpec(ReadFile(path));
}

std::pair<FeatureMatrix, FeatureMatrix> AlignModalities(
    const FeatureMatrix& x, const FeatureMatrix& y,
    const MissingModalitySpec& missing) {
  const std::set<std::string> mx(missing.missing_x.begin(),
                                 missing.missing_x.end());
  const std::set<std::string> my(missing.missing_y.begin(),
                                 missing.missing_y.end());
  std::vector<std::string> words = x.vocab.words();
  for (const auto& w : y.vocab.words()) {
    if (!x.vocab.Contains(w)) words.push_back(w);
  }
  for (const auto& w : words) {
    if (!x.vocab.Contains(w) && mx.count(w) == 0) {
      throw ValidationError("word '" + w + "' has " + y.modality +
                            " features but no " + x.modality + " features");
    }
    if (!y.vocab.Contains(w) && my.count(w) == 0) {
      throw ValidationError("word '" + w + "' has " + x.modality +
                            " features but no " + y.modality + " features");
    }
  }
  Vocabulary vocab(words);
  missing.Validate(vocab);

  const auto build = [&](const FeatureMatrix& src,
                         const std::set<std::string>& absent) {
    FeatureMatrix out;
    out.vocab = vocab;
    out.modality = src.modality;
    out.data = Matrix::Zero(static_cast<Eigen::Index>(vocab.size()),
                            src.data.cols());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      const auto row = src.vocab.IndexOf(vocab.word(i));
      if (row && absent.count(vocab.word(i)) == 0) {
        out.data.row(static_cast<Eigen::Index>(i)) =
            src.data.row(static_cast<Eigen::Index>(*row));
      }
    }
    return out;
  };
  return {build(x, mx), build(y, my)};
}

Matrix SvdInit(const Matrix& features, int dim) {
  Eigen::MatrixXd centered = features;
  centered.rowwise() -= centered.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  const Eigen::Index keep =
      std::min<Eigen::Index>(dim, svd.singularValues().size());
  Matrix init = Matrix::Zero(features.rows(), dim);
  init.leftCols(keep) =
      svd.matrixU().leftCols(keep) * svd.singularValues().head(keep).asDiagonal();
  return init;
}

Matrix RandomInit(Eigen::Index rows, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix init(rows, dim);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) init(r, c) = normal(rng);
  }
  return init;
}

std::uint64_t BranchSeed(std::uint64_t seed, Branch branch) {
  return DeriveSeed(seed, {static_cast<std::uint64_t>(branch)});
}

Layer1Result RunLayer1(const FeatureMatrix& x, const FeatureMatrix& y,
                       const PipelineConfig& config,
                       const MissingModalitySpec& missing, int threads) {
  if (!(x.vocab == y.vocab)) {
    throw ValidationError(
        "layer 1: modalities are not aligned on the same vocabulary");
  }
  x.Validate();
  y.Validate();
  const Vocabulary& vocab = x.vocab;
  const std::size_t n = vocab.size();
  config.ValidateFor(n);
  missing.Validate(vocab);
  const ModalityConfig& mx = config.modality_x;
  const ModalityConfig& my = config.modality_y;
  if (!missing.empty() && mx.embed_dim != my.embed_dim) {
    throw ValidationError(
        "inductive inference needs equal embed_dim for both modalities");
  }

  const auto rows_x = Indices(missing.missing_x, vocab);
  const auto rows_y = Indices(missing.missing_y, vocab);
  const auto present_x = PresentMask(n, rows_x);
  const auto present_y = PresentMask(n, rows_y);
  const FeatureMatrix xs = ScaleFeatures(x, present_x);
  const FeatureMatrix ys = ScaleFeatures(y, present_y);

  const SimilarityGraph raw_x =
      GraphOnPresent(xs.data, present_x, mx.bandwidth, vocab);
  const SimilarityGraph raw_y =
      GraphOnPresent(ys.data, present_y, my.bandwidth, vocab);
  SimilarityGraph g0x = FillMissing(raw_x, rows_x, raw_y, mx.bandwidth);
  SimilarityGraph g0y = FillMissing(raw_y, rows_y, raw_x, my.bandwidth);

  const std::uint64_t seed_x = BranchSeed(config.seed, Branch::kX);
  const std::uint64_t seed_y = BranchSeed(config.seed, Branch::kY);
  Matrix init_x = InitOnPresent(xs.data, present_x, mx.embed_dim, config.init,
                                DeriveSeed(seed_x, {kInitTag}));
  Matrix init_y = InitOnPresent(ys.data, present_y, my.embed_dim, config.init,
                                DeriveSeed(seed_y, {kInitTag}));
  const Matrix own_x = init_x;
  CopyRows(init_x, init_y, rows_x);
  CopyRows(init_y, own_x, rows_y);

  SgeBranch bx(Branch::kX, {std::move(init_x), 0}, std::move(g0x),
               StageConfig(mx, config.k1, config), config.optimizer, seed_x);
  SgeBranch by(Branch::kY, {std::move(init_y), 0}, std::move(g0y),
               StageConfig(my, config.k1, config), config.optimizer, seed_y);

  for (int i = 1; i <= config.k1; ++i) {
    // Snapshots of G_{i-1}; neither branch sees the other's update for i.
    const SimilarityGraph prev_x = bx.graph();
    const SimilarityGraph prev_y = by.graph();
    const TargetSubstitution sub_x{rows_x, &prev_y, &by.initial_graph()};
    const TargetSubstitution sub_y{rows_y, &prev_x, &bx.initial_graph()};
    const SimilarityGraph* other_x = mx.beta > 0.0 ? &prev_y : nullptr;
    const SimilarityGraph* other_y = my.beta > 0.0 ? &prev_x : nullptr;

    if (threads > 1) {
      std::exception_ptr failure;
      std::thread worker([&] {
        try {
          bx.Step(other_x, &sub_x);
        } catch (...) {
          failure = std::current_exception();
        }
      });
      std::exception_ptr own_failure;
      try {
        by.Step(other_y, &sub_y);
      } catch (...) {
        own_failure = std::current_exception();
      }
      worker.join();
      if (failure) std::rethrow_exception(failure);
      if (own_failure) std::rethrow_exception(own_failure);
    } else {
      bx.Step(other_x, &sub_x);
      by.Step(other_y, &sub_y);
    }
  }

  Layer1Result result;
  result.x = bx.state();
  result.y = by.state();
  result.graph_x = bx.graph();
  result.graph_y = by.graph();
  result.initial_x = bx.initial_graph();
  result.initial_y = by.initial_graph();
  result.trace = bx.trace();
  result.trace.insert(result.trace.end(), by.trace().begin(),
                      by.trace().end());
  result.communities_x = bx.communities();
  result.communities_y = by.communities();
  return result;
}

Layer2Result RunLayer2(const EmbeddingState& x, const EmbeddingState& y,
                       const PipelineConfig& config) {
  if (x.embedding.rows() != y.embedding.rows()) {
    throw ValidationError("layer 2: embeddings have different row counts");
  }
  for (const Matrix* m : {&x.embedding, &y.embedding}) {
    for (Eigen::Index j = 0; j < m->rows(); ++j) {
      if (!(m->row(j).squaredNorm() > 0.0)) {
        throw ValidationError("layer 2: zero layer-1 embedding in row " +
                              std::to_string(j));
      }
    }
  }
  const Eigen::Index n = x.embedding.rows();
  Layer2Result result;
  result.z0.resize(n, x.embedding.cols() + y.embedding.cols());
  result.z0 << NormalizeRows(x.embedding), NormalizeRows(y.embedding);

  ModalityConfig joint = config.joint;
  joint.beta = 0.0;
  result.initial = PairwiseSimilarity(result.z0, joint.bandwidth);
  const std::uint64_t seed = BranchSeed(config.seed, Branch::kJoint);
  EmbeddingState init;
  init.embedding = config.init == InitMethod::kSvd
                       ? SvdInit(result.z0, joint.embed_dim)
                       : RandomInit(n, joint.embed_dim,
                                    DeriveSeed(seed, {kInitTag}));
  SgeResult run = RunSge(init, result.initial,
                         StageConfig(joint, config.k2, config),
                         config.optimizer, seed, {}, Branch::kJoint);
  result.z = std::move(run.state);
  result.graph = std::move(run.graph);
  result.trace = std::move(run.trace);
  return result;
}

TrainedModel RunPipeline(const FeatureMatrix& x, const FeatureMatrix& y,
                         const PipelineConfig& config, int threads) {
  return InductiveInfer(x, y, MissingModalitySpec{}, config, threads);
}

TrainedModel InductiveInfer(const FeatureMatrix& x, const FeatureMatrix& y,
                            const MissingModalitySpec& missing,
                            const PipelineConfig& config, int threads) {
  Layer1Result layer1 = RunLayer1(x, y, config, missing, threads);
  Layer2Result layer2 = RunLayer2(layer1.x, layer1.y, config);

  TrainedModel model;
  model.vocab = x.vocab;
  model.config = config;
  model.x_embed = std::move(layer1.x);
  model.y_embed = std::move(layer1.y);
  model.z0 = std::move(layer2.z0);
  model.z_embed = std::move(layer2.z);
  model.graph_x = std::move(layer1.graph_x);
  model.graph_y = std::move(layer1.graph_y);
  model.graph_z = std::move(layer2.graph);
  model.trace = std::move(layer1.trace);
  model.trace.insert(model.trace.end(), layer2.trace.begin(),
                     layer2.trace.end());
  return model;
}

}  // namespace hmsge
