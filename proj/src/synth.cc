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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "hmsge/error.h"
#include "hmsge/seed.h"
#include "hmsge/tsv.h"

namespace hmsge {
namespace {

enum StreamTag : std::uint64_t {
  kLabels = 1,
  kCentroidsX,
  kCentroidsY,
  kReassign,
  kNoiseX,
  kNoiseY,
};

Matrix SphereCentroids(int k, int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix c(k, dim);
  for (int i = 0; i < k; ++i) {
    do {
      for (int d = 0; d < dim; ++d) c(i, d) = normal(rng);
    } while (c.row(i).squaredNorm() == 0.0);
    c.row(i).normalize();
  }
  return c;
}

Matrix Features(const Matrix& centroids, const std::vector<int>& which,
                double noise, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(static_cast<Eigen::Index>(which.size()), centroids.cols());
  for (std::size_t i = 0; i < which.size(); ++i) {
    for (Eigen::Index d = 0; d < centroids.cols(); ++d) {
      m(static_cast<Eigen::Index>(i), d) =
          centroids(which[i], d) + noise * normal(rng);
    }
  }
  return m;
}

std::string WordName(int i, int n) {
  const int width = std::max(4, static_cast<int>(std::to_string(n - 1).size()));
  std::string digits = std::to_string(i);
  return "w" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') +
         digits;
}

}  // namespace

void PlantedSpec::Validate() const {
  if (n_words < 2) throw ValidationError("synth: need at least 2 words");
  if (n_communities < 1) {
    throw ValidationError("synth: community count must be positive");
  }
  if (n_communities > n_words) {
    throw ValidationError("synth: more communities than words");
  }
  if (dim_x < 1 || dim_y < 1) {
    throw ValidationError("synth: dimensions must be positive");
  }
  if (!(noise_x >= 0.0) || !(noise_y >= 0.0)) {
    throw ValidationError("synth: noise must be non-negative");
  }
  if (!(consistency >= 0.0 && consistency <= 1.0)) {
    throw ValidationError("synth: consistency must lie in [0, 1]");
  }
}

PlantedData GeneratePlanted(const PlantedSpec& spec) {
  spec.Validate();
  const int n = spec.n_words;
  const int k = spec.n_communities;

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % k;
  std::mt19937_64 label_rng(DeriveSeed(spec.seed, {kLabels}));
  std::shuffle(labels.begin(), labels.end(), label_rng);

  std::mt19937_64 cx_rng(DeriveSeed(spec.seed, {kCentroidsX}));
  std::mt19937_64 cy_rng(DeriveSeed(spec.seed, {kCentroidsY}));
  const Matrix centroids_x = SphereCentroids(k, spec.dim_x, cx_rng);
  const Matrix centroids_y = SphereCentroids(k, spec.dim_y, cy_rng);

  const int consistent =
      static_cast<int>(std::lround(spec.consistency * static_cast<double>(k)));
  std::vector<int> y_identity = labels;
  std::mt19937_64 reassign_rng(DeriveSeed(spec.seed, {kReassign}));
  std::uniform_int_distribution<int> any(0, k - 1);
  for (int& c : y_identity) {
    if (c >= consistent) c = any(reassign_rng);
  }

  std::vector<std::string> words;
  for (int i = 0; i < n; ++i) words.push_back(WordName(i, n));
  const Vocabulary vocab(words);

  std::mt19937_64 nx_rng(DeriveSeed(spec.seed, {kNoiseX}));
  std::mt19937_64 ny_rng(DeriveSeed(spec.seed, {kNoiseY}));
  PlantedData data;
  data.x = {vocab, Features(centroids_x, labels, spec.noise_x, nx_rng), "X"};
  data.y = {vocab, Features(centroids_y, y_identity, spec.noise_y, ny_rng),
            "Y"};
  data.gold.labels = labels;
  data.gold.k_effective = k;
  return data;
}

GoldCategories GoldFromAssignment(const Vocabulary& vocab,
                                  const ClusterAssignment& gold) {
  if (gold.size() != vocab.size()) {
    throw ValidationError("gold assignment does not match vocabulary");
  }
  GoldCategories out;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out.emplace(vocab.word(i), "c" + std::to_string(gold.labels[i]));
  }
  return out;
}

std::pair<FeatureMatrix, MissingModalitySpec> DropModality(
    const FeatureMatrix& m, const std::vector<std::string>& words,
    Branch modality) {
  if (modality == Branch::kJoint) {
    throw ValidationError("drop modality: expected x or y");
  }
  FeatureMatrix out = m;
  MissingModalitySpec spec;
  for (const auto& w : words) {
    out.data.row(static_cast<Eigen::Index>(m.vocab.At(w))).setZero();
    (modality == Branch::kX ? spec.missing_x : spec.missing_y).push_back(w);
  }
  return {std::move(out), std::move(spec)};
}

void WritePlanted(const std::string& dir, const PlantedData& data) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  WriteFeatures((base / "X.tsv").string(), data.x.vocab, data.x.data);
  WriteFeatures((base / "Y.tsv").string(), data.y.vocab, data.y.data);
  std::string gold;
  for (std::size_t i = 0; i < data.x.vocab.size(); ++i) {
    gold += data.x.vocab.word(i) + "\tc" + std::to_string(data.gold.labels[i]) +
            "\n";
  }
  WriteFile((base / "gold.tsv").string(), gold);
}

}  // namespace hmsge
