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

#ifndef HMSGE_SYNTH_H_
#define HMSGE_SYNTH_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hmsge/clustering.h"
#include "hmsge/datamodel.h"
#include "hmsge/eval.h"
#include "hmsge/pipeline.h"

namespace hmsge {

// Planted-community generator settings.
//
// Each modality draws its own K centroids uniformly on the unit sphere. A word
// of community c is centroid(c) plus isotropic Gaussian noise in X. In Y the
// first round(consistency * K) communities keep the same identity; words of
// the remaining communities are reassigned independently to a uniformly
// random Y centroid, so their Y features disagree with the gold partition.
struct PlantedSpec {
  int n_words = 100;
  int n_communities = 5;
  int dim_x = 10;
  int dim_y = 10;
  double noise_x = 0.25;
  double noise_y = 0.25;
  double consistency = 1.0;
  std::uint64_t seed = 42;

  void Validate() const;
};

struct PlantedData {
  FeatureMatrix x;
  FeatureMatrix y;
  ClusterAssignment gold;
};

PlantedData GeneratePlanted(const PlantedSpec& spec);

// Gold partition as word -> "c<label>".
GoldCategories GoldFromAssignment(const Vocabulary& vocab,
                                  const ClusterAssignment& gold);

// Zeroes the rows of `words` and returns the matching missing-modality spec
// for `modality` (Branch::kX or Branch::kY). Unknown words throw.
std::pair<FeatureMatrix, MissingModalitySpec> DropModality(
    const FeatureMatrix& m, const std::vector<std::string>& words,
    Branch modality);

// Writes X.tsv, Y.tsv and gold.tsv into `dir` (created if needed).
void WritePlanted(const std::string& dir, const PlantedData& data);

}  // namespace hmsge

#endif  // HMSGE_SYNTH_H_
