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

#ifndef HMSGE_CLUSTERING_H_
#define HMSGE_CLUSTERING_H_

#include <cstdint>
#include <vector>

#include "hmsge/datamodel.h"

namespace hmsge {

struct ClusterAssignment {
  std::vector<int> labels;
  int k_effective = 0;

  std::size_t size() const { return labels.size(); }

  // Relabels clusters 0, 1, ... in order of first appearance.
  static ClusterAssignment FromLabels(const std::vector<int>& raw);
};

struct KMeansResult {
  ClusterAssignment assignment;
  double inertia = 0.0;
  // Within-cluster sum of squares of every restart, in restart order.
  std::vector<double> restart_inertias;
};

// Lloyd iterations from k-means++ seeds, best of `restarts` by inertia.
// Clusters that empty out are re-seeded at the point farthest from its own
// centroid. Throws ValidationError for empty input, k < 1 or k > N.
KMeansResult KMeans(const Matrix& points, int k, int restarts,
                    std::uint64_t seed);

struct ChineseWhispersParams {
  int top_k = 10;
  int max_iters = 50;
};

struct ChineseWhispersResult {
  ClusterAssignment assignment;
  // Number of distinct labels after each completed sweep.
  std::vector<int> labels_per_sweep;
  int sweeps = 0;
};

// Label propagation on the union of every node's top_k strongest positive
// off-diagonal edges. Ties keep the current label when it is among the best,
// otherwise pick the smallest label id.
ChineseWhispersResult ChineseWhispers(const SimilarityGraph& g,
                                      const ChineseWhispersParams& params,
                                      std::uint64_t seed);

// Throws ValidationError on length mismatch. Returns 1 when both partitions
// are trivial in the same way (the index is 0/0).
double AdjustedRandIndex(const ClusterAssignment& a,
                         const ClusterAssignment& b);

}  // namespace hmsge

#endif  // HMSGE_CLUSTERING_H_
