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

#include "hmsge/clustering.h"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "hmsge/error.h"
#include "hmsge/seed.h"

namespace hmsge {
namespace {

constexpr int kMaxLloydIterations = 300;

double SquaredDistance(const Matrix& a, Eigen::Index i, const Matrix& b,
                       Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

Matrix KMeansPlusPlus(const Matrix& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  Matrix centroids(k, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::Index first = pick(rng);
  centroids.row(0) = points.row(first);
  chosen[static_cast<std::size_t>(first)] = true;

  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    d2[static_cast<std::size_t>(i)] = SquaredDistance(points, i, centroids, 0);
  }
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index next = -1;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double w = d2[static_cast<std::size_t>(i)];
        if (w <= 0.0) continue;
        next = i;
        target -= w;
        if (target < 0.0) break;
      }
    } else {
      // Every point coincides with a centroid; take any unused index.
      std::vector<Eigen::Index> unused;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) unused.push_back(i);
      }
      std::uniform_int_distribution<std::size_t> any(0, unused.size() - 1);
      next = unused[any(rng)];
    }
    centroids.row(c) = points.row(next);
    chosen[static_cast<std::size_t>(next)] = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)],
                   SquaredDistance(points, i, centroids, c));
    }
  }
  return centroids;
}

struct LloydResult {
  std::vector<int> labels;
  double inertia = 0.0;
};

LloydResult Lloyd(const Matrix& points, Matrix centroids) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centroids.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<int> counts(static_cast<std::size_t>(k));

  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = SquaredDistance(points, i, centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = SquaredDistance(points, i, centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    std::fill(counts.begin(), counts.end(), 0);
    for (int label : labels) ++counts[static_cast<std::size_t>(label)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      // Empty cluster: steal the worst-fitting point from a cluster that can
      // spare one.
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int owner = labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] < 2) continue;
        const double d = SquaredDistance(points, i, centroids, owner);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) continue;
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      changed = true;
    }

    centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      centroids.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) /= counts[static_cast<std::size_t>(c)];
      }
    }
    if (!changed) break;
  }

  LloydResult result;
  result.labels = std::move(labels);
  for (Eigen::Index i = 0; i < n; ++i) {
    result.inertia += SquaredDistance(
        points, i, centroids, result.labels[static_cast<std::size_t>(i)]);
  }
  return result;
}

}  // namespace

ClusterAssignment ClusterAssignment::FromLabels(const std::vector<int>& raw) {
  ClusterAssignment out;
  out.labels.resize(raw.size());
  std::map<int, int> remap;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] =
        remap.emplace(raw[i], static_cast<int>(remap.size()));
    out.labels[i] = it->second;
  }
  out.k_effective = static_cast<int>(remap.size());
  return out;
}

KMeansResult KMeans(const Matrix& points, int k, int restarts,
                    std::uint64_t seed) {
  if (points.rows() == 0 || points.cols() == 0) {
    throw ValidationError("kmeans: empty input");
  }
  if (k < 1) throw ValidationError("kmeans: k must be positive");
  if (k > points.rows()) {
    throw ValidationError("kmeans: k = " + std::to_string(k) +
                          " exceeds the number of points " +
                          std::to_string(points.rows()));
  }
  if (restarts < 1) throw ValidationError("kmeans: restarts must be >= 1");

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(DeriveSeed(seed, {static_cast<std::uint64_t>(r)}));
    LloydResult run = Lloyd(points, KMeansPlusPlus(points, k, rng));
    best.restart_inertias.push_back(run.inertia);
    if (run.inertia < best.inertia) {
      best.inertia = run.inertia;
      best.assignment = ClusterAssignment::FromLabels(run.labels);
    }
  }
  return best;
}

ChineseWhispersResult ChineseWhispers(const SimilarityGraph& g,
                                      const ChineseWhispersParams& params,
                                      std::uint64_t seed) {
  if (params.top_k < 1) throw ValidationError("chinese whispers: top_k < 1");
  if (params.max_iters < 0) {
    throw ValidationError("chinese whispers: max_iters < 0");
  }
  const std::size_t n = g.size();
  const auto& w = g.weights;

  // keep[j][k]: k is among j's strongest edges; the graph is their union.
  std::vector<std::vector<bool>> keep(n, std::vector<bool>(n, false));
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < n; ++j) {
    candidates.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j && w(j, k) > 0.0) candidates.push_back(k);
    }
    const std::size_t take =
        std::min(candidates.size(), static_cast<std::size_t>(params.top_k));
    std::partial_sort(candidates.begin(), candidates.begin() + take,
                      candidates.end(), [&](std::size_t a, std::size_t b) {
                        if (w(j, a) != w(j, b)) return w(j, a) > w(j, b);
                        return a < b;
                      });
    for (std::size_t t = 0; t < take; ++t) keep[j][candidates[t]] = true;
  }
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j && (keep[j][k] || keep[k][j])) {
        adjacency[j].emplace_back(k, w(j, k));
      }
    }
  }

  std::vector<int> labels(n);
  std::iota(labels.begin(), labels.end(), 0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::vector<double> score(n, 0.0);
  std::vector<int> touched;

  ChineseWhispersResult result;
  for (int sweep = 0; sweep < params.max_iters; ++sweep) {
    std::shuffle(order.begin(), order.end(), rng);
    bool changed = false;
    for (std::size_t node : order) {
      if (adjacency[node].empty()) continue;
      touched.clear();
      for (const auto& [neighbor, weight] : adjacency[node]) {
        const int label = labels[neighbor];
        if (score[static_cast<std::size_t>(label)] == 0.0) {
          touched.push_back(label);
        }
        score[static_cast<std::size_t>(label)] += weight;
      }
      double best = -1.0;
      for (int label : touched) {
        best = std::max(best, score[static_cast<std::size_t>(label)]);
      }
      const int current = labels[node];
      int chosen = current;
      if (score[static_cast<std::size_t>(current)] != best) {
        chosen = std::numeric_limits<int>::max();
        for (int label : touched) {
          if (score[static_cast<std::size_t>(label)] == best) {
            chosen = std::min(chosen, label);
          }
        }
      }
      for (int label : touched) score[static_cast<std::size_t>(label)] = 0.0;
      if (chosen != current) {
        labels[node] = chosen;
        changed = true;
      }
    }
    ++result.sweeps;
    std::vector<int> distinct = labels;
    std::sort(distinct.begin(), distinct.end());
    result.labels_per_sweep.push_back(static_cast<int>(
        std::unique(distinct.begin(), distinct.end()) - distinct.begin()));
    if (!changed) break;
  }
  result.assignment = ClusterAssignment::FromLabels(labels);
  return result;
}

double AdjustedRandIndex(const ClusterAssignment& a,
                         const ClusterAssignment& b) {
  if (a.size() != b.size()) {
    throw ValidationError("ARI: assignments have different lengths (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  const auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a.labels[i], b.labels[i]}] += 1.0;
    rows[a.labels[i]] += 1.0;
    cols[b.labels[i]] += 1.0;
  }
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, count] : table) index += comb2(count);
  for (const auto& [key, count] : rows) sum_a += comb2(count);
  for (const auto& [key, count] : cols) sum_b += comb2(count);
  const double pairs = comb2(static_cast<double>(a.size()));
  if (pairs == 0.0) return 1.0;
  const double expected = sum_a * sum_b / pairs;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace hmsge
