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

#include "hmsge/similarity.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hmsge/error.h"

namespace hmsge {
namespace {

std::string RowName(Eigen::Index row, const Vocabulary* names) {
  if (names != nullptr && static_cast<std::size_t>(row) < names->size()) {
    return "'" + names->word(static_cast<std::size_t>(row)) + "'";
  }
  return "row " + std::to_string(row);
}

// dot / sqrt(|a|^2 |b|^2): for identical inputs the quotient is exactly 1.
double CosineFromDots(double dot, double sq_a, double sq_b) {
  return std::clamp(dot / std::sqrt(sq_a * sq_b), -1.0, 1.0);
}

}  // namespace

double CosineSimilarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine: length mismatch " +
                          std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()));
  }
  double dot = 0.0, su = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    su += u[i] * u[i];
    sv += v[i] * v[i];
  }
  if (su == 0.0) throw ValidationError("cosine: first vector is zero");
  if (sv == 0.0) throw ValidationError("cosine: second vector is zero");
  return CosineFromDots(dot, su, sv);
}

Matrix CosineMatrix(const Matrix& e, const Vocabulary* names) {
  const Eigen::Index n = e.rows();
  Eigen::VectorXd sq(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sq(j) = e.row(j).squaredNorm();
    if (!(sq(j) > 0.0)) {
      throw ValidationError("zero or non-finite embedding for " +
                            RowName(j, names) + "; cosine is undefined");
    }
  }
  // Upper triangle row by row, then mirrored, so the result is exactly
  // symmetric.
  Matrix c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    c(j, j) = 1.0;
    for (Eigen::Index k = j + 1; k < n; ++k) {
      c(j, k) = CosineFromDots(e.row(j).dot(e.row(k)), sq(j), sq(k));
    }
  }
  c.triangularView<Eigen::StrictlyLower>() = c.transpose();
  return c;
}

SimilarityGraph PairwiseSimilarity(const Matrix& e, double bandwidth,
                                   const Vocabulary* names) {
  if (!(bandwidth > 0.0)) {
    throw ValidationError("bandwidth must be positive");
  }
  SimilarityGraph g;
  // Elementwise on a symmetric matrix, so symmetry is kept exactly. Done in
  // place to keep a single N x N buffer live.
  g.weights = CosineMatrix(e, names);
  g.weights.array() = ((g.weights.array() - 1.0) * (1.0 / bandwidth)).exp();
  g.weights.diagonal().setOnes();
  return g;
}

NormalizedAffinity RowNormalize(const SimilarityGraph& g) {
  return RowNormalize(SimilarityGraph(g));
}

NormalizedAffinity RowNormalize(SimilarityGraph&& g) {
  const Eigen::Index n = g.weights.rows();
  NormalizedAffinity out;
  out.probs = std::move(g.weights);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.probs(j, j) = 0.0;
    const double sum = out.probs.row(j).sum();
    if (!(sum > 0.0)) {
      throw ValidationError("row " + std::to_string(j) +
                            " has no positive off-diagonal weight");
    }
    out.probs.row(j) /= sum;

    bool floored = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != j && out.probs(j, k) < kProbabilityFloor) {
        out.probs(j, k) = kProbabilityFloor;
        floored = true;
      }
    }
    if (floored) out.probs.row(j) /= out.probs.row(j).sum();
  }
  return out;
}

double CrossEntropy(const NormalizedAffinity& model,
                    const NormalizedAffinity& target) {
  if (model.probs.rows() != target.probs.rows() ||
      model.probs.cols() != target.probs.cols()) {
    throw ValidationError("cross-entropy: dimension mismatch");
  }
  const Eigen::Index n = model.probs.rows();
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double row = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) continue;
      const double q = target.probs(j, k);
      if (q != 0.0) row += q * std::log(model.probs(j, k));
    }
    total += row;
  }
  return -total / static_cast<double>(n);
}

}  // namespace hmsge
