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

#include "hmsge/sge.h"

#include <cmath>
#include <random>

#include "hmsge/error.h"
#include "hmsge/seed.h"

namespace hmsge {
namespace {

constexpr int kMaxHalvings = 60;

// P = W / S is not stored; the backward pass recomputes it row by row.
struct ModelAffinity {
  Matrix weights;          // W, kernel weights with zero diagonal
  Eigen::VectorXd sums;    // S_j
  NormalizedAffinity probs;  // P'' after the probability floor
};

ModelAffinity ComputeModelAffinity(const Matrix& e, double bandwidth) {
  ModelAffinity m;
  SimilarityGraph g = PairwiseSimilarity(e, bandwidth);
  m.probs = RowNormalize(g);
  m.weights = std::move(g.weights);
  m.weights.diagonal().setZero();
  m.sums = m.weights.rowwise().sum();
  return m;
}

}  // namespace

Matrix NormalizeRows(const Matrix& e) {
  Matrix out = e;
  for (Eigen::Index j = 0; j < out.rows(); ++j) {
    const double norm = out.row(j).norm();
    if (norm > 0.0) out.row(j) /= norm;
  }
  return out;
}

SgeObjective::SgeObjective(const SgeObjectiveSpec& spec)
    : bandwidth_(spec.bandwidth), order_(spec.order) {
  if (spec.g_prev == nullptr || spec.g_init == nullptr) {
    throw ValidationError("objective: g_prev and g_init are required");
  }
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) {
    throw ValidationError("objective: alpha must lie in [0, 1]");
  }
  if (!(spec.beta >= 0.0)) {
    throw ValidationError("objective: beta must be >= 0");
  }
  if ((spec.beta > 0.0) != (spec.g_other != nullptr)) {
    throw ValidationError(
        "objective: the other-modality graph is required exactly when "
        "beta > 0");
  }
  if (!(spec.bandwidth > 0.0)) {
    throw ValidationError("objective: bandwidth must be positive");
  }
  n_ = spec.g_prev->size();
  const auto add = [this](double weight, const SimilarityGraph& g) {
    if (g.size() != n_ || static_cast<std::size_t>(g.weights.cols()) != n_) {
      throw ValidationError("objective: graph dimension mismatch (" +
                            std::to_string(g.size()) + " vs " +
                            std::to_string(n_) + ")");
    }
    if (weight == 0.0) return;
    Term term{weight, RowNormalize(g), Matrix()};
    if (order_ == LossOrder::kGraphIsModel) {
      term.log_target = term.target.probs.array().max(kProbabilityFloor).log();
      term.log_target.diagonal().setZero();
    }
    terms_.push_back(std::move(term));
  };
  add(1.0 - spec.alpha, *spec.g_prev);
  add(spec.alpha, *spec.g_init);
  if (spec.g_other != nullptr) add(spec.beta, *spec.g_other);

  // The weighted sum of cross-entropies is linear in the targets (or in
  // their logs), so one pass over the model affinity suffices.
  const auto size = static_cast<Eigen::Index>(n_);
  combined_target_ = Matrix::Zero(size, size);
  combined_log_target_ = Matrix::Zero(size, size);
  for (const Term& t : terms_) {
    combined_target_ += t.weight * t.target.probs;
    if (order_ == LossOrder::kGraphIsModel) {
      combined_log_target_ += t.weight * t.log_target;
    }
  }
}

double SgeObjective::Evaluate(const NormalizedAffinity& model) const {
  const Eigen::Index n = model.probs.rows();
  double total = 0.0;
  if (order_ == LossOrder::kEmbeddingIsModel) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        const double q = combined_target_(j, k);
        if (k != j && q != 0.0) total += q * std::log(model.probs(j, k));
      }
    }
  } else {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k != j) total += model.probs(j, k) * combined_log_target_(j, k);
      }
    }
  }
  return -total / static_cast<double>(n);
}

void SgeObjective::CheckShape(const Matrix& e) const {
  if (static_cast<std::size_t>(e.rows()) != n_) {
    throw ValidationError("objective: embedding has " +
                          std::to_string(e.rows()) + " rows, graphs have " +
                          std::to_string(n_));
  }
  if (e.cols() < 1) throw ValidationError("objective: embedding has no columns");
}

double SgeObjective::Value(const Matrix& e) const {
  CheckShape(e);
  return Evaluate(RowNormalize(PairwiseSimilarity(e, bandwidth_)));
}

double SgeObjective::ValueAndGradient(const Matrix& e,
                                      Matrix& gradient) const {
  CheckShape(e);
  const Eigen::Index n = e.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  ModelAffinity m = ComputeModelAffinity(e, bandwidth_);
  const Matrix& p2 = m.probs.probs;

  const double value = Evaluate(m.probs);

  // Row by row: dL/dP'' (h), back through the floor renormalization
  // P'' = P' / s' and the floor P' = max(P, eps) (d), then through the first
  // normalization P = W / S and the kernel dW/dcos = W / l (gamma). Only
  // gamma is kept as a full matrix so the working set stays small.
  Matrix gamma(n, n);
  Eigen::VectorXd h(n), d(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double inv_sum = 1.0 / m.sums(j);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) {
        h(k) = 0.0;
      } else if (order_ == LossOrder::kEmbeddingIsModel) {
        h(k) = -inv_n * combined_target_(j, k) / p2(j, k);
      } else {
        h(k) = -inv_n * combined_log_target_(j, k);
      }
    }
    const double hp = h.dot(p2.row(j).transpose());
    double s_floor = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != j) s_floor += std::max(inv_sum * m.weights(j, k), kProbabilityFloor);
    }
    double dp = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double p = inv_sum * m.weights(j, k);
      d(k) = k != j && p >= kProbabilityFloor ? (h(k) - hp) / s_floor : 0.0;
      dp += d(k) * p;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      gamma(j, k) = k == j ? 0.0
                           : (d(k) - dp) * inv_sum * m.weights(j, k) /
                                 bandwidth_;
    }
  }
  // gamma + gamma^T, in place.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      gamma(j, k) = gamma(k, j) = gamma(j, k) + gamma(k, j);
    }
  }

  // cos_jk = u_j . u_k, u = e / |e|.
  Eigen::VectorXd norms = e.rowwise().norm();
  Matrix u = norms.cwiseInverse().asDiagonal() * e;
  Matrix grad_u = gamma * u;
  gradient.resize(n, e.cols());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double radial = grad_u.row(j).dot(u.row(j));
    gradient.row(j) = (grad_u.row(j) - radial * u.row(j)) / norms(j);
  }
  return value;
}

double Objective(const EmbeddingState& e, const SgeObjectiveSpec& spec) {
  return SgeObjective(spec).Value(e.embedding);
}

Matrix ObjectiveGradient(const EmbeddingState& e,
                         const SgeObjectiveSpec& spec) {
  Matrix gradient;
  SgeObjective(spec).ValueAndGradient(e.embedding, gradient);
  return gradient;
}

EmbeddingStepResult EmbeddingStep(const EmbeddingState& start,
                                  const SgeObjectiveSpec& spec,
                                  const OptimizerConfig& opt,
                                  std::uint64_t seed) {
  opt.Validate();
  EmbeddingStepResult result;
  result.state = start;
  if (opt.max_steps == 0) return result;

  const SgeObjective objective(spec);
  Matrix e = start.embedding;
  // Rows keep their starting norm; only directions are optimized. A zero row
  // gets a seeded random direction and the mean norm of the other rows.
  Eigen::VectorXd radii = e.rowwise().norm();
  double radius_sum = 0.0;
  int nonzero = 0;
  for (Eigen::Index j = 0; j < e.rows(); ++j) {
    if (radii(j) > 0.0) {
      radius_sum += radii(j);
      ++nonzero;
    }
  }
  const double fill = nonzero > 0 ? radius_sum / nonzero : 1.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  for (Eigen::Index j = 0; j < e.rows(); ++j) {
    if (radii(j) > 0.0) continue;
    do {
      for (Eigen::Index c = 0; c < e.cols(); ++c) e(j, c) = jitter(rng);
    } while (e.row(j).squaredNorm() == 0.0);
    radii(j) = fill;
  }
  const auto retract = [&radii](const Matrix& m) {
    return Matrix(radii.asDiagonal() * NormalizeRows(m));
  };
  e = retract(e);

  Matrix gradient;
  double f = objective.ValueAndGradient(e, gradient);
  if (!std::isfinite(f)) {
    throw NumericError("embedding step: objective is not finite at start");
  }
  result.trace.push_back(f);

  // The objective is a per-word mean, so its gradient shrinks like 1/N. The
  // learning rate is applied per word, i.e. to N times that gradient.
  double step = opt.learning_rate * static_cast<double>(e.rows());
  bool moved = false;
  for (int s = 0; s < opt.max_steps; ++s) {
    if (gradient.squaredNorm() == 0.0) break;
    bool accepted = false;
    double trial_value = f;
    Matrix trial;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      trial = e - step * gradient;
      if (!trial.allFinite()) {
        throw NumericError(
            "embedding step: non-finite embedding (learning rate too high?)");
      }
      trial = retract(trial);
      trial_value = objective.Value(trial);
      if (!std::isfinite(trial_value)) {
        throw NumericError(
            "embedding step: non-finite objective (learning rate too high?)");
      }
      if (trial_value <= f) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent direction at machine precision

    const double decrease = (f - trial_value) / std::max(std::abs(f), 1e-300);
    e = std::move(trial);
    f = objective.ValueAndGradient(e, gradient);
    result.trace.push_back(f);
    moved = true;
    step *= opt.growth;
    if (decrease < opt.tolerance) break;
  }
  if (moved) result.state.embedding = std::move(e);
  return result;
}

SimilarityGraph AttenuateCrossCommunity(const SimilarityGraph& g,
                                        const ClusterAssignment& communities,
                                        double mu) {
  if (communities.size() != g.size()) {
    throw ValidationError("graph update: community labels do not match graph");
  }
  SimilarityGraph out = g;
  const std::size_t n = g.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (communities.labels[j] != communities.labels[k]) {
        out.weights(static_cast<Eigen::Index>(j),
                    static_cast<Eigen::Index>(k)) *= mu;
      }
    }
  }
  return out;
}

GraphUpdateResult GraphUpdate(const EmbeddingState& e, int n_clusters,
                              double mu, double bandwidth, int restarts,
                              std::uint64_t seed) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw ValidationError("graph update: mu must lie in (0, 1)");
  }
  GraphUpdateResult result;
  result.communities =
      KMeans(e.embedding, n_clusters, restarts, seed).assignment;
  result.graph = AttenuateCrossCommunity(
      PairwiseSimilarity(e.embedding, bandwidth), result.communities, mu);
  return result;
}

SimilarityGraph ReplaceRowsAndColumns(const SimilarityGraph& target,
                                      const std::vector<std::size_t>& rows,
                                      const SimilarityGraph& source) {
  if (target.size() != source.size()) {
    throw ValidationError("row substitution: graph sizes differ");
  }
  SimilarityGraph out = target;
  for (std::size_t r : rows) {
    const auto i = static_cast<Eigen::Index>(r);
    out.weights.row(i) = source.weights.row(i);
    out.weights.col(i) = source.weights.col(i);
  }
  return out;
}

SgeBranch::SgeBranch(Branch tag, EmbeddingState init, SimilarityGraph g0,
                     SgeConfig config, OptimizerConfig opt, std::uint64_t seed)
    : tag_(tag),
      state_(std::move(init)),
      g0_(std::move(g0)),
      graph_(g0_),
      config_(std::move(config)),
      opt_(opt),
      seed_(seed) {
  if (g0_.size() != static_cast<std::size_t>(state_.embedding.rows())) {
    throw ValidationError("sge: initial graph and embedding sizes differ");
  }
}

void SgeBranch::Step(const SimilarityGraph* other_prev,
                     const TargetSubstitution* substitution) {
  const int i = state_.iteration + 1;
  const ModalityConfig& mc = config_.modality;

  const SimilarityGraph* prev = &graph_;
  const SimilarityGraph* init = &g0_;
  SimilarityGraph substituted_prev, substituted_init;
  if (substitution != nullptr && !substitution->rows.empty()) {
    substituted_prev = ReplaceRowsAndColumns(graph_, substitution->rows,
                                             *substitution->source_prev);
    substituted_init = ReplaceRowsAndColumns(g0_, substitution->rows,
                                             *substitution->source_init);
    prev = &substituted_prev;
    init = &substituted_init;
  }
  if (mc.beta > 0.0 && other_prev == nullptr) {
    throw ValidationError("sge: beta > 0 but no other-modality graph given");
  }

  const SgeObjectiveSpec spec{
      .alpha = mc.alpha,
      .beta = mc.beta,
      .g_prev = prev,
      .g_init = init,
      .g_other = mc.beta > 0.0 ? other_prev : nullptr,
      .bandwidth = mc.bandwidth,
      .order = config_.order,
  };
  EmbeddingStepResult step = EmbeddingStep(
      state_, spec, opt_, DeriveSeed(seed_, {static_cast<std::uint64_t>(i), 1}));
  for (std::size_t s = 0; s < step.trace.size(); ++s) {
    trace_.push_back({tag_, i, static_cast<int>(s), step.trace[s]});
  }
  state_ = std::move(step.state);
  state_.iteration = i;

  GraphUpdateResult update = GraphUpdate(
      state_, mc.n_clusters, mc.mu, mc.bandwidth, config_.kmeans_restarts,
      DeriveSeed(seed_, {static_cast<std::uint64_t>(i), 2}));
  graph_ = std::move(update.graph);
  communities_.push_back(std::move(update.communities));
}

SgeResult RunSge(const EmbeddingState& init, const SimilarityGraph& g0,
                 const SgeConfig& config, const OptimizerConfig& opt,
                 std::uint64_t seed, const OtherGraphProvider& other,
                 Branch tag) {
  if (config.iterations < 1) {
    throw ValidationError("sge: iteration count must be >= 1");
  }
  const bool coupled = config.modality.beta > 0.0;
  if (coupled && !other) {
    throw ValidationError("sge: beta > 0 requires an other-graph provider");
  }
  SgeBranch branch(tag, init, g0, config, opt, seed);
  for (int i = 1; i <= config.iterations; ++i) {
    branch.Step(coupled ? other(i) : nullptr);
  }
  return {branch.state(), branch.graph(), branch.trace(),
          branch.communities()};
}

}  // namespace hmsge
