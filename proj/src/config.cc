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

#include "hmsge/config.h"

#include <json.hpp>

#include "hmsge/error.h"
#include "hmsge/tsv.h"

namespace hmsge {
namespace {

using nlohmann::json;

json ModalityToJson(const ModalityConfig& m) {
  return json{{"alpha", m.alpha},         {"beta", m.beta},
              {"mu", m.mu},               {"n_clusters", m.n_clusters},
              {"bandwidth", m.bandwidth}, {"embed_dim", m.embed_dim}};
}

template <typename T>
void Read(const json& object, const char* key, T& out, std::string_view where) {
  auto it = object.find(key);
  if (it == object.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: " + std::string(where) + "." + key +
                          " has the wrong type");
  }
}

void CheckKeys(const json& object, std::initializer_list<const char*> allowed,
               std::string_view where) {
  if (!object.is_object()) {
    throw ValidationError("config: " + std::string(where) +
                          " must be an object");
  }
  for (const auto& item : object.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) {
      throw ValidationError("config: unknown key '" + item.key() + "' in " +
                            std::string(where));
    }
  }
}

void ModalityFromJson(const json& object, ModalityConfig& m,
                      std::string_view where) {
  CheckKeys(object,
            {"alpha", "beta", "mu", "n_clusters", "bandwidth", "embed_dim"},
            where);
  Read(object, "alpha", m.alpha, where);
  Read(object, "beta", m.beta, where);
  Read(object, "mu", m.mu, where);
  Read(object, "n_clusters", m.n_clusters, where);
  Read(object, "bandwidth", m.bandwidth, where);
  Read(object, "embed_dim", m.embed_dim, where);
}

}  // namespace

PipelineConfig TattribPreset() {
  PipelineConfig c;
  c.modality_x = {.alpha = 0.1, .beta = 0.01, .mu = 0.95, .n_clusters = 25,
                  .bandwidth = 1.0, .embed_dim = 15};
  c.modality_y = {.alpha = 0.3, .beta = 0.1, .mu = 0.7, .n_clusters = 5,
                  .bandwidth = 1.0, .embed_dim = 15};
  c.joint = {.alpha = 0.05, .beta = 0.0, .mu = 0.7, .n_clusters = 20,
             .bandwidth = 1.0, .embed_dim = 15};
  c.k1 = 4;
  c.k2 = 2;
  return c;
}

PipelineConfig SkipgramPreset() {
  PipelineConfig c = TattribPreset();
  c.joint.alpha = 0.1;
  c.joint.mu = 0.7;
  c.joint.n_clusters = 6;
  c.k1 = 5;
  c.k2 = 5;
  return c;
}

PipelineConfig PresetByName(std::string_view name) {
  if (name == "tattrib") return TattribPreset();
  if (name == "skipgram") return SkipgramPreset();
  throw ValidationError("unknown preset '" + std::string(name) +
                        "' (expected tattrib or skipgram)");
}

std::string ConfigToJson(const PipelineConfig& c) {
  json j;
  j["modality_x"] = ModalityToJson(c.modality_x);
  j["modality_y"] = ModalityToJson(c.modality_y);
  j["joint"] = ModalityToJson(c.joint);
  j["k1"] = c.k1;
  j["k2"] = c.k2;
  j["optimizer"] = json{{"learning_rate", c.optimizer.learning_rate},
                        {"max_steps", c.optimizer.max_steps},
                        {"tolerance", c.optimizer.tolerance},
                        {"growth", c.optimizer.growth}};
  j["kmeans_restarts"] = c.kmeans_restarts;
  j["init"] = c.init == InitMethod::kSvd ? "svd" : "random";
  j["loss_order"] = c.loss_order == LossOrder::kEmbeddingIsModel
                        ? "embedding_model"
                        : "graph_model";
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

PipelineConfig ConfigFromJson(std::string_view text,
                              const PipelineConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  CheckKeys(j,
            {"modality_x", "modality_y", "joint", "k1", "k2", "optimizer",
             "kmeans_restarts", "init", "loss_order", "seed"},
            "top level");
  PipelineConfig c = base;
  if (j.contains("modality_x")) {
    ModalityFromJson(j["modality_x"], c.modality_x, "modality_x");
  }
  if (j.contains("modality_y")) {
    ModalityFromJson(j["modality_y"], c.modality_y, "modality_y");
  }
  if (j.contains("joint")) ModalityFromJson(j["joint"], c.joint, "joint");
  Read(j, "k1", c.k1, "top level");
  Read(j, "k2", c.k2, "top level");
  Read(j, "kmeans_restarts", c.kmeans_restarts, "top level");
  Read(j, "seed", c.seed, "top level");
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    CheckKeys(o, {"learning_rate", "max_steps", "tolerance", "growth"},
              "optimizer");
    Read(o, "learning_rate", c.optimizer.learning_rate, "optimizer");
    Read(o, "max_steps", c.optimizer.max_steps, "optimizer");
    Read(o, "tolerance", c.optimizer.tolerance, "optimizer");
    Read(o, "growth", c.optimizer.growth, "optimizer");
  }
  if (j.contains("init")) {
    std::string init;
    Read(j, "init", init, "top level");
    if (init == "svd") {
      c.init = InitMethod::kSvd;
    } else if (init == "random") {
      c.init = InitMethod::kRandom;
    } else {
      throw ValidationError("config: init must be 'svd' or 'random'");
    }
  }
  if (j.contains("loss_order")) {
    std::string order;
    Read(j, "loss_order", order, "top level");
    if (order == "embedding_model") {
      c.loss_order = LossOrder::kEmbeddingIsModel;
    } else if (order == "graph_model") {
      c.loss_order = LossOrder::kGraphIsModel;
    } else {
      throw ValidationError(
          "config: loss_order must be 'embedding_model' or 'graph_model'");
    }
  }
  c.Validate();
  return c;
}

PipelineConfig LoadConfigFile(const std::string& path,
                              const PipelineConfig& base) {
  return ConfigFromJson(ReadFile(path), base);
}

}  // namespace hmsge
