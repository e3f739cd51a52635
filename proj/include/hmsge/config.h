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

#ifndef HMSGE_CONFIG_H_
#define HMSGE_CONFIG_H_

#include <string>
#include <string_view>

#include "hmsge/datamodel.h"

namespace hmsge {

// Layer settings tuned for textual attributes (tAttrib) with visual
// attributes: d = p = 15, (alpha, mu, N_C) = (0.1, 0.95, 25) for X and
// (0.3, 0.7, 5) for Y, joint (0.05, 0.7, 20), beta = (0.01, 0.1),
// K1 = 4, K2 = 2.
PipelineConfig TattribPreset();

// Skip-gram textual vectors: as tAttrib but joint (0.1, 0.7, 6), K1 = 5,
// K2 = 5.
PipelineConfig SkipgramPreset();

// Throws ValidationError for names other than "tattrib" and "skipgram".
PipelineConfig PresetByName(std::string_view name);

// JSON with sections modality_x, modality_y, joint, optimizer and scalar
// keys k1, k2, kmeans_restarts, init, loss_order, seed. Parsing starts from
// `base` and only overrides keys present in the text; unknown keys are
// rejected.
std::string ConfigToJson(const PipelineConfig& config);
PipelineConfig ConfigFromJson(std::string_view text,
                              const PipelineConfig& base = TattribPreset());
PipelineConfig LoadConfigFile(const std::string& path,
                              const PipelineConfig& base = TattribPreset());

}  // namespace hmsge

#endif  // HMSGE_CONFIG_H_
