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

#ifndef HMSGE_MODEL_IO_H_
#define HMSGE_MODEL_IO_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "hmsge/datamodel.h"

namespace hmsge {

// Binary model container, all integers and doubles little-endian:
//
//   offset 0   8 bytes  magic "HMSGEMDL"
//   offset 8   u32      format version (kModelFormatVersion)
//   offset 12  u32      reserved, 0
//   offset 16  body:
//     u64 word count, then per word: u32 byte length + UTF-8 bytes
//     u32 byte length + config JSON (see ConfigToJson)
//     x embedding:  u32 iteration + matrix
//     y embedding:  u32 iteration + matrix
//     z0:           matrix
//     joint embedding: u32 iteration + matrix
//     graph x, graph y, graph joint: matrix each
//     u64 trace length, then per entry: u8 branch, u32 iteration,
//         u32 step, f64 objective
//   trailer    u32      CRC-32 (zlib polynomial) of the body bytes
//
// A matrix is u64 rows, u64 cols, then rows*cols f64 in row-major order.
inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr std::string_view kModelMagic = "HMSGEMDL";

std::string SerializeModel(const TrainedModel& model);
// Throws IoError on bad magic, newer version, checksum mismatch or a
// malformed body.
TrainedModel DeserializeModel(std::string_view bytes);

void SaveModel(const TrainedModel& model, const std::string& path);
TrainedModel LoadModel(const std::string& path);

}  // namespace hmsge

#endif  // HMSGE_MODEL_IO_H_
