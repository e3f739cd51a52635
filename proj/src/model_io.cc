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

#include "hmsge/model_io.h"

#include <bit>
#include <cstring>
#include <type_traits>

#include <zlib.h>

#include "hmsge/config.h"
#include "hmsge/error.h"
#include "hmsge/tsv.h"

namespace hmsge {
namespace {

static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

constexpr std::size_t kHeaderSize = 16;

class Writer {
 public:
  template <typename T>
  void Put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&value);
    out_.append(p, sizeof(T));
  }

  void PutString(std::string_view s) {
    Put(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }

  void PutMatrix(const Matrix& m) {
    Put(static_cast<std::uint64_t>(m.rows()));
    Put(static_cast<std::uint64_t>(m.cols()));
    out_.append(reinterpret_cast<const char*>(m.data()),
                sizeof(double) * static_cast<std::size_t>(m.size()));
  }

  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    T value;
    Need(sizeof(T));
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string GetString() {
    const auto n = Get<std::uint32_t>();
    Need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  Matrix GetMatrix() {
    const auto rows = Get<std::uint64_t>();
    const auto cols = Get<std::uint64_t>();
    if (cols != 0 && rows > (bytes_.size() / sizeof(double)) / cols) {
      throw IoError("model file: matrix dimensions exceed file size");
    }
    const std::size_t n = static_cast<std::size_t>(rows * cols);
    Need(n * sizeof(double));
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (n > 0) std::memcpy(m.data(), bytes_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return m;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoError("model file: body truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t Crc32(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; bodies are far below 4 GiB but chunk anyway.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - offset,
                                                    1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + offset),
                static_cast<uInt>(chunk));
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void PutState(Writer& w, const EmbeddingState& s) {
  w.Put(static_cast<std::uint32_t>(s.iteration));
  w.PutMatrix(s.embedding);
}

EmbeddingState GetState(Reader& r) {
  EmbeddingState s;
  s.iteration = static_cast<int>(r.Get<std::uint32_t>());
  s.embedding = r.GetMatrix();
  return s;
}

}  // namespace

std::string SerializeModel(const TrainedModel& model) {
  Writer body;
  body.Put(static_cast<std::uint64_t>(model.vocab.size()));
  for (const auto& word : model.vocab.words()) body.PutString(word);
  body.PutString(ConfigToJson(model.config));
  PutState(body, model.x_embed);
  PutState(body, model.y_embed);
  body.PutMatrix(model.z0);
  PutState(body, model.z_embed);
  body.PutMatrix(model.graph_x.weights);
  body.PutMatrix(model.graph_y.weights);
  body.PutMatrix(model.graph_z.weights);
  body.Put(static_cast<std::uint64_t>(model.trace.size()));
  for (const TraceEntry& t : model.trace) {
    body.Put(static_cast<std::uint8_t>(t.branch));
    body.Put(static_cast<std::uint32_t>(t.iteration));
    body.Put(static_cast<std::uint32_t>(t.step));
    body.Put(t.objective);
  }

  Writer file;
  file.str().append(kModelMagic);
  file.Put(kModelFormatVersion);
  file.Put(std::uint32_t{0});
  file.str().append(body.str());
  file.Put(Crc32(body.str()));
  return std::move(file.str());
}

TrainedModel DeserializeModel(std::string_view bytes) {
  if (bytes.size() < kHeaderSize ||
      bytes.substr(0, kModelMagic.size()) != kModelMagic) {
    throw IoError("model file: bad magic, not an HM-SGE model");
  }
  std::uint32_t version = 0;
  std::memcpy(&version, bytes.data() + 8, sizeof(version));
  if (version > kModelFormatVersion) {
    throw IoError("model file: format version " + std::to_string(version) +
                  " is newer than supported version " +
                  std::to_string(kModelFormatVersion));
  }
  if (version == 0) throw IoError("model file: invalid format version 0");
  if (bytes.size() < kHeaderSize + sizeof(std::uint32_t)) {
    throw IoError("model file: checksum mismatch (file truncated)");
  }
  const std::string_view body = bytes.substr(
      kHeaderSize, bytes.size() - kHeaderSize - sizeof(std::uint32_t));
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + bytes.size() - sizeof(stored),
              sizeof(stored));
  if (stored != Crc32(body)) {
    throw IoError("model file: checksum mismatch (corrupted or truncated)");
  }

  Reader r(body);
  TrainedModel model;
  const auto n_words = r.Get<std::uint64_t>();
  if (n_words > body.size()) throw IoError("model file: bad word count");
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(n_words));
  for (std::uint64_t i = 0; i < n_words; ++i) words.push_back(r.GetString());
  try {
    model.vocab = Vocabulary(std::move(words));
    model.config = ConfigFromJson(r.GetString());
  } catch (const ValidationError& e) {
    throw IoError(std::string("model file: ") + e.what());
  }
  model.x_embed = GetState(r);
  model.y_embed = GetState(r);
  model.z0 = r.GetMatrix();
  model.z_embed = GetState(r);
  model.graph_x.weights = r.GetMatrix();
  model.graph_y.weights = r.GetMatrix();
  model.graph_z.weights = r.GetMatrix();
  const auto n_trace = r.Get<std::uint64_t>();
  if (n_trace > body.size()) throw IoError("model file: bad trace length");
  model.trace.reserve(static_cast<std::size_t>(n_trace));
  for (std::uint64_t i = 0; i < n_trace; ++i) {
    TraceEntry t;
    const auto branch = r.Get<std::uint8_t>();
    if (branch > 2) throw IoError("model file: bad branch id in trace");
    t.branch = static_cast<Branch>(branch);
    t.iteration = static_cast<int>(r.Get<std::uint32_t>());
    t.step = static_cast<int>(r.Get<std::uint32_t>());
    t.objective = r.Get<double>();
    model.trace.push_back(t);
  }
  if (!r.AtEnd()) throw IoError("model file: trailing bytes in body");
  return model;
}

void SaveModel(const TrainedModel& model, const std::string& path) {
  WriteFile(path, SerializeModel(model));
}

TrainedModel LoadModel(const std::string& path) {
  return DeserializeModel(ReadFile(path));
}

}  // namespace hmsge
