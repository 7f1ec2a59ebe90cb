//
// Copyright 2026 The gradleak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "gradleak/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "gradleak/serialization.h"

namespace gradleak {
namespace {

constexpr const char* kMagic = "gradleak-checkpoint 1";

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

double get_f64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw InputError("checkpoint: truncated value section");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t{bytes[i]} << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_checkpoint(std::ostream& out, const ParamStore& params,
                      std::uint64_t seed) {
  nlohmann::json header;
  header["config"] = params.config;
  header["seed"] = seed;
  nlohmann::json blocks = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& [name, t] : params.blocks) {
    blocks.push_back({{"name", name}, {"shape", t.shape().dims()}, {"offset", offset}});
    offset += 8 * t.numel();
  }
  header["blocks"] = std::move(blocks);
  const std::string text = header.dump();
  out << kMagic << '\n' << text.size() << '\n' << text;
  for (const auto& [name, t] : params.blocks) {
    for (double v : t.data()) put_f64(out, v);
  }
  if (!out) throw InputError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string magic;
  std::getline(in, magic);
  if (magic != kMagic) throw InputError("checkpoint: bad magic line");
  std::string count_line;
  std::getline(in, count_line);
  std::size_t header_bytes = 0;
  try {
    header_bytes = std::stoull(count_line);
  } catch (const std::exception&) {
    throw InputError("checkpoint: bad header length");
  }
  std::string text(header_bytes, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_bytes))) {
    throw InputError("checkpoint: truncated header");
  }

  Checkpoint ckpt;
  std::map<std::string, Shape> expected;
  try {
    const auto header = nlohmann::json::parse(text);
    ckpt.params.config = header.at("config").get<ModelConfig>();
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.params.config.validate();
    expected = block_shapes(ckpt.params.config);
    std::size_t offset = 0;
    const auto& blocks = header.at("blocks");
    if (blocks.size() != expected.size()) {
      throw InputError("checkpoint: block count does not match config");
    }
    auto want = expected.begin();
    for (const auto& b : blocks) {
      const auto name = b.at("name").get<std::string>();
      const Shape shape(b.at("shape").get<std::vector<std::size_t>>());
      if (name != want->first || !(shape == want->second)) {
        throw InputError("checkpoint: unexpected block " + name);
      }
      if (b.at("offset").get<std::size_t>() != offset) {
        throw InputError("checkpoint: bad offset for " + name);
      }
      offset += 8 * shape.numel();
      ++want;
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint: bad header: ") + e.what());
  } catch (const ConfigError& e) {
    throw InputError(std::string("checkpoint: bad config: ") + e.what());
  }

  for (const auto& [name, shape] : expected) {
    std::vector<double> values(shape.numel());
    for (double& v : values) v = get_f64(in);
    ckpt.params.blocks.emplace(name, Tensor::variable(shape, std::move(values)));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path,
                     const ParamStore& params, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_checkpoint(out, params, seed);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace gradleak
