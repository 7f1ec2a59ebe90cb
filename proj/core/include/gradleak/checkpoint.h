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

// Checkpoint file layout:
//
//   gradleak-checkpoint 1\n
//   <header byte count>\n
//   <JSON header: config, seed, blocks [{name, shape, offset}]>
//   <float64 little-endian values, blocks in lexicographic name order>
//
// Offsets are in bytes from the start of the value section.

#ifndef GRADLEAK_CHECKPOINT_H_
#define GRADLEAK_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "gradleak/model.h"

namespace gradleak {

struct Checkpoint {
  ParamStore params;
  std::uint64_t seed = 0;
};

void write_checkpoint(std::ostream& out, const ParamStore& params,
                      std::uint64_t seed);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path,
                     const ParamStore& params, std::uint64_t seed);
// Throws InputError on a malformed file or blocks that disagree with the
// stored config.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gradleak

#endif  // GRADLEAK_CHECKPOINT_H_
