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

#ifndef GRADLEAK_GRADCHECK_H_
#define GRADLEAK_GRADCHECK_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "gradleak/tensor.h"

namespace gradleak {

using ScalarFn = std::function<Tensor(const Tensor&)>;

struct GradCheckReport {
  double max_error = 0.0;  // max |analytic - numeric| / max(1, |analytic|)
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Compares grad(f) at x against central differences with step h. When
// `coordinates` is set only those flat indices are probed. Throws
// NumericError if f is not finite at a probe point.
GradCheckReport finite_diff_check(
    const ScalarFn& f, const Tensor& x, double h,
    const std::optional<std::vector<std::size_t>>& coordinates = std::nullopt);

}  // namespace gradleak

#endif  // GRADLEAK_GRADCHECK_H_
