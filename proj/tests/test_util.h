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

#ifndef GRADLEAK_TESTS_TEST_UTIL_H_
#define GRADLEAK_TESTS_TEST_UTIL_H_

#include <random>
#include <vector>

#include "gradleak/tensor.h"

namespace gradleak::testing {

inline Tensor random_tensor(const Shape& shape, std::mt19937_64& rng,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(shape.numel());
  for (double& x : v) x = u(rng);
  return Tensor::constant(shape, std::move(v));
}

inline std::vector<double> values(const Tensor& t) {
  return {t.data().begin(), t.data().end()};
}

}  // namespace gradleak::testing

#endif  // GRADLEAK_TESTS_TEST_UTIL_H_
