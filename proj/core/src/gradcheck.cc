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

#include "gradleak/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gradleak {
namespace {

double eval_at(const ScalarFn& f, const Tensor& x, std::size_t i, double v) {
  std::vector<double> probe(x.data().begin(), x.data().end());
  probe[i] = v;
  // A leaf that requires grad, so f may differentiate w.r.t. it internally.
  const double y = f(Tensor::variable(x.shape(), std::move(probe))).item();
  if (!std::isfinite(y)) throw NumericError("finite_diff_check: f is not finite");
  return y;
}

}  // namespace

GradCheckReport finite_diff_check(
    const ScalarFn& f, const Tensor& x, double h,
    const std::optional<std::vector<std::size_t>>& coordinates) {
  if (!(h > 0.0)) throw UsageError("finite_diff_check: step must be positive");
  const Tensor leaf = x.as_variable();
  const Tensor y = f(leaf);
  if (!std::isfinite(y.item())) {
    throw NumericError("finite_diff_check: f is not finite");
  }
  std::vector<Tensor> wrt{leaf};
  const Tensor analytic = grad(y, wrt, false, /*allow_unused=*/true).front();

  std::vector<std::size_t> probe;
  if (coordinates) {
    probe = *coordinates;
  } else {
    probe.resize(x.numel());
    std::iota(probe.begin(), probe.end(), std::size_t{0});
  }

  GradCheckReport report;
  for (std::size_t i : probe) {
    const double x0 = x.at(i);
    const double numeric =
        (eval_at(f, x, i, x0 + h) - eval_at(f, x, i, x0 - h)) / (2.0 * h);
    const double a = analytic.at(i);
    const double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
    if (report.checked == 0 || err > report.max_error) {
      report.max_error = err;
      report.worst_index = i;
    }
    ++report.checked;
  }
  return report;
}

}  // namespace gradleak
