// Copyright 2026 The qfic Authors
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

/// \file
/// Classical fixed-step fourth-order Runge-Kutta.

#ifndef QFIC_INTEGRATE_HPP
#define QFIC_INTEGRATE_HPP

#include <cmath>
#include <cstddef>
#include <utility>

#include "qfic/errors.hpp"

namespace qfic::integrate {

/// Number of equal steps of size <= dtMax covering [t0, t1].
inline std::size_t stepCount(double t0, double t1, double dtMax) {
  detail::require(dtMax > 0.0, "rk4: step must be positive");
  detail::require(t1 >= t0, "rk4: t1 < t0");
  const double n = std::ceil((t1 - t0) / dtMax - 1e-9);
  return n < 1.0 ? 0 : static_cast<std::size_t>(n);
}

/// Integrates y' = f(t, y) from t0 to t1 with equal steps no larger than
/// dtMax. `post(y)` runs after every step (projection, symmetrization);
/// `observe(k, t, y)` sees the state after step k (k = 0 is the initial state).
template <typename State, typename Rhs, typename Post, typename Observe>
State rk4(State y, double t0, double t1, double dtMax, Rhs &&f, Post &&post, Observe &&observe) {
  const std::size_t n = stepCount(t0, t1, dtMax);
  observe(std::size_t{0}, t0, y);
  if (n == 0) return y;
  const double h = (t1 - t0) / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
    const State k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
    const State k4 = f(t + h, y + h * k3);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    post(y);
    observe(k + 1, t0 + static_cast<double>(k + 1) * h, y);
  }
  return y;
}

template <typename State, typename Rhs, typename Post>
State rk4(State y, double t0, double t1, double dtMax, Rhs &&f, Post &&post) {
  return rk4(std::move(y), t0, t1, dtMax, f, post, [](std::size_t, double, const State &) {});
}

} // namespace qfic::integrate

#endif // QFIC_INTEGRATE_HPP
