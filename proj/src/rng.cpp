// SPDX-License-Identifier: Apache-2.0
#include "ccopf/rng.hpp"

#include "ccopf/cceval.hpp"

namespace ccopf {

double normal_draw(std::uint64_t seed, std::uint64_t counter) {
  return gaussian_quantile(uniform_open01(seed, counter));
}

}  // namespace ccopf
