// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "ccopf/cceval.hpp"
#include "ccopf/quadrature.hpp"

using namespace ccopf;

TEST_CASE("gauss-kronrod integrates smooth targets to tolerance") {
  auto density = [](double x) { return gaussian_pdf(x); };
  QuadratureResult unit = gauss_kronrod_adaptive(density, -10.0, 10.0, 1e-12);
  CHECK(unit.converged);
  CHECK(unit.value == doctest::Approx(1.0).epsilon(1e-12));

  auto second_moment = [](double x) { return x * x * gaussian_pdf(x); };
  QuadratureResult var = gauss_kronrod_adaptive(second_moment, -12.0, 12.0, 1e-12);
  CHECK(var.value == doctest::Approx(1.0).epsilon(1e-11));

  auto osc = [](double x) { return std::sin(10.0 * x) * std::exp(-x); };
  QuadratureResult o = gauss_kronrod_adaptive(osc, 0.0, 4.0, 1e-11);
  // Closed form: int sin(kx) e^-x dx = k/(1+k^2) - e^-4 (sin(4k) + k cos(4k))/(1+k^2)
  const double k = 10.0;
  const double expect =
      (k - std::exp(-4.0) * (std::sin(4.0 * k) + k * std::cos(4.0 * k))) / (1.0 + k * k);
  CHECK(o.converged);
  CHECK(o.value == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("relative tolerance rescues large-magnitude integrands") {
  auto big = [](double x) { return 1e20 * gaussian_pdf(x); };
  QuadratureResult r = gauss_kronrod_adaptive(big, -10.0, 10.0, 1e-9, 1e-12);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1e20).epsilon(1e-11));
}

TEST_CASE("degenerate and invalid inputs") {
  auto f = [](double) { return 1.0; };
  QuadratureResult empty = gauss_kronrod_adaptive(f, 2.0, 2.0, 1e-9);
  CHECK(empty.converged);
  CHECK(empty.value == 0.0);
  CHECK_THROWS_AS(gauss_kronrod_adaptive(f, 0.0, 1.0, 0.0), QuadratureError);
}
