// SPDX-License-Identifier: Apache-2.0
#include "ccopf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ccopf {

namespace {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWeightsKronrod[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWeightsGauss[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double kronrod;
  double error;
};

PanelResult gk15_panel(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double result_gauss = kWeightsGauss[3] * fc;
  double result_kronrod = kWeightsKronrod[7] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    result_kronrod += kWeightsKronrod[j] * sum;
    if (j % 2 == 1) result_gauss += kWeightsGauss[j / 2] * sum;
  }
  PanelResult out;
  out.kronrod = result_kronrod * half;
  out.error = std::abs((result_kronrod - result_gauss) * half);
  return out;
}

struct Interval {
  double a, b;
  double value;
  double error;
};

}  // namespace

QuadratureResult gauss_kronrod_adaptive(const std::function<double(double)>& f, double a,
                                        double b, double abs_tol, double rel_tol,
                                        int max_subdivisions) {
  QuadratureResult out;
  if (!(b > a)) {
    out.converged = true;
    return out;
  }
  if (!(abs_tol > 0.0)) throw QuadratureError("absolute tolerance must be positive");

  std::vector<Interval> heap;  // max-heap on error
  auto by_error = [](const Interval& x, const Interval& y) { return x.error < y.error; };
  PanelResult first = gk15_panel(f, a, b);
  heap.push_back({a, b, first.kronrod, first.error});

  const auto tolerance = [&] {
    double magnitude = 0.0;
    for (const Interval& iv : heap) magnitude += iv.value;
    return std::max(abs_tol, rel_tol * std::abs(magnitude));
  };

  double total_error = first.error;
  int splits = 0;
  while (total_error > tolerance() && splits < max_subdivisions) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    Interval worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval at floating-point resolution; keep it as-is.
      worst.error = 0.0;
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      ++splits;
      continue;
    }
    PanelResult left = gk15_panel(f, worst.a, mid);
    PanelResult right = gk15_panel(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    heap.push_back({worst.a, mid, left.kronrod, left.error});
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back({mid, worst.b, right.kronrod, right.error});
    std::push_heap(heap.begin(), heap.end(), by_error);
    ++splits;
  }

  double total = 0.0;
  total_error = 0.0;
  for (const Interval& iv : heap) {
    total += iv.value;
    total_error += iv.error;
  }
  out.value = total;
  out.abs_error = total_error;
  out.subdivisions = splits;
  out.converged = total_error <= std::max(abs_tol, rel_tol * std::abs(total));
  return out;
}

}  // namespace ccopf
