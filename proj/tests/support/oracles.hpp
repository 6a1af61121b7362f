#pragma once

// Independent reference computations used by the unit tests. They share no
// code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace test_oracles {

using cplx = std::complex<double>;

/// Ascending coefficients of prod (t - r_j), no rescaling.
inline std::vector<cplx> naive_coefficients(const std::vector<cplx>& rs) {
  std::vector<cplx> c{1.0};
  for (const auto& r : rs) {
    std::vector<cplx> next(c.size() + 1, cplx{});
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= r * c[j];
    }
    c = std::move(next);
  }
  return c;
}

inline cplx naive_horner(const std::vector<cplx>& c, cplx z) {
  cplx acc{};
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * z + c[j];
  return acc;
}

/// Largest distance in a greedy closest-pair matching of two equal-size
/// multisets; infinity on a size mismatch.
inline double matching_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  while (!a.empty()) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        if (std::abs(a[i] - b[j]) < best) {
          best = std::abs(a[i] - b[j]);
          bi = i;
          bj = j;
        }
    worst = std::max(worst, best);
    a.erase(a.begin() + static_cast<std::ptrdiff_t>(bi));
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return worst;
}

/// Composite Gauss-Legendre on [a, b] with `panels` panels of 8 nodes.
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels = 64) {
  static constexpr double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                  -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                  0.7966664774136267,  0.9602898564975363};
  static constexpr double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                  0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                  0.2223810344533745, 0.1012285362903763};
  const double step = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * step;
    for (int k = 0; k < 8; ++k) s += w[k] * f(mid + 0.5 * step * x[k]);
  }
  return 0.5 * step * s;
}

}  // namespace test_oracles
