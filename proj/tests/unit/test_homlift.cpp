#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lemnika/error.hpp"
#include "lemnika/homlift.hpp"

using namespace lemnika;

namespace {

cplx random_point(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng)};
}

const ApproximantPair& ball_pair() {
  static const ApproximantPair p = atomize_pair(ball_slice_measure(), {.eps = 0.25});
  return p;
}

}  // namespace

TEST_CASE("robin_eval closed forms") {
  const auto ball = CircledSetModel::ball();
  CHECK(robin_eval(ball, 3.0, cplx{0.0, 4.0}) == doctest::Approx(std::log(5.0)));
  CHECK(robin_eval(CircledSetModel::bidisk(), 0.5, 2.0) == doctest::Approx(std::log(2.0)));
  CHECK(robin_eval(CircledSetModel::ellipsoid(4.0), 0.0, 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(extremal_eval(ball, 0.3, 0.4) == 0.0);
  CHECK_THROWS_AS(robin_eval(ball, 0.0, 0.0), Error);
  try {
    robin_eval(ball, 0.0, 0.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OriginUndefined);
  }
}

TEST_CASE("property: custom charts agree with closed forms, log-homogeneity") {
  std::mt19937_64 rng(11);
  const double c = 2.5;
  const auto ell = CircledSetModel::ellipsoid(c);
  const auto custom = CircledSetModel::custom(
      [c](cplx t) { return 0.5 * std::log1p(c * std::norm(t)); }, 0.5 * std::log(c));
  for (int i = 0; i < 500; ++i) {
    const cplx z = random_point(rng, std::pow(10.0, (i % 7) - 3));
    const cplx w = random_point(rng, 1.0);
    const cplx lambda = random_point(rng, 3.0);
    const double r = robin_eval(ell, z, w);
    CHECK(std::abs(robin_eval(custom, z, w) - r) <= 1e-12 * std::max(1.0, std::abs(r)));
    CHECK(std::abs(robin_eval(ell, lambda * z, lambda * w) - (r + std::log(std::abs(lambda)))) <=
          1e-12 * std::max(1.0, std::abs(r)));
  }
  CHECK(robin_eval(custom, 0.0, 2.0) == doctest::Approx(std::log(2.0) + 0.5 * std::log(c)));
}

TEST_CASE("homogenize reproduces the slice and scales by n log|lambda|") {
  FactoredPoly p;
  p.zeros = {{cplx{1.0, 2.0}, 1}, {cplx{-0.5, 0.0}, 2}};
  p.log_constant = 0.7;
  const HomogeneousPoly h = homogenize(p, 5);
  CHECK(h.z_power() == 2);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const cplx t = random_point(rng, 2.0);
    CHECK(h.log_abs(1.0, t) == doctest::Approx(log_abs_eval(p, t)).epsilon(1e-13));
    const cplx z = random_point(rng, 1.0), w = random_point(rng, 1.0), l = random_point(rng, 2.0);
    CHECK(h.log_abs(l * z, l * w) ==
          doctest::Approx(h.log_abs(z, w) + 5.0 * std::log(std::abs(l))).epsilon(1e-12));
  }
  // Direct evaluation of the polar form.
  const cplx z{0.3, -0.2}, w{1.1, 0.4};
  const cplx direct = std::exp(0.7) * (w - cplx{1.0, 2.0} * z) * std::pow(w + 0.5 * z, 2) * z * z;
  CHECK(std::abs(h.polar(z, w).to_complex() - direct) <= 1e-12 * std::abs(direct));
  CHECK_THROWS_AS(homogenize(p, 2), Error);
}

TEST_CASE("bidisk: the exact pair (z^n, w^n) is sandwiched to rounding") {
  const auto pq = bidisk_pair(7);
  const SandwichReport r = sandwich_check(CircledSetModel::bidisk(), pq, 1e-12);
  CHECK(r.n_samples == 10000);
  CHECK(r.pass);
  CHECK(r.max_upper_excess <= 1e-12);
  CHECK(r.max_lower_deficit <= 1e-12);
}

TEST_CASE("U_n and log|P - 1|") {
  const auto pq = bidisk_pair(3);
  // z^3 = 1 and w^3 = 1: a point of K_n (exact at z = w = 1, rounding elsewhere).
  CHECK(U_n_eval(pq, 1.0, 1.0) == kNegInf);
  CHECK(U_n_eval(pq, 1.0, std::polar(1.0, 2.0 * std::numbers::pi / 3.0)) <= -10.0);
  for (double la : {-40.0, -3.0, -1e-3, 0.5, 5.0, 30.0}) {
    const PolarValue p{la, 0.9};
    CHECK(log_abs_minus_one(p) ==
          doctest::Approx(std::log(std::abs(p.to_complex() - 1.0))).epsilon(1e-12));
  }
  CHECK(log_abs_minus_one({800.0, 0.3}) == doctest::Approx(800.0));
  CHECK(std::abs(log_abs_minus_one({-800.0, 0.3})) <= 1e-300);
  // U_n tends to max(log|z|, log|w|) far out.
  const double u = U_n_eval(pq, 1e3, 10.0);
  CHECK(u == doctest::Approx(std::log(1e3)).epsilon(1e-9));
}

TEST_CASE("ball: the lifted pair satisfies the sandwich") {
  const auto m = CircledSetModel::ball();
  const HomogeneousPair pq = lift_pair(ball_pair(), m);
  CHECK(pq.n == ball_pair().degree());
  const SandwichReport r = sandwich_check(m, pq, 0.25);
  CHECK(r.n_samples >= 10000);
  CHECK(r.upper_ok);
  CHECK(r.lower_ok);
  CHECK(r.vk_ok);
  // The slice of the lift is the one-variable approximant.
  const cplx t{0.4, -1.3};
  CHECK(max_form(pq, 1.0, t) == doctest::Approx(ball_pair().max_form(t)).epsilon(1e-13));
  CHECK(u_tilde_eval(pq, 0.1, 0.1) >= 0.0);
}

TEST_CASE("chebyshev_complete: segment toy against brute force") {
  // K = {(x, 0) : x in [0, 1]}, H = z, R a constant: optimum -1/2, value 1/2.
  std::vector<std::pair<cplx, cplx>> s;
  std::vector<cplx> hv;
  for (int i = 0; i <= 100; ++i) {
    s.emplace_back(i / 100.0, 0.0);
    hv.push_back(i / 100.0);
  }
  const ChebyshevResult r = chebyshev_complete(hv, s, 1, 1e-6);
  CHECK(r.converged);
  double brute = std::numeric_limits<double>::infinity();
  for (int a = -200; a <= 200; ++a)
    for (int b = -50; b <= 50; ++b) {
      const cplx c{a / 200.0, b / 200.0};
      double m = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) m = std::max(m, std::abs(hv[i] + c));
      brute = std::min(brute, m);
    }
  CHECK(std::abs(r.sup_norm - brute) <= 1e-3);
  CHECK(std::abs(r.coefficients[0] - cplx{-0.5, 0.0}) <= 1e-3);
}

TEST_CASE("chebyshev_complete: monomials are extremal on the ball") {
  std::vector<std::pair<cplx, cplx>> s;
  std::vector<cplx> hv;
  for (int ia = 0; ia <= 12; ++ia)
    for (int i1 = 0; i1 < 8; ++i1)
      for (int i2 = 0; i2 < 8; ++i2) {
        const double a = 0.5 * std::numbers::pi * ia / 12.0;
        const cplx z = std::polar(std::cos(a), 2.0 * std::numbers::pi * i1 / 8.0);
        const cplx w = std::polar(std::sin(a), 2.0 * std::numbers::pi * (i2 + 0.5) / 8.0);
        s.emplace_back(z, w);
        hv.push_back(z * z * w);
      }
  const ChebyshevResult r = chebyshev_complete(hv, s, 3);
  CHECK(r.converged);
  CHECK(r.gap <= 1e-4);
  double cmax = 0.0;
  for (const auto& c : r.coefficients) cmax = std::max(cmax, std::abs(c));
  CHECK(cmax <= 1e-3);
  // sup of |z^2 w| on the sphere is 2/(3 sqrt 3), attained on the grid only approximately.
  CHECK(r.sup_norm <= 2.0 / (3.0 * std::sqrt(3.0)) + 1e-9);
}

TEST_CASE("property: no single-coefficient move improves the discrete sup") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<std::pair<cplx, cplx>> s;
    std::vector<cplx> hv;
    const cplx a{u(rng), u(rng)}, b{u(rng), u(rng)};
    for (int i = 0; i < 200; ++i) {
      const cplx z{u(rng), u(rng)}, w{u(rng), u(rng)};
      s.emplace_back(z, w);
      hv.push_back(z * z + a * z * w + b * w * w);
    }
    const ChebyshevResult r = chebyshev_complete(hv, s, 2);
    REQUIRE(r.converged);
    auto sup_with = [&](std::vector<cplx> c) {
      ChebyshevResult t = r;
      t.coefficients = std::move(c);
      double m = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i)
        m = std::max(m, std::abs(hv[i] + t.eval(s[i].first, s[i].second)));
      return m;
    };
    CHECK(sup_with(r.coefficients) == doctest::Approx(r.sup_norm).epsilon(1e-12));
    for (std::size_t j = 0; j < r.coefficients.size(); ++j)
      for (const cplx dir : {cplx{1.0, 0.0}, cplx{0.0, 1.0}})
        for (double step : {1e-1, 1e-2, 1e-3, 1e-4, -1e-4, -1e-3, -1e-2, -1e-1}) {
          auto c = r.coefficients;
          c[j] += step * dir;
          CHECK(sup_with(c) >= r.sup_norm * (1.0 - 1e-4));
        }
  }
}

TEST_CASE("chebyshev_complete: rank and sample-count checks") {
  std::vector<std::pair<cplx, cplx>> s;
  std::vector<cplx> hv;
  for (int i = 0; i < 60; ++i) {
    s.emplace_back(std::polar(1.0, 0.1 * i), 0.0);  // w == 0 kills the w column
    hv.push_back(0.0);
  }
  try {
    chebyshev_complete(hv, s, 2);
    FAIL("expected IllConditioned");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllConditioned);
  }
  s.resize(20);
  hv.resize(20);
  CHECK_THROWS_AS(chebyshev_complete(hv, s, 2), Error);
}
