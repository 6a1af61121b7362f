#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lemnika/error.hpp"
#include "lemnika/mamass.hpp"

using namespace lemnika;

namespace {

constexpr double kTwoPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

// P(z, w) by direct product of the linear factors (no polar bookkeeping).
cplx direct_eval(const HomogeneousPoly& P, cplx z, cplx w) {
  cplx v = std::polar(std::exp(P.slice.log_constant), P.slice.phase_constant);
  for (int i = 0; i < P.z_power(); ++i) v *= z;
  for (const auto& t : P.slice.zeros)
    for (int m = 0; m < t.multiplicity; ++m) v *= (w - t.value * z);
  return v;
}

// Newton from random starts with a finite-difference Jacobian; distinct
// solutions with residual below 1e-10.
std::vector<std::pair<cplx, cplx>> newton_oracle(const HomogeneousPair& pq, int starts,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::pair<cplx, cplx>> found;
  for (int s = 0; s < starts; ++s) {
    cplx z{g(rng), g(rng)}, w{g(rng), g(rng)};
    const double r = std::hypot(std::abs(z), std::abs(w));
    z /= r;
    w /= r;
    for (int it = 0; it < 60; ++it) {
      const cplx f1 = direct_eval(pq.P, z, w) - 1.0, f2 = direct_eval(pq.Q, z, w) - 1.0;
      const double e = 1e-7;
      const cplx a = (direct_eval(pq.P, z + e, w) - 1.0 - f1) / e;
      const cplx b = (direct_eval(pq.P, z, w + e) - 1.0 - f1) / e;
      const cplx c = (direct_eval(pq.Q, z + e, w) - 1.0 - f2) / e;
      const cplx d = (direct_eval(pq.Q, z, w + e) - 1.0 - f2) / e;
      const cplx det = a * d - b * c;
      if (std::abs(det) == 0.0) break;
      z -= (f1 * d - f2 * b) / det;
      w -= (a * f2 - c * f1) / det;
      if (!std::isfinite(std::abs(z)) || !std::isfinite(std::abs(w))) break;
    }
    if (!std::isfinite(std::abs(z)) || !std::isfinite(std::abs(w))) continue;
    const double res = std::max(std::abs(direct_eval(pq.P, z, w) - 1.0),
                                std::abs(direct_eval(pq.Q, z, w) - 1.0));
    if (res > 1e-10) continue;
    bool seen = false;
    for (const auto& [fz, fw] : found)
      if (std::hypot(std::abs(fz - z), std::abs(fw - w)) < 1e-6) seen = true;
    if (!seen) found.emplace_back(z, w);
  }
  return found;
}

const ModelPair& ball6() {
  static const ModelPair p = model_pair(CircledSetModel::ball(), 6);
  return p;
}

}  // namespace

TEST_CASE("bidisk n = 4: sixteen roots-of-unity pairs") {
  const LevelSetSolutions s = solve_common_level_sets(bidisk_pair(4));
  REQUIRE(s.points.size() == 16);
  CHECK(s.degree_sum() == 16);
  for (const auto& p : s.points) {
    CHECK(p.local_degree == 1);
    CHECK_FALSE(p.flagged);
    CHECK(p.residual <= 1e-8);
    const double az = std::arg(p.z) / (std::numbers::pi / 2.0);
    const double aw = std::arg(p.w) / (std::numbers::pi / 2.0);
    CHECK(std::abs(std::abs(p.z) - 1.0) <= 1e-12);
    CHECK(std::abs(std::abs(p.w) - 1.0) <= 1e-12);
    CHECK(std::abs(az - std::round(az)) <= 1e-12);
    CHECK(std::abs(aw - std::round(aw)) <= 1e-12);
  }
}

TEST_CASE("P = z^2, Q = w^2 gives (+-1, +-1)") {
  const LevelSetSolutions s = solve_common_level_sets(bidisk_pair(2));
  REQUIRE(s.points.size() == 4);
  for (const auto& p : s.points) {
    CHECK(std::abs(std::abs(p.z.real()) - 1.0) <= 1e-12);
    CHECK(std::abs(p.z.imag()) <= 1e-12);
    CHECK(std::abs(std::abs(p.w.real()) - 1.0) <= 1e-12);
    CHECK(std::abs(p.w.imag()) <= 1e-12);
  }
}

TEST_CASE("ball pair n = 6: full Bezout count against a Newton oracle") {
  const HomogeneousPair& pq = ball6().lifted;
  const LevelSetSolutions s = solve_common_level_sets(pq);
  CHECK(s.degree_sum() == 36);
  for (const auto& p : s.points) CHECK(p.residual <= 1e-8);
  const auto oracle = newton_oracle(pq, 4000, 7);
  CHECK(oracle.size() >= 30);
  for (const auto& [z, w] : oracle) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : s.points) best = std::min(best, std::hypot(std::abs(p.z - z), std::abs(p.w - w)));
    CHECK(best <= 1e-8);
  }
  const DiscreteMAMeasure mu = discrete_ma_measure(s.points, 6);
  CHECK(std::abs(mu.total_mass - kTwoPiSq) <= 1e-6);
}

TEST_CASE("degenerate and common-factor pairs are reported") {
  // Even k puts equal leading coefficients on P(1,t) and Q(1,t).
  const ApproximantPair even = atomize_fixed(ball_slice_measure(), 4, 2);
  const HomogeneousPair pq = lift_pair(even, CircledSetModel::ball());
  try {
    solve_common_level_sets(pq);
    FAIL("expected DegenerateLeading");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateLeading);
  }
  HomogeneousPair same{pq.P, pq.P, pq.n};
  try {
    solve_common_level_sets(same);
    FAIL("expected CommonFactorSuspected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CommonFactorSuspected);
  }
}

TEST_CASE("discrete_ma_measure weights") {
  const DiscreteMAMeasure b = discrete_ma_measure(solve_common_level_sets(bidisk_pair(4)).points, 4);
  REQUIRE(b.atoms.size() == 16);
  for (const auto& a : b.atoms) CHECK(a.weight == doctest::Approx(kTwoPiSq / 16.0));
  CHECK(b.total_mass == doctest::Approx(kTwoPiSq).epsilon(1e-14));

  // (z, w^2)-type atom at the origin with local degree 2, n = 2.
  const DiscreteMAMeasure t = discrete_ma_measure({{0.0, 0.0, 2, 0.0, true}}, 2);
  CHECK(t.total_mass == doctest::Approx(2.0 * kTwoPiSq / 4.0));

  const DiscreteMAMeasure e = discrete_ma_measure({}, 3);
  CHECK(e.empty);
  CHECK(e.total_mass == 0.0);
}

TEST_CASE("reference moments") {
  CHECK(reference_moment(ReferenceKind::Bidisk, {1, 0, 1, 0}).real() == doctest::Approx(kTwoPiSq));
  CHECK(reference_moment(ReferenceKind::Ball, {1, 0, 1, 0}).real() == doctest::Approx(kTwoPiSq / 2.0));
  CHECK(std::abs(reference_moment(ReferenceKind::Ball, {1, 0, 0, 1})) == 0.0);
  CHECK(reference_moment(ReferenceKind::Ellipsoid, {0, 1, 0, 1}, 2.0).real() ==
        doctest::Approx(kTwoPiSq / 4.0));
  CHECK_THROWS_AS(reference_moment(ReferenceKind::Ball, {33, 0, 33, 0}), Error);

  // Monte-Carlo sphere integration, 1e6 samples.
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  double s10 = 0.0, s11 = 0.0, s20 = 0.0;
  const int N = 1000000;
  for (int i = 0; i < N; ++i) {
    const double x0 = g(rng), x1 = g(rng), x2 = g(rng), x3 = g(rng);
    const double r2 = x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3;
    const double az = (x0 * x0 + x1 * x1) / r2, aw = (x2 * x2 + x3 * x3) / r2;
    s10 += az;
    s11 += az * aw;
    s20 += az * az;
  }
  for (const auto& [idx, mc] : {std::pair{MomentIndex{1, 0, 1, 0}, s10},
                                std::pair{MomentIndex{1, 1, 1, 1}, s11},
                                std::pair{MomentIndex{2, 0, 2, 0}, s20}}) {
    const double want = kTwoPiSq * mc / N;
    CHECK(std::abs(reference_moment(ReferenceKind::Ball, idx).real() - want) <= 1e-2 * want);
  }
}

TEST_CASE("weak-* report: bidisk moments below n are exact") {
  std::vector<DiscreteMAMeasure> mus;
  for (int n : {4, 8})
    mus.push_back(discrete_ma_measure(solve_common_level_sets(bidisk_pair(n)).points, n));
  const MomentReport r = weak_star_report(mus, ReferenceKind::Bidisk);
  CHECK(r.rows.size() == 2 * moment_panel(4).size());
  CHECK(moment_panel(4).size() == 70);
  for (const auto& row : r.rows) {
    const auto [a, b, c, d] = row.index;
    if (a < row.n && b < row.n && c < row.n && d < row.n) CHECK(row.abs_error <= 1e-9);
    if (row.index == MomentIndex{0, 0, 0, 0})
      CHECK(row.discrete.real() == doctest::Approx(kTwoPiSq).epsilon(1e-12));
  }
  CHECK(r.key_nonincreasing);
}

TEST_CASE("support_localization") {
  const DiscreteMAMeasure b = discrete_ma_measure(solve_common_level_sets(bidisk_pair(8)).points, 8);
  CHECK(support_localization(b, CircledSetModel::bidisk()) <= 1e-9);
  DiscreteMAMeasure bad = b;
  bad.atoms.push_back({3.0, 0.0, 1.0});
  CHECK(support_localization(bad, CircledSetModel::bidisk()) == doctest::Approx(std::log(3.0)));

  const LevelSetSolutions s = solve_common_level_sets(ball6().lifted);
  const DiscreteMAMeasure mu = discrete_ma_measure(s.points, 6);
  const double eps = ball6().slice->certificate.sup_error_off_exceptional;
  CHECK(support_localization(mu, CircledSetModel::ball()) <= eps + (std::log(2.0) + 0.1) / 6.0);
}

TEST_CASE("sobolev diagnostic") {
  const auto bid = CircledSetModel::bidisk();
  std::vector<double> vals;
  for (int n : {8, 16}) {
    const HomogeneousPair pq = bidisk_pair(n);
    const DiscreteMAMeasure mu = discrete_ma_measure(solve_common_level_sets(pq).points, n);
    const SobolevReport r = sobolev_diagnostic(pq, bid, mu, 2.0, 14);
    CHECK(r.excised_fraction() < 0.01);
    CHECK(r.cells > 0);
    vals.push_back(r.l2_distance);
  }
  CHECK(vals[1] < vals[0]);
  const SobolevReport self = sobolev_diagnostic(
      [&](cplx z, cplx w) { return extremal_eval(bid, z, w); }, bid, {}, 2.0, 10);
  CHECK(self.l2_distance <= 1e-3);
}
