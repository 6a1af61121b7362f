#include "lemnika/mamass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lemnika/error.hpp"
#include "lemnika/parallel.hpp"

namespace lemnika {

namespace {

constexpr double kTwoPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

struct Jet {
  cplx value, dz, dw;
};

// P and its gradient at (z, w), z != 0, from the factored slice.
Jet jet(const HomogeneousPoly& P, cplx z, cplx w) {
  const cplx v = P.polar(z, w).to_complex();
  cplx gz = static_cast<double>(P.z_power()) / z, gw = 0.0;
  for (const auto& t : P.slice.zeros) {
    const cplx inv = static_cast<double>(t.multiplicity) / (w - t.value * z);
    gw += inv;
    gz -= t.value * inv;
  }
  return {v, v * gz, v * gw};
}

double residual(const HomogeneousPair& pq, cplx z, cplx w) {
  return std::max(std::abs(pq.P.polar(z, w).to_complex() - 1.0),
                  std::abs(pq.Q.polar(z, w).to_complex() - 1.0));
}

struct Polished {
  cplx z, w;
  double residual;
  double det_rel;  // |det J| / (|Pz Qw| + |Pw Qz|)
};

Polished polish(const HomogeneousPair& pq, cplx z, cplx w) {
  Polished best{z, w, residual(pq, z, w), 0.0};
  for (int it = 0; it < 30 && best.residual > 1e-15; ++it) {
    const Jet a = jet(pq.P, z, w), b = jet(pq.Q, z, w);
    const cplx det = a.dz * b.dw - a.dw * b.dz;
    if (det == 0.0) break;
    const cplx fa = a.value - 1.0, fb = b.value - 1.0;
    const cplx dz = (fa * b.dw - fb * a.dw) / det;
    const cplx dw = (a.dz * fb - b.dz * fa) / det;
    z -= dz;
    w -= dw;
    const double r = residual(pq, z, w);
    if (r < best.residual) best = {z, w, r, 0.0};
    if (std::abs(dz) + std::abs(dw) <= 1e-16 * (std::abs(z) + std::abs(w))) break;
  }
  const Jet a = jet(pq.P, best.z, best.w), b = jet(pq.Q, best.z, best.w);
  const double scale = std::abs(a.dz * b.dw) + std::abs(a.dw * b.dz);
  best.det_rel = scale > 0.0 ? std::abs(a.dz * b.dw - a.dw * b.dz) / scale : 0.0;
  return best;
}

// Leading coefficient (of t^n) of the slice, as a polar value.
PolarValue leading(const HomogeneousPoly& P) {
  if (P.z_power() > 0) return {};
  return {P.slice.log_constant, P.slice.phase_constant};
}

}  // namespace

int LevelSetSolutions::degree_sum() const {
  int s = 0;
  for (const auto& p : points) s += p.local_degree;
  return s;
}

LevelSetSolutions solve_common_level_sets(const HomogeneousPair& pq) {
  const int n = pq.n;
  if (n < 1 || pq.P.n != n || pq.Q.n != n)
    throw Error(ErrorCode::InvalidArgument, "P and Q must both have degree n");

  const CoeffPoly cp = expand(pq.P.slice), cq = expand(pq.Q.slice);
  const CoeffPoly diff = subtract(cp, cq);
  if (diff.is_zero()) throw Error(ErrorCode::CommonFactorSuspected, "P(1,t) == Q(1,t)");

  const PolarValue lp = leading(pq.P), lq = leading(pq.Q);
  if (lp.log_abs != kNegInf && lq.log_abs != kNegInf) {
    const cplx ratio = std::polar(std::exp(lq.log_abs - lp.log_abs), lq.arg - lp.arg);
    if (std::abs(ratio - 1.0) <= 1e-12)
      throw Error(ErrorCode::DegenerateLeading,
                  "equal leading coefficients put solutions on z = 0; deficit " +
                      std::to_string(n - diff.degree()));
  }

  LevelSetSolutions out;
  out.n = n;
  if (diff.degree() < 1) return out;
  const RootResult rr = roots(diff);

  std::vector<std::vector<CommonSolution>> fibers(rr.roots.size());
  std::vector<int> skipped(rr.roots.size(), 0);
  parallel_for(rr.roots.size(), [&](std::size_t j) {
    const Root& r = rr.roots[j];
    const PolarValue pv = polar_eval(pq.P.slice, r.value);
    if (pv.log_abs < std::log(1e-12)) {
      skipped[j] = r.multiplicity;
      return;
    }
    for (int m = 0; m < n; ++m) {
      const double ang = (-pv.arg + 2.0 * std::numbers::pi * m) / n;
      const cplx z = std::polar(std::exp(-pv.log_abs / n), ang);
      const Polished p = polish(pq, z, r.value * z);
      fibers[j].push_back({p.z, p.w, r.multiplicity, p.residual,
                           r.multiplicity > 1 || p.det_rel < 1e-8});
    }
  });
  for (std::size_t j = 0; j < fibers.size(); ++j) {
    out.fibers += rr.roots[j].multiplicity;
    out.skipped_fibers += skipped[j];
    for (auto& s : fibers[j]) out.points.push_back(s);
  }

  // Merge clusters closer than 1e-6, summing degrees.
  std::vector<std::size_t> order(out.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.points[a].z.real() < out.points[b].z.real() ||
           (out.points[a].z.real() == out.points[b].z.real() && a < b);
  });
  std::vector<bool> dead(out.points.size(), false);
  for (std::size_t ia = 0; ia < order.size(); ++ia) {
    const std::size_t a = order[ia];
    if (dead[a]) continue;
    for (std::size_t ib = ia + 1; ib < order.size(); ++ib) {
      const std::size_t b = order[ib];
      if (out.points[b].z.real() - out.points[a].z.real() > 1e-6) break;
      if (dead[b]) continue;
      const double d = std::hypot(std::abs(out.points[a].z - out.points[b].z),
                                  std::abs(out.points[a].w - out.points[b].w));
      if (d <= 1e-6) {
        out.points[a].local_degree += out.points[b].local_degree;
        out.points[a].flagged = true;
        dead[b] = true;
      }
    }
  }
  std::vector<CommonSolution> kept;
  for (std::size_t i = 0; i < out.points.size(); ++i)
    if (!dead[i]) kept.push_back(out.points[i]);
  out.points = std::move(kept);
  return out;
}

DiscreteMAMeasure discrete_ma_measure(const std::vector<CommonSolution>& solutions, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n >= 1");
  DiscreteMAMeasure mu;
  mu.n = n;
  const double unit = kTwoPiSq / (static_cast<double>(n) * n);
  for (const auto& s : solutions) {
    mu.atoms.push_back({s.z, s.w, s.local_degree * unit});
    mu.total_mass += s.local_degree * unit;
  }
  mu.empty = mu.atoms.empty();
  return mu;
}

cplx reference_moment(ReferenceKind kind, const MomentIndex& index, double c) {
  const auto [a, b, cc, d] = index;
  for (int x : index)
    if (x < 0 || x > 32) throw Error(ErrorCode::InvalidArgument, "moment index outside 0..32");
  if (a != cc || b != d) return 0.0;
  switch (kind) {
    case ReferenceKind::Bidisk: return kTwoPiSq;
    case ReferenceKind::Ball:
    case ReferenceKind::Ellipsoid: {
      // Uniform sphere measure: E|z|^2a |w|^2b = a! b! / (a + b + 1)!.
      const double v =
          std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
      const double scale = kind == ReferenceKind::Ellipsoid ? std::pow(c, -static_cast<double>(b)) : 1.0;
      return kTwoPiSq * v * scale;
    }
  }
  return 0.0;
}

cplx discrete_moment(const DiscreteMAMeasure& mu, const MomentIndex& index) {
  const auto [a, b, c, d] = index;
  cplx s = 0.0;
  for (const auto& at : mu.atoms)
    s += at.weight * std::pow(at.z, a) * std::pow(at.w, b) * std::pow(std::conj(at.z), c) *
         std::pow(std::conj(at.w), d);
  return s;
}

std::vector<MomentIndex> moment_panel(int total) {
  std::vector<MomentIndex> out;
  for (int a = 0; a <= total; ++a)
    for (int b = 0; a + b <= total; ++b)
      for (int c = 0; a + b + c <= total; ++c)
        for (int d = 0; a + b + c + d <= total; ++d) out.push_back({a, b, c, d});
  return out;
}

MomentReport weak_star_report(const std::vector<DiscreteMAMeasure>& mus, ReferenceKind kind,
                              double c) {
  if (mus.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two degrees");
  MomentReport rep;
  const auto panel = moment_panel(4);
  const MomentIndex key{1, 0, 1, 0};
  for (const auto& mu : mus) {
    rep.n_values.push_back(mu.n);
    double worst = 0.0, key_err = 0.0;
    for (const auto& idx : panel) {
      MomentRow row{idx, mu.n, discrete_moment(mu, idx), reference_moment(kind, idx, c), 0.0};
      row.abs_error = std::abs(row.discrete - row.reference);
      worst = std::max(worst, row.abs_error);
      if (idx == key) key_err = row.abs_error;
      rep.rows.push_back(row);
    }
    rep.max_error.push_back(worst);
    rep.key_error.push_back(key_err);
  }
  rep.key_nonincreasing = true;
  for (std::size_t i = 1; i < rep.key_error.size(); ++i)
    if (rep.key_error[i] > rep.key_error[i - 1] + 1e-12) rep.key_nonincreasing = false;
  return rep;
}

double support_localization(const DiscreteMAMeasure& mu, const CircledSetModel& m) {
  double s = 0.0;
  for (const auto& a : mu.atoms) s = std::max(s, std::abs(robin_eval(m, a.z, a.w)));
  return s;
}

SobolevReport sobolev_diagnostic(const std::function<double(cplx, cplx)>& u,
                                 const CircledSetModel& m, const DiscreteMAMeasure& atoms,
                                 double radius, int grid) {
  if (grid < 2 || !(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "empty Sobolev grid");
  const double h = 2.0 * radius / grid;
  const double delta = 0.5 * h;
  const std::size_t g = static_cast<std::size_t>(grid);
  const std::size_t total = g * g * g * g;
  std::vector<double> sq(total, 0.0);
  std::vector<char> state(total, 0);  // 0 outside, 1 used, 2 excised
  parallel_for(total, [&](std::size_t idx) {
    std::array<double, 4> x;
    std::size_t r = idx;
    for (int k = 0; k < 4; ++k) {
      x[k] = -radius + (static_cast<double>(r % g) + 0.5) * h;
      r /= g;
    }
    if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] > radius * radius) return;
    const cplx z{x[0], x[1]}, w{x[2], x[3]};
    for (const auto& a : atoms.atoms)
      if (std::hypot(std::abs(z - a.z), std::abs(w - a.w)) < 1e-3) {
        state[idx] = 2;
        return;
      }
    auto vk = [&](cplx zz, cplx ww) { return extremal_eval(m, zz, ww); };
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      auto at = [&](double sign) {
        std::array<double, 4> y = x;
        y[k] += sign * delta;
        return std::pair{cplx{y[0], y[1]}, cplx{y[2], y[3]}};
      };
      const auto [zp, wp] = at(1.0);
      const auto [zm, wm] = at(-1.0);
      const double du = (u(zp, wp) - u(zm, wm)) / (2.0 * delta);
      const double dv = (vk(zp, wp) - vk(zm, wm)) / (2.0 * delta);
      s += (du - dv) * (du - dv);
    }
    sq[idx] = std::isfinite(s) ? s : 0.0;
    state[idx] = std::isfinite(s) ? 1 : 2;
  });
  SobolevReport rep;
  double sum = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    if (state[i] == 0) continue;
    ++rep.cells;
    if (state[i] == 2) {
      ++rep.excised;
      continue;
    }
    sum += sq[i];
  }
  rep.l2_distance = std::sqrt(sum * h * h * h * h);
  return rep;
}

SobolevReport sobolev_diagnostic(const HomogeneousPair& pq, const CircledSetModel& m,
                                 const DiscreteMAMeasure& atoms, double radius, int grid) {
  return sobolev_diagnostic([&pq](cplx z, cplx w) { return U_n_eval(pq, z, w); }, m, atoms,
                            radius, grid);
}

}  // namespace lemnika
