#include "lemnika/classical1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lemnika/error.hpp"
#include "lemnika/parallel.hpp"

namespace lemnika {

namespace {

// Sum of log|c - a_j| over j != skip.
double log_dist_sum(cplx c, const std::vector<cplx>& a, std::size_t skip) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (j != skip) s += std::log(std::abs(c - a[j]));
  return s;
}

double distance_to_set(const CompactSet1D& K, cplx z) {
  switch (K.kind) {
    case CompactSet1D::Kind::Disk: return std::max(0.0, std::abs(z) - K.radius);
    case CompactSet1D::Kind::Interval: {
      const double x = std::clamp(z.real(), K.alpha, K.beta);
      return std::abs(z - cplx{x, 0.0});
    }
    case CompactSet1D::Kind::Cloud: break;
  }
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : K.candidates) d = std::min(d, std::abs(z - c));
  return d;
}

// Point of the boundary parametrized by s in [0, 1].
cplx boundary_point(const CompactSet1D& K, double s) {
  if (K.kind == CompactSet1D::Kind::Disk) return std::polar(K.radius, 2.0 * std::numbers::pi * s);
  return {K.alpha + s * (K.beta - K.alpha), 0.0};
}

}  // namespace

CompactSet1D CompactSet1D::disk(double r, int n_grid) {
  if (!(r > 0.0) || n_grid < 1) throw Error(ErrorCode::InvalidArgument, "disk needs r > 0");
  CompactSet1D K;
  K.kind = Kind::Disk;
  K.radius = r;
  for (int i = 0; i < n_grid; ++i)
    K.candidates.push_back(std::polar(r, 2.0 * std::numbers::pi * i / n_grid));
  K.spacing = 2.0 * std::numbers::pi * r / n_grid;
  return K;
}

CompactSet1D CompactSet1D::interval(double alpha, double beta, int n_grid) {
  if (!(beta > alpha) || n_grid < 2) throw Error(ErrorCode::InvalidArgument, "interval needs alpha < beta");
  CompactSet1D K;
  K.kind = Kind::Interval;
  K.alpha = alpha;
  K.beta = beta;
  for (int i = 0; i < n_grid; ++i)
    K.candidates.emplace_back(i == n_grid - 1 ? beta : alpha + (beta - alpha) * i / (n_grid - 1), 0.0);
  K.spacing = (beta - alpha) / (n_grid - 1);
  return K;
}

CompactSet1D CompactSet1D::cloud(std::vector<cplx> points) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "empty cloud");
  CompactSet1D K;
  K.kind = Kind::Cloud;
  K.candidates = std::move(points);
  return K;
}

double log_vandermonde(const std::vector<cplx>& points) {
  double s = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j)
    for (std::size_t k = j + 1; k < points.size(); ++k) s += std::log(std::abs(points[j] - points[k]));
  return s;
}

FeketeResult fekete_points(const CompactSet1D& K, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n >= 1");
  const auto& g = K.candidates;
  if (g.size() < 4 * static_cast<std::size_t>(n))
    throw Error(ErrorCode::InvalidArgument, "candidate grid needs at least 4n nodes");
  FeketeResult res;

  if (n <= 4 && g.size() <= 64) {
    res.brute_force = true;
    std::vector<std::size_t> idx(n), best;
    double best_v = -std::numeric_limits<double>::infinity();
    auto rec = [&](auto&& self, int depth, std::size_t from) -> void {
      if (depth == n) {
        std::vector<cplx> pts;
        for (auto i : idx) pts.push_back(g[i]);
        const double v = log_vandermonde(pts);
        if (v > best_v) {
          best_v = v;
          best = idx;
        }
        return;
      }
      for (std::size_t i = from; i < g.size(); ++i) {
        idx[depth] = i;
        self(self, depth + 1, i + 1);
      }
    };
    rec(rec, 0, 0);
    for (auto i : best) res.points.push_back(g[i]);
    res.log_vandermonde = best_v;
    res.history.push_back(best_v);
    return res;
  }

  // Leja start from the node of largest modulus (first in grid order on ties).
  std::vector<bool> used(g.size(), false);
  std::size_t first = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (std::abs(g[i]) > std::abs(g[first])) first = i;
  std::vector<std::size_t> chosen{first};
  used[first] = true;
  std::vector<double> score(g.size(), 0.0);
  while (static_cast<int>(chosen.size()) < n) {
    const cplx last = g[chosen.back()];
    std::size_t arg = g.size();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (used[i]) continue;
      score[i] += std::log(std::abs(g[i] - last));
      if (arg == g.size() || score[i] > score[arg]) arg = i;
    }
    chosen.push_back(arg);
    used[arg] = true;
  }
  for (auto i : chosen) res.points.push_back(g[i]);
  res.log_vandermonde = log_vandermonde(res.points);
  res.history.push_back(res.log_vandermonde);

  std::vector<double> cand(g.size());
  for (int sweep = 0; sweep < 1000; ++sweep) {
    bool improved = false;
    for (std::size_t p = 0; p < chosen.size(); ++p) {
      const double current = log_dist_sum(res.points[p], res.points, p);
      parallel_for(g.size(), [&](std::size_t i) {
        cand[i] = used[i] ? -std::numeric_limits<double>::infinity()
                          : log_dist_sum(g[i], res.points, p);
      });
      std::size_t arg = 0;
      for (std::size_t i = 1; i < g.size(); ++i)
        if (cand[i] > cand[arg]) arg = i;
      if (cand[arg] > current + 1e-12) {
        used[chosen[p]] = false;
        used[arg] = true;
        chosen[p] = arg;
        res.points[p] = g[arg];
        res.log_vandermonde = log_vandermonde(res.points);
        res.history.push_back(res.log_vandermonde);
        improved = true;
      }
    }
    res.sweeps = sweep + 1;
    if (!improved) break;
  }
  return res;
}

FactoredPoly fekete_polynomial(const std::vector<cplx>& points) {
  FactoredPoly f;
  for (const auto& a : points) f.zeros.push_back({a, 1});
  return f;
}

double extremal_1d(const CompactSet1D& K, cplx z) {
  switch (K.kind) {
    case CompactSet1D::Kind::Disk: return std::max(0.0, std::log(std::abs(z) / K.radius));
    case CompactSet1D::Kind::Interval: {
      const cplx x = (2.0 * z - (K.alpha + K.beta)) / (K.beta - K.alpha);
      const cplx s = std::sqrt(x * x - 1.0);
      return std::max(0.0, std::log(std::max(std::abs(x + s), std::abs(x - s))));
    }
    case CompactSet1D::Kind::Cloud: break;
  }
  throw Error(ErrorCode::UnsupportedKind, "no closed form for a sample cloud");
}

double log_sup_norm(const CompactSet1D& K, const FactoredPoly& p) {
  if (K.kind == CompactSet1D::Kind::Cloud) {
    double m = kNegInf;
    for (const auto& c : K.candidates) m = std::max(m, log_abs_eval(p, c));
    return m;
  }
  const std::size_t ns = 16 * std::max<std::size_t>(K.candidates.size(), 64);
  const bool closed = K.kind == CompactSet1D::Kind::Interval;
  const double denom = closed ? static_cast<double>(ns - 1) : static_cast<double>(ns);
  std::vector<double> v(ns);
  parallel_for(ns, [&](std::size_t i) { v[i] = log_abs_eval(p, boundary_point(K, i / denom)); });
  std::vector<std::size_t> order(ns);
  for (std::size_t i = 0; i < ns; ++i) order[i] = i;
  const std::size_t top = std::min<std::size_t>(8, ns);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](std::size_t a, std::size_t b) { return v[a] > v[b] || (v[a] == v[b] && a < b); });
  double best = v[order[0]];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t t = 0; t < top; ++t) {
    const double s0 = order[t] / denom;
    double a = s0 - 1.0 / denom, b = s0 + 1.0 / denom;
    if (closed) {
      a = std::max(a, 0.0);
      b = std::min(b, 1.0);
    }
    auto f = [&](double s) { return log_abs_eval(p, boundary_point(K, s)); };
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 60; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = f(d);
      }
    }
    best = std::max({best, fc, fd, f(a), f(b)});
  }
  return best;
}

LemniscateReport lemniscate_sandwich(const FactoredPoly& p, const CompactSet1D& K, double eps,
                                     int boundary_samples) {
  if (K.kind == CompactSet1D::Kind::Cloud)
    throw Error(ErrorCode::UnsupportedKind, "no eps-neighbourhood boundary for a sample cloud");
  if (!(eps > 0.0) || boundary_samples < 8) throw Error(ErrorCode::InvalidArgument, "eps > 0");
  LemniscateReport rep;
  rep.log_norm = log_sup_norm(K, p);

  std::vector<cplx> bd;
  if (K.kind == CompactSet1D::Kind::Disk) {
    for (int i = 0; i < boundary_samples; ++i)
      bd.push_back(std::polar(K.radius + eps, 2.0 * std::numbers::pi * i / boundary_samples));
  } else {
    // Stadium: two segments at height +-eps and two half circles.
    const double len = K.beta - K.alpha;
    const double per = 2.0 * len + 2.0 * std::numbers::pi * eps;
    for (int i = 0; i < boundary_samples; ++i) {
      double s = per * i / boundary_samples;
      if (s < len) {
        bd.emplace_back(K.alpha + s, eps);
        continue;
      }
      s -= len;
      if (s < std::numbers::pi * eps) {
        bd.push_back(K.beta + std::polar(eps, 0.5 * std::numbers::pi - s / eps));
        continue;
      }
      s -= std::numbers::pi * eps;
      if (s < len) {
        bd.emplace_back(K.beta - s, -eps);
        continue;
      }
      s -= len;
      bd.push_back(K.alpha + std::polar(eps, -0.5 * std::numbers::pi - s / eps));
    }
  }
  rep.boundary_samples = static_cast<std::int64_t>(bd.size());
  std::vector<double> m(bd.size());
  parallel_for(bd.size(), [&](std::size_t i) { m[i] = log_abs_eval(p, bd[i]) - rep.log_norm; });
  rep.boundary_margin = *std::min_element(m.begin(), m.end());

  rep.grid_margin = std::numeric_limits<double>::infinity();
  for (const auto& c : K.candidates)
    rep.grid_margin = std::min(rep.grid_margin, rep.log_norm - log_abs_eval(p, c));
  for (const auto& z : p.zeros)
    if (distance_to_set(K, z.value) > eps) rep.zeros_outside += z.multiplicity;
  rep.pass = rep.boundary_margin > 0.0 && rep.zeros_outside == 0 && rep.grid_margin >= -1e-12;
  return rep;
}

double counting_measure_distance(const std::vector<cplx>& zeros) {
  if (zeros.empty()) throw Error(ErrorCode::InvalidArgument, "no zeros");
  std::vector<double> x;
  for (const auto& z : zeros) {
    if (std::abs(z.imag()) > 1e-8) throw Error(ErrorCode::InvalidArgument, "zeros must be real to 1e-8");
    x.push_back(z.real());
  }
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = 0.5 + std::asin(std::clamp(x[i], -1.0, 1.0)) / std::numbers::pi;
    d = std::max({d, std::abs((i + 1) / n - F), std::abs(i / n - F)});
  }
  return d;
}

double chebyshev_poly(int n, double x) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n >= 0");
  if (std::abs(x) <= 1.0) return std::cos(n * std::acos(x));
  const double v = std::cosh(n * std::acosh(std::abs(x)));
  return (x < 0.0 && n % 2 == 1) ? -v : v;
}

double chebyshev_recurrence(int n, double x) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n >= 0");
  if (n == 0) return 1.0;
  double a = 1.0, b = x;
  for (int k = 1; k < n; ++k) {
    const double c = 2.0 * x * b - a;
    a = b;
    b = c;
  }
  return b;
}

FactoredPoly chebyshev_factored(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n >= 1");
  FactoredPoly f;
  for (int j = 1; j <= n; ++j)
    f.zeros.push_back({std::cos((2.0 * j - 1.0) * std::numbers::pi / (2.0 * n)), 1});
  f.log_constant = (n - 1) * std::log(2.0);
  return f;
}

}  // namespace lemnika
