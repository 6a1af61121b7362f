#include "lemnika/cpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lemnika/error.hpp"

namespace lemnika {

int FactoredPoly::degree() const {
  int d = 0;
  for (const auto& z : zeros) d += z.multiplicity;
  return d;
}

bool CoeffPoly::is_zero() const {
  return std::all_of(coefficients.begin(), coefficients.end(),
                     [](cplx c) { return c == cplx{}; });
}

cplx PolarValue::to_complex() const {
  if (log_abs == kNegInf) return {};
  return std::polar(std::exp(log_abs), arg);
}

double log_abs_eval(const FactoredPoly& f, cplx z) {
  // Squared distances are multiplied in runs of eight before one log; a run
  // stays inside the double range for distances in [1e-18, 1e18].
  constexpr int kRun = 8;
  double acc = f.log_constant;
  double prod = 1.0;
  int run = 0;
  for (const auto& zero : f.zeros) {
    const cplx diff = z - zero.value;
    if (diff == cplx{}) return kNegInf;
    const double d2 = std::norm(diff);
    if (zero.multiplicity != 1 || !(d2 >= 1e-36 && d2 <= 1e36)) {
      acc += zero.multiplicity * std::log(std::abs(diff));
      continue;
    }
    prod *= d2;
    if (++run == kRun) {
      acc += 0.5 * std::log(prod);
      prod = 1.0;
      run = 0;
    }
  }
  if (run > 0) acc += 0.5 * std::log(prod);
  return acc;
}

PolarValue polar_eval(const FactoredPoly& f, cplx z) {
  PolarValue out{f.log_constant, f.phase_constant};
  for (const auto& zero : f.zeros) {
    const cplx d = z - zero.value;
    if (d == cplx{}) return {kNegInf, 0.0};
    out.log_abs += zero.multiplicity * std::log(std::abs(d));
    out.arg += zero.multiplicity * std::arg(d);
  }
  out.arg = std::remainder(out.arg, 2.0 * std::numbers::pi);
  return out;
}

namespace {

// Scales v so that max|v_j| lands in [1, 2); returns the applied log2 shift.
int renormalize(std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::max(std::abs(c.real()), std::abs(c.imag())));
  if (m == 0.0 || !std::isfinite(m)) return 0;
  const int e = std::ilogb(m);
  for (auto& c : v) c = {std::ldexp(c.real(), -e), std::ldexp(c.imag(), -e)};
  return e;
}

double norm2(std::span<const cplx> c) {
  double s = 0.0;
  for (const auto& x : c) s += std::norm(x);
  return std::sqrt(s);
}

// Leja order: each next factor maximizes the product of distances to the
// ones already taken, which keeps partial products from growing far beyond
// the final coefficients.
std::vector<cplx> leja_order(const FactoredPoly& f) {
  std::vector<cplx> pts;
  for (const auto& zero : f.zeros)
    for (int m = 0; m < zero.multiplicity; ++m) pts.push_back(zero.value);
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(pts[i]) > std::abs(pts[first])) first = i;
  std::swap(pts[0], pts[first]);
  std::vector<double> score(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    std::size_t best = k;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = k; i < n; ++i) {
      const double d = std::abs(pts[i] - pts[k - 1]);
      score[i] += d > 0.0 ? std::log(d) : -1e300;
      if (score[i] > best_score) {
        best_score = score[i];
        best = i;
      }
    }
    std::swap(pts[k], pts[best]);
    std::swap(score[k], score[best]);
  }
  return pts;
}

}  // namespace

CoeffPoly expand(const FactoredPoly& f) {
  const int deg = f.degree();
  if (deg > 2048) throw Error(ErrorCode::DegreeExceeded, "expand supports degree <= 2048");
  std::vector<cplx> c{cplx{1.0, 0.0}};
  c.reserve(static_cast<std::size_t>(deg) + 1);
  long long shift = 0;
  for (const cplx z : leja_order(f)) {
    c.push_back(cplx{});
    for (std::size_t j = c.size() - 1; j > 0; --j) c[j] = c[j - 1] - z * c[j];
    c[0] = -z * c[0];
    shift += renormalize(c);
  }
  const cplx phase = std::polar(1.0, f.phase_constant);
  for (auto& x : c) {
    x *= phase;
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw Error(ErrorCode::Overflow, "non-finite coefficient during expansion");
  }
  CoeffPoly out;
  out.coefficients = std::move(c);
  out.log2_scale = static_cast<double>(shift) + f.log_constant / std::numbers::ln2;
  return out;
}

cplx horner(std::span<const cplx> coefficients, cplx z) {
  cplx acc{};
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double normalized_residual(const CoeffPoly& p, cplx r) {
  const auto& c = p.coefficients;
  const double nrm = norm2(c);
  if (nrm == 0.0) return 0.0;
  if (std::abs(r) <= 1.0) return std::abs(horner(c, r)) / nrm;
  // p(r) / r^n = rev(1/r)
  const cplx y = 1.0 / r;
  cplx acc{};
  for (const auto& x : c) acc = acc * y + x;
  return std::abs(acc) / nrm;
}

namespace {

struct Step {
  cplx ratio;      // p / p'
  bool settled;    // |p| below the rounding-error bound
};

// Newton ratio with a running rounding-error test; evaluates the reversed
// polynomial outside the unit disk so large moduli never overflow.
Step newton_step(const std::vector<cplx>& c, const std::vector<double>& abs_c, cplx z) {
  const std::size_t n = c.size() - 1;
  const double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(z) <= 1.0) {
    cplx p = c[n], dp{};
    double bound = abs_c[n];
    const double az = std::abs(z);
    for (std::size_t j = n; j-- > 0;) {
      dp = dp * z + p;
      p = p * z + c[j];
      bound = bound * az + abs_c[j];
    }
    const bool settled = std::abs(p) <= 4.0 * static_cast<double>(n) * eps * bound;
    return {dp == cplx{} ? cplx{1e-3, 1e-3} : p / dp, settled};
  }
  const cplx y = 1.0 / z;
  const double ay = std::abs(y);
  cplx q = c[0], dq{};
  double bound = abs_c[0];
  for (std::size_t j = 1; j <= n; ++j) {
    dq = dq * y + q;
    q = q * y + c[j];
    bound = bound * ay + abs_c[j];
  }
  const bool settled = std::abs(q) <= 4.0 * static_cast<double>(n) * eps * bound;
  const cplx denom = y * (static_cast<double>(n) * q - y * dq);
  return {denom == cplx{} ? cplx{1e-3, 1e-3} * std::abs(z) : q / denom, settled};
}

// Starting points on circles whose radii come from the upper convex hull of
// (j, log|c_j|), the Newton polygon of the coefficient moduli.
std::vector<cplx> initial_points(const std::vector<cplx>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<int> idx;
  std::vector<double> logc;
  for (int j = 0; j <= n; ++j) {
    if (c[j] != cplx{}) {
      idx.push_back(j);
      logc.push_back(std::log(std::abs(c[j])));
    }
  }
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    while (hull.size() >= 2) {
      const auto a = hull[hull.size() - 2], b = hull.back();
      const double cross = (idx[b] - idx[a]) * (logc[i] - logc[a]) -
                           (logc[b] - logc[a]) * static_cast<double>(idx[i] - idx[a]);
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  std::vector<cplx> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double sigma = 0.7;
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int i = idx[hull[h]], k = idx[hull[h + 1]];
    const int m = k - i;
    const double radius = std::exp((logc[hull[h]] - logc[hull[h + 1]]) / m);
    for (int j = 0; j < m; ++j) {
      const double angle = 2.0 * std::numbers::pi * j / m +
                           2.0 * std::numbers::pi * i / n + sigma;
      pts.push_back(std::polar(radius, angle));
    }
  }
  return pts;
}

}  // namespace

RootResult roots(const CoeffPoly& p, const RootOptions& options) {
  std::vector<cplx> c = p.coefficients;
  while (!c.empty() && c.back() == cplx{}) c.pop_back();
  if (c.size() < 2) throw Error(ErrorCode::InvalidArgument, "roots needs degree >= 1");

  RootResult out;
  std::vector<cplx> found;
  std::size_t lead_zeros = 0;
  while (c[lead_zeros] == cplx{}) ++lead_zeros;
  found.assign(lead_zeros, cplx{});
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(lead_zeros));
  renormalize(c);

  const std::size_t n = c.size() - 1;
  if (n == 1) {
    found.push_back(-c[0] / c[1]);
    out.converged = true;
  } else if (n > 1) {
    std::vector<double> abs_c(c.size());
    std::transform(c.begin(), c.end(), abs_c.begin(), [](cplx x) { return std::abs(x); });
    std::vector<cplx> z = initial_points(c);
    std::vector<bool> settled(n, false);
    int sweep = 0;
    for (; sweep < options.max_sweeps; ++sweep) {
      bool all = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (settled[i]) continue;
        const Step s = newton_step(c, abs_c, z[i]);
        if (s.settled) {
          settled[i] = true;
          continue;
        }
        all = false;
        cplx sum{};
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) sum += 1.0 / (z[i] - z[j]);
        z[i] -= s.ratio / (1.0 - s.ratio * sum);
      }
      if (all) break;
    }
    out.sweeps = sweep;
    out.converged = std::all_of(settled.begin(), settled.end(), [](bool b) { return b; });
    CoeffPoly work{c, 0.0};
    for (auto& r : z) {
      double res = normalized_residual(work, r);
      for (int step = 0; step < options.polish_steps && res > 0.0; ++step) {
        const Step s = newton_step(c, abs_c, r);
        const cplx candidate = r - s.ratio;
        const double cand_res = normalized_residual(work, candidate);
        if (!(cand_res < res)) break;
        r = candidate;
        res = cand_res;
      }
      found.push_back(r);
    }
  } else {
    out.converged = true;
  }

  // Cluster near-coincident roots, summing multiplicities.
  std::vector<bool> used(found.size(), false);
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    cplx sum = found[i];
    int mult = 1;
    for (std::size_t j = i + 1; j < found.size(); ++j) {
      if (used[j]) continue;
      const double scale = std::max(1.0, std::abs(found[i]));
      if (std::abs(found[j] - found[i]) < options.cluster_rel * scale) {
        used[j] = true;
        sum += found[j];
        ++mult;
      }
    }
    Root r;
    r.value = sum / static_cast<double>(mult);
    r.multiplicity = mult;
    r.residual = normalized_residual(p, r.value);
    out.roots.push_back(r);
  }
  return out;
}

CoeffPoly subtract(const CoeffPoly& a, const CoeffPoly& b) {
  const double s = std::max(a.log2_scale, b.log2_scale);
  const double fa = std::exp2(a.log2_scale - s);
  const double fb = std::exp2(b.log2_scale - s);
  const std::size_t len = std::max(a.coefficients.size(), b.coefficients.size());
  std::vector<cplx> out(len);
  for (std::size_t j = 0; j < len; ++j) {
    const cplx x = j < a.coefficients.size() ? a.coefficients[j] * fa : cplx{};
    const cplx y = j < b.coefficients.size() ? b.coefficients[j] * fb : cplx{};
    out[j] = x - y;
  }
  // Drop leading coefficients that cancelled to rounding level.
  while (!out.empty()) {
    const std::size_t j = out.size() - 1;
    const double ax = j < a.coefficients.size() ? std::abs(a.coefficients[j] * fa) : 0.0;
    const double ay = j < b.coefficients.size() ? std::abs(b.coefficients[j] * fb) : 0.0;
    if (std::abs(out[j]) <= 1e-12 * std::max(ax, ay)) out.pop_back();
    else break;
  }
  CoeffPoly r{std::move(out), s};
  const int e = renormalize(r.coefficients);
  r.log2_scale += e;
  return r;
}

}  // namespace lemnika
