#include "lemnika/homlift.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "lemnika/error.hpp"
#include "lemnika/parallel.hpp"

namespace lemnika {

CircledSetModel CircledSetModel::ball() {
  CircledSetModel m;
  m.kind = Kind::Ball;
  m.slice = [](cplx t) { return 0.5 * std::log1p(std::norm(t)); };
  return m;
}

CircledSetModel CircledSetModel::bidisk() {
  CircledSetModel m;
  m.kind = Kind::Bidisk;
  m.slice = [](cplx t) { return std::max(0.0, std::log(std::abs(t))); };
  return m;
}

CircledSetModel CircledSetModel::ellipsoid(double c) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "ellipsoid needs c > 0");
  CircledSetModel m;
  m.kind = Kind::Ellipsoid;
  m.c = c;
  m.slice = [c](cplx t) { return 0.5 * std::log1p(c * std::norm(t)); };
  m.tail_const = 0.5 * std::log(c);
  return m;
}

CircledSetModel CircledSetModel::custom(std::function<double(cplx)> u, double tail_const) {
  if (!u) throw Error(ErrorCode::InvalidArgument, "custom model needs a slice function");
  CircledSetModel m;
  m.kind = Kind::Custom;
  m.slice = std::move(u);
  m.tail_const = tail_const;
  return m;
}

std::string CircledSetModel::name() const {
  switch (kind) {
    case Kind::Ball: return "ball";
    case Kind::Bidisk: return "bidisk";
    case Kind::Ellipsoid: return "ellipsoid";
    case Kind::Custom: return "custom";
  }
  return "custom";
}

PlanarMeasure CircledSetModel::riesz_measure() const {
  switch (kind) {
    case Kind::Ball: return ball_slice_measure();
    case Kind::Ellipsoid: return ellipsoid_slice_measure(c, 12.0 / std::sqrt(std::min(c, 1.0)), 1.0 / 32.0);
    case Kind::Bidisk: return unit_circle_measure();
    case Kind::Custom: break;
  }
  throw Error(ErrorCode::UnsupportedKind, "custom models carry no built-in Riesz measure");
}

double robin_eval(const CircledSetModel& m, cplx z, cplx w) {
  const double az = std::abs(z), aw = std::abs(w);
  if (az == 0.0 && aw == 0.0) throw Error(ErrorCode::OriginUndefined, "rho_K(0,0)");
  switch (m.kind) {
    case CircledSetModel::Kind::Ball: return std::log(std::hypot(az, aw));
    case CircledSetModel::Kind::Ellipsoid: return std::log(std::hypot(az, std::sqrt(m.c) * aw));
    case CircledSetModel::Kind::Bidisk: return std::log(std::max(az, aw));
    case CircledSetModel::Kind::Custom: break;
  }
  if (az >= aw) return std::log(az) + m.u(w / z);
  // rho(z, w) = log|w| + rho(z/w, 1) and rho(s, 1) = u(1/s) + log|s|.
  const cplx s = z / w;
  return std::log(aw) + (az == 0.0 ? m.tail_const : m.u(1.0 / s) + std::log(std::abs(s)));
}

double extremal_eval(const CircledSetModel& m, cplx z, cplx w) {
  if (z == 0.0 && w == 0.0) return 0.0;
  return std::max(0.0, robin_eval(m, z, w));
}

double HomogeneousPoly::log_abs(cplx z, cplx w) const {
  double s = slice.log_constant;
  const int zp = z_power();
  if (zp > 0) {
    if (z == 0.0) return kNegInf;
    s += zp * std::log(std::abs(z));
  }
  for (const auto& t : slice.zeros) {
    const double a = std::abs(w - t.value * z);
    if (a == 0.0) return kNegInf;
    s += t.multiplicity * std::log(a);
  }
  return s;
}

PolarValue HomogeneousPoly::polar(cplx z, cplx w) const {
  PolarValue v;
  v.log_abs = log_abs(z, w);
  double a = slice.phase_constant + z_power() * std::arg(z);
  for (const auto& t : slice.zeros) a += t.multiplicity * std::arg(w - t.value * z);
  v.arg = std::remainder(a, 2.0 * std::numbers::pi);
  return v;
}

HomogeneousPoly homogenize(const FactoredPoly& p, int n) {
  if (p.degree() > n) throw Error(ErrorCode::DegreeExceeded, "slice degree exceeds n");
  return HomogeneousPoly{p, n};
}

HomogeneousPair lift_pair(const ApproximantPair& pair, const CircledSetModel& m) {
  const int n = pair.degree();
  if (n < 1 || pair.Q.degree != n) throw Error(ErrorCode::InvalidArgument, "pair degrees differ");
  HomogeneousPair h{homogenize(pair.P.poly, n), homogenize(pair.Q.poly, n), n};
  const double u0 = m.u(0.0);
  h.P.slice.log_constant += n * u0;
  h.Q.slice.log_constant += n * u0;
  return h;
}

HomogeneousPair bidisk_pair(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n >= 1");
  FactoredPoly zn;  // degree 0 slice: P = z^n
  FactoredPoly wn;
  wn.zeros.push_back({0.0, n});  // slice t^n: Q = w^n
  return {homogenize(zn, n), homogenize(wn, n), n};
}

ModelPair model_pair(const CircledSetModel& m, int n, const CertifyOptions& options) {
  if (m.kind == CircledSetModel::Kind::Bidisk) return {bidisk_pair(n), std::nullopt};
  const auto [k, M] = split_degree(n, true);
  ApproximantPair pair = atomize_fixed(m.riesz_measure(), k, M, options);
  HomogeneousPair lifted = lift_pair(pair, m);
  return {std::move(lifted), std::move(pair)};
}

double max_form(const HomogeneousPair& pq, cplx z, cplx w) {
  const double inv = 1.0 / pq.n;
  return std::max(inv * pq.P.log_abs(z, w), inv * pq.Q.log_abs(z, w));
}

double u_tilde_eval(const HomogeneousPair& pq, cplx z, cplx w) {
  return std::max(0.0, max_form(pq, z, w));
}

double log_abs_minus_one(const PolarValue& p) {
  if (p.log_abs == kNegInf) return 0.0;
  if (p.log_abs > 0.0) {
    // |P - 1| = |P| |1 - 1/P|; exp(-L) underflows harmlessly for huge |P|.
    const cplx y = std::polar(std::exp(-p.log_abs), -p.arg);
    return p.log_abs + std::log(std::abs(1.0 - y));
  }
  const cplx y = std::polar(std::exp(p.log_abs), p.arg);
  return std::log(std::abs(1.0 - y));
}

double U_n_eval(const HomogeneousPair& pq, cplx z, cplx w) {
  const double inv = 1.0 / pq.n;
  return std::max(inv * log_abs_minus_one(pq.P.polar(z, w)),
                  inv * log_abs_minus_one(pq.Q.polar(z, w)));
}

SandwichReport sandwich_check(const CircledSetModel& m, const HomogeneousPair& pq, double eps,
                              const SandwichOptions& options) {
  if (options.n_alpha < 2 || options.n_phase < 1 || options.scales.empty())
    throw Error(ErrorCode::InvalidArgument, "empty sandwich grid");
  const int na = options.n_alpha, np = options.n_phase;
  const auto ns = options.scales.size();
  const std::size_t n_dir = static_cast<std::size_t>(na) * np * np;

  struct Local {
    double upper = -std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double vk = 0.0;
    cplx z, w;
  };
  std::vector<Local> local(n_dir);
  parallel_for(n_dir, [&](std::size_t i) {
    const int ia = static_cast<int>(i / (np * np));
    const int i1 = static_cast<int>((i / np) % np);
    const int i2 = static_cast<int>(i % np);
    const double a = 0.5 * std::numbers::pi * ia / (na - 1);
    const double p1 = 2.0 * std::numbers::pi * i1 / np;
    const double p2 = 2.0 * std::numbers::pi * (i2 + 0.5) / np;
    const cplx z0 = std::polar(std::cos(a), p1), w0 = std::polar(std::sin(a), p2);
    Local& l = local[i];
    for (std::size_t is = 0; is < ns; ++is) {
      const double s = options.scales[is];
      const cplx z = s * z0, w = s * w0;
      const double f = max_form(pq, z, w);
      const double r = robin_eval(m, z, w);
      if (f - r > l.upper) {
        l.upper = f - r;
        l.z = z;
        l.w = w;
      }
      l.lower = std::max(l.lower, r - f);
      l.vk = std::max(l.vk, std::abs(std::max(0.0, f) - std::max(0.0, r)));
    }
  });

  SandwichReport rep;
  rep.eps = eps;
  rep.n_samples = static_cast<std::int64_t>(n_dir * ns);
  rep.max_upper_excess = -std::numeric_limits<double>::infinity();
  rep.max_lower_deficit = -std::numeric_limits<double>::infinity();
  for (const auto& l : local) {
    if (l.upper > rep.max_upper_excess) {
      rep.max_upper_excess = l.upper;
      rep.worst_z = l.z;
      rep.worst_w = l.w;
    }
    rep.max_lower_deficit = std::max(rep.max_lower_deficit, l.lower);
    rep.max_vk_error = std::max(rep.max_vk_error, l.vk);
  }
  rep.upper_ok = rep.max_upper_excess <= options.upper_slack;
  rep.lower_ok = rep.max_lower_deficit <= eps;
  rep.vk_ok = rep.max_vk_error <= eps;
  rep.pass = rep.upper_ok && rep.lower_ok && rep.vk_ok;
  return rep;
}

std::vector<std::pair<int, int>> monomials_up_to(int degree) {
  std::vector<std::pair<int, int>> out;
  for (int d = 0; d <= degree; ++d)
    for (int b = 0; b <= d; ++b) out.emplace_back(d - b, b);
  return out;
}

cplx ChebyshevResult::eval(cplx z, cplx w) const {
  cplx s = 0.0;
  for (std::size_t j = 0; j < monomials.size(); ++j)
    s += coefficients[j] * std::pow(z, monomials[j].first) * std::pow(w, monomials[j].second);
  return s;
}

ChebyshevResult chebyshev_complete(const std::vector<cplx>& h_values,
                                   const std::vector<std::pair<cplx, cplx>>& samples, int n,
                                   double gap_tol, int max_iterations) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n >= 1");
  if (h_values.size() != samples.size())
    throw Error(ErrorCode::InvalidArgument, "one H value per sample");
  ChebyshevResult res;
  res.monomials = monomials_up_to(n - 1);
  const auto unknowns = static_cast<Eigen::Index>(res.monomials.size());
  const auto ns = static_cast<Eigen::Index>(samples.size());
  if (ns < 10 * unknowns)
    throw Error(ErrorCode::InvalidArgument, "need at least 10 samples per coefficient");

  using Mat = Eigen::MatrixXcd;
  using Vec = Eigen::VectorXcd;
  Mat A(ns, unknowns);
  Vec h(ns);
  for (Eigen::Index s = 0; s < ns; ++s) {
    const auto [z, w] = samples[static_cast<std::size_t>(s)];
    for (Eigen::Index j = 0; j < unknowns; ++j) {
      const auto [a, b] = res.monomials[static_cast<std::size_t>(j)];
      A(s, j) = std::pow(z, a) * std::pow(w, b);
    }
    h(s) = h_values[static_cast<std::size_t>(s)];
  }
  {
    Eigen::ColPivHouseholderQR<Mat> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < unknowns)
      throw Error(ErrorCode::IllConditioned, "sample matrix has rank " + std::to_string(qr.rank()) +
                                                 " < " + std::to_string(unknowns));
  }

  // Lawson: weights w_s, weighted least squares, w_s <- w_s |r_s|.
  Eigen::VectorXd wt = Eigen::VectorXd::Constant(ns, 1.0 / static_cast<double>(ns));
  Vec best_c = Vec::Zero(unknowns);
  double best_sup = std::numeric_limits<double>::infinity();
  double lower = 0.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd sw = wt.cwiseSqrt();
    const Vec c = (sw.asDiagonal() * A).colPivHouseholderQr().solve(-(sw.asDiagonal() * h));
    const Vec r = h + A * c;
    const Eigen::VectorXd ar = r.cwiseAbs();
    const double weighted = std::sqrt((wt.array() * ar.array().square()).sum());
    lower = std::max(lower, weighted);
    const double sup = ar.maxCoeff();
    if (sup < best_sup) {
      best_sup = sup;
      best_c = c;
    }
    if (best_sup == 0.0 || (best_sup - lower) <= gap_tol * best_sup) {
      res.converged = true;
      ++it;
      break;
    }
    wt = wt.cwiseProduct(ar);
    const double tot = wt.sum();
    if (!(tot > 0.0)) break;
    wt /= tot;
  }
  res.iterations = it;
  res.sup_norm = best_sup;
  res.lower_bound = lower;
  res.gap = best_sup > 0.0 ? (best_sup - lower) / best_sup : 0.0;
  res.coefficients.assign(best_c.data(), best_c.data() + best_c.size());
  return res;
}

}  // namespace lemnika
