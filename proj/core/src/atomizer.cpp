#include "lemnika/atomizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lemnika/parallel.hpp"

namespace lemnika {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSublattice = 32;

struct Sample {
  cplx z;
  double spacing = 0.0;  // local step for refinement; 0 = do not refine
  bool one_sided_only = false;
};

struct Eval {
  double form = 0.0;  // max of the two normalized log-moduli
  double V = 0.0;
  bool exceptional = false;
};

Eval evaluate(const ApproximantPair& pair, const PlanarMeasure& mu, const Sample& s) {
  Eval e;
  e.form = pair.max_form(s.z);
  e.V = potential_reference(mu, s.z);
  e.exceptional = s.one_sided_only || pair.P.in_exceptional_set(s.z) ||
                  pair.Q.in_exceptional_set(s.z);
  return e;
}

void add_grid(std::vector<Sample>& out, double half, int n) {
  if (n < 2 || !(half > 0.0)) return;
  const double step = 2.0 * half / (n - 1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out.push_back({{-half + i * step, -half + j * step}, step, false});
}

// Compass search maximizing objective from z; rejects exceptional points
// when two_sided is set.
cplx climb(const ApproximantPair& pair, const PlanarMeasure& mu, cplx z, double step,
           bool two_sided) {
  auto objective = [&](cplx p) {
    const double form = pair.max_form(p);
    const double V = potential_reference(mu, p);
    if (two_sided) {
      if (pair.P.in_exceptional_set(p) || pair.Q.in_exceptional_set(p))
        return -std::numeric_limits<double>::infinity();
      return std::abs(form - V);
    }
    return form - V;
  };
  double best = objective(z);
  const double floor = 1e-7 * std::max(1.0, std::abs(z));
  static const cplx dirs[8] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                               {0.7071067811865476, 0.7071067811865476},
                               {-0.7071067811865476, 0.7071067811865476},
                               {0.7071067811865476, -0.7071067811865476},
                               {-0.7071067811865476, -0.7071067811865476}};
  for (int it = 0; it < 400 && step > floor; ++it) {
    bool moved = false;
    for (const auto& d : dirs) {
      const cplx cand = z + step * d;
      const double v = objective(cand);
      if (v > best) {
        best = v;
        z = cand;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return z;
}

double support_half_width(const PlanarMeasure& mu) {
  const GridSpec& g = mu.grid();
  double half = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (mu.value(i, j) > 0.0) {
        half = std::max({half, std::abs(g.x0 + i * g.h), std::abs(g.x0 + (i + 1) * g.h),
                         std::abs(g.y0 + j * g.h), std::abs(g.y0 + (j + 1) * g.h)});
      }
  return half;
}

void apply_shift(ApproximantPair& pair, double s) {
  for (AtomizedPolynomial* f : {&pair.P, &pair.Q}) f->poly.log_constant -= f->degree * s;
  pair.shift += s;
}

ApproximantPair build(const PlanarMeasure& mu, int k, const std::optional<TailParameters>& tail) {
  ApproximantPair pair;
  pair.k = k;
  Partition part = tail ? partition(mu, tail->R, k, tail->M) : partition_all(mu, k);
  const Classification cls = classify_normal(part, mu.a_max());
  const auto zp = place_zeros(part, cls, k, 0.0);
  const auto zq = place_zeros(part, cls, k, kPi);
  if (tail) {
    pair.M = tail->M;
    pair.tail = tail;
    pair.core_half_width = tail->R;
    pair.P = assemble(zp, *tail, tail->w_primary, k);
    pair.Q = assemble(zq, *tail, tail->w_secondary, k);
  } else {
    pair.M = 2;
    pair.core_half_width = support_half_width(mu);
    pair.P = assemble_tail_free(zp, mu.log_constant(), k);
    pair.Q = assemble_tail_free(zq, mu.log_constant(), k);
  }
  return pair;
}

// Certify, shift down by the measured violation and re-certify until the
// one-sided bound holds on the (refined) sample set.
void certify_and_shift(ApproximantPair& pair, const PlanarMeasure& mu,
                       const CertifyOptions& options) {
  pair.certificate = certify(pair, mu, options);
  pair.history.emplace_back(pair.k, pair.certificate.sup_error_off_exceptional);
  for (int round = 0; round < 4 && pair.certificate.upper_bound_violation > 1e-12; ++round) {
    apply_shift(pair, pair.certificate.upper_bound_violation);
    pair.certificate = certify(pair, mu, options);
  }
}

}  // namespace

bool AtomizedPolynomial::in_exceptional_set(cplx z) const {
  return std::any_of(exceptional.begin(), exceptional.end(),
                     [&](const ExceptionalDisk& d) { return std::abs(z - d.center) < d.radius; });
}

double ApproximantPair::max_form(cplx z) const {
  return std::max(P.normalized_log(z), Q.normalized_log(z));
}

std::vector<cplx> place_zeros(const Partition& p, const Classification& c, int k, double phase) {
  const double delta = std::pow(static_cast<double>(k), -5.0);
  const cplx offset = std::polar(delta, phase);
  std::vector<cplx> zeros(p.rectangles.size());
  for (int l : c.normal) zeros[l] = p.rectangles[l].center_of_mass + offset;
  std::vector<cplx> placed;
  auto separated = [&](cplx z) {
    return std::all_of(placed.begin(), placed.end(),
                       [&](cplx q) { return std::abs(z - q) > delta; });
  };
  for (int l : c.nonnormal) {
    const MassRectangle& r = p.rectangles[l];
    cplx z = r.center_of_mass + offset;
    if (!separated(z)) {
      bool found = false;
      for (int j = 0; j <= kSublattice && !found; ++j)
        for (int i = 0; i <= kSublattice && !found; ++i) {
          const cplx cand{r.bounds.x0 + r.bounds.width() * i / kSublattice,
                          r.bounds.y0 + r.bounds.height() * j / kSublattice};
          if (separated(cand + offset)) {
            z = cand + offset;
            found = true;
          }
        }
      if (!found)
        throw Error(ErrorCode::SeparationFailure,
                    "no k^-5 separated point in rectangle " + std::to_string(l));
    }
    zeros[l] = z;
    placed.push_back(z);
  }
  return zeros;
}

AtomizedPolynomial assemble(const std::vector<cplx>& zeros, const TailParameters& tail, cplx w,
                            int k) {
  AtomizedPolynomial f;
  for (const auto& z : zeros) f.poly.zeros.push_back({z, 1});
  f.poly.zeros.push_back({w, k});
  // (1 - z/w)^k = (-1/w)^k (z - w)^k
  const double kM = static_cast<double>(k) * tail.M;
  f.poly.log_constant = -kM * tail.c0 - k * std::log(std::abs(w));
  f.poly.phase_constant = std::remainder(k * (kPi - std::arg(w)), 2.0 * kPi);
  f.degree = f.poly.degree();
  f.norm_weight = 1.0 / kM;
  const double rk = std::pow(static_cast<double>(k), -10.0);
  for (const auto& z : zeros) f.exceptional.push_back({z, rk});
  f.exceptional.push_back({w, std::abs(w) / 20.0});
  return f;
}

AtomizedPolynomial assemble_tail_free(const std::vector<cplx>& zeros, double c0, int k) {
  AtomizedPolynomial f;
  for (const auto& z : zeros) f.poly.zeros.push_back({z, 1});
  const double K = static_cast<double>(zeros.size());
  f.poly.log_constant = -K * c0;
  f.degree = f.poly.degree();
  f.norm_weight = K > 0 ? 1.0 / K : 0.0;
  const double rk = std::pow(static_cast<double>(k), -10.0);
  for (const auto& z : zeros) f.exceptional.push_back({z, rk});
  return f;
}

ErrorReport certify(const ApproximantPair& pair, const PlanarMeasure& mu,
                    const CertifyOptions& options) {
  ErrorReport rep;
  const double r_out = pair.tail ? 10.0 * pair.tail->r_infty : 0.0;
  const double L = 2.0 * std::max(r_out, pair.core_half_width);
  rep.grid_half_width = L;
  rep.grid_n = options.grid_n;
  rep.core_half_width = pair.core_half_width;
  rep.core_n = options.core_n;
  rep.far_radius = 100.0 * L;

  std::vector<Sample> samples;
  add_grid(samples, L, options.grid_n);
  add_grid(samples, pair.core_half_width, options.core_n);
  const std::size_t far_begin = samples.size();
  for (int j = 0; j < options.far_n; ++j)
    samples.push_back({std::polar(rep.far_radius, 2.0 * kPi * (j + 0.5) / options.far_n), 0.0,
                       false});
  const std::size_t far_end = samples.size();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const AtomizedPolynomial* f : {&pair.P, &pair.Q})
    for (const auto& d : f->exceptional)
      for (int p = 0; p < options.probes_per_disk; ++p) {
        const double rad = d.radius * std::sqrt(unit(rng));
        const double ang = 2.0 * kPi * unit(rng);
        samples.push_back({d.center + std::polar(rad, ang), 0.0, true});
      }

  std::vector<Eval> evals(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) { evals[i] = evaluate(pair, mu, samples[i]); });

  // Refine from the worst starts of both objectives.
  auto top = [&](bool two_sided) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (samples[i].spacing > 0.0 && !(two_sided && evals[i].exceptional)) idx.push_back(i);
    const std::size_t n = std::min<std::size_t>(idx.size(), options.refine_starts);
    auto score = [&](std::size_t i) {
      const double d = evals[i].form - evals[i].V;
      return two_sided ? std::abs(d) : d;
    };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double sa = score(a), sb = score(b);
                        return sa > sb || (sa == sb && a < b);
                      });
    idx.resize(n);
    return idx;
  };
  std::vector<std::pair<std::size_t, bool>> starts;
  for (auto i : top(false)) starts.emplace_back(i, false);
  for (auto i : top(true)) starts.emplace_back(i, true);
  std::vector<Sample> refined(starts.size());
  parallel_for(starts.size(), [&](std::size_t r) {
    const Sample& s = samples[starts[r].first];
    refined[r] = {climb(pair, mu, s.z, 0.5 * s.spacing, starts[r].second), 0.0, false};
  });
  for (const auto& s : refined) {
    samples.push_back(s);
    evals.push_back(evaluate(pair, mu, s));
  }

  rep.n_samples = static_cast<std::int64_t>(samples.size());
  rep.upper_bound_violation = -std::numeric_limits<double>::infinity();
  double far_lo = std::numeric_limits<double>::infinity(), far_hi = -far_lo;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = evals[i].form - evals[i].V;
    if (d > rep.upper_bound_violation) {
      rep.upper_bound_violation = d;
      rep.worst_violation_point = samples[i].z;
    }
    if (i >= far_begin && i < far_end) {
      far_lo = std::min(far_lo, d);
      far_hi = std::max(far_hi, d);
    }
    if (evals[i].exceptional) continue;
    ++rep.n_two_sided;
    if (std::abs(d) > rep.sup_error_off_exceptional) {
      rep.sup_error_off_exceptional = std::abs(d);
      rep.worst_point = samples[i].z;
    }
  }
  rep.far_field_spread = far_end > far_begin ? far_hi - far_lo : 0.0;
  return rep;
}

ApproximantPair atomize_fixed(const PlanarMeasure& mu, int k, int M,
                              const CertifyOptions& options) {
  std::optional<TailParameters> tail;
  if (mu.tail().kind != TailDescriptor::Kind::None) tail = tail_parameters_for_pieces(mu, M);
  ApproximantPair pair = build(mu, k, tail);
  pair.epsilon_target = std::numeric_limits<double>::infinity();
  certify_and_shift(pair, mu, options);
  return pair;
}

ApproximantPair atomize_pair(const PlanarMeasure& mu, const AtomizeOptions& options) {
  if (!(options.eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  std::optional<TailParameters> tail;
  if (mu.tail().kind != TailDescriptor::Kind::None)
    tail = select_tail_parameters(mu, std::min(options.eps / 10.0, 0.49));
  std::optional<ApproximantPair> best;
  std::vector<std::pair<int, double>> history;
  for (int k = options.k_start; k <= options.k_max; k *= 2) {
    ApproximantPair pair = build(mu, k, tail);
    pair.epsilon_target = options.eps;
    certify_and_shift(pair, mu, options.certify);
    history.push_back(pair.history.front());
    pair.history = history;
    const bool ok = pair.certificate.sup_error_off_exceptional <= options.eps;
    if (!best || pair.certificate.sup_error_off_exceptional <
                     best->certificate.sup_error_off_exceptional)
      best = pair;
    if (ok) return pair;
    if (k > options.k_max / 2) break;
  }
  if (!best) throw Error(ErrorCode::InvalidArgument, "k_start exceeds k_max");
  best->history = history;
  throw AtomizeBudgetExceeded(*best, "no k <= " + std::to_string(options.k_max) +
                                         " certifies eps = " + std::to_string(options.eps));
}

std::pair<int, int> split_degree(int n, bool odd_k) {
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "degree must be at least 4");
  int bestM = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int M = 2; M <= n / 2; ++M) {
    if (n % M != 0 || (odd_k && (n / M) % 2 == 0)) continue;
    const double gap = std::abs(std::log(static_cast<double>(M)) - 0.5 * std::log(n));
    if (gap < best_gap) {
      best_gap = gap;
      bestM = M;
    }
  }
  if (bestM == 0) throw Error(ErrorCode::InvalidArgument, "degree has no split k*M with k, M >= 2");
  return {n / bestM, bestM};
}

}  // namespace lemnika
