// One PASS/FAIL line per acceptance criterion; exit status is the number of
// failures.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "lemnika/atomizer.hpp"
#include "lemnika/classical1d.hpp"
#include "lemnika/cpoly.hpp"
#include "lemnika/equipartition.hpp"
#include "lemnika/homlift.hpp"
#include "lemnika/io.hpp"
#include "lemnika/mamass.hpp"
#include "lemnika/measure.hpp"
#include "lemnika/pipeline.hpp"

using namespace lemnika;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
constexpr double kEps = 0.25;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("lemnika-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

struct CsvAtom {
  cplx z, w;
  double weight;
};

std::vector<CsvAtom> read_atoms_csv(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<CsvAtom> atoms;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 5) throw std::runtime_error("bad atoms row: " + line);
    atoms.push_back({{v[0], v[1]}, {v[2], v[3]}, v[4]});
  }
  return atoms;
}

// Distance from a unit-modulus candidate to the nearest n-th root of unity.
double root_of_unity_distance(cplx x, int n) {
  const double k = std::round(std::arg(x) * n / (2.0 * std::numbers::pi));
  return std::abs(x - std::polar(1.0, 2.0 * std::numbers::pi * k / n));
}

Outcome bidisk_exactness() {
  RunConfig c;
  c.model = "builtin:bidisk";
  c.n_list = {4, 8, 16};
  c.out_dir = (scratch_dir() / "bidisk").string();
  const PipelineResult r = run_pipeline(c);
  if (r.exit_code != kExitOk) return {false, fmt("pipeline exit %d", r.exit_code)};

  bool ok = true;
  double worst_pos = 0.0, worst_w = 0.0, worst_mass = 0.0, worst_moment = 0.0;
  std::string counts;
  for (int n : c.n_list) {
    const auto atoms = read_atoms_csv(fs::path(c.out_dir) / ("atoms_n" + std::to_string(n) + ".csv"));
    counts += std::to_string(atoms.size()) + " ";
    if (static_cast<int>(atoms.size()) != n * n) ok = false;
    double mass = 0.0;
    std::map<std::pair<long, long>, int> seen;
    for (const auto& a : atoms) {
      worst_pos = std::max({worst_pos, root_of_unity_distance(a.z, n), root_of_unity_distance(a.w, n)});
      worst_w = std::max(worst_w, std::abs(a.weight - kTwoPiSq / (n * n)));
      mass += a.weight;
      const auto key = std::make_pair(std::lround(std::arg(a.z) * n / (2 * std::numbers::pi)) % n,
                                      std::lround(std::arg(a.w) * n / (2 * std::numbers::pi)) % n);
      ++seen[{(key.first + n) % n, (key.second + n) % n}];
    }
    if (static_cast<int>(seen.size()) != n * n) ok = false;
    worst_mass = std::max(worst_mass, std::abs(mass - kTwoPiSq));

    // Torus moments: (2 pi)^2 when a = c and b = d, else 0.
    std::vector<std::vector<cplx>> zp(atoms.size()), wp(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      zp[i].resize(n);
      wp[i].resize(n);
      zp[i][0] = wp[i][0] = 1.0;
      for (int e = 1; e < n; ++e) {
        zp[i][e] = zp[i][e - 1] * atoms[i].z;
        wp[i][e] = wp[i][e - 1] * atoms[i].w;
      }
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int cc = 0; cc < n; ++cc)
          for (int d = 0; d < n; ++d) {
            cplx s{};
            for (std::size_t i = 0; i < atoms.size(); ++i)
              s += atoms[i].weight * zp[i][a] * wp[i][b] * std::conj(zp[i][cc]) * std::conj(wp[i][d]);
            const double ref = (a == cc && b == d) ? kTwoPiSq : 0.0;
            worst_moment = std::max(worst_moment, std::abs(s - ref));
          }
  }
  ok = ok && worst_pos <= 1e-10 && worst_w <= 1e-9 && worst_mass <= 1e-9 && worst_moment <= 1e-9;
  return {ok, fmt("atoms %s| pos %.1e weight %.1e mass %.1e moments %.1e", counts.c_str(), worst_pos,
                  worst_w, worst_mass, worst_moment)};
}

struct MAResult {
  DiscreteMAMeasure mu;
  LevelSetSolutions sols;
  double slice_eps = 0.0;
  double seconds = 0.0;
};

std::map<std::pair<std::string, int>, MAResult>& ma_cache() {
  static std::map<std::pair<std::string, int>, MAResult> cache;
  return cache;
}

const MAResult& ma_run(const std::string& spec, int n) {
  auto& cache = ma_cache();
  const auto key = std::make_pair(spec, n);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const auto t0 = std::chrono::steady_clock::now();
  const CircledSetModel m = parse_model(spec);
  const ModelPair mp = model_pair(m, n);
  MAResult r;
  r.sols = solve_common_level_sets(mp.lifted);
  r.mu = discrete_ma_measure(r.sols.points, mp.lifted.n);
  r.slice_eps = mp.slice ? mp.slice->certificate.sup_error_off_exceptional : 0.0;
  r.seconds = seconds_since(t0);
  return cache.emplace(key, std::move(r)).first->second;
}

Outcome mass_conservation() {
  bool ok = true;
  double worst_mass = 0.0, worst_time = 0.0;
  std::string bad;
  for (const std::string spec : {"builtin:ball", "builtin:ellipsoid:0.5", "builtin:ellipsoid:2"})
    for (int n : {6, 12, 24}) {
      const MAResult& r = ma_run(spec, n);
      const double err = std::abs(r.mu.total_mass - kTwoPiSq);
      worst_mass = std::max(worst_mass, err);
      worst_time = std::max(worst_time, r.seconds);
      if (r.sols.degree_sum() != n * n || err > 1e-6 || r.seconds >= 60.0) {
        ok = false;
        bad += fmt(" %s/n=%d(deg %d)", spec.c_str(), n, r.sols.degree_sum());
      }
    }
  return {ok, fmt("9 pairs, mass err %.1e, slowest pair %.2f s%s", worst_mass, worst_time, bad.c_str())};
}

const ApproximantPair& ball_pair() {
  static const ApproximantPair pair = [] {
    AtomizeOptions o;
    o.eps = kEps;
    return atomize_pair(ball_slice_measure(), o);
  }();
  return pair;
}

Outcome atomize_certificate() {
  const auto t0 = std::chrono::steady_clock::now();
  const ApproximantPair& p = ball_pair();
  const double secs = seconds_since(t0);
  const ErrorReport& c = p.certificate;
  const bool ok = c.sup_error_off_exceptional <= kEps && c.n_two_sided >= 40000 &&
                  c.upper_bound_violation <= 1e-9 && secs < 120.0;
  return {ok, fmt("k=%d M=%d N=%d sup %.4f over %lld samples, violation %.1e, %.2f s", p.k, p.M,
                  p.degree(), c.sup_error_off_exceptional, static_cast<long long>(c.n_two_sided),
                  c.upper_bound_violation, secs)};
}

Outcome sandwich() {
  const ApproximantPair& p = ball_pair();
  const auto t0 = std::chrono::steady_clock::now();
  const CircledSetModel m = CircledSetModel::ball();
  const HomogeneousPair pq = lift_pair(p, m);
  const SandwichReport r = sandwich_check(m, pq, kEps);
  const double secs = seconds_since(t0);
  const bool ok = r.n_samples >= 10000 && r.upper_ok && r.lower_ok && r.vk_ok &&
                  r.max_upper_excess <= 1e-9 && r.max_lower_deficit <= kEps &&
                  r.max_vk_error <= kEps && secs < 30.0;
  return {ok, fmt("%lld samples, upper excess %.2e, lower deficit %.4f, |V_K| err %.4f, %.2f s",
                  static_cast<long long>(r.n_samples), r.max_upper_excess, r.max_lower_deficit,
                  r.max_vk_error, secs)};
}

// Mean of |z|^2 over the unit sphere in C^2, times (2 pi)^2.
double sphere_key_moment_mc() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  const int samples = 1000000;
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double a = g(rng), b = g(rng), c = g(rng), d = g(rng);
    acc += (a * a + b * b) / (a * a + b * b + c * c + d * d);
  }
  return kTwoPiSq * acc / samples;
}

Outcome weak_star_trend() {
  const double frozen = kTwoPiSq / 2.0;
  const double mc = sphere_key_moment_mc();
  const bool oracle_ok = std::abs(mc - frozen) <= 1e-2 * frozen &&
                         std::abs(reference_moment(ReferenceKind::Ball, {1, 0, 1, 0}) - frozen) <= 1e-12;

  const std::vector<int> ns{6, 12, 24};
  std::vector<DiscreteMAMeasure> mus;
  bool loc_ok = true;
  std::string locs;
  const CircledSetModel ball = CircledSetModel::ball();
  for (int n : ns) {
    const MAResult& r = ma_run("builtin:ball", n);
    mus.push_back(r.mu);
    const double loc = support_localization(r.mu, ball);
    const double bound = r.slice_eps + 1.0 / ns.front();
    locs += fmt(" %.3f<=%.3f", loc, bound);
    if (loc > bound) loc_ok = false;
  }
  const MomentReport rep = weak_star_report(mus, ReferenceKind::Ball);
  const double last = rep.key_error.back();
  const bool ok = oracle_ok && rep.key_nonincreasing && last <= 0.15 * kTwoPiSq && loc_ok;
  return {ok, fmt("MC ref %.4f (frozen %.4f); key err %.3f %.3f %.3f (limit %.3f); localization%s",
                  mc, frozen, rep.key_error[0], rep.key_error[1], rep.key_error[2],
                  0.15 * kTwoPiSq, locs.c_str())};
}

Outcome classical_baselines() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto I = CompactSet1D::interval(-1.0, 1.0);
  const FeketeResult f12 = fekete_points(I, 12);
  const double ks = counting_measure_distance(f12.points);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.5);
  std::vector<cplx> probes;
  for (int i = 0; i < 400; ++i) probes.emplace_back(g(rng), g(rng));
  for (int i = 0; i <= 40; ++i) probes.emplace_back(-1.0 + i / 20.0, 0.0);
  double worst_bw = kNegInf;
  std::vector<double> gaps;
  for (int n : {4, 8, 16}) {
    const FactoredPoly F = fekete_polynomial(fekete_points(I, n).points);
    const double ln = log_sup_norm(I, F);
    for (cplx z : probes)
      worst_bw = std::max(worst_bw, (log_abs_eval(F, z) - ln) / n - extremal_1d(I, z));
    gaps.push_back(extremal_1d(I, 3.0) - (log_abs_eval(F, 3.0) - ln) / n);
  }
  double tgap = 0.0;
  for (int n = 0; n <= 32; ++n)
    for (int i = 0; i <= 200; ++i) {
      const double x = -1.0 + i / 100.0;
      tgap = std::max(tgap, std::abs(chebyshev_poly(n, x) - chebyshev_recurrence(n, x)));
    }
  const double secs = seconds_since(t0);
  const bool ok = ks <= 0.15 && worst_bw <= 1e-9 && gaps[1] < gaps[0] && gaps[2] < gaps[1] &&
                  tgap <= 1e-12 && secs < 10.0;
  return {ok, fmt("KS %.4f; BW excess %.1e; gaps at 3: %.4f %.4f %.4f; T_n gap %.1e; %.2f s", ks,
                  worst_bw, gaps[0], gaps[1], gaps[2], tgap, secs)};
}

PlanarMeasure uniform_square(double x0, double y0, double side, int n, double mass) {
  const GridSpec gs{x0, y0, side / n, n, n};
  return PlanarMeasure(gs, std::vector<double>(static_cast<std::size_t>(n) * n, mass / (side * side)));
}

Outcome partition_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  const PlanarMeasure ball = ball_slice_measure();
  for (auto [k, M] : {std::pair{40, 11}, std::pair{16, 6}, std::pair{8, 41}}) {
    const TailParameters t = tail_parameters_for_pieces(ball, M);
    const Partition p = partition(ball, t.R, k, M);
    const bool good = static_cast<int>(p.rectangles.size()) == k * (M - 1) &&
                      p.max_rel_mass_deviation <= 1e-3 && p.multiplicity_max == 1 && p.min_diameter_ok;
    ok = ok && good;
    detail += fmt("k=%d M=%d: %zu pieces dev %.1e; ", k, M, p.rectangles.size(), p.max_rel_mass_deviation);
  }

  double sym = 0.0;
  {
    const Partition q = partition(uniform_square(-1.0, -1.0, 2.0, 64, 2.0 / 3.0), 1.0, 2, 3);
    if (q.rectangles.size() != 4) ok = false;
    for (const auto& r : q.rectangles) {
      sym = std::max({sym, std::abs(r.mass - 1.0 / 6.0), std::abs(r.bounds.width() - 1.0),
                      std::abs(r.bounds.height() - 1.0),
                      std::abs(std::abs(r.center_of_mass.real()) - 0.5),
                      std::abs(std::abs(r.center_of_mass.imag()) - 0.5)});
    }
    const Partition h = partition_all(uniform_square(0.0, 0.0, 1.0, 32, 1.0), 1);
    if (h.rectangles.size() != 2) ok = false;
    else
      sym = std::max({sym, std::abs(h.rectangles[0].center_of_mass - cplx{0.25, 0.5}),
                      std::abs(h.rectangles[1].center_of_mass - cplx{0.75, 0.5})});
  }
  const double secs = seconds_since(t0);
  ok = ok && sym <= 1e-12 && secs < 10.0;
  return {ok, detail + fmt("symmetry err %.1e; %.2f s", sym, secs)};
}

Outcome root_certificates() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto doc = nlohmann::json::parse(read_file(LEMNIKA_TEST_DATA_DIR "/roots_regression.json"));
  bool ok = true;
  double worst = 0.0;
  int cases = 0, max_degree = 0;
  std::string bad;
  for (const auto& c : doc.at("cases")) {
    FactoredPoly f;
    for (const auto& z : c.at("roots")) f.zeros.push_back({{z[0].get<double>(), z[1].get<double>()}, 1});
    const int degree = static_cast<int>(f.zeros.size());
    const CoeffPoly p = expand(f);
    const RootResult r = roots(p);
    int count = 0;
    double case_worst = 0.0;
    for (const auto& root : r.roots) {
      count += root.multiplicity;
      case_worst = std::max({case_worst, root.residual, normalized_residual(p, root.value)});
    }
    worst = std::max(worst, case_worst);
    max_degree = std::max(max_degree, degree);
    ++cases;
    if (count != degree || case_worst > 1e-10) {
      ok = false;
      bad += fmt(" %s(%.1e)", c.at("name").get<std::string>().c_str(), case_worst);
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  return {ok, fmt("%d planted sets up to degree %d, worst residual %.1e, %.2f s%s", cases, max_degree,
                  worst, secs, bad.c_str())};
}

Outcome determinism() {
  RunConfig c;
  c.model = "builtin:ball";
  c.eps = kEps;
  std::vector<PipelineResult> runs;
  for (const char* name : {"det-a", "det-b"}) {
    c.out_dir = (scratch_dir() / name).string();
    runs.push_back(run_pipeline(c));
  }
  if (runs[0].exit_code != kExitOk || runs[1].exit_code != kExitOk)
    return {false, fmt("pipeline exits %d %d", runs[0].exit_code, runs[1].exit_code)};
  const auto& a = runs[0].artifacts;
  const auto& b = runs[1].artifacts;
  bool ok = a.size() == b.size() && !a.empty();
  int compared = 0;
  for (std::size_t i = 0; ok && i < a.size(); ++i) {
    ok = a[i].path == b[i].path && a[i].sha256 == b[i].sha256;
    ++compared;
  }
  const std::string ma = read_file((scratch_dir() / "det-a" / "manifest.json").string());
  const std::string mb = read_file((scratch_dir() / "det-b" / "manifest.json").string());
  ok = ok && sha256_hex(ma) == sha256_hex(mb);
  ok = ok && stale_artifacts((scratch_dir() / "det-a").string()).empty();
  return {ok, fmt("%d artifacts compared, manifests %s", compared,
                  sha256_hex(ma) == sha256_hex(mb) ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"bidisk exactness", bidisk_exactness},
      {"Monge-Ampere mass conservation", mass_conservation},
      {"ball atomization certificate", atomize_certificate},
      {"lifted sandwich", sandwich},
      {"weak-* trend for the ball", weak_star_trend},
      {"classical baselines", classical_baselines},
      {"partition suite", partition_suite},
      {"root-finder certificates", root_certificates},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%zu] %-32s %s  (%s; %.2f s)\n", i + 1, criteria[i].first.c_str(),
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(scratch_dir(), ec);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
