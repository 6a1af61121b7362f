#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lemnika/classical1d.hpp"
#include "lemnika/error.hpp"
#include "lemnika/io.hpp"
#include "lemnika/mamass.hpp"
#include "lemnika/parallel.hpp"
#include "lemnika/pipeline.hpp"

using namespace lemnika;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir;
};

std::vector<double> split_numbers(const std::string& s, std::size_t want, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad number '" + part + "' in " + what);
    }
  }
  if (want != 0 && out.size() != want)
    throw Error(ErrorCode::InvalidArgument, what + " needs " + std::to_string(want) + " comma-separated values");
  return out;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : split_numbers(s, 0, "--n-list")) {
    if (v != std::floor(v) || v < 1) throw Error(ErrorCode::InvalidArgument, "--n-list takes positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

class Runner {
 public:
  explicit Runner(const Globals& g) : g_(g) {
    if (!g_.config.empty()) {
      std::string text;
      try {
        text = read_file(g_.config);
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidArgument, e.what());
      }
      base_ = config_from_json(text);
    }
    if (g_.seed) base_.seed = *g_.seed;
    if (g_.threads) base_.threads = *g_.threads;
    if (!g_.out_dir.empty()) base_.out_dir = g_.out_dir;
    set_thread_count(base_.threads);
  }

  const RunConfig& base() const { return base_; }

  CertifyOptions certify() const {
    CertifyOptions c;
    c.seed = base_.seed;
    return c;
  }

  // Relative outputs land in --out-dir when one is given.
  std::string out_path(const std::string& p) const {
    if (p.empty() || g_.out_dir.empty() || fs::path(p).is_absolute()) return p;
    fs::create_directories(g_.out_dir);
    return (fs::path(g_.out_dir) / p).string();
  }

  void emit(const std::string& path, const std::string& content) const {
    if (path.empty() || path == "-") {
      std::cout << content;
      return;
    }
    write_file(out_path(path), content);
  }

 private:
  Globals g_;
  RunConfig base_;
};

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnsupportedKind:
    case ErrorCode::WindowEmpty:
      return kExitUsage;
    case ErrorCode::BudgetExceeded: return kExitBudget;
    case ErrorCode::DegenerateLeading:
    case ErrorCode::CommonFactorSuspected:
      return kExitMA;
    default: return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lemnika: lemniscate approximation of extremal functions in C^2"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--seed", g.seed, "seed for randomized probes");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
  app.add_option("--out-dir", g.out_dir, "directory for relative outputs");
  app.fallthrough();

  // atomize
  auto* atomize = app.add_subcommand("atomize", "one-variable approximant pair with certificate");
  std::string a_measure, a_out = "pair.json", a_report;
  std::optional<double> a_eps;
  std::optional<int> a_kstart, a_kmax;
  atomize->add_option("--measure", a_measure, "builtin:ball | builtin:bidisk | builtin:ellipsoid:c | file");
  atomize->add_option("--eps", a_eps, "target sup error");
  atomize->add_option("--k-start", a_kstart);
  atomize->add_option("--k-max", a_kmax);
  atomize->add_option("--out", a_out, "pair JSON");
  atomize->add_option("--report", a_report, "certificate JSON");

  // lift
  auto* lift = app.add_subcommand("lift", "homogeneous lift of an atomized pair");
  std::string l_pair, l_model, l_n = "auto", l_out = "lifted.json";
  lift->add_option("--pair", l_pair)->required();
  lift->add_option("--model", l_model);
  lift->add_option("--n", l_n, "auto or an integer >= the pair degree");
  lift->add_option("--out", l_out);

  // sandwich
  auto* sandwich = app.add_subcommand("sandwich", "check rho_K - eps <= max-form <= rho_K on a product grid");
  std::string s_pair, s_model, s_out = "sandwich.json";
  std::optional<double> s_eps;
  std::optional<int> s_alpha, s_phase;
  sandwich->add_option("--pair-2d", s_pair)->required();
  sandwich->add_option("--model", s_model);
  sandwich->add_option("--eps", s_eps);
  sandwich->add_option("--n-alpha", s_alpha);
  sandwich->add_option("--n-phase", s_phase);
  sandwich->add_option("--out", s_out);

  // ma
  auto* ma = app.add_subcommand("ma", "discrete Monge-Ampere measures and moment report");
  std::string m_pair, m_model, m_nlist, m_out = "moments.json", m_atoms;
  ma->add_option("--pair-2d", m_pair, "solve this lifted pair");
  ma->add_option("--model", m_model);
  ma->add_option("--n-list", m_nlist, "construct pairs at these degrees, e.g. 6,12,24");
  ma->add_option("--out", m_out);
  ma->add_option("--atoms-csv", m_atoms, "atoms of the --pair-2d measure");

  // fekete
  auto* fekete = app.add_subcommand("fekete", "Fekete points on a compact set in C");
  std::string f_set = "interval", f_out = "points.json";
  int f_n = 12, f_grid = 0;
  fekete->add_option("--set", f_set, "interval[:a,b] | disk[:r]");
  fekete->add_option("--n", f_n);
  fekete->add_option("--grid", f_grid, "candidate nodes (0 = default)");
  fekete->add_option("--out", f_out);

  // sandwich1d
  auto* s1 = app.add_subcommand("sandwich1d", "lemniscate sandwich K in {|p| <= ||p||_K} in K^eps");
  std::string s1_set = "interval", s1_poly = "chebyshev:8", s1_out = "sandwich1d.json";
  double s1_eps = 0.2;
  s1->add_option("--set", s1_set);
  s1->add_option("--poly", s1_poly, "chebyshev:n | fekete:n | power:n");
  s1->add_option("--eps", s1_eps);
  s1->add_option("--out", s1_out);

  // render-grid
  auto* rg = app.add_subcommand("render-grid", "sample a field on a 2D section of C^2 (CSV)");
  std::string r_model, r_pair, r_func = "VK", r_section = "fix-w", r_fixed = "1,0",
                                r_window = "-2,2,-2,2", r_size = "101,101", r_out = "grid.csv";
  rg->add_option("--model", r_model);
  rg->add_option("--pair-2d", r_pair);
  rg->add_option("--func", r_func, "VK | rho | utilde | Un | mask");
  rg->add_option("--section", r_section, "fix-w | fix-z | real");
  rg->add_option("--fixed", r_fixed, "re,im of the fixed coordinate");
  rg->add_option("--window", r_window, "x0,x1,y0,y1");
  rg->add_option("--size", r_size, "nx,ny");
  rg->add_option("--out", r_out);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "atomize, lift, sandwich, ma and reports with a manifest");
  std::string p_model, p_measure, p_nlist;
  std::optional<double> p_eps;
  pipe->add_option("--model", p_model);
  pipe->add_option("--measure", p_measure);
  pipe->add_option("--eps", p_eps);
  pipe->add_option("--n-list", p_nlist);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    const Runner run(g);
    const RunConfig& cfg = run.base();
    const std::string model_spec_default = cfg.model;

    if (*atomize) {
      const std::string spec = !a_measure.empty() ? a_measure
                               : !cfg.measure.empty() ? cfg.measure
                                                      : model_spec_default;
      const PlanarMeasure mu = load_measure(spec);
      const AdmissibilityReport adm = check_admissibility(mu);
      if (!adm.pass) {
        std::cerr << "measure is not admissible (mass " << adm.total_mass << ")\n";
        return kExitAdmissibility;
      }
      AtomizeOptions opt;
      opt.eps = a_eps.value_or(cfg.eps);
      opt.k_start = a_kstart.value_or(cfg.k_start);
      opt.k_max = a_kmax.value_or(cfg.k_max);
      opt.certify = run.certify();
      try {
        const ApproximantPair pair = atomize_pair(mu, opt);
        run.emit(a_out, to_json(pair));
        if (!a_report.empty()) run.emit(a_report, to_json(pair.certificate));
        std::cout << "k=" << pair.k << " M=" << pair.M << " degree=" << pair.degree()
                  << " sup_error=" << pair.certificate.sup_error_off_exceptional
                  << " violation=" << pair.certificate.upper_bound_violation << "\n";
        return kExitOk;
      } catch (const AtomizeBudgetExceeded& e) {
        run.emit(a_out, to_json(e.best()));
        std::cerr << e.what() << "\n";
        return kExitBudget;
      }
    }

    if (*lift) {
      const ApproximantPair pair = pair_from_json(read_file(l_pair));
      const CircledSetModel m = parse_model(l_model.empty() ? model_spec_default : l_model);
      HomogeneousPair pq = lift_pair(pair, m);
      if (l_n != "auto") {
        const int n = static_cast<int>(split_numbers(l_n, 1, "--n")[0]);
        if (n < pq.n) throw Error(ErrorCode::DegreeExceeded, "--n is below the pair degree");
        // Degree-n lift of the same slices: extra powers of z, log-constant rescaled.
        HomogeneousPair wide{homogenize(pair.P.poly, n), homogenize(pair.Q.poly, n), n};
        wide.P.slice.log_constant += n * m.u(0.0);
        wide.Q.slice.log_constant += n * m.u(0.0);
        pq = wide;
      }
      run.emit(l_out, to_json(pq));
      std::cout << "n=" << pq.n << "\n";
      return kExitOk;
    }

    if (*sandwich) {
      const HomogeneousPair pq = homogeneous_pair_from_json(read_file(s_pair));
      const CircledSetModel m = parse_model(s_model.empty() ? model_spec_default : s_model);
      SandwichOptions so;
      so.n_alpha = s_alpha.value_or(cfg.sandwich_alpha);
      so.n_phase = s_phase.value_or(cfg.sandwich_phase);
      const SandwichReport r = sandwich_check(m, pq, s_eps.value_or(cfg.eps), so);
      run.emit(s_out, to_json(r));
      std::cout << (r.pass ? "pass" : "FAIL") << " upper_excess=" << r.max_upper_excess
                << " lower_deficit=" << r.max_lower_deficit << " vk_error=" << r.max_vk_error << "\n";
      return r.pass ? kExitOk : kExitSandwich;
    }

    if (*ma) {
      const CircledSetModel m = parse_model(m_model.empty() ? model_spec_default : m_model);
      int rc = kExitOk;
      if (!m_pair.empty()) {
        const HomogeneousPair pq = homogeneous_pair_from_json(read_file(m_pair));
        const LevelSetSolutions s = solve_common_level_sets(pq);
        const DiscreteMAMeasure mu = discrete_ma_measure(s.points, pq.n);
        if (!m_atoms.empty()) run.emit(m_atoms, atoms_csv(mu));
        std::cout << "n=" << pq.n << " degree_sum=" << s.degree_sum() << " total_mass=" << mu.total_mass
                  << " support_localization=" << support_localization(mu, m) << "\n";
        const double full = 4.0 * std::numbers::pi * std::numbers::pi;
        if (s.degree_sum() != pq.n * pq.n || std::abs(mu.total_mass - full) > 1e-6) rc = kExitMA;
      }
      const std::vector<int> ns = m_nlist.empty() ? (m_pair.empty() ? cfg.n_list : std::vector<int>{})
                                                  : split_ints(m_nlist);
      if (!ns.empty()) {
        std::vector<DiscreteMAMeasure> mus;
        for (int n : ns) {
          const ModelPair mp = model_pair(m, n, run.certify());
          const LevelSetSolutions s = solve_common_level_sets(mp.lifted);
          mus.push_back(discrete_ma_measure(s.points, n));
          std::cout << "n=" << n << " degree_sum=" << s.degree_sum() << " total_mass=" << mus.back().total_mass
                    << " support_localization=" << support_localization(mus.back(), m) << "\n";
          if (s.degree_sum() != n * n) rc = kExitMA;
        }
        if (mus.size() >= 2) {
          const ReferenceKind kind = m.kind == CircledSetModel::Kind::Bidisk      ? ReferenceKind::Bidisk
                                     : m.kind == CircledSetModel::Kind::Ellipsoid ? ReferenceKind::Ellipsoid
                                                                                  : ReferenceKind::Ball;
          const MomentReport rep = weak_star_report(mus, kind, m.c);
          run.emit(m_out, to_json(rep));
          std::cout << "key (1,0,1,0) errors:";
          for (double e : rep.key_error) std::cout << ' ' << e;
          std::cout << (rep.key_nonincreasing ? " (nonincreasing)" : " (not monotone)") << "\n";
        }
      }
      return rc;
    }

    if (*fekete) {
      const CompactSet1D K = parse_set(f_set, f_grid);
      const FeketeResult f = fekete_points(K, f_n);
      run.emit(f_out, to_json(f));
      std::cout << "n=" << f_n << " log_vandermonde=" << f.log_vandermonde;
      if (K.kind == CompactSet1D::Kind::Interval && K.alpha == -1.0 && K.beta == 1.0)
        std::cout << " arcsine_ks=" << counting_measure_distance(f.points);
      std::cout << "\n";
      return kExitOk;
    }

    if (*s1) {
      const CompactSet1D K = parse_set(s1_set);
      const auto colon = s1_poly.find(':');
      if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--poly kind:n");
      const std::string kind = s1_poly.substr(0, colon);
      const int n = static_cast<int>(split_numbers(s1_poly.substr(colon + 1), 1, "--poly")[0]);
      FactoredPoly p;
      if (kind == "chebyshev") p = chebyshev_factored(n);
      else if (kind == "fekete") p = fekete_polynomial(fekete_points(K, n).points);
      else if (kind == "power") p.zeros.push_back({0.0, n});
      else throw Error(ErrorCode::InvalidArgument, "unknown --poly kind '" + kind + "'");
      const LemniscateReport r = lemniscate_sandwich(p, K, s1_eps);
      run.emit(s1_out, to_json(r));
      std::cout << (r.pass ? "pass" : "FAIL") << " boundary_margin=" << r.boundary_margin
                << " zeros_outside=" << r.zeros_outside << "\n";
      return r.pass ? kExitOk : kExitSandwich;
    }

    if (*rg) {
      const CircledSetModel m = parse_model(r_model.empty() ? model_spec_default : r_model);
      std::optional<HomogeneousPair> pq;
      if (!r_pair.empty()) pq = homogeneous_pair_from_json(read_file(r_pair));
      RenderConfig rc;
      rc.field = parse_field(r_func);
      rc.section = parse_section(r_section);
      const auto fx = split_numbers(r_fixed, 2, "--fixed");
      rc.fixed = {fx[0], fx[1]};
      const auto w = split_numbers(r_window, 4, "--window");
      rc.x0 = w[0];
      rc.x1 = w[1];
      rc.y0 = w[2];
      rc.y1 = w[3];
      const auto sz = split_numbers(r_size, 2, "--size");
      rc.nx = static_cast<int>(sz[0]);
      rc.ny = static_cast<int>(sz[1]);
      run.emit(r_out, render_grid(m, pq ? &*pq : nullptr, rc));
      return kExitOk;
    }

    if (*pipe) {
      RunConfig c = cfg;
      if (!p_model.empty()) c.model = p_model;
      if (!p_measure.empty()) c.measure = p_measure;
      if (p_eps) c.eps = *p_eps;
      if (!p_nlist.empty()) c.n_list = split_ints(p_nlist);
      const PipelineResult r = run_pipeline(c);
      for (const auto& s : r.stages)
        std::cout << (s.ok ? "ok   " : "FAIL ") << s.name << ": " << s.message << "\n";
      std::cout << "manifest: " << (fs::path(c.out_dir) / "manifest.json").string() << " ("
                << r.artifacts.size() << " artifacts)\n";
      return r.exit_code;
    }
  } catch (const Error& e) {
    std::cerr << "lemnika: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "lemnika: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
