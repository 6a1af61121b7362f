#include "lemnika/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>

#include "lemnika/error.hpp"
#include "lemnika/io.hpp"
#include "lemnika/mamass.hpp"
#include "lemnika/parallel.hpp"

namespace lemnika {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kTwoPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

ReferenceKind reference_kind(const CircledSetModel& m) {
  switch (m.kind) {
    case CircledSetModel::Kind::Bidisk: return ReferenceKind::Bidisk;
    case CircledSetModel::Kind::Ellipsoid: return ReferenceKind::Ellipsoid;
    default: return ReferenceKind::Ball;
  }
}

json config_json(const RunConfig& c, bool with_out_dir) {
  json j{{"model", c.model},
         {"measure", c.measure},
         {"eps", c.eps},
         {"k_start", c.k_start},
         {"k_max", c.k_max},
         {"n_list", c.n_list},
         {"atomize", c.atomize},
         {"sandwich", c.sandwich},
         {"ma", c.ma},
         {"sandwich_alpha", c.sandwich_alpha},
         {"sandwich_phase", c.sandwich_phase},
         {"seed", c.seed},
         {"threads", c.threads}};
  if (with_out_dir) j["out_dir"] = c.out_dir;
  return j;
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "model") c.model = v.get<std::string>();
      else if (key == "measure") c.measure = v.get<std::string>();
      else if (key == "eps") c.eps = v.get<double>();
      else if (key == "k_start") c.k_start = v.get<int>();
      else if (key == "k_max") c.k_max = v.get<int>();
      else if (key == "n_list") c.n_list = v.get<std::vector<int>>();
      else if (key == "atomize") c.atomize = v.get<bool>();
      else if (key == "sandwich") c.sandwich = v.get<bool>();
      else if (key == "ma") c.ma = v.get<bool>();
      else if (key == "sandwich_alpha") c.sandwich_alpha = v.get<int>();
      else if (key == "sandwich_phase") c.sandwich_phase = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config type error: ") + e.what());
  }
  if (!(c.eps > 0.0) || c.k_start < 1 || c.k_max < c.k_start)
    throw Error(ErrorCode::InvalidArgument, "need eps > 0 and 1 <= k_start <= k_max");
  for (int n : c.n_list)
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n_list entries must be positive");
  return c;
}

std::string to_json(const RunConfig& c) { return config_json(c, true).dump(2) + "\n"; }

ManifestEntry write_artifact(const std::string& dir, const std::string& name, const std::string& content) {
  write_file((fs::path(dir) / name).string(), content);
  return {name, sha256_hex(content), static_cast<std::uint64_t>(content.size())};
}

std::string manifest_json(const std::vector<ManifestEntry>& entries, const RunConfig& config) {
  json arts = json::array();
  for (const auto& e : entries) arts.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  json j{{"format", "lemnika-manifest-1"},
         {"version", LEMNIKA_VERSION},
         {"config", config_json(config, false)},
         {"artifacts", arts}};
  return j.dump(2) + "\n";
}

std::vector<std::string> stale_artifacts(const std::string& dir) {
  const json j = json::parse(read_file((fs::path(dir) / "manifest.json").string()));
  std::vector<std::string> out;
  for (const auto& a : j.at("artifacts")) {
    const std::string path = a.at("path").get<std::string>();
    const fs::path full = fs::path(dir) / path;
    if (!fs::exists(full) || sha256_hex(read_file(full.string())) != a.at("sha256").get<std::string>())
      out.push_back(path);
  }
  return out;
}

PipelineResult run_pipeline(const RunConfig& c) {
  set_thread_count(c.threads);
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + c.out_dir + ": " + ec.message());

  PipelineResult res;
  auto emit = [&](const std::string& name, const std::string& content) {
    res.artifacts.push_back(write_artifact(c.out_dir, name, content));
  };
  auto stage = [&](const std::string& name, bool ok, int code, const std::string& msg) {
    res.stages.push_back({name, ok, ok ? kExitOk : code, msg});
    if (!ok && res.exit_code == kExitOk) res.exit_code = code;
  };

  emit("config.json", config_json(c, false).dump(2) + "\n");
  const CircledSetModel model = parse_model(c.model);
  const bool bidisk = model.kind == CircledSetModel::Kind::Bidisk;
  CertifyOptions cert;
  cert.seed = c.seed;

  std::optional<HomogeneousPair> lifted;
  if (bidisk) {
    const int n = c.n_list.empty() ? 8 : *std::max_element(c.n_list.begin(), c.n_list.end());
    lifted = bidisk_pair(n);
    emit("lifted.json", to_json(*lifted));
    stage("atomize", true, kExitOk, "exact pair (z^n, w^n), n = " + std::to_string(n));
  } else if (c.atomize) {
    const PlanarMeasure mu = c.measure.empty() ? model.riesz_measure() : load_measure(c.measure);
    const AdmissibilityReport adm = check_admissibility(mu);
    emit("admissibility.json", json{{"total_mass", adm.total_mass},
                                    {"log_moment", adm.log_moment},
                                    {"c_infinity", adm.c_infinity},
                                    {"limit_deviation", adm.limit_deviation},
                                    {"mass_ok", adm.mass_ok},
                                    {"log_moment_ok", adm.log_moment_ok},
                                    {"limit_ok", adm.limit_ok},
                                    {"pass", adm.pass}}
                                   .dump(2) + "\n");
    stage("admissibility", adm.pass, kExitAdmissibility, adm.pass ? "admissible" : "measure not admissible");
    if (adm.pass) {
      try {
        const ApproximantPair pair =
            atomize_pair(mu, {.eps = c.eps, .k_start = c.k_start, .k_max = c.k_max, .certify = cert});
        emit("pair.json", to_json(pair));
        emit("certificate.json", to_json(pair.certificate));
        std::ostringstream msg;
        msg << "k = " << pair.k << ", M = " << pair.M << ", degree " << pair.degree() << ", sup error "
            << std::setprecision(6) << pair.certificate.sup_error_off_exceptional;
        stage("atomize", true, kExitOk, msg.str());
        lifted = lift_pair(pair, model);
        emit("lifted.json", to_json(*lifted));
        stage("lift", true, kExitOk, "n = " + std::to_string(lifted->n));
      } catch (const AtomizeBudgetExceeded& e) {
        emit("pair_best.json", to_json(e.best()));
        stage("atomize", false, kExitBudget, e.what());
      }
    }
  }

  if (c.sandwich && lifted) {
    SandwichOptions so;
    so.n_alpha = c.sandwich_alpha;
    so.n_phase = c.sandwich_phase;
    const SandwichReport r = sandwich_check(model, *lifted, c.eps, so);
    emit("sandwich.json", to_json(r));
    std::ostringstream msg;
    msg << std::setprecision(6) << "upper excess " << r.max_upper_excess << ", lower deficit "
        << r.max_lower_deficit << ", V_K error " << r.max_vk_error;
    stage("sandwich", r.pass, kExitSandwich, msg.str());
  }

  if (c.ma && !c.n_list.empty()) {
    std::vector<DiscreteMAMeasure> mus;
    json summary = json::array();
    bool ok = true;
    std::string why;
    for (int n : c.n_list) {
      try {
        const ModelPair mp = model_pair(model, n, cert);
        const LevelSetSolutions s = solve_common_level_sets(mp.lifted);
        const DiscreteMAMeasure mu = discrete_ma_measure(s.points, n);
        const std::string tag = "n" + std::to_string(n);
        emit("pair2d_" + tag + ".json", to_json(mp.lifted));
        emit("solutions_" + tag + ".json", to_json(s));
        emit("atoms_" + tag + ".csv", atoms_csv(mu));
        const bool full = s.degree_sum() == n * n && std::abs(mu.total_mass - kTwoPiSq) <= 1e-6;
        if (!full && ok) {
          ok = false;
          why = "Bezout count " + std::to_string(s.degree_sum()) + " != " + std::to_string(n * n) +
                " at n = " + std::to_string(n);
        }
        summary.push_back({{"n", n},
                           {"degree_sum", s.degree_sum()},
                           {"total_mass", mu.total_mass},
                           {"support_localization", support_localization(mu, model)},
                           {"slice_sup_error", mp.slice ? json(mp.slice->certificate.sup_error_off_exceptional)
                                                        : json(0.0)}});
        mus.push_back(mu);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateLeading && e.code() != ErrorCode::CommonFactorSuspected) throw;
        if (ok) {
          ok = false;
          why = e.what();
        }
        summary.push_back({{"n", n}, {"error", e.what()}});
      }
    }
    emit("ma_summary.json", summary.dump(2) + "\n");
    if (mus.size() >= 2) emit("moments.json", to_json(weak_star_report(mus, reference_kind(model), model.c)));
    stage("ma", ok, kExitMA, ok ? "full Bezout count, mass (2 pi)^2" : why);
  }

  json st = json::array();
  for (const auto& s : res.stages)
    st.push_back({{"stage", s.name}, {"ok", s.ok}, {"exit_code", s.exit_code}, {"message", s.message}});
  emit("summary.json", json{{"exit_code", res.exit_code}, {"stages", st}}.dump(2) + "\n");
  write_file((fs::path(c.out_dir) / "manifest.json").string(), manifest_json(res.artifacts, c));
  return res;
}

RenderConfig::Field parse_field(const std::string& s) {
  if (s == "VK") return RenderConfig::Field::VK;
  if (s == "rho") return RenderConfig::Field::Rho;
  if (s == "utilde") return RenderConfig::Field::Utilde;
  if (s == "Un") return RenderConfig::Field::Un;
  if (s == "mask") return RenderConfig::Field::Mask;
  throw Error(ErrorCode::InvalidArgument, "field must be VK|rho|utilde|Un|mask");
}

RenderConfig::Section parse_section(const std::string& s) {
  if (s == "fix-w") return RenderConfig::Section::FixW;
  if (s == "fix-z") return RenderConfig::Section::FixZ;
  if (s == "real") return RenderConfig::Section::Real;
  throw Error(ErrorCode::InvalidArgument, "section must be fix-w|fix-z|real");
}

std::string render_grid(const CircledSetModel& m, const HomogeneousPair* pq, const RenderConfig& rc) {
  if (rc.nx < 1 || rc.ny < 1 || !(rc.x1 >= rc.x0) || !(rc.y1 >= rc.y0) ||
      (rc.nx > 1 && rc.x1 == rc.x0) || (rc.ny > 1 && rc.y1 == rc.y0))
    throw Error(ErrorCode::WindowEmpty, "render window has no area");
  const bool needs_pair = rc.field == RenderConfig::Field::Utilde || rc.field == RenderConfig::Field::Un ||
                          rc.field == RenderConfig::Field::Mask;
  if (needs_pair && pq == nullptr) throw Error(ErrorCode::InvalidArgument, "field needs a lifted pair");

  const std::size_t total = static_cast<std::size_t>(rc.nx) * rc.ny;
  std::vector<std::array<double, 7>> rows(total);
  parallel_for(total, [&](std::size_t idx) {
    const int i = static_cast<int>(idx % rc.nx), j = static_cast<int>(idx / rc.nx);
    const double x = rc.nx > 1 ? rc.x0 + (rc.x1 - rc.x0) * i / (rc.nx - 1) : rc.x0;
    const double y = rc.ny > 1 ? rc.y0 + (rc.y1 - rc.y0) * j / (rc.ny - 1) : rc.y0;
    cplx z, w;
    switch (rc.section) {
      case RenderConfig::Section::FixW: z = {x, y}; w = rc.fixed; break;
      case RenderConfig::Section::FixZ: z = rc.fixed; w = {x, y}; break;
      case RenderConfig::Section::Real: z = x; w = y; break;
    }
    double v = 0.0;
    const bool origin = z == 0.0 && w == 0.0;
    switch (rc.field) {
      case RenderConfig::Field::VK: v = extremal_eval(m, z, w); break;
      case RenderConfig::Field::Rho: v = origin ? kNegInf : robin_eval(m, z, w); break;
      case RenderConfig::Field::Utilde: v = u_tilde_eval(*pq, z, w); break;
      case RenderConfig::Field::Un: v = U_n_eval(*pq, z, w); break;
      case RenderConfig::Field::Mask:
        v = (pq->P.log_abs(z, w) <= 0.0 && pq->Q.log_abs(z, w) <= 0.0) ? 1.0 : 0.0;
        break;
    }
    rows[idx] = {x, y, z.real(), z.imag(), w.real(), w.imag(), v};
  });
  std::ostringstream os;
  os << std::setprecision(17) << "x,y,re_z,im_z,re_w,im_w,value\n";
  for (const auto& r : rows)
    os << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << ',' << r[4] << ',' << r[5] << ',' << r[6] << '\n';
  return os.str();
}

}  // namespace lemnika
