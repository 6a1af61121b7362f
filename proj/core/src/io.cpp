#include "lemnika/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "lemnika/error.hpp"

namespace lemnika {

namespace {

using json = nlohmann::ordered_json;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double get_num(const json& j, const char* key, double fallback = 0.0) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  return v.get<double>();
}

json cx(cplx z) { return json::array({z.real(), z.imag()}); }
cplx get_cx(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <class F>
auto parse(const std::string& text, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed JSON: ") + e.what());
  }
}

json factored_json(const FactoredPoly& f) {
  json zs = json::array();
  for (const auto& z : f.zeros) zs.push_back(json::array({z.value.real(), z.value.imag(), z.multiplicity}));
  return {{"zeros", zs}, {"log_constant", f.log_constant}, {"phase_constant", f.phase_constant},
          {"degree", f.degree()}};
}

FactoredPoly factored_from(const json& j) {
  FactoredPoly f;
  for (const auto& z : j.at("zeros"))
    f.zeros.push_back({{z.at(0).get<double>(), z.at(1).get<double>()}, z.at(2).get<int>()});
  f.log_constant = j.at("log_constant").get<double>();
  f.phase_constant = j.value("phase_constant", 0.0);
  return f;
}

json atomized_json(const AtomizedPolynomial& f) {
  json j = factored_json(f.poly);
  j["norm_weight"] = f.norm_weight;
  json ex = json::array();
  for (const auto& d : f.exceptional) ex.push_back(json::array({d.center.real(), d.center.imag(), d.radius}));
  j["exceptional"] = ex;
  return j;
}

AtomizedPolynomial atomized_from(const json& j) {
  AtomizedPolynomial f;
  f.poly = factored_from(j);
  f.degree = j.at("degree").get<int>();
  f.norm_weight = j.at("norm_weight").get<double>();
  for (const auto& d : j.at("exceptional"))
    f.exceptional.push_back({{d.at(0).get<double>(), d.at(1).get<double>()}, d.at(2).get<double>()});
  return f;
}

json report_json(const ErrorReport& r) {
  return {{"sup_error_off_exceptional", num(r.sup_error_off_exceptional)},
          {"upper_bound_violation", num(r.upper_bound_violation)},
          {"n_samples", r.n_samples},
          {"n_two_sided", r.n_two_sided},
          {"grid_half_width", r.grid_half_width},
          {"grid_n", r.grid_n},
          {"core_half_width", r.core_half_width},
          {"core_n", r.core_n},
          {"far_radius", r.far_radius},
          {"far_field_spread", num(r.far_field_spread)},
          {"worst_point", cx(r.worst_point)},
          {"worst_violation_point", cx(r.worst_violation_point)}};
}

ErrorReport report_from(const json& j) {
  ErrorReport r;
  r.sup_error_off_exceptional = get_num(j, "sup_error_off_exceptional");
  r.upper_bound_violation = get_num(j, "upper_bound_violation");
  r.n_samples = j.at("n_samples").get<std::int64_t>();
  r.n_two_sided = j.at("n_two_sided").get<std::int64_t>();
  r.grid_half_width = j.at("grid_half_width").get<double>();
  r.grid_n = j.at("grid_n").get<int>();
  r.core_half_width = j.at("core_half_width").get<double>();
  r.core_n = j.at("core_n").get<int>();
  r.far_radius = j.at("far_radius").get<double>();
  r.far_field_spread = get_num(j, "far_field_spread");
  r.worst_point = get_cx(j.at("worst_point"));
  r.worst_violation_point = get_cx(j.at("worst_violation_point"));
  return r;
}

json tail_json(const TailParameters& t) {
  return {{"eta", t.eta},
          {"R", t.R},
          {"M", t.M},
          {"r_infty", t.r_infty},
          {"w_primary", cx(t.w_primary)},
          {"w_secondary", cx(t.w_secondary)},
          {"c0", t.c0},
          {"tail_mass", t.tail_mass},
          {"log_tail", t.log_tail},
          {"max_density_outside", t.max_density_outside},
          {"small_density_ok", t.small_density_ok}};
}

TailParameters tail_from(const json& j) {
  TailParameters t;
  t.eta = j.at("eta").get<double>();
  t.R = j.at("R").get<double>();
  t.M = j.at("M").get<int>();
  t.r_infty = j.at("r_infty").get<double>();
  t.w_primary = get_cx(j.at("w_primary"));
  t.w_secondary = get_cx(j.at("w_secondary"));
  t.c0 = j.at("c0").get<double>();
  t.tail_mass = j.at("tail_mass").get<double>();
  t.log_tail = j.at("log_tail").get<double>();
  t.max_density_outside = j.at("max_density_outside").get<double>();
  t.small_density_ok = j.at("small_density_ok").get<bool>();
  return t;
}

json homogeneous_json(const HomogeneousPoly& h) {
  json j = factored_json(h.slice);
  j["n"] = h.n;
  return j;
}

HomogeneousPoly homogeneous_from(const json& j) {
  return homogenize(factored_from(j), j.at("n").get<int>());
}

}  // namespace

std::string to_json(const PlanarMeasure& mu) {
  const GridSpec& g = mu.grid();
  const TailDescriptor& t = mu.tail();
  const Profile& p = mu.profile();
  json values = json::array();
  for (double v : mu.values()) values.push_back(v);
  json j;
  j["grid"] = {{"x0", g.x0}, {"y0", g.y0}, {"h", g.h}, {"nx", g.nx}, {"ny", g.ny}, {"values", values}};
  j["tail"] = {{"kind", t.kind == TailDescriptor::Kind::Ellipsoid ? "ellipsoid" : "none"},
               {"c", t.c},
               {"r0", t.r0}};
  j["profile"] = {{"kind", p.kind == Profile::Kind::Ellipsoid ? "ellipsoid" : "none"}, {"c", p.c}};
  j["a_max"] = mu.a_max();
  return dump(j);
}

PlanarMeasure measure_from_json(const std::string& text) {
  return parse(text, [](const json& j) {
    const json& g = j.at("grid");
    GridSpec spec{g.at("x0").get<double>(), g.at("y0").get<double>(), g.at("h").get<double>(),
                  g.at("nx").get<int>(), g.at("ny").get<int>()};
    auto values = g.at("values").get<std::vector<double>>();
    if (spec.nx < 1 || spec.ny < 1 || !(spec.h > 0.0) ||
        values.size() != static_cast<std::size_t>(spec.nx) * spec.ny)
      throw Error(ErrorCode::Io, "grid shape does not match its values");
    TailDescriptor tail;
    Profile prof;
    if (j.contains("tail") && j["tail"].value("kind", "none") == "ellipsoid") {
      tail.kind = TailDescriptor::Kind::Ellipsoid;
      tail.c = j["tail"].at("c").get<double>();
      tail.r0 = j["tail"].at("r0").get<double>();
    }
    if (j.contains("profile") && j["profile"].value("kind", "none") == "ellipsoid") {
      prof.kind = Profile::Kind::Ellipsoid;
      prof.c = j["profile"].at("c").get<double>();
    }
    return PlanarMeasure(spec, std::move(values), tail, prof);
  });
}

std::string to_json(const Partition& p) {
  json rects = json::array();
  for (const auto& r : p.rectangles)
    rects.push_back({{"x0", r.bounds.x0},
                     {"y0", r.bounds.y0},
                     {"x1", r.bounds.x1},
                     {"y1", r.bounds.y1},
                     {"mass", r.mass},
                     {"com", cx(r.center_of_mass)},
                     {"diam", r.diam},
                     {"normal", r.normal}});
  json j{{"k", p.k},
         {"M", p.M},
         {"piece_mass", p.piece_mass},
         {"multiplicity_max", p.multiplicity_max},
         {"max_rel_mass_deviation", p.max_rel_mass_deviation},
         {"worst_aspect_ratio", p.worst_aspect_ratio},
         {"aspect_flags", p.aspect_flags},
         {"min_diameter_ok", p.min_diameter_ok},
         {"rectangles", rects}};
  return dump(j);
}

std::string to_json(const FactoredPoly& f) { return dump(factored_json(f)); }
std::string to_json(const AtomizedPolynomial& f) { return dump(atomized_json(f)); }
std::string to_json(const ErrorReport& r) { return dump(report_json(r)); }

std::string to_json(const ApproximantPair& pair) {
  json hist = json::array();
  for (const auto& [k, e] : pair.history) hist.push_back(json::array({k, num(e)}));
  json j{{"kind", "approximant_pair"},
         {"epsilon_target", num(pair.epsilon_target)},
         {"k", pair.k},
         {"M", pair.M},
         {"degree", pair.degree()},
         {"core_half_width", pair.core_half_width},
         {"shift", pair.shift},
         {"tail", pair.tail ? tail_json(*pair.tail) : json(nullptr)},
         {"certificate", report_json(pair.certificate)},
         {"history", hist},
         {"P", atomized_json(pair.P)},
         {"Q", atomized_json(pair.Q)}};
  return dump(j);
}

ApproximantPair pair_from_json(const std::string& text) {
  return parse(text, [](const json& j) {
    ApproximantPair p;
    p.epsilon_target = get_num(j, "epsilon_target");
    p.k = j.at("k").get<int>();
    p.M = j.at("M").get<int>();
    p.core_half_width = j.at("core_half_width").get<double>();
    p.shift = j.at("shift").get<double>();
    if (!j.at("tail").is_null()) p.tail = tail_from(j.at("tail"));
    p.certificate = report_from(j.at("certificate"));
    for (const auto& h : j.at("history"))
      p.history.emplace_back(h.at(0).get<int>(), h.at(1).is_null() ? std::numeric_limits<double>::infinity()
                                                                   : h.at(1).get<double>());
    p.P = atomized_from(j.at("P"));
    p.Q = atomized_from(j.at("Q"));
    return p;
  });
}

std::string to_json(const HomogeneousPair& pq) {
  return dump(json{{"kind", "homogeneous_pair"},
                   {"n", pq.n},
                   {"P", homogeneous_json(pq.P)},
                   {"Q", homogeneous_json(pq.Q)}});
}

HomogeneousPair homogeneous_pair_from_json(const std::string& text) {
  return parse(text, [](const json& j) {
    HomogeneousPair pq{homogeneous_from(j.at("P")), homogeneous_from(j.at("Q")), j.at("n").get<int>()};
    if (pq.P.n != pq.n || pq.Q.n != pq.n) throw Error(ErrorCode::Io, "pair degrees differ from n");
    return pq;
  });
}

std::string to_json(const SandwichReport& r) {
  return dump(json{{"n_samples", r.n_samples},
                   {"eps", r.eps},
                   {"max_upper_excess", num(r.max_upper_excess)},
                   {"max_lower_deficit", num(r.max_lower_deficit)},
                   {"max_vk_error", num(r.max_vk_error)},
                   {"upper_ok", r.upper_ok},
                   {"lower_ok", r.lower_ok},
                   {"vk_ok", r.vk_ok},
                   {"pass", r.pass},
                   {"worst_z", cx(r.worst_z)},
                   {"worst_w", cx(r.worst_w)}});
}

std::string to_json(const LevelSetSolutions& s) {
  json pts = json::array();
  for (const auto& p : s.points)
    pts.push_back({{"z", cx(p.z)},
                   {"w", cx(p.w)},
                   {"local_degree", p.local_degree},
                   {"residual", p.residual},
                   {"flagged", p.flagged}});
  return dump(json{{"n", s.n},
                   {"fibers", s.fibers},
                   {"skipped_fibers", s.skipped_fibers},
                   {"degree_sum", s.degree_sum()},
                   {"points", pts}});
}

std::string to_json(const MomentReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"index", row.index},
                    {"n", row.n},
                    {"discrete", cx(row.discrete)},
                    {"reference", cx(row.reference)},
                    {"abs_error", row.abs_error}});
  return dump(json{{"n_values", r.n_values},
                   {"max_error", r.max_error},
                   {"key_index", json::array({1, 0, 1, 0})},
                   {"key_error", r.key_error},
                   {"key_nonincreasing", r.key_nonincreasing},
                   {"rows", rows}});
}

std::string atoms_csv(const DiscreteMAMeasure& mu) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "re_z,im_z,re_w,im_w,weight\n";
  for (const auto& a : mu.atoms)
    os << a.z.real() << ',' << a.z.imag() << ',' << a.w.real() << ',' << a.w.imag() << ','
       << a.weight << '\n';
  return os.str();
}

std::string to_json(const FeketeResult& f) {
  json pts = json::array();
  for (const auto& p : f.points) pts.push_back(cx(p));
  return dump(json{{"n", f.points.size()},
                   {"log_vandermonde", f.log_vandermonde},
                   {"sweeps", f.sweeps},
                   {"brute_force", f.brute_force},
                   {"points", pts}});
}

std::string to_json(const LemniscateReport& r) {
  return dump(json{{"pass", r.pass},
                   {"log_norm", r.log_norm},
                   {"boundary_margin", r.boundary_margin},
                   {"grid_margin", r.grid_margin},
                   {"zeros_outside", r.zeros_outside},
                   {"boundary_samples", r.boundary_samples}});
}

namespace {

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad number in " + what + ": '" + s + "'");
  }
}

}  // namespace

PlanarMeasure load_measure(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) return parse_model(spec).riesz_measure();
  return measure_from_json(read_file(spec));
}

CircledSetModel parse_model(const std::string& spec) {
  if (spec == "builtin:ball") return CircledSetModel::ball();
  if (spec == "builtin:bidisk") return CircledSetModel::bidisk();
  const std::string ell = "builtin:ellipsoid:";
  if (spec.rfind(ell, 0) == 0) return CircledSetModel::ellipsoid(parse_double(spec.substr(ell.size()), spec));
  throw Error(ErrorCode::InvalidArgument, "unknown model '" + spec + "'");
}

CompactSet1D parse_set(const std::string& spec, int n_grid) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "interval") {
    double a = -1.0, b = 1.0;
    if (!args.empty()) {
      const auto comma = args.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::InvalidArgument, "interval:a,b");
      a = parse_double(args.substr(0, comma), spec);
      b = parse_double(args.substr(comma + 1), spec);
    }
    return CompactSet1D::interval(a, b, n_grid > 0 ? n_grid : 2001);
  }
  if (kind == "disk") {
    const double r = args.empty() ? 1.0 : parse_double(args, spec);
    return CompactSet1D::disk(r, n_grid > 0 ? n_grid : 720);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown set '" + spec + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::Io, "SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

}  // namespace lemnika
