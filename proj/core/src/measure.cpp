#include "lemnika/measure.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "lemnika/error.hpp"

namespace lemnika {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBlockCells = 16;
constexpr int kMultipoleOrder = 16;
constexpr int kMaxRefineDepth = 12;
constexpr double kLeafMass = 1e-9;
// Mean of ln|zeta| over the unit square centred at 0.
const double kUnitSquareLogMean = 0.5 * (-std::numbers::ln2 - 3.0 + 0.5 * kPi);

template <class F>
double gk(F f, double a, double b, double tol = 1e-11) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 15, tol);
}

// Target depth for local refinement of a cell of mass m.
int refine_depth(double cell_mass, bool strict = true) {
  if (cell_mass <= kLeafMass) return 0;
  const int d = static_cast<int>(std::ceil(std::log(cell_mass / kLeafMass) / std::log(4.0)));
  if (!strict) return std::min(d, kMaxRefineDepth);
  if (d > kMaxRefineDepth)
    throw Error(ErrorCode::QuadratureBudgetExceeded,
                "log-kernel refinement needs depth " + std::to_string(d) + " > 12");
  return d;
}

// Midpoint rule with 2x2 subdivision near the singular point p.
// g maps distance to kernel value; sub-squares within 2 sizes of p split
// until the target depth.
template <class G>
double refined_cell(cplx center, double side, double density, cplx p, int depth, int target,
                    const G& g, double log_mean) {
  const double d = std::abs(center - p);
  if (depth >= target || d > 2.0 * side) {
    const double m = density * side * side;
    if (d == 0.0) return m * (g(side) + log_mean);
    return m * g(d);
  }
  const double q = 0.25 * side;
  const double half = 0.5 * side;
  double acc = 0.0;
  for (int sj = 0; sj < 2; ++sj)
    for (int si = 0; si < 2; ++si)
      acc += refined_cell(center + cplx{(si ? q : -q), (sj ? q : -q)}, half, density, p,
                          depth + 1, target, g, log_mean);
  return acc;
}

double overlap_1d(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

double GridSpec::inner_half_width() const {
  return std::max(0.0, std::min({-x0, x1(), -y0, y1()}));
}

double Rect::diam() const { return std::hypot(width(), height()); }

bool Rect::contains(cplx z, double slack) const {
  return z.real() >= x0 - slack && z.real() <= x1 + slack && z.imag() >= y0 - slack &&
         z.imag() <= y1 + slack;
}

// ---- tail ------------------------------------------------------------------

double TailDescriptor::density(double s) const {
  if (kind == Kind::None) return 0.0;
  const double q = 1.0 + c * s * s;
  return c / (kPi * q * q);
}

double TailDescriptor::radial_moment_outside(double r,
                                             const std::function<double(double)>& f) const {
  if (kind == Kind::None) return 0.0;
  r = std::max(r, r0);
  const double rho = r * std::numbers::sqrt2;
  // Partial annulus r < s < r sqrt2: the part of each circle outside the square.
  const double partial = gk(
      [&](double s) { return s * density(s) * f(s) * 8.0 * std::acos(std::min(1.0, r / s)); }, r,
      rho);
  const double full = gk([&](double x) {
    const double s = std::exp(x);
    return 2.0 * kPi * s * s * density(s) * f(s);
  }, std::log(rho), std::log(rho) + 60.0);
  return partial + full;
}

double TailDescriptor::mass_outside(double r) const {
  if (kind == Kind::None) return 0.0;
  r = std::max(r, r0);
  const double rho = r * std::numbers::sqrt2;
  const double partial = gk(
      [&](double s) { return s * density(s) * 8.0 * std::acos(std::min(1.0, r / s)); }, r, rho);
  return partial + 1.0 / (1.0 + c * rho * rho);
}

double TailDescriptor::potential(cplx z) const {
  if (kind == Kind::None || z == cplx{}) return 0.0;
  const double az = std::abs(z);
  const double rho = r0 * std::numbers::sqrt2;
  double full = 0.0;
  if (az > rho) {
    full = gk([&](double x) {
      const double s = std::exp(x);
      return 2.0 * kPi * s * s * density(s) * (std::log(az) - x);
    }, std::log(rho), std::log(az));
  }
  const double argz = std::arg(z);
  auto arc_integral = [&](double s) {
    const double alpha = std::acos(std::min(1.0, r0 / s));
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double mid = 0.5 * kPi * k;
      auto kernel = [&](double theta) {
        return std::log(std::abs(1.0 - z * std::polar(1.0 / s, -theta)));
      };
      double lo = mid - alpha, hi = mid + alpha;
      const double shift = std::remainder(argz - mid, 2.0 * kPi);
      if (std::abs(shift) < alpha && std::abs(az - s) < 0.25 * s) {
        acc += gk(kernel, lo, mid + shift, 1e-9) + gk(kernel, mid + shift, hi, 1e-9);
      } else {
        acc += gk(kernel, lo, hi, 1e-9);
      }
    }
    return s * density(s) * acc;
  };
  double partial;
  if (az > r0 && az < rho) partial = gk(arc_integral, r0, az, 1e-9) + gk(arc_integral, az, rho, 1e-9);
  else partial = gk(arc_integral, r0, rho, 1e-9);
  return full + partial;
}

std::optional<double> Profile::potential(cplx z) const {
  if (kind == Kind::Ellipsoid) return 0.5 * std::log1p(c * std::norm(z));
  return std::nullopt;
}

// ---- PlanarMeasure -----------------------------------------------------------

PlanarMeasure::PlanarMeasure(GridSpec grid, std::vector<double> values, TailDescriptor tail,
                             Profile profile)
    : grid_(grid), values_(std::move(values)), tail_(tail), profile_(profile) {
  if (grid_.nx <= 0 || grid_.ny <= 0 || !(grid_.h > 0.0))
    throw Error(ErrorCode::InvalidArgument, "grid must have positive size");
  if (values_.size() != static_cast<std::size_t>(grid_.nx) * grid_.ny)
    throw Error(ErrorCode::InvalidArgument, "grid value count does not match nx*ny");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, "densities must be finite and nonnegative");
  build_tables();
}

void PlanarMeasure::build_tables() {
  const int nx = grid_.nx, ny = grid_.ny;
  a_max_ = *std::max_element(values_.begin(), values_.end());
  cumulative_.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
  for (int j = 0; j < ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < nx; ++i) {
      row += cell_mass(i, j);
      cumulative_[static_cast<std::size_t>(j + 1) * (nx + 1) + i + 1] =
          cumulative_[static_cast<std::size_t>(j) * (nx + 1) + i + 1] + row;
    }
  }
  blocks_.clear();
  for (int bj = 0; bj < ny; bj += kBlockCells) {
    for (int bi = 0; bi < nx; bi += kBlockCells) {
      Block b;
      b.i0 = bi;
      b.j0 = bj;
      b.i1 = std::min(nx, bi + kBlockCells);
      b.j1 = std::min(ny, bj + kBlockCells);
      const cplx lo = grid_.cell_center(b.i0, b.j0);
      const cplx hi = grid_.cell_center(b.i1 - 1, b.j1 - 1);
      b.center = 0.5 * (lo + hi);
      b.radius = 0.5 * std::abs(hi - lo);
      b.moments.assign(kMultipoleOrder + 1, cplx{});
      for (int j = b.j0; j < b.j1; ++j) {
        for (int i = b.i0; i < b.i1; ++i) {
          const double m = cell_mass(i, j);
          if (m == 0.0) continue;
          const cplx d = grid_.cell_center(i, j) - b.center;
          cplx pw = m;
          for (int p = 0; p <= kMultipoleOrder; ++p) {
            b.moments[p] += pw;
            pw *= d;
          }
        }
      }
      if (b.moments[0] != cplx{}) blocks_.push_back(std::move(b));
    }
  }
  grid_log_origin_ = grid_log_potential_impl(cplx{}, false);
  log_constant_ = grid_log_origin_ +
                  tail_.radial_moment_outside(tail_.r0, [](double s) { return std::log(s); });
}

double PlanarMeasure::grid_mass() const { return cumulative_.back(); }

double PlanarMeasure::total_mass() const { return grid_mass() + tail_.mass_outside(tail_.r0); }

double PlanarMeasure::corner_cumulative(double x, double y) const {
  const int nx = grid_.nx, ny = grid_.ny;
  const double u = std::clamp((x - grid_.x0) / grid_.h, 0.0, static_cast<double>(nx));
  const double v = std::clamp((y - grid_.y0) / grid_.h, 0.0, static_cast<double>(ny));
  const int i = std::min(nx - 1, static_cast<int>(u));
  const int j = std::min(ny - 1, static_cast<int>(v));
  const double fu = u - i, fv = v - j;
  auto at = [&](int a, int b) { return cumulative_[static_cast<std::size_t>(b) * (nx + 1) + a]; };
  return (1 - fu) * (1 - fv) * at(i, j) + fu * (1 - fv) * at(i + 1, j) +
         (1 - fu) * fv * at(i, j + 1) + fu * fv * at(i + 1, j + 1);
}

double PlanarMeasure::rect_mass(const Rect& r) const {
  if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) return 0.0;
  const double m = corner_cumulative(r.x1, r.y1) - corner_cumulative(r.x0, r.y1) -
                   corner_cumulative(r.x1, r.y0) + corner_cumulative(r.x0, r.y0);
  return std::max(0.0, m);
}

cplx PlanarMeasure::rect_first_moment(const Rect& r) const {
  const double h = grid_.h;
  const int i0 = std::max(0, static_cast<int>(std::floor((r.x0 - grid_.x0) / h)));
  const int i1 = std::min(grid_.nx - 1, static_cast<int>(std::floor((r.x1 - grid_.x0) / h)));
  const int j0 = std::max(0, static_cast<int>(std::floor((r.y0 - grid_.y0) / h)));
  const int j1 = std::min(grid_.ny - 1, static_cast<int>(std::floor((r.y1 - grid_.y0) / h)));
  cplx acc{};
  for (int j = j0; j <= j1; ++j) {
    const double cy0 = grid_.y0 + j * h;
    const double oy = overlap_1d(cy0, cy0 + h, r.y0, r.y1);
    if (oy <= 0.0) continue;
    const double my = 0.5 * (std::max(cy0, r.y0) + std::min(cy0 + h, r.y1));
    for (int i = i0; i <= i1; ++i) {
      const double a = value(i, j);
      if (a == 0.0) continue;
      const double cx0 = grid_.x0 + i * h;
      const double ox = overlap_1d(cx0, cx0 + h, r.x0, r.x1);
      if (ox <= 0.0) continue;
      const double mx = 0.5 * (std::max(cx0, r.x0) + std::min(cx0 + h, r.x1));
      acc += a * ox * oy * cplx{mx, my};
    }
  }
  return acc;
}

double PlanarMeasure::grid_log_potential(cplx z) const { return grid_log_potential_impl(z, true); }

double PlanarMeasure::grid_log_potential_impl(cplx z, bool strict) const {
  const double h = grid_.h;
  auto g = [](double d) { return std::log(d); };
  double acc = 0.0;
  for (const auto& b : blocks_) {
    const cplx dz = z - b.center;
    if (std::abs(dz) > 3.0 * b.radius + 2.0 * h) {
      const cplx inv = 1.0 / dz;
      cplx pw = inv;
      double series = b.moments[0].real() * std::log(std::abs(dz));
      for (int p = 1; p <= kMultipoleOrder; ++p) {
        series -= (b.moments[p] * pw).real() / p;
        pw *= inv;
      }
      acc += series;
      continue;
    }
    for (int j = b.j0; j < b.j1; ++j) {
      for (int i = b.i0; i < b.i1; ++i) {
        const double a = value(i, j);
        if (a == 0.0) continue;
        const cplx c = grid_.cell_center(i, j);
        const double d = std::abs(z - c);
        if (d > 2.0 * h) {
          acc += a * h * h * std::log(d);
        } else {
          acc += refined_cell(c, h, a, z, 0, refine_depth(a * h * h, strict), g,
                                kUnitSquareLogMean);
        }
      }
    }
  }
  return acc;
}

// ---- construction ----------------------------------------------------------------

namespace {

double laplacian_mass(const std::function<double(cplx)>& u, const GridSpec& g,
                      std::vector<double>* density_out) {
  const int nx = g.nx + 2, ny = g.ny + 2;
  std::vector<double> samples(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      samples[static_cast<std::size_t>(j) * nx + i] = u(g.cell_center(i - 1, j - 1));
  auto s = [&](int i, int j) { return samples[static_cast<std::size_t>(j + 1) * nx + i + 1]; };
  double mass = 0.0;
  if (density_out) density_out->assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double lap = (s(i + 1, j) + s(i - 1, j) + s(i, j + 1) + s(i, j - 1) - 4.0 * s(i, j)) /
                         (g.h * g.h);
      double a = lap / (2.0 * kPi);
      if (std::abs(a) < 1e-12) a = 0.0;
      if (a < -1e-8)
        throw Error(ErrorCode::NonSubharmonic,
                    "negative Riesz density " + std::to_string(a) + " at cell (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
      a = std::max(a, 0.0);
      mass += a * g.h * g.h;
      if (density_out) (*density_out)[static_cast<std::size_t>(j) * g.nx + i] = a;
    }
  }
  return mass;
}

}  // namespace

PlanarMeasure riesz_density(const std::function<double(cplx)>& u, const GridSpec& grid,
                            std::optional<TailDescriptor> tail) {
  std::vector<double> density;
  const double mass = laplacian_mass(u, grid, &density);
  GridSpec fine = grid;
  fine.h = 0.5 * grid.h;
  fine.nx = 2 * grid.nx;
  fine.ny = 2 * grid.ny;
  const double fine_mass = laplacian_mass(u, fine, nullptr);
  if (std::abs(mass - fine_mass) > 1e-3)
    throw Error(ErrorCode::GridTooCoarse, "Richardson mass gap " +
                                              std::to_string(std::abs(mass - fine_mass)));
  return PlanarMeasure(grid, std::move(density), tail.value_or(TailDescriptor{}));
}

PlanarMeasure ellipsoid_slice_measure(double c, double half_width, double h) {
  if (!(c > 0.0) || !(half_width > 0.0) || !(h > 0.0))
    throw Error(ErrorCode::InvalidArgument, "ellipsoid measure needs c, half_width, h > 0");
  const int n = static_cast<int>(std::lround(2.0 * half_width / h));
  GridSpec g{-half_width, -half_width, 2.0 * half_width / n, n, n};
  TailDescriptor tail{TailDescriptor::Kind::Ellipsoid, c, half_width};
  // 4-point Gauss-Legendre per axis for the cell averages.
  static constexpr std::array<double, 4> nodes{-0.8611363115940526, -0.3399810435848563,
                                               0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> weights{0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const cplx ctr = g.cell_center(i, j);
      double acc = 0.0;
      for (int b = 0; b < 4; ++b)
        for (int a = 0; a < 4; ++a) {
          const double x = ctr.real() + 0.5 * g.h * nodes[a];
          const double y = ctr.imag() + 0.5 * g.h * nodes[b];
          acc += weights[a] * weights[b] * tail.density(std::hypot(x, y));
        }
      values[static_cast<std::size_t>(j) * n + i] = 0.25 * acc;
    }
  }
  return PlanarMeasure(g, std::move(values), tail, Profile{Profile::Kind::Ellipsoid, c});
}

PlanarMeasure unit_circle_measure(double smoothing, double half_width, double h) {
  const int n = static_cast<int>(std::lround(2.0 * half_width / h));
  GridSpec g{-half_width, -half_width, 2.0 * half_width / n, n, n};
  std::vector<double> values(static_cast<std::size_t>(n) * n, 0.0);
  constexpr int samples = 1 << 16;
  const double cell_area = g.h * g.h;
  for (int k = 0; k < samples; ++k) {
    const cplx p = std::polar(1.0, 2.0 * kPi * (k + 0.5) / samples);
    const int i = std::clamp(static_cast<int>(std::floor((p.real() - g.x0) / g.h)), 0, n - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.imag() - g.y0) / g.h)), 0, n - 1);
    values[static_cast<std::size_t>(j) * n + i] += 1.0 / samples / cell_area;
  }
  return mollify(PlanarMeasure(g, std::move(values)), smoothing);
}

PlanarMeasure mollify(const PlanarMeasure& mu, double h) {
  if (h < 0.0) throw Error(ErrorCode::InvalidArgument, "mollifier radius must be >= 0");
  const GridSpec& g = mu.grid();
  const int K = static_cast<int>(std::floor(h / g.h));
  std::vector<double> kernel;
  double ksum = 0.0;
  for (int dj = -K; dj <= K; ++dj)
    for (int di = -K; di <= K; ++di) {
      const double r2 = (di * di + dj * dj) * g.h * g.h / (h * h);
      const double w = r2 < 1.0 ? std::pow(1.0 - r2, 3) : 0.0;
      kernel.push_back(w);
      ksum += w;
    }
  if (K == 0 || ksum == kernel[static_cast<std::size_t>(K) * (2 * K + 1) + K]) return mu;
  for (auto& w : kernel) w /= ksum;

  GridSpec out = g;
  out.x0 -= K * g.h;
  out.y0 -= K * g.h;
  out.nx += 2 * K;
  out.ny += 2 * K;
  std::vector<double> values(static_cast<std::size_t>(out.nx) * out.ny, 0.0);
  const int side = 2 * K + 1;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double a = mu.value(i, j);
      if (a == 0.0) continue;
      for (int dj = 0; dj < side; ++dj)
        for (int di = 0; di < side; ++di)
          values[static_cast<std::size_t>(j + dj) * out.nx + i + di] +=
              a * kernel[static_cast<std::size_t>(dj) * side + di];
    }
  }
  double new_mass = 0.0;
  for (double v : values) new_mass += v;
  new_mass *= g.h * g.h;
  const double scale = new_mass > 0.0 ? mu.grid_mass() / new_mass : 1.0;
  for (auto& v : values) v *= scale;
  return PlanarMeasure(out, std::move(values), mu.tail());
}

// ---- evaluation ----------------------------------------------------------------------

double potential_eval(const PlanarMeasure& mu, cplx z) {
  if (z == cplx{}) return 0.0;
  return mu.grid_log_potential(z) - mu.grid_log_origin() + mu.tail().potential(z);
}

double potential_reference(const PlanarMeasure& mu, cplx z) {
  if (auto v = mu.profile().potential(z)) return *v;
  return potential_eval(mu, z);
}

double log_moment(const PlanarMeasure& mu) {
  const GridSpec& g = mu.grid();
  const double h = g.h;
  auto g_abs = [](double d) { return std::abs(std::log(d)); };
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double a = mu.value(i, j);
      if (a == 0.0) continue;
      const cplx c = g.cell_center(i, j);
      const double d = std::abs(c);
      if (d > 2.0 * h) acc += a * h * h * std::abs(std::log(d));
      else acc += refined_cell(c, h, a, cplx{}, 0, refine_depth(a * h * h), g_abs, 0.0);
    }
  }
  const auto& t = mu.tail();
  return acc + t.radial_moment_outside(t.r0, [](double s) { return std::abs(std::log(s)); });
}

AdmissibilityReport check_admissibility(const PlanarMeasure& mu) {
  AdmissibilityReport rep;
  rep.total_mass = mu.total_mass();
  rep.log_moment = log_moment(mu);
  const GridSpec& g = mu.grid();
  const double extent = std::max({std::abs(g.x0), std::abs(g.x1()), std::abs(g.y0),
                                  std::abs(g.y1()), mu.tail().r0});
  rep.radii = {1e3 * extent, 1e4 * extent, 1e5 * extent};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  for (double r : rep.radii) {
    const double c = potential_eval(mu, cplx{r, 0.0}) - std::log(r);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    sum += c;
  }
  rep.c_infinity = sum / 3.0;
  rep.limit_deviation = hi - lo;
  rep.mass_ok = std::abs(rep.total_mass - 1.0) <= 1e-6;
  rep.log_moment_ok = std::isfinite(rep.log_moment);
  rep.limit_ok = std::isfinite(rep.limit_deviation) && rep.limit_deviation <= 1e-2;
  rep.pass = rep.mass_ok && rep.log_moment_ok && rep.limit_ok;
  return rep;
}

// ---- tail split -------------------------------------------------------------------------

double mass_outside_square(const PlanarMeasure& mu, double R) {
  const auto& t = mu.tail();
  double tail_inside = 0.0;
  if (t.kind != TailDescriptor::Kind::None && R > t.r0)
    tail_inside = t.mass_outside(t.r0) - t.mass_outside(R);
  return mu.total_mass() - mu.rect_mass(Rect::centered_square(R)) - tail_inside;
}

namespace {

// Integral of log|zeta| over the grid part outside Q_R, each straddling
// cell represented by the centroid of its outside portion.
double grid_log_outside(const PlanarMeasure& mu, double R, bool absolute) {
  const GridSpec& g = mu.grid();
  const Rect q = Rect::centered_square(R);
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double a = mu.value(i, j);
      if (a == 0.0) continue;
      const cplx c = g.cell_center(i, j);
      const Rect cell{c.real() - 0.5 * g.h, c.imag() - 0.5 * g.h, c.real() + 0.5 * g.h,
                      c.imag() + 0.5 * g.h};
      const double ox = overlap_1d(cell.x0, cell.x1, q.x0, q.x1);
      const double oy = overlap_1d(cell.y0, cell.y1, q.y0, q.y1);
      const double in_area = ox * oy;
      const double out_area = g.h * g.h - in_area;
      if (out_area <= 1e-15 * g.h * g.h) continue;
      cplx centroid = c;
      if (in_area > 0.0) {
        const cplx in_c{0.5 * (std::max(cell.x0, q.x0) + std::min(cell.x1, q.x1)),
                        0.5 * (std::max(cell.y0, q.y0) + std::min(cell.y1, q.y1))};
        centroid = (g.h * g.h * c - in_area * in_c) / out_area;
      }
      const double lg = std::log(std::abs(centroid));
      acc += a * out_area * (absolute ? std::abs(lg) : lg);
    }
  }
  return acc;
}

double max_density_beyond(const PlanarMeasure& mu, double radius) {
  const GridSpec& g = mu.grid();
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const cplx c = g.cell_center(i, j);
      const double far = std::hypot(std::abs(c.real()) + 0.5 * g.h, std::abs(c.imag()) + 0.5 * g.h);
      if (far > radius) m = std::max(m, mu.value(i, j));
    }
  }
  const auto& t = mu.tail();
  if (t.kind != TailDescriptor::Kind::None) m = std::max(m, t.density(std::max(t.r0, radius)));
  return m;
}

TailParameters split_for_m(const PlanarMeasure& mu, int M) {
  const auto& t = mu.tail();
  double r_max = mu.grid().inner_half_width();
  if (t.kind != TailDescriptor::Kind::None) r_max = std::min(r_max, t.r0);
  const double target = 1.0 / M;
  if (mass_outside_square(mu, r_max) > target * (1.0 + 1e-6))
    throw Error(ErrorCode::NoSuchR, "tail mass 1/" + std::to_string(M) +
                                        " needs Q_R beyond the grid; enlarge the grid");
  double lo = 0.0, hi = r_max, R = hi;
  bool found = false;
  for (int it = 0; it < 200; ++it) {
    R = 0.5 * (lo + hi);
    const double tm = mass_outside_square(mu, R);
    if (std::abs(tm - target) <= 1e-7 * target) {
      found = true;
      break;
    }
    if (tm > target) lo = R;
    else hi = R;
  }
  if (!found) throw Error(ErrorCode::NoSuchR, "tail-mass bisection did not converge");

  TailParameters tp;
  tp.M = M;
  tp.R = R;
  tp.tail_mass = mass_outside_square(mu, R);
  const double log_out = grid_log_outside(mu, R, false) +
                         t.radial_moment_outside(t.r0, [](double s) { return std::log(s); });
  tp.r_infty = std::exp(M * log_out);
  tp.c0 = mu.log_constant() - log_out;
  tp.w_primary = cplx{10.0 * tp.r_infty, 0.0};
  tp.w_secondary = -tp.w_primary;
  tp.max_density_outside = max_density_beyond(mu, R / 3.0);
  tp.log_tail = grid_log_outside(mu, R, true) +
                t.radial_moment_outside(t.r0, [](double s) { return std::abs(std::log(s)); });
  return tp;
}

}  // namespace

TailParameters tail_parameters_for_pieces(const PlanarMeasure& mu, int M) {
  if (mu.tail().kind == TailDescriptor::Kind::None)
    throw Error(ErrorCode::TailFree, "measure has no tail; use the tail-free assembly");
  if (M < 2) throw Error(ErrorCode::InvalidArgument, "M must be >= 2");
  TailParameters tp = split_for_m(mu, M);
  tp.eta = 1.0 / (M - 1);
  tp.small_density_ok = tp.max_density_outside <= tp.eta;
  return tp;
}

TailParameters select_tail_parameters(const PlanarMeasure& mu, double eta) {
  if (!(eta > 0.0 && eta < 0.5)) throw Error(ErrorCode::InvalidArgument, "eta must be in (0, 1/2)");
  if (mu.tail().kind == TailDescriptor::Kind::None)
    throw Error(ErrorCode::TailFree, "measure has no tail; use the tail-free assembly");
  for (int M = static_cast<int>(std::ceil(1.0 / eta)) + 1; M < 1000000; ++M) {
    TailParameters tp = split_for_m(mu, M);
    tp.eta = eta;
    tp.small_density_ok = tp.max_density_outside <= eta;
    if (tp.small_density_ok) return tp;
  }
  throw Error(ErrorCode::NoSuchR, "density bound never satisfied");
}

}  // namespace lemnika
