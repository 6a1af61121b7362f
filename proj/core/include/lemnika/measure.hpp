#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "lemnika/cpoly.hpp"

namespace lemnika {

/// Uniform cell grid; (x0, y0) is the lower-left corner, cells are h x h,
/// values are stored row-major with x varying fastest.
struct GridSpec {
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 1.0;
  int nx = 0;
  int ny = 0;

  double x1() const { return x0 + h * nx; }
  double y1() const { return y0 + h * ny; }
  cplx cell_center(int i, int j) const { return {x0 + (i + 0.5) * h, y0 + (j + 0.5) * h}; }
  /// Half-side of the largest origin-centred square inside the grid.
  double inner_half_width() const;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double diam() const;
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(cplx z, double slack = 0.0) const;
  static Rect centered_square(double half) { return {-half, -half, half, half}; }
};

/// Analytic description of the measure outside the origin-centred square
/// of half-side r0. The only closed form shipped is the ellipsoid profile
/// a(s) = c / (pi (1 + c s^2)^2), whose potential is 1/2 log(1 + c|z|^2).
struct TailDescriptor {
  enum class Kind { None, Ellipsoid };
  Kind kind = Kind::None;
  double c = 1.0;
  double r0 = 0.0;

  double density(double s) const;
  /// mu(C \ Q_r) restricted to the tail, for r >= r0.
  double mass_outside(double r) const;
  /// Integral of f(|zeta|) d mu over C \ Q_r for r >= r0.
  double radial_moment_outside(double r, const std::function<double(double)>& f) const;
  /// Tail contribution to the normalized potential at z.
  double potential(cplx z) const;
};

/// Closed-form potential attached to built-in measures (cleared by any
/// operation that changes the density).
struct Profile {
  enum class Kind { None, Ellipsoid };
  Kind kind = Kind::None;
  double c = 1.0;

  std::optional<double> potential(cplx z) const;
};

/// A probability measure on C: piecewise-constant density on a grid plus an
/// optional analytic tail. Cell values are cell-averaged densities, so the
/// mass of any axis-parallel rectangle is exact for the grid part.
class PlanarMeasure {
 public:
  PlanarMeasure() = default;
  PlanarMeasure(GridSpec grid, std::vector<double> values, TailDescriptor tail = {},
                Profile profile = {});

  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const TailDescriptor& tail() const { return tail_; }
  const Profile& profile() const { return profile_; }
  double value(int i, int j) const { return values_[static_cast<std::size_t>(j) * grid_.nx + i]; }
  double cell_mass(int i, int j) const { return value(i, j) * grid_.h * grid_.h; }
  double a_max() const { return a_max_; }

  double grid_mass() const;
  double total_mass() const;
  /// Grid mass inside r (clipped to the grid).
  double rect_mass(const Rect& r) const;
  /// Integral of zeta over r against the grid part.
  cplx rect_first_moment(const Rect& r) const;
  /// Integral of log|zeta| over the whole measure (grid + tail).
  double log_constant() const { return log_constant_; }

  /// Integral of log|z - zeta| against the grid part (no normalization).
  double grid_log_potential(cplx z) const;
  /// grid_log_potential(0), cached; refinement depth is capped instead of
  /// raising QuadratureBudgetExceeded.
  double grid_log_origin() const { return grid_log_origin_; }

 private:
  struct Block {
    cplx center;
    double radius = 0.0;
    int i0 = 0, j0 = 0, i1 = 0, j1 = 0;
    std::vector<cplx> moments;
  };

  double corner_cumulative(double x, double y) const;
  void build_tables();
  double grid_log_potential_impl(cplx z, bool strict) const;

  GridSpec grid_;
  std::vector<double> values_;
  TailDescriptor tail_;
  Profile profile_;
  double a_max_ = 0.0;
  std::vector<double> cumulative_;  // (nx+1) x (ny+1) summed-area table of cell masses
  std::vector<Block> blocks_;
  double grid_log_origin_ = 0.0;
  double log_constant_ = 0.0;
};

// ---- construction -------------------------------------------------------

/// Riesz measure (1/2pi) Laplacian of u by the 5-point stencil at cell
/// centres. Throws NonSubharmonic or GridTooCoarse.
PlanarMeasure riesz_density(const std::function<double(cplx)>& u, const GridSpec& grid,
                            std::optional<TailDescriptor> tail = std::nullopt);

/// Exact cell masses of c/(pi(1+c|t|^2)^2) on [-half, half]^2 plus the
/// analytic tail outside it; c = 1 is the unit-ball slice.
PlanarMeasure ellipsoid_slice_measure(double c, double half_width, double h);
inline PlanarMeasure ball_slice_measure(double half_width = 12.0, double h = 1.0 / 32.0) {
  return ellipsoid_slice_measure(1.0, half_width, h);
}

/// Uniform probability measure on |t| = 1, deposited on the grid and
/// mollified with radius smoothing. Compactly supported (tail-free).
PlanarMeasure unit_circle_measure(double smoothing = 0.1, double half_width = 2.0,
                                  double h = 1.0 / 64.0);

/// Convolution with the C^2 bump (1 - r^2/h^2)^3, grid padded to hold the
/// spread, mass renormalized. h below the cell size is the identity.
PlanarMeasure mollify(const PlanarMeasure& mu, double h);

// ---- evaluation ---------------------------------------------------------

/// V(z) = integral log|1 - z/zeta| d mu(zeta). Throws QuadratureBudgetExceeded.
double potential_eval(const PlanarMeasure& mu, cplx z);

/// Closed form when the measure carries one, quadrature otherwise.
double potential_reference(const PlanarMeasure& mu, cplx z);

/// Integral of |log|zeta|| d mu.
double log_moment(const PlanarMeasure& mu);

struct AdmissibilityReport {
  double total_mass = 0.0;
  double log_moment = 0.0;
  double c_infinity = 0.0;
  double limit_deviation = 0.0;
  std::array<double, 3> radii{};
  bool mass_ok = false;
  bool log_moment_ok = false;
  bool limit_ok = false;
  bool pass = false;
};

AdmissibilityReport check_admissibility(const PlanarMeasure& mu);

struct TailParameters {
  double eta = 0.0;
  double R = 0.0;
  int M = 0;
  double r_infty = 0.0;
  cplx w_primary;
  cplx w_secondary;
  double c0 = 0.0;
  double tail_mass = 0.0;
  double log_tail = 0.0;        ///< integral of |log|zeta|| outside Q_R (diagnostic)
  double max_density_outside = 0.0;  ///< max a(z) over |z| > R/3
  bool small_density_ok = false;
};

/// Tail split for the atomizer. M starts at ceil(1/eta)+1 and is raised
/// until the density outside |z| > R/3 is below eta. Throws TailFree for
/// compactly supported measures and NoSuchR when no radius works inside
/// the grid.
TailParameters select_tail_parameters(const PlanarMeasure& mu, double eta);

/// Same split for a prescribed M (fixed-degree construction). The density
/// bound is reported, not enforced.
TailParameters tail_parameters_for_pieces(const PlanarMeasure& mu, int M);

/// mu(C \ Q_R), grid plus tail.
double mass_outside_square(const PlanarMeasure& mu, double R);

}  // namespace lemnika
