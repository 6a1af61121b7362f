#include "lemnika/equipartition.hpp"

#include <algorithm>
#include <cmath>

#include "lemnika/error.hpp"

namespace lemnika {

namespace {

constexpr int kCutIterations = 60;

// Bounding box of the cells of r that carry density, clipped to r. Returns
// r itself when it holds no mass.
Rect support_box(const PlanarMeasure& mu, const Rect& r) {
  const GridSpec& g = mu.grid();
  const int i0 = std::max(0, static_cast<int>(std::floor((r.x0 - g.x0) / g.h)));
  const int i1 = std::min(g.nx - 1, static_cast<int>(std::ceil((r.x1 - g.x0) / g.h)) - 1);
  const int j0 = std::max(0, static_cast<int>(std::floor((r.y0 - g.y0) / g.h)));
  const int j1 = std::min(g.ny - 1, static_cast<int>(std::ceil((r.y1 - g.y0) / g.h)) - 1);
  int lo_i = i1 + 1, hi_i = i0 - 1, lo_j = j1 + 1, hi_j = j0 - 1;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i)
      if (mu.value(i, j) > 0.0) {
        lo_i = std::min(lo_i, i);
        hi_i = std::max(hi_i, i);
        lo_j = std::min(lo_j, j);
        hi_j = std::max(hi_j, j);
      }
  if (hi_i < lo_i) return r;
  return {std::max(r.x0, g.x0 + lo_i * g.h), std::max(r.y0, g.y0 + lo_j * g.h),
          std::min(r.x1, g.x0 + (hi_i + 1) * g.h), std::min(r.y1, g.y0 + (hi_j + 1) * g.h)};
}

// Cut coordinate along x (vertical cut) or y where the lower part carries
// `target`. Mass is monotone in the cut, possibly flat across empty slabs;
// the cut then goes to the middle of the flat stretch.
double find_cut(const PlanarMeasure& mu, const Rect& r, bool vertical, double target, double tol) {
  const double a = vertical ? r.x0 : r.y0;
  const double b = vertical ? r.x1 : r.y1;
  auto lower = [&](double c) {
    return vertical ? mu.rect_mass({r.x0, r.y0, c, r.y1}) : mu.rect_mass({r.x0, r.y0, r.x1, c});
  };
  // Leftmost c with lower(c) >= target - tol.
  double lo = a, hi = b;
  for (int it = 0; it < kCutIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lower(mid) >= target - tol) hi = mid;
    else lo = mid;
  }
  const double left = hi;
  // Rightmost c with lower(c) <= target + tol.
  lo = a;
  hi = b;
  for (int it = 0; it < kCutIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lower(mid) <= target + tol) lo = mid;
    else hi = mid;
  }
  const double right = lo;
  if (right < left) return left;
  return 0.5 * (left + right);
}

struct Builder {
  const PlanarMeasure& mu;
  double piece_mass;
  std::vector<MassRectangle> leaves;

  void split(Rect r, int pieces) {
    r = support_box(mu, r);
    const double mass = mu.rect_mass(r);
    if (pieces == 1) {
      MassRectangle leaf;
      leaf.bounds = r;
      leaf.mass = mass;
      leaf.diam = r.diam();
      const double lo = std::min(r.width(), r.height());
      leaf.aspect_ratio = lo > 0.0 ? std::max(r.width(), r.height()) / lo
                                   : std::numeric_limits<double>::infinity();
      leaf.center_of_mass = mass > 0.0 ? center_of_mass(r, mu) : r.center();
      leaves.push_back(leaf);
      return;
    }
    const int left = pieces / 2;
    const double target = mass * left / pieces;
    const bool vertical = r.width() >= r.height();
    const double c = find_cut(mu, r, vertical, target, 1e-12 * mass);
    if (!std::isfinite(c))
      throw Error(ErrorCode::EmptyCell, "mass cut could not be placed");
    Rect lo = r, hi = r;
    if (vertical) {
      lo.x1 = c;
      hi.x0 = c;
    } else {
      lo.y1 = c;
      hi.y0 = c;
    }
    split(lo, left);
    split(hi, pieces - left);
  }
};

Partition finish(const PlanarMeasure& mu, std::vector<MassRectangle> leaves, int k, int M,
                 double piece_mass) {
  Partition p;
  p.k = k;
  p.M = M;
  p.piece_mass = piece_mass;
  p.rectangles = std::move(leaves);
  const double dmin = min_diameter_bound(k, M, mu.a_max());
  for (const auto& r : p.rectangles) {
    p.max_rel_mass_deviation =
        std::max(p.max_rel_mass_deviation, std::abs(r.mass - piece_mass) / piece_mass);
    p.worst_aspect_ratio = std::max(p.worst_aspect_ratio, r.aspect_ratio);
    if (r.aspect_ratio > 3.0) ++p.aspect_flags;
    if (r.diam < dmin) p.min_diameter_ok = false;
  }
  return p;
}

}  // namespace

double min_diameter_bound(int k, int M, double a_max) {
  return 1.0 / (3.0 * std::sqrt(M * a_max) * std::sqrt(static_cast<double>(k)));
}

double normal_threshold(int k, int M, double a_max) {
  return std::cbrt(static_cast<double>(k)) * min_diameter_bound(k, M, a_max);
}

Partition partition(const PlanarMeasure& mu, double R, int k, int M) {
  if (k < 1 || M < 2)
    throw Error(ErrorCode::NonIntegerPieces, "k(M-1) must be at least 1");
  const Rect q = Rect::centered_square(R);
  const double restricted = mu.rect_mass(q);
  const double want = static_cast<double>(M - 1) / M;
  if (std::abs(restricted - want) > 1e-6)
    throw Error(ErrorCode::InvalidArgument,
                "mass of Q_R is " + std::to_string(restricted) + ", expected (M-1)/M");
  Builder b{mu, 1.0 / (static_cast<double>(k) * M), {}};
  b.split(q, k * (M - 1));
  return finish(mu, std::move(b.leaves), k, M, b.piece_mass);
}

Partition partition_all(const PlanarMeasure& mu, int k) {
  if (k < 1) throw Error(ErrorCode::NonIntegerPieces, "k must be at least 1");
  constexpr int kMeff = 2;
  const GridSpec& g = mu.grid();
  const double total = mu.grid_mass();
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "measure has no grid mass");
  Builder b{mu, total / (static_cast<double>(k) * kMeff), {}};
  b.split({g.x0, g.y0, g.x1(), g.y1()}, k * kMeff);
  return finish(mu, std::move(b.leaves), k, kMeff, b.piece_mass);
}

Classification classify_normal(Partition& p, double a_max) {
  Classification c;
  c.threshold = normal_threshold(p.k, p.M, a_max);
  for (std::size_t l = 0; l < p.rectangles.size(); ++l) {
    auto& r = p.rectangles[l];
    r.normal = r.diam <= c.threshold;
    (r.normal ? c.normal : c.nonnormal).push_back(static_cast<int>(l));
  }
  return c;
}

cplx center_of_mass(const Rect& r, const PlanarMeasure& mu) {
  const double m = mu.rect_mass(r);
  if (!(m > 0.0)) throw Error(ErrorCode::ZeroMass, "rectangle carries no mass");
  return mu.rect_first_moment(r) / m;
}

}  // namespace lemnika
