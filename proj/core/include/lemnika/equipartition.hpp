#pragma once

#include <vector>

#include "lemnika/measure.hpp"

namespace lemnika {

struct MassRectangle {
  Rect bounds;
  double mass = 0.0;
  cplx center_of_mass;
  double diam = 0.0;
  double aspect_ratio = 1.0;  ///< longest over shortest side
  bool normal = false;
};

struct Partition {
  std::vector<MassRectangle> rectangles;
  int k = 0;
  int M = 0;
  int multiplicity_max = 1;
  double piece_mass = 0.0;  ///< target 1/(kM)
  double max_rel_mass_deviation = 0.0;
  double worst_aspect_ratio = 1.0;
  int aspect_flags = 0;  ///< leaves with aspect ratio above 3
  bool min_diameter_ok = true;
};

/// Splits mu restricted to Q_R into k(M-1) rectangles of mass 1/(kM) by
/// recursive mass bisection. Throws NonIntegerPieces when k(M-1) < 1 and
/// InvalidArgument when mu(Q_R) is not (M-1)/M.
Partition partition(const PlanarMeasure& mu, double R, int k, int M);

/// Tail-free variant: all of mu (grid only) in k*M_eff pieces of mass
/// 1/(k*M_eff), M_eff = 2.
Partition partition_all(const PlanarMeasure& mu, int k);

/// Lower bound on leaf diameters, 1/(3 sqrt(M A)) k^{-1/2}.
double min_diameter_bound(int k, int M, double a_max);

/// Diameter threshold below which a rectangle is normal,
/// k^{1/3} / (3 sqrt(M A)) k^{-1/2}.
double normal_threshold(int k, int M, double a_max);

struct Classification {
  std::vector<int> normal;
  std::vector<int> nonnormal;
  double threshold = 0.0;
};

/// Sets the normal flags on p and returns the two index sets.
Classification classify_normal(Partition& p, double a_max);

/// Mean of zeta over r against mu. Throws ZeroMass.
cplx center_of_mass(const Rect& r, const PlanarMeasure& mu);

}  // namespace lemnika
