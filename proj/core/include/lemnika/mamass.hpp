#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lemnika/homlift.hpp"

namespace lemnika {

/// A point of K_n = {P = Q = 1} with its local mapping degree.
struct CommonSolution {
  cplx z, w;
  int local_degree = 1;
  double residual = 0.0;  ///< max(|P - 1|, |Q - 1|) after polishing
  bool flagged = false;   ///< near-singular Jacobian or merged cluster
};

struct LevelSetSolutions {
  std::vector<CommonSolution> points;
  int n = 0;
  int fibers = 0;          ///< roots t_j of p - q, with multiplicity
  int skipped_fibers = 0;  ///< roots where p(t_j) vanishes
  int degree_sum() const;
};

/// Reduces P = Q = 1 to the roots of p - q on the chart z != 0 and the
/// n-th roots z^n = 1/p(t_j), then Newton-polishes on the full system.
/// Throws DegenerateLeading when P and Q agree on the line z = 0 (equal
/// leading coefficients) and CommonFactorSuspected when p == q.
LevelSetSolutions solve_common_level_sets(const HomogeneousPair& pq);

struct DiscreteMAMeasure {
  struct Atom {
    cplx z, w;
    double weight = 0.0;
  };
  std::vector<Atom> atoms;
  int n = 0;
  double total_mass = 0.0;
  bool empty = true;
};

/// Atom weight D (2 pi)^2 / n^2.
DiscreteMAMeasure discrete_ma_measure(const std::vector<CommonSolution>& solutions, int n);

enum class ReferenceKind { Ball, Bidisk, Ellipsoid };

using MomentIndex = std::array<int, 4>;  ///< z^a w^b conj(z)^c conj(w)^d

/// Moments of the limit measure (dd^c V_K)^2 with mass (2 pi)^2. The
/// ellipsoid |z|^2 + c|w|^2 = 1 is the image of the sphere under
/// w -> w / sqrt(c). Indices 0..32.
cplx reference_moment(ReferenceKind kind, const MomentIndex& index, double c = 1.0);

cplx discrete_moment(const DiscreteMAMeasure& mu, const MomentIndex& index);

/// All indices with a + b + c + d <= total, lexicographic.
std::vector<MomentIndex> moment_panel(int total = 4);

struct MomentRow {
  MomentIndex index;
  int n = 0;
  cplx discrete;
  cplx reference;
  double abs_error = 0.0;
};

struct MomentReport {
  std::vector<MomentRow> rows;
  std::vector<int> n_values;
  std::vector<double> max_error;    ///< per n
  std::vector<double> key_error;    ///< per n, index (1,0,1,0)
  bool key_nonincreasing = false;
};

/// Moments up to total index 4 against the reference, per measure.
MomentReport weak_star_report(const std::vector<DiscreteMAMeasure>& mus, ReferenceKind kind,
                              double c = 1.0);

/// max over atoms of |rho_K(atom)|.
double support_localization(const DiscreteMAMeasure& mu, const CircledSetModel& m);

struct SobolevReport {
  double l2_distance = 0.0;
  std::int64_t cells = 0;
  std::int64_t excised = 0;
  double excised_fraction() const {
    return cells > 0 ? static_cast<double>(excised) / static_cast<double>(cells) : 0.0;
  }
};

/// Discrete L^2 distance of central-difference gradients of u and V_K over
/// the ball of radius `radius` in R^4, on a grid with `grid` nodes per
/// axis; nodes within 1e-3 of an atom are excised.
SobolevReport sobolev_diagnostic(const std::function<double(cplx, cplx)>& u,
                                 const CircledSetModel& m, const DiscreteMAMeasure& atoms,
                                 double radius, int grid);
/// As above with u = U_n of the pair.
SobolevReport sobolev_diagnostic(const HomogeneousPair& pq, const CircledSetModel& m,
                                 const DiscreteMAMeasure& atoms, double radius, int grid);

}  // namespace lemnika
