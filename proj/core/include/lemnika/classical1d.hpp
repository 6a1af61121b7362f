#pragma once

#include <cstdint>
#include <vector>

#include "lemnika/cpoly.hpp"

namespace lemnika {

/// A compact set in C with connected complement, represented by a finite
/// candidate grid lying in the set.
struct CompactSet1D {
  enum class Kind { Disk, Interval, Cloud };
  Kind kind = Kind::Interval;
  double radius = 1.0;              ///< disk centred at 0
  double alpha = -1.0, beta = 1.0;  ///< interval [alpha, beta]
  std::vector<cplx> candidates;
  double spacing = 0.0;

  /// Boundary circle with `n_grid` equally spaced nodes starting at r.
  static CompactSet1D disk(double r, int n_grid = 720);
  /// Equally spaced nodes including both endpoints.
  static CompactSet1D interval(double alpha, double beta, int n_grid = 2001);
  static CompactSet1D cloud(std::vector<cplx> points);
};

struct FeketeResult {
  std::vector<cplx> points;
  double log_vandermonde = 0.0;  ///< sum_{j<k} log|a_j - a_k|
  std::vector<double> history;   ///< after the start and each accepted swap
  int sweeps = 0;
  bool brute_force = false;
};

/// Maximizes prod_{j<k} |a_j - a_k| over the candidate grid: exhaustive for
/// n <= 4 on grids of at most 64 nodes, otherwise a Leja start followed by
/// single-point exchange until no swap improves. Throws InvalidArgument if
/// the grid has fewer than 4n nodes.
FeketeResult fekete_points(const CompactSet1D& K, int n);

double log_vandermonde(const std::vector<cplx>& points);

/// prod (z - a_j).
FactoredPoly fekete_polynomial(const std::vector<cplx>& points);

/// V_K(z) in closed form; throws UnsupportedKind for clouds.
double extremal_1d(const CompactSet1D& K, cplx z);

/// log sup_K |p|: the candidate grid refined 16 times, then golden-section
/// polishing around the largest values (disk and interval), or the cloud
/// itself.
double log_sup_norm(const CompactSet1D& K, const FactoredPoly& p);

struct LemniscateReport {
  bool pass = false;
  double log_norm = 0.0;          ///< log ||p||_K
  double boundary_margin = 0.0;   ///< min over d(K^eps) of log|p| - log||p||_K
  double grid_margin = 0.0;       ///< min over the K grid of log||p||_K - log|p|
  int zeros_outside = 0;          ///< zeros of p outside K^eps
  std::int64_t boundary_samples = 0;
};

/// Checks K subset {|p| <= ||p||_K} subset K^eps: |p| > ||p||_K on the
/// boundary of K^eps and every zero (hence every lemniscate component)
/// inside K^eps.
LemniscateReport lemniscate_sandwich(const FactoredPoly& p, const CompactSet1D& K, double eps,
                                     int boundary_samples = 4000);

/// Kolmogorov distance between the empirical CDF of Re(zeros) and the
/// arcsine law on [-1, 1]. Throws InvalidArgument for zeros with
/// |Im| > 1e-8.
double counting_measure_distance(const std::vector<cplx>& zeros);

/// T_n(x) = cos(n arccos x), cosh continuation outside [-1, 1].
double chebyshev_poly(int n, double x);
/// Three-term recurrence T_{k+1} = 2x T_k - T_{k-1}.
double chebyshev_recurrence(int n, double x);
/// Zeros cos((2j - 1) pi / 2n) with leading coefficient 2^{n-1}.
FactoredPoly chebyshev_factored(int n);

}  // namespace lemnika
