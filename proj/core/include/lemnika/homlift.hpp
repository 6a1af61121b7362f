#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lemnika/atomizer.hpp"
#include "lemnika/cpoly.hpp"
#include "lemnika/measure.hpp"

namespace lemnika {

/// A circled compact K in C^2 given by its Robin slice u(t) = rho_K(1, t).
struct CircledSetModel {
  enum class Kind { Ball, Bidisk, Ellipsoid, Custom };
  Kind kind = Kind::Ball;
  double c = 1.0;  ///< ellipsoid |z|^2 + c|w|^2 <= 1
  std::function<double(cplx)> slice;
  double tail_const = 0.0;  ///< lim u(t) - log|t| = rho_K(0, 1)

  static CircledSetModel ball();
  static CircledSetModel bidisk();
  static CircledSetModel ellipsoid(double c);
  static CircledSetModel custom(std::function<double(cplx)> u, double tail_const);

  double u(cplx t) const { return slice(t); }
  std::string name() const;
  /// Riesz measure of the slice (built-ins only; the bidisk ring is
  /// mollified). Throws UnsupportedKind for custom models.
  PlanarMeasure riesz_measure() const;
};

/// rho_K(z, w); throws OriginUndefined at (0, 0).
double robin_eval(const CircledSetModel& m, cplx z, cplx w);

/// V_K = max(0, rho_K).
double extremal_eval(const CircledSetModel& m, cplx z, cplx w);

/// P(z, w) = c prod (w - t_j z)^{m_j} z^{n - deg p}, the degree-n lift of
/// p(t) = c prod (t - t_j)^{m_j}.
struct HomogeneousPoly {
  FactoredPoly slice;
  int n = 0;

  int z_power() const { return n - slice.degree(); }
  double log_abs(cplx z, cplx w) const;
  PolarValue polar(cplx z, cplx w) const;
};

/// Throws DegreeExceeded when deg p > n.
HomogeneousPoly homogenize(const FactoredPoly& p, int n);

struct HomogeneousPair {
  HomogeneousPoly P;
  HomogeneousPoly Q;
  int n = 0;
};

/// Lifts an atomized pair at its own degree N. When the model's slice has
/// u(0) != 0 the pair is taken to approximate u - u(0) and both moduli are
/// multiplied by e^{n u(0)}.
HomogeneousPair lift_pair(const ApproximantPair& pair, const CircledSetModel& m);

/// The exact bidisk pair (z^n, w^n).
HomogeneousPair bidisk_pair(int n);

struct ModelPair {
  HomogeneousPair lifted;
  std::optional<ApproximantPair> slice;  ///< empty for the exact bidisk pair
};

/// Degree-n pair for a built-in model: the exact pair for the bidisk, else
/// the lift of atomize_fixed with split_degree(n, odd_k = true).
ModelPair model_pair(const CircledSetModel& m, int n, const CertifyOptions& options = {});

/// max((1/n)log|P|, (1/n)log|Q|).
double max_form(const HomogeneousPair& pq, cplx z, cplx w);
/// max((1/n)log|P|, (1/n)log|Q|, 0).
double u_tilde_eval(const HomogeneousPair& pq, cplx z, cplx w);
/// max((1/n)log|P - 1|, (1/n)log|Q - 1|); kNegInf only on K_n.
double U_n_eval(const HomogeneousPair& pq, cplx z, cplx w);
/// log|P(z,w) - 1| from the polar value of P.
double log_abs_minus_one(const PolarValue& p);

struct SandwichOptions {
  int n_alpha = 25;
  int n_phase = 10;
  std::vector<double> scales{0.25, 1.0, 4.0, 100.0};
  double upper_slack = 1e-9;
};

struct SandwichReport {
  std::int64_t n_samples = 0;
  double max_upper_excess = 0.0;  ///< max of max-form - rho_K
  double max_lower_deficit = 0.0;  ///< max of rho_K - max-form
  double max_vk_error = 0.0;       ///< max |max(0, max-form) - V_K|
  double eps = 0.0;
  bool upper_ok = false;
  bool lower_ok = false;
  bool vk_ok = false;
  bool pass = false;
  cplx worst_z, worst_w;
};

/// Samples (z, w) = s (cos a e^{i p1}, sin a e^{i p2}) over a product grid
/// of directions and radial scales.
SandwichReport sandwich_check(const CircledSetModel& m, const HomogeneousPair& pq, double eps,
                              const SandwichOptions& options = {});

/// Monomials z^a w^b with a + b <= degree, in graded order.
std::vector<std::pair<int, int>> monomials_up_to(int degree);

struct ChebyshevResult {
  std::vector<std::pair<int, int>> monomials;
  std::vector<cplx> coefficients;
  double sup_norm = 0.0;     ///< max over samples of |H + R|
  double lower_bound = 0.0;  ///< Lawson weighted least-squares bound
  double gap = 0.0;          ///< (sup_norm - lower_bound) / sup_norm
  int iterations = 0;
  bool converged = false;

  cplx eval(cplx z, cplx w) const;
};

/// Discrete minimax: R of degree <= n-1 minimizing max_s |H(s) + R(s)|
/// over the sample points, by Lawson's iteratively reweighted least
/// squares to relative gap `gap_tol`. H is given by its sampled values.
/// Throws IllConditioned on a rank-deficient sample matrix and
/// InvalidArgument when there are fewer than 10 samples per unknown.
ChebyshevResult chebyshev_complete(const std::vector<cplx>& h_values,
                                   const std::vector<std::pair<cplx, cplx>>& samples, int n,
                                   double gap_tol = 1e-4, int max_iterations = 20000);

}  // namespace lemnika
