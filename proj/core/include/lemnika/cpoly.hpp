#pragma once

#include <complex>
#include <limits>
#include <span>
#include <vector>

namespace lemnika {

using cplx = std::complex<double>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Zero {
  cplx value;
  int multiplicity = 1;
};

/// c * prod (t - t_j)^{m_j} with |c| = exp(log_constant), arg c = phase_constant.
/// All potential-theoretic evaluation goes through this form; coefficients
/// are only materialized for root finding.
struct FactoredPoly {
  std::vector<Zero> zeros;
  double log_constant = 0.0;
  double phase_constant = 0.0;

  int degree() const;
};

/// Value = 2^log2_scale * sum_j coefficients[j] t^j, ascending order.
struct CoeffPoly {
  std::vector<cplx> coefficients;
  double log2_scale = 0.0;

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  bool is_zero() const;
};

/// A complex number stored as exp(log_abs + i*arg); survives magnitudes far
/// outside the double range.
struct PolarValue {
  double log_abs = kNegInf;
  double arg = 0.0;

  cplx to_complex() const;
};

/// log|f(z)|; kNegInf at exact zeros.
double log_abs_eval(const FactoredPoly& f, cplx z);

/// f(z) in polar form with phases accumulated factor by factor.
PolarValue polar_eval(const FactoredPoly& f, cplx z);

/// Coefficient form with per-step power-of-two rescaling. Degree limit 2048.
CoeffPoly expand(const FactoredPoly& f);

/// Plain Horner evaluation of the unscaled coefficient vector (the
/// 2^log2_scale factor is not applied).
cplx horner(std::span<const cplx> coefficients, cplx z);

/// |p(r)| / (||c||_2 * max(1,|r|)^deg), computed without overflow.
double normalized_residual(const CoeffPoly& p, cplx r);

struct Root {
  cplx value;
  double residual = 0.0;  ///< normalized residual, see normalized_residual
  int multiplicity = 1;
};

struct RootResult {
  std::vector<Root> roots;
  bool converged = false;
  int sweeps = 0;
};

struct RootOptions {
  double tol = 1e-10;
  int max_sweeps = 500;
  double cluster_rel = 1e-7;
  int polish_steps = 3;
};

/// All roots by Aberth-Ehrlich simultaneous iteration followed by Newton
/// polishing. When the iteration does not settle within max_sweeps the best
/// iterate is returned with converged == false; residuals are always filled.
RootResult roots(const CoeffPoly& p, const RootOptions& options = {});

/// a - b under a common power-of-two scale. Leading coefficients that cancel
/// to within 1e-12 of the operands' magnitude at that index are dropped, so
/// the degree may fall; a result with no coefficients left is the zero
/// polynomial.
CoeffPoly subtract(const CoeffPoly& a, const CoeffPoly& b);

}  // namespace lemnika
