#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lemnika/equipartition.hpp"
#include "lemnika/error.hpp"
#include "lemnika/measure.hpp"

namespace lemnika {

struct ExceptionalDisk {
  cplx center;
  double radius = 0.0;
};

/// F with norm_weight * log|F| approximating V off the exceptional disks.
struct AtomizedPolynomial {
  FactoredPoly poly;
  int degree = 0;
  double norm_weight = 0.0;
  std::vector<ExceptionalDisk> exceptional;

  double normalized_log(cplx z) const { return norm_weight * log_abs_eval(poly, z); }
  bool in_exceptional_set(cplx z) const;
};

struct ErrorReport {
  double sup_error_off_exceptional = 0.0;
  double upper_bound_violation = 0.0;  ///< max over all samples of max-form - V
  std::int64_t n_samples = 0;
  std::int64_t n_two_sided = 0;
  double grid_half_width = 0.0;  ///< L
  int grid_n = 0;
  double core_half_width = 0.0;
  int core_n = 0;
  double far_radius = 0.0;
  double far_field_spread = 0.0;  ///< max - min of (max-form - V) on the far circle
  cplx worst_point;
  cplx worst_violation_point;
};

struct CertifyOptions {
  int grid_n = 201;
  int core_n = 101;
  int far_n = 256;
  int probes_per_disk = 8;
  int refine_starts = 8;
  std::uint64_t seed = 0;
};

struct ApproximantPair {
  AtomizedPolynomial P;
  AtomizedPolynomial Q;
  double epsilon_target = 0.0;
  int k = 0;
  int M = 0;
  std::optional<TailParameters> tail;  ///< empty on the tail-free path
  double core_half_width = 0.0;        ///< R, or the support half-width when tail-free
  double shift = 0.0;                  ///< s applied as F -> e^{-N s} F
  ErrorReport certificate;
  std::vector<std::pair<int, double>> history;  ///< (k, sup error before shift)

  int degree() const { return P.degree; }
  double max_form(cplx z) const;
};

/// Zeros for one polynomial of the pair: centres of mass (normal pieces)
/// or greedily separated points (non-normal pieces), displaced by
/// k^{-5} e^{i phase}. Throws SeparationFailure.
std::vector<cplx> place_zeros(const Partition& p, const Classification& c, int k, double phase);

/// Tail path: F = e^{-kM c0} (1 - z/w)^k prod (z - zeta_l), weight 1/(kM).
AtomizedPolynomial assemble(const std::vector<cplx>& zeros, const TailParameters& tail, cplx w,
                            int k);

/// Tail-free path: F = e^{-K c0} prod (z - zeta_l), K = zeros.size(),
/// c0 = integral of log|zeta|.
AtomizedPolynomial assemble_tail_free(const std::vector<cplx>& zeros, double c0, int k);

/// Samples V and the normalized log-moduli; see CertifyOptions for the
/// sample sets. V comes from potential_reference.
ErrorReport certify(const ApproximantPair& pair, const PlanarMeasure& mu,
                    const CertifyOptions& options = {});

struct AtomizeOptions {
  double eps = 0.25;
  int k_start = 8;
  int k_max = 256;
  CertifyOptions certify;
};

/// Thrown by atomize_pair when k_max is exhausted; carries the best pair.
class AtomizeBudgetExceeded : public Error {
 public:
  AtomizeBudgetExceeded(ApproximantPair best, const std::string& what)
      : Error(ErrorCode::BudgetExceeded, what), best_(std::move(best)) {}
  const ApproximantPair& best() const { return best_; }

 private:
  ApproximantPair best_;
};

/// Doubles k from k_start until the shifted pair certifies within eps.
ApproximantPair atomize_pair(const PlanarMeasure& mu, const AtomizeOptions& options = {});

/// One construction at prescribed k and M (degree kM, or 2k when the
/// measure is tail-free and M is ignored), certified and shifted.
ApproximantPair atomize_fixed(const PlanarMeasure& mu, int k, int M,
                              const CertifyOptions& options = {});

/// Picks (k, M) with kM = n, M a divisor of n near sqrt(n), k >= 2. With
/// odd_k the tail factors (1 - z/w)^k and (1 + z/w)^k get leading
/// coefficients of opposite sign, so P and Q differ at z = 0.
std::pair<int, int> split_degree(int n, bool odd_k = false);

}  // namespace lemnika
