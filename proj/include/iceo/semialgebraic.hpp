#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "iceo/dataset.hpp"
#include "iceo/lp.hpp"
#include "iceo/polynomial.hpp"
#include "iceo/problems.hpp"
#include "iceo/surrogate.hpp"

namespace iceo {

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// X = {x : A x >= a}.
struct PolyhedralDomain {
  Matrix A;  // m x p
  Vector a;  // m

  int num_rows() const { return static_cast<int>(A.rows()); }
  int dim() const { return static_cast<int>(A.cols()); }
  bool contains(const Vector& x, double tol = 1e-9) const;

  /// The box [lo, hi]^p written as 2p inequalities.
  static PolyhedralDomain box(int p, double lo, double hi);
};

struct DomainCertificate {
  Vector center;  // Chebyshev center
  double radius = 0.0;
  Vector lower;  // coordinate bounds from the bounding LPs
  Vector upper;
};

/// Phase-1 nonemptiness, per-coordinate boundedness LPs, and a Chebyshev center.
/// Throws DomainError when X is empty, unbounded or has no interior.
DomainCertificate certify_domain(const PolyhedralDomain& domain);

/// LP-duality system certifying B x + b in the simplex for every x in X, with
/// auxiliary y_1..y_K, z, u in R^m (all >= 0):
///   a^T y_k >= -b_k,       A^T y_k = B_k
///   a^T z   >= 1 - 1^T b,  A^T z   = B^T 1
///   a^T u   >= -1 + 1^T b, A^T u   = -B^T 1
struct SimplexMembershipSystem {
  PolyhedralDomain domain;
  int num_scenarios = 0;
  DomainCertificate certificate;

  int num_aux_variables() const { return (num_scenarios + 2) * domain.num_rows(); }
  int num_inequalities() const { return num_scenarios + 2; }
  int num_equalities() const { return (num_scenarios + 2) * domain.dim(); }

  /// The auxiliary-variable LP for fixed (B, b). Variables are ordered y_1, ..., y_K, z, u.
  LinearProgram to_lp(const Matrix& B, const Vector& b) const;
};

SimplexMembershipSystem build_membership_system(const PolyhedralDomain& domain, int num_scenarios);

enum class Certification { Certified, Infeasible, NumericalFailure };
std::string to_string(Certification c);

struct FeasibilityResult {
  Certification status = Certification::NumericalFailure;
  Vector aux;  // (y_1..y_K, z, u) when certified
};

FeasibilityResult check_feasibility(const SimplexMembershipSystem& system, const Matrix& B, const Vector& b);

/// Residual-free membership test: min_k v_k >= -tol and |1^T v - 1| <= tol.
bool in_simplex_within(const Vector& v, double tol);

/// Hit-and-run over X from its Chebyshev center; returns the first sampled x with
/// B x + b outside the simplex (tolerance tol), or nothing.
std::optional<Vector> falsify_by_sampling(const PolyhedralDomain& domain, const Matrix& B, const Vector& b,
                                          int n_samples, std::uint64_t seed, double tol = 1e-9);

/// The surrogate as polynomials of its simplex argument, given one polynomial
/// per simplex coordinate. Supports bernstein and krr surrogates.
std::vector<Polynomial> surrogate_polynomials(const Surrogate& surrogate, const std::vector<Polynomial>& p);

/// Writes the polynomial program for training a linear hypothesis (B, b) on the
/// surrogate objective subject to the membership system. Line-oriented text.
std::string export_polynomial_program(const ProblemInstance& problem, const Surrogate& surrogate,
                                      const Dataset& data, double rho, const PolyhedralDomain& domain);

}  // namespace iceo
