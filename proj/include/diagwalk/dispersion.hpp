#pragma once

#include <cstdint>

namespace diagwalk {

// The separable solutions of the walk's difference equation couple a cosine
// factor c to a hyperbolic decay rate beta through c * cosh(beta) = 1.  For
// c > 0 beta is real; for c < 0 the solution continues to beta = beta' + i*pi,
// under which every term of the series stays real but picks up explicit sign
// factors; c = 0 is the beta -> +inf limit.

enum class BranchKind { Real, Shifted, Infinite };

struct DispersionBranch {
    BranchKind kind = BranchKind::Real;
    double beta_prime = 0.0; // real part of beta; meaningless for Infinite
};

/// Solve c * cosh(beta) = 1 for c in [-1, 1].  Accurate both as |c| -> 1
/// (beta_prime -> 0) and as |c| -> 0 (beta_prime large).  |c| slightly above
/// 1 (within 1e-12) is clamped; beyond that throws OutOfRangeError.
DispersionBranch solve_branch(double c);

/// Same, but c given as log|c| plus a sign flag, so that products of many
/// cosines can be fed in without underflow.  log_abs_c must be <= 0;
/// log_abs_c == -inf selects the Infinite branch.
DispersionBranch solve_branch_log(double log_abs_c, bool negative);

/// T = sinh(lo*b) * sinh((n+1-hi)*b) / (tanh(b) * sinh((n+1)*b)) with
/// lo = min(q,b), hi = max(q,b), evaluated on the branch:
///   Real     -> plain value (internally log-magnitude for large n*beta)
///   Shifted  -> magnitude as Real, overall sign (-1)^(q-b)
///   Infinite -> limit 1/2 * [q == b]
/// Symmetric in (q, b) by construction; requires 1 <= q, b <= n.  Does not
/// overflow for n up to 1e4.
double term_rect(const DispersionBranch& br, std::int64_t q, std::int64_t b, std::int64_t n);

/// exp(-k*beta) / tanh(beta) on the branch (k >= 0):
///   Real -> plain value; Shifted -> extra (-1)^k; Infinite -> [k == 0].
double term_strip(const DispersionBranch& br, std::int64_t k);

/// sin(pi*k/M) and cos(pi*k/M) folded through integer arithmetic so the exact
/// symmetries hold: sin_pi_ratio(M-k,M) == sin_pi_ratio(k,M),
/// cos_pi_ratio(M-k,M) == -cos_pi_ratio(k,M), and cos_pi_ratio(k,2k) == 0
/// exactly (critical: the midpoint must land on the Infinite branch, not on a
/// cosine of order 1e-17).
double sin_pi_ratio(std::int64_t k, std::int64_t M);
double cos_pi_ratio(std::int64_t k, std::int64_t M);

/// arccosh(1 + d) for d >= 0 with full relative accuracy as d -> 0.
double acosh1p(double d);

} // namespace diagwalk
