#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "diagwalk/lattice.hpp"

namespace diagwalk {

/// Expected number of departures from a target point before absorption; the
/// discrete Green's function of the walk.  Nonnegative; zero across parity
/// classes; >= 1 at the source itself.
using GreenValue = double;

/// Where the walk gets absorbed: boundary point -> probability.  Covers every
/// boundary point of a finite domain (unreachable ones carry probability 0)
/// and sums to 1.  Entries are sorted by point.
struct AbsorptionMap {
    std::vector<std::pair<LatticePoint, double>> entries;

    double total() const;
};

/// Rectangle {1..m} x {1..n}: exact m-term sum.  src/tgt must be interior;
/// a Boundary target returns 0; Exterior throws NotInteriorError.
GreenValue rect_green(std::int64_t m, std::int64_t n, const LatticePoint& src,
                      const LatticePoint& tgt);

/// Semi-infinite strip {1..m} x {1,2,...}: the n -> infinity limit of the
/// rectangle sum, still m exact terms.
GreenValue semistrip_green(std::int64_t m, const LatticePoint& src, const LatticePoint& tgt);

/// Bi-infinite strip {1..m} x Z.  Depends on the longitudinal coordinates
/// only through s = tgt_axis - src_axis; a, p are the transverse coordinates.
GreenValue strip_green(std::int64_t m, std::int64_t a, std::int64_t p, std::int64_t s);

/// Block {1..l} x {1..m} x {1..n}: exact l*m-term double sum.
GreenValue block_green(std::int64_t l, std::int64_t m, std::int64_t n,
                       const LatticePoint& src, const LatticePoint& tgt);

/// Probability of being absorbed at each boundary point, by the last-step
/// rule P(beta) = (1/2^d) * sum of F over interior neighbors of beta.
/// Finite domains only (UnsupportedDomainError otherwise).
AbsorptionMap absorption_probs(const DomainSpec& dom, const LatticePoint& src);

/// Probability of at least one return to src before absorption: 1 - 1/F(src).
double return_prob_finite(const DomainSpec& dom, const LatticePoint& src);

} // namespace diagwalk
