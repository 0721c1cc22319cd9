#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "diagwalk/lattice.hpp"
#include "diagwalk/series_green.hpp"

namespace diagwalk {

struct McConfig {
    std::int64_t trials = 100000;
    std::uint64_t seed = 0;
    std::int64_t max_steps = 1000000; // per-trial cutoff
};

/// Identical (domain, points, McConfig) yields bitwise-identical fields,
/// independent of thread count: trials draw from counter-based per-trial
/// streams and are reduced as integers in a fixed order.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0; // sample standard deviation / sqrt(trials)
    std::int64_t trials = 0;
    std::int64_t truncated_trials = 0; // trials cut off at max_steps
};

/// Expected departures from every interior point, solved directly from the
/// defining linear system by dense partial-pivot elimination (no series, no
/// quadrature — this is the ground truth the formulas are checked against).
/// Entries are sorted by point.  Finite domains with at most 20,000 interior
/// states; beyond the cap throws TooLargeError.
std::vector<std::pair<LatticePoint, GreenValue>> fundamental_matrix_green(
    const DomainSpec& dom, const LatticePoint& src);

/// Simulates the walk: per trial, step uniformly among the 2^d diagonal
/// moves from src until a non-interior point is reached or max_steps runs
/// out; the mean count of departures from tgt estimates the Green value.
/// Truncated trials keep their partial counts, so with truncated_trials > 0
/// the mean is a slight underestimate (lower-bound semantics).
McEstimate mc_expected_departures(const DomainSpec& dom, const LatticePoint& src,
                                  const LatticePoint& tgt, const McConfig& cfg);

/// Fraction of walks on the full d-dimensional lattice (d >= 3) that revisit
/// the origin within max_steps: a lower-bound estimator of the return
/// probability, bias vanishing as max_steps grows.  d <= 2 is recurrent and
/// throws RecurrentLatticeError.
McEstimate mc_return_prob(int d, const McConfig& cfg);

/// Worker threads the Monte Carlo oracles will use: the DIAGWALK_THREADS
/// environment variable (integer >= 1) when set, else hardware concurrency.
/// Estimates do not depend on this value, only wall time does.
int mc_thread_count();

} // namespace diagwalk
