#pragma once

#include <cstdint>

#include "diagwalk/lattice.hpp"
#include "diagwalk/quadrature.hpp"

namespace diagwalk {

/// Green's function of the half plane {1,2,...} x Z: a and p are the source
/// and target wall distances (>= 1), s the longitudinal separation.  Single
/// oscillatory integral over [0, pi], split at pi/2 where the decay-rate
/// branch changes.  p = 0 is the wall itself and yields an exact 0.
QuadratureResult halfplane_green(std::int64_t a, std::int64_t p, std::int64_t s,
                                 const QuadratureSpec& spec = {});

/// Green's function of the unbounded d-dimensional lattice at displacement u,
/// d = u.dim() >= 3 (d <= 2 is recurrent: RecurrentLatticeError).  Nested
/// adaptive quadrature over [0, pi]^(d-1) with per-level tolerance budgets;
/// `evaluations` counts innermost-kernel calls.  Runtime grows roughly as a
/// power of the per-axis node count with d; prefer looser tolerances for
/// d >= 5.
QuadratureResult lattice_green_nd(const LatticePoint& u, const QuadratureSpec& spec = {});

/// Expected visits to the origin (the lattice Green constant) and the return
/// probability 1 - 1/visits.
struct ReturnConstant {
    double green = 0.0;
    double p_return = 0.0;
    QuadratureResult quad; // metadata of the underlying integration
};

/// Diagonal walk on the full d-dimensional lattice, d >= 3.
ReturnConstant return_constant_diagonal(int d, const QuadratureSpec& spec = {});

/// Nearest-neighbour walk on the simple cubic lattice (axis steps, 6 moves).
ReturnConstant return_constant_regular3d(const QuadratureSpec& spec = {});

} // namespace diagwalk
