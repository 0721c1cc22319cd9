#pragma once

#include <cstdint>
#include <variant>
#include <vector>

namespace diagwalk {

/// Point with integer coordinates.  Comparison is lexicographic, which fixes
/// the iteration order everywhere a set of points is returned.
struct LatticePoint {
    std::vector<std::int64_t> coords;

    LatticePoint() = default;
    LatticePoint(std::initializer_list<std::int64_t> c) : coords(c) {}
    explicit LatticePoint(std::vector<std::int64_t> c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
    std::int64_t operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }
    std::int64_t& operator[](int i) { return coords[static_cast<std::size_t>(i)]; }

    friend bool operator==(const LatticePoint& a, const LatticePoint& b) = default;
    friend auto operator<=>(const LatticePoint& a, const LatticePoint& b) {
        return a.coords <=> b.coords;
    }
};

// Domains.  Finite interiors are {1..m} x {1..n} (x {1..l} in 3D); the
// absorbing boundary is the set of lattice neighbours outside the interior.

/// Interior {1..m} x {1..n}.
struct Rectangle2D {
    std::int64_t m = 1;
    std::int64_t n = 1;
};

/// Half-infinite strip, interior {1..m} x {1, 2, ...}.
struct SemiStrip2D {
    std::int64_t m = 1;
};

/// Bi-infinite strip, interior {1..m} x Z.
struct InfiniteStrip2D {
    std::int64_t m = 1;
};

/// Half plane, interior {1, 2, ...} x Z.
struct HalfPlane2D {};

/// Interior {1..l} x {1..m} x {1..n}.
struct Block3D {
    std::int64_t l = 1;
    std::int64_t m = 1;
    std::int64_t n = 1;
};

/// Unbounded d-dimensional lattice (d >= 2), no boundary at all.
struct FullLattice {
    int d = 3;
};

using DomainSpec = std::variant<Rectangle2D, SemiStrip2D, InfiniteStrip2D,
                                HalfPlane2D, Block3D, FullLattice>;

enum class PointClass { Interior, Boundary, Exterior };

/// Spatial dimension of the domain (2 except Block3D and FullLattice).
int dimension(const DomainSpec& dom);

/// True when the interior is a finite set (Rectangle2D, Block3D).
bool is_finite(const DomainSpec& dom);

/// Throws UnsupportedDomainError on nonpositive extents or FullLattice d < 2.
void validate(const DomainSpec& dom);

/// Interior / Boundary / Exterior split.  Boundary points are exactly the
/// exterior points reachable in one step from the interior.
PointClass classify_point(const DomainSpec& dom, const LatticePoint& x);

/// The 2^d moves of the walk: every coordinate changes by +-1 in one step.
/// Returned in ascending lexicographic order.
std::vector<LatticePoint> diagonal_neighbors(const LatticePoint& x);

/// All boundary points, sorted.  Only defined for finite domains.
std::vector<LatticePoint> boundary_set(const DomainSpec& dom);

/// A walk started at src can ever visit x iff all coordinate differences
/// share one parity (each step shifts every coordinate by one).
bool parity_compatible(const LatticePoint& x, const LatticePoint& src);

} // namespace diagwalk
