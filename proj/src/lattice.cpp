#include "diagwalk/lattice.hpp"

#include <algorithm>
#include <cstdlib>

#include "diagwalk/errors.hpp"

namespace diagwalk {

namespace {

void require_dim(const DomainSpec& dom, const LatticePoint& x) {
    if (x.dim() != dimension(dom))
        throw DimensionMismatchError("point dimension " + std::to_string(x.dim()) +
                                     " does not match domain dimension " +
                                     std::to_string(dimension(dom)));
}

bool in_interior(const DomainSpec& dom, const LatticePoint& x) {
    return std::visit(
        [&x](const auto& d) -> bool {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Rectangle2D>) {
                return x[0] >= 1 && x[0] <= d.m && x[1] >= 1 && x[1] <= d.n;
            } else if constexpr (std::is_same_v<T, SemiStrip2D>) {
                return x[0] >= 1 && x[0] <= d.m && x[1] >= 1;
            } else if constexpr (std::is_same_v<T, InfiniteStrip2D>) {
                return x[0] >= 1 && x[0] <= d.m;
            } else if constexpr (std::is_same_v<T, HalfPlane2D>) {
                return x[0] >= 1;
            } else if constexpr (std::is_same_v<T, Block3D>) {
                return x[0] >= 1 && x[0] <= d.l && x[1] >= 1 && x[1] <= d.m &&
                       x[2] >= 1 && x[2] <= d.n;
            } else {
                return true; // FullLattice
            }
        },
        dom);
}

} // namespace

int dimension(const DomainSpec& dom) {
    return std::visit(
        [](const auto& d) -> int {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Block3D>)
                return 3;
            else if constexpr (std::is_same_v<T, FullLattice>)
                return d.d;
            else
                return 2;
        },
        dom);
}

bool is_finite(const DomainSpec& dom) {
    return std::holds_alternative<Rectangle2D>(dom) || std::holds_alternative<Block3D>(dom);
}

void validate(const DomainSpec& dom) {
    std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Rectangle2D>) {
                if (d.m < 1 || d.n < 1)
                    throw UnsupportedDomainError("rectangle extents must be positive");
            } else if constexpr (std::is_same_v<T, SemiStrip2D> ||
                                 std::is_same_v<T, InfiniteStrip2D>) {
                if (d.m < 1) throw UnsupportedDomainError("strip width must be positive");
            } else if constexpr (std::is_same_v<T, Block3D>) {
                if (d.l < 1 || d.m < 1 || d.n < 1)
                    throw UnsupportedDomainError("block extents must be positive");
            } else if constexpr (std::is_same_v<T, FullLattice>) {
                if (d.d < 2)
                    throw UnsupportedDomainError("full lattice requires dimension >= 2");
            }
        },
        dom);
}

PointClass classify_point(const DomainSpec& dom, const LatticePoint& x) {
    validate(dom);
    require_dim(dom, x);
    if (in_interior(dom, x)) return PointClass::Interior;
    if (std::holds_alternative<FullLattice>(dom)) return PointClass::Interior;
    // Boundary iff some diagonal neighbour is interior.
    for (const auto& y : diagonal_neighbors(x))
        if (in_interior(dom, y)) return PointClass::Boundary;
    return PointClass::Exterior;
}

std::vector<LatticePoint> diagonal_neighbors(const LatticePoint& x) {
    const int d = x.dim();
    std::vector<LatticePoint> out;
    out.reserve(std::size_t{1} << d);
    // Bit i of mask selects the sign of coordinate i.
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << d); ++mask) {
        LatticePoint y = x;
        for (int i = 0; i < d; ++i)
            y[i] += (mask >> i) & 1u ? -1 : +1;
        out.push_back(std::move(y));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<LatticePoint> boundary_set(const DomainSpec& dom) {
    validate(dom);
    if (!is_finite(dom))
        throw UnsupportedDomainError("boundary_set requires a finite domain");
    std::vector<LatticePoint> out;
    auto scan = [&](const LatticePoint& x) {
        if (classify_point(dom, x) == PointClass::Boundary) out.push_back(x);
    };
    if (const auto* r = std::get_if<Rectangle2D>(&dom)) {
        // Candidates: the frame one step outside the interior box.
        for (std::int64_t p = 0; p <= r->m + 1; ++p)
            for (std::int64_t q = 0; q <= r->n + 1; ++q)
                if (p == 0 || p == r->m + 1 || q == 0 || q == r->n + 1)
                    scan(LatticePoint{p, q});
    } else {
        const auto& b = std::get<Block3D>(dom);
        for (std::int64_t p = 0; p <= b.l + 1; ++p)
            for (std::int64_t q = 0; q <= b.m + 1; ++q)
                for (std::int64_t s = 0; s <= b.n + 1; ++s)
                    if (p == 0 || p == b.l + 1 || q == 0 || q == b.m + 1 || s == 0 ||
                        s == b.n + 1)
                        scan(LatticePoint{p, q, s});
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool parity_compatible(const LatticePoint& x, const LatticePoint& src) {
    if (x.dim() != src.dim())
        throw DimensionMismatchError("parity check requires equal dimensions");
    if (x.dim() == 0) return true;
    const std::int64_t par = (x[0] - src[0]) & 1;
    for (int i = 1; i < x.dim(); ++i)
        if (((x[i] - src[i]) & 1) != par) return false;
    return true;
}

} // namespace diagwalk
