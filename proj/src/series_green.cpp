#include "diagwalk/series_green.hpp"

#include <cmath>
#include <string>

#include "diagwalk/dispersion.hpp"
#include "diagwalk/errors.hpp"

namespace diagwalk {

namespace {

// Neumaier variant of compensated summation; fixed order keeps results
// reproducible to the last bit.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = s + x;
        c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

[[noreturn]] void not_interior(const char* which) {
    throw NotInteriorError(std::string(which) + " point is not interior to the domain");
}

// src must be strictly interior; tgt may sit on the boundary (F = 0 there)
// but not outside it.  Returns true when the target is a boundary point.
bool check_endpoints(const DomainSpec& dom, const LatticePoint& src, const LatticePoint& tgt) {
    if (classify_point(dom, src) != PointClass::Interior) not_interior("source");
    switch (classify_point(dom, tgt)) {
    case PointClass::Interior: return false;
    case PointClass::Boundary: return true;
    default: not_interior("target");
    }
}

} // namespace

double AbsorptionMap::total() const {
    KahanSum sum;
    for (const auto& [pt, p] : entries) sum.add(p);
    return sum.value();
}

GreenValue rect_green(std::int64_t m, std::int64_t n, const LatticePoint& src,
                      const LatticePoint& tgt) {
    const DomainSpec dom = Rectangle2D{m, n};
    if (check_endpoints(dom, src, tgt)) return 0.0;
    const std::int64_t M = m + 1;
    KahanSum sum;
    for (std::int64_t r = 1; r <= m; ++r) {
        const double sa = sin_pi_ratio(src[0] * r, M);
        const double sp = sin_pi_ratio(tgt[0] * r, M);
        if (sa == 0.0 || sp == 0.0) continue;
        const DispersionBranch br = solve_branch(cos_pi_ratio(r, M));
        sum.add(sa * sp * term_rect(br, tgt[1], src[1], n));
    }
    return 4.0 / static_cast<double>(M) * sum.value();
}

GreenValue semistrip_green(std::int64_t m, const LatticePoint& src, const LatticePoint& tgt) {
    const DomainSpec dom = SemiStrip2D{m};
    if (check_endpoints(dom, src, tgt)) return 0.0;
    const std::int64_t M = m + 1;
    const std::int64_t b = src[1], q = tgt[1];
    const std::int64_t lo = b < q ? b : q;
    const std::int64_t hi = b < q ? q : b;
    KahanSum sum;
    for (std::int64_t r = 1; r <= m; ++r) {
        const double sa = sin_pi_ratio(src[0] * r, M);
        const double sp = sin_pi_ratio(tgt[0] * r, M);
        if (sa == 0.0 || sp == 0.0) continue;
        const DispersionBranch br = solve_branch(cos_pi_ratio(r, M));
        // sinh(lo*b)*e^{-hi*b}/tanh b, written as a difference of decaying
        // exponentials so nothing can overflow for any separation.
        const double t = 0.5 * (term_strip(br, hi - lo) - term_strip(br, hi + lo));
        sum.add(sa * sp * t);
    }
    return 4.0 / static_cast<double>(M) * sum.value();
}

GreenValue strip_green(std::int64_t m, std::int64_t a, std::int64_t p, std::int64_t s) {
    validate(DomainSpec{InfiniteStrip2D{m}});
    if (a < 1 || a > m) not_interior("source");
    if (p < 0 || p > m + 1) not_interior("target");
    if (p == 0 || p == m + 1) return 0.0; // side wall: F vanishes there
    const std::int64_t M = m + 1;
    const std::int64_t k = s < 0 ? -s : s;
    KahanSum sum;
    for (std::int64_t r = 1; r <= m; ++r) {
        const double sa = sin_pi_ratio(a * r, M);
        const double sp = sin_pi_ratio(p * r, M);
        if (sa == 0.0 || sp == 0.0) continue;
        const DispersionBranch br = solve_branch(cos_pi_ratio(r, M));
        sum.add(sa * sp * term_strip(br, k));
    }
    return 2.0 / static_cast<double>(M) * sum.value();
}

GreenValue block_green(std::int64_t l, std::int64_t m, std::int64_t n,
                       const LatticePoint& src, const LatticePoint& tgt) {
    const DomainSpec dom = Block3D{l, m, n};
    if (check_endpoints(dom, src, tgt)) return 0.0;
    const std::int64_t L = l + 1, M = m + 1;
    KahanSum sum;
    for (std::int64_t r1 = 1; r1 <= l; ++r1) {
        const double s1a = sin_pi_ratio(src[0] * r1, L);
        const double s1p = sin_pi_ratio(tgt[0] * r1, L);
        if (s1a == 0.0 || s1p == 0.0) continue;
        const double c1 = cos_pi_ratio(r1, L);
        for (std::int64_t r2 = 1; r2 <= m; ++r2) {
            const double s2a = sin_pi_ratio(src[1] * r2, M);
            const double s2p = sin_pi_ratio(tgt[1] * r2, M);
            if (s2a == 0.0 || s2p == 0.0) continue;
            const DispersionBranch br = solve_branch(c1 * cos_pi_ratio(r2, M));
            sum.add(s1a * s1p * s2a * s2p * term_rect(br, tgt[2], src[2], n));
        }
    }
    return 8.0 / static_cast<double>(L * M) * sum.value();
}

AbsorptionMap absorption_probs(const DomainSpec& dom, const LatticePoint& src) {
    validate(dom);
    if (!is_finite(dom))
        throw UnsupportedDomainError("absorption map requires a finite domain");
    if (classify_point(dom, src) != PointClass::Interior) not_interior("source");

    auto green = [&](const LatticePoint& tgt) -> double {
        if (const auto* r = std::get_if<Rectangle2D>(&dom))
            return rect_green(r->m, r->n, src, tgt);
        const auto& b = std::get<Block3D>(dom);
        return block_green(b.l, b.m, b.n, src, tgt);
    };

    const int d = dimension(dom);
    const double stepprob = 1.0 / static_cast<double>(std::int64_t{1} << d);
    AbsorptionMap out;
    for (const auto& bpt : boundary_set(dom)) {
        KahanSum sum;
        for (const auto& nb : diagonal_neighbors(bpt))
            if (classify_point(dom, nb) == PointClass::Interior) sum.add(green(nb));
        out.entries.emplace_back(bpt, stepprob * sum.value());
    }
    return out;
}

double return_prob_finite(const DomainSpec& dom, const LatticePoint& src) {
    validate(dom);
    if (!is_finite(dom))
        throw UnsupportedDomainError("finite-domain return probability requires a finite domain");
    double f;
    if (const auto* r = std::get_if<Rectangle2D>(&dom))
        f = rect_green(r->m, r->n, src, src);
    else {
        const auto& b = std::get<Block3D>(dom);
        f = block_green(b.l, b.m, b.n, src, src);
    }
    return 1.0 - 1.0 / f;
}

} // namespace diagwalk
