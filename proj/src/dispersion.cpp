#include "diagwalk/dispersion.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>

#include "diagwalk/errors.hpp"

namespace diagwalk {

namespace {

constexpr double kPi = std::numbers::pi;

// log(sinh x) for x > 0 without overflow: x + log(1 - e^{-2x}) - log 2.
double log_sinh(double x) {
    if (x < 1.0) return std::log(std::sinh(x));
    return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
}

double log_tanh(double x) {
    // tanh rounds to 1 for x > ~19; log of that is 0 to within 4e-17, fine.
    return std::log(std::tanh(x));
}

} // namespace

double acosh1p(double d) {
    assert(d >= 0.0);
    if (d < 1e-8) {
        // acosh(1+d) = sqrt(2d) * (1 - d/12 + 3d^2/160 - ...)
        return std::sqrt(2.0 * d) * (1.0 - d / 12.0 + 3.0 * d * d / 160.0);
    }
    if (d > 1e154) return std::numbers::ln2 + std::log(d); // d*(d+2) would overflow
    return std::log1p(d + std::sqrt(d * (d + 2.0)));
}

DispersionBranch solve_branch(double c) {
    double a = std::fabs(c);
    if (a > 1.0 + 1e-12)
        throw OutOfRangeError("dispersion cosine out of range: " + std::to_string(c));
    if (c == 0.0) return {BranchKind::Infinite, 0.0};
    if (a > 1.0) a = 1.0;
    const BranchKind kind = c > 0.0 ? BranchKind::Real : BranchKind::Shifted;
    // 1/a - 1 = (1-a)/a keeps relative accuracy as a -> 1.
    return {kind, acosh1p((1.0 - a) / a)};
}

DispersionBranch solve_branch_log(double log_abs_c, bool negative) {
    if (log_abs_c == -std::numeric_limits<double>::infinity())
        return {BranchKind::Infinite, 0.0};
    if (log_abs_c > 1e-12)
        throw OutOfRangeError("dispersion log-cosine must be <= 0");
    if (log_abs_c > 0.0) log_abs_c = 0.0;
    const BranchKind kind = negative ? BranchKind::Shifted : BranchKind::Real;
    if (log_abs_c < -300.0) {
        // 1/|c| huge: acosh(z) = log(2z) to machine precision.
        return {kind, std::numbers::ln2 - log_abs_c};
    }
    return {kind, acosh1p(std::expm1(-log_abs_c))};
}

double term_rect(const DispersionBranch& br, std::int64_t q, std::int64_t b, std::int64_t n) {
    assert(q >= 1 && q <= n && b >= 1 && b <= n);
    if (br.kind == BranchKind::Infinite) return q == b ? 0.5 : 0.0;

    const std::int64_t lo = q < b ? q : b;
    const std::int64_t hi = q < b ? b : q;
    const double bp = br.beta_prime;
    double t;
    if (bp == 0.0) {
        // beta -> 0 limit of the sinh ratio.
        t = static_cast<double>(lo) * static_cast<double>(n + 1 - hi) /
            static_cast<double>(n + 1);
    } else if (static_cast<double>(n + 1) * bp < 300.0) {
        t = std::sinh(static_cast<double>(lo) * bp) *
            std::sinh(static_cast<double>(n + 1 - hi) * bp) /
            (std::tanh(bp) * std::sinh(static_cast<double>(n + 1) * bp));
    } else {
        // sinh((n+1)b) would overflow; the ratio itself is <= 1/tanh(b).
        const double lt = log_sinh(static_cast<double>(lo) * bp) +
                          log_sinh(static_cast<double>(n + 1 - hi) * bp) -
                          log_tanh(bp) - log_sinh(static_cast<double>(n + 1) * bp);
        t = std::exp(lt);
    }
    if (br.kind == BranchKind::Shifted && ((hi - lo) & 1)) t = -t;
    return t;
}

double term_strip(const DispersionBranch& br, std::int64_t k) {
    assert(k >= 0);
    if (br.kind == BranchKind::Infinite) return k == 0 ? 1.0 : 0.0;
    const double bp = br.beta_prime;
    // bp == 0 gives +inf, the correct limit; never NaN since exp(0) = 1.
    double t = std::exp(-static_cast<double>(k) * bp) / std::tanh(bp);
    if (br.kind == BranchKind::Shifted && (k & 1)) t = -t;
    return t;
}

double sin_pi_ratio(std::int64_t k, std::int64_t M) {
    assert(M >= 1);
    k %= 2 * M;
    if (k < 0) k += 2 * M;
    double sign = 1.0;
    if (k >= M) { // sin(pi + x) = -sin(x)
        sign = -1.0;
        k -= M;
    }
    if (2 * k > M) k = M - k; // fold into [0, M/2]
    if (2 * k == M) return sign;
    return sign * std::sin(kPi * static_cast<double>(k) / static_cast<double>(M));
}

double cos_pi_ratio(std::int64_t k, std::int64_t M) {
    assert(M >= 1);
    k %= 2 * M;
    if (k < 0) k += 2 * M;
    if (k > M) k = 2 * M - k; // cos(2pi - x) = cos(x)
    double sign = 1.0;
    if (2 * k > M) { // cos(pi - x) = -cos(x)
        sign = -1.0;
        k = M - k;
    }
    if (2 * k == M) return 0.0; // exact midpoint: Infinite branch, not 6e-17
    return sign * std::cos(kPi * static_cast<double>(k) / static_cast<double>(M));
}

} // namespace diagwalk
