#include <doctest.h>

#include <cmath>
#include <limits>

#include "diagwalk/dispersion.hpp"
#include "diagwalk/errors.hpp"

#if DIAGWALK_HAVE_MPFR
#include <mpfr.h>
#endif

using namespace diagwalk;

namespace {
const double kBetaHalf = std::log(2.0 + std::sqrt(3.0)); // solves cosh(b) = 2
}

TEST_SUITE("dispersion") {

TEST_CASE("solve_branch on the three branches") {
    const auto real = solve_branch(0.5);
    CHECK(real.kind == BranchKind::Real);
    CHECK(real.beta_prime == doctest::Approx(kBetaHalf).epsilon(1e-14));

    const auto shifted = solve_branch(-0.5);
    CHECK(shifted.kind == BranchKind::Shifted);
    CHECK(shifted.beta_prime == real.beta_prime); // same magnitude, exactly

    CHECK(solve_branch(0.0).kind == BranchKind::Infinite);
    CHECK(solve_branch(1.0).kind == BranchKind::Real);
    CHECK(solve_branch(1.0).beta_prime == 0.0);
    CHECK(solve_branch(-1.0).beta_prime == 0.0);
}

TEST_CASE("solve_branch domain guard") {
    CHECK_THROWS_AS(solve_branch(1.1), OutOfRangeError);
    CHECK_THROWS_AS(solve_branch(-1.000001), OutOfRangeError);
    CHECK(solve_branch(1.0 + 1e-13).beta_prime == 0.0); // clamp band
}

TEST_CASE("defining identity cosh(beta)*c = 1 across the range") {
    for (double c : {1.0, 0.999999, 0.99, 0.75, 0.5, 0.1, 1e-2, 1e-3}) {
        const auto br = solve_branch(c);
        CHECK(std::cosh(br.beta_prime) * c == doctest::Approx(1.0).epsilon(1e-12));
    }
    // tiny c: cosh would overflow, check in log form: beta ~ ln(2/c)
    for (double c : {1e-8, 1e-14, 1e-30, 1e-300}) {
        const auto br = solve_branch(c);
        CHECK(br.beta_prime ==
              doctest::Approx(std::log(2.0) - std::log(c)).epsilon(1e-13));
    }
    // near 1: relative accuracy of the small-beta series
    const double c = 1.0 - 1e-12;
    const auto br = solve_branch(c);
    // cosh(b) - 1 = b^2/2 to this order; 1/c - 1 = 1e-12/(1-1e-12)
    const double expected = std::sqrt(2.0 * (1.0 - c) / c);
    CHECK(br.beta_prime == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("solve_branch_log agrees with solve_branch") {
    const auto a = solve_branch(0.5);
    const auto b = solve_branch_log(std::log(0.5), false);
    CHECK(a.kind == b.kind);
    CHECK(a.beta_prime == doctest::Approx(b.beta_prime).epsilon(1e-15));

    CHECK(solve_branch_log(std::log(0.5), true).kind == BranchKind::Shifted);
    CHECK(solve_branch_log(-std::numeric_limits<double>::infinity(), false).kind ==
          BranchKind::Infinite);
    // far below the overflow threshold of expm1
    CHECK(solve_branch_log(-400.0, false).beta_prime ==
          doctest::Approx(std::log(2.0) + 400.0).epsilon(1e-15));
    CHECK_THROWS_AS(solve_branch_log(0.1, false), OutOfRangeError);
}

TEST_CASE("term_rect hand value 8/15") {
    const DispersionBranch br{BranchKind::Real, kBetaHalf};
    CHECK(term_rect(br, 1, 1, 2) == doctest::Approx(8.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("term_rect limits on the Infinite branch") {
    const DispersionBranch inf{BranchKind::Infinite, 0.0};
    CHECK(term_rect(inf, 3, 3, 7) == 0.5);
    CHECK(term_rect(inf, 1, 2, 7) == 0.0);
}

TEST_CASE("term_rect shifted branch flips sign by (q-b) parity") {
    const DispersionBranch re{BranchKind::Real, kBetaHalf};
    const DispersionBranch sh{BranchKind::Shifted, kBetaHalf};
    CHECK(term_rect(sh, 2, 1, 2) == -term_rect(re, 2, 1, 2)); // exact
    CHECK(term_rect(sh, 3, 1, 4) == term_rect(re, 3, 1, 4));
    CHECK(term_rect(sh, 2, 2, 4) == term_rect(re, 2, 2, 4));
}

TEST_CASE("term_rect is symmetric in q and b") {
    for (double c : {0.9, 0.5, -0.5, 0.05}) {
        const auto br = solve_branch(c);
        for (std::int64_t q = 1; q <= 6; ++q)
            for (std::int64_t b = 1; b <= 6; ++b)
                CHECK(term_rect(br, q, b, 6) == term_rect(br, b, q, 6));
    }
}

TEST_CASE("term_rect approaches the Infinite limits as c -> 0") {
    const auto br = solve_branch(1e-8);
    CHECK(term_rect(br, 4, 4, 9) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::fabs(term_rect(br, 4, 5, 9)) < 1e-6);
    CHECK(term_strip(br, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(term_strip(br, 2)) < 1e-6);
}

TEST_CASE("term_rect beta -> 0 limit (c = 1)") {
    const auto br = solve_branch(1.0);
    REQUIRE(br.beta_prime == 0.0);
    // limit of the ratio is lo*(n+1-hi)/(n+1)
    CHECK(term_rect(br, 2, 3, 4) == doctest::Approx(2.0 * 2.0 / 5.0).epsilon(1e-15));
    // consistency with a nearby genuine beta
    const auto near = solve_branch(1.0 - 1e-10);
    CHECK(term_rect(near, 2, 3, 4) == doctest::Approx(term_rect(br, 2, 3, 4)).epsilon(1e-7));
}

TEST_CASE("term_strip hand values") {
    const DispersionBranch re{BranchKind::Real, kBetaHalf};
    const DispersionBranch sh{BranchKind::Shifted, kBetaHalf};
    const DispersionBranch inf{BranchKind::Infinite, 0.0};
    CHECK(term_strip(re, 0) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(term_strip(inf, 0) == 1.0);
    CHECK(term_strip(inf, 3) == 0.0);
    // e^{-beta} = 2 - sqrt(3) exactly for cosh(beta) = 2
    const double expect = -(2.0 - std::sqrt(3.0)) * 2.0 / std::sqrt(3.0);
    CHECK(term_strip(sh, 1) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(term_strip(sh, 2) ==
          doctest::Approx(-term_strip(sh, 1) * (2.0 - std::sqrt(3.0))).epsilon(1e-12));
}

TEST_CASE("no overflow for long domains") {
    const auto br = solve_branch(0.999);
    for (std::int64_t q : {std::int64_t{1}, std::int64_t{57}, std::int64_t{5000},
                           std::int64_t{9999}})
        for (std::int64_t b : {std::int64_t{1}, std::int64_t{123}, std::int64_t{9999}}) {
            const double t = term_rect(br, q, b, 10000);
            CHECK(std::isfinite(t));
        }
    // deep strip decay underflows gracefully to 0
    CHECK(term_strip(solve_branch(0.01), 10000) == 0.0);
}

TEST_CASE("folded trig: exact zeros and symmetries") {
    CHECK(cos_pi_ratio(1, 2) == 0.0);  // cos(pi/2)
    CHECK(cos_pi_ratio(3, 6) == 0.0);
    CHECK(cos_pi_ratio(50, 100) == 0.0);
    CHECK(sin_pi_ratio(0, 7) == 0.0);
    CHECK(sin_pi_ratio(7, 7) == 0.0);
    CHECK(sin_pi_ratio(14, 7) == 0.0);
    for (std::int64_t M : {std::int64_t{5}, std::int64_t{8}, std::int64_t{121}}) {
        for (std::int64_t k = 0; k <= M; ++k) {
            CHECK(sin_pi_ratio(M - k, M) == sin_pi_ratio(k, M));       // exact fold
            CHECK(cos_pi_ratio(M - k, M) == -cos_pi_ratio(k, M));      // exact fold
            CHECK(sin_pi_ratio(k + 2 * M, M) == sin_pi_ratio(k, M));   // period
            CHECK(sin_pi_ratio(-k, M) == -sin_pi_ratio(k, M));
            CHECK(cos_pi_ratio(-k, M) == cos_pi_ratio(k, M));
        }
    }
    CHECK(sin_pi_ratio(1, 4) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(cos_pi_ratio(1, 3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sin_pi_ratio(1, 2) == 1.0);
}

TEST_CASE("acosh1p small-argument series") {
    // against the direct formula where it is still accurate
    for (double d : {1e-6, 1e-9, 1e-12}) {
        const double direct = std::acosh(1.0 + d);
        CHECK(acosh1p(d) == doctest::Approx(direct).epsilon(1e-7));
    }
    CHECK(acosh1p(0.0) == 0.0);
    CHECK(acosh1p(1.0) == doctest::Approx(std::log(2.0 + std::sqrt(3.0))).epsilon(1e-15));
    CHECK(acosh1p(1e200) == doctest::Approx(std::log(2.0) + 200.0 * std::log(10.0))
                                .epsilon(1e-13));
}

#if DIAGWALK_HAVE_MPFR
TEST_CASE("term_rect against a 200-bit reference") {
    // Reference: same ratio evaluated in 200-bit arithmetic from the exact
    // double beta_prime, so this isolates the log-magnitude evaluation path.
    const auto br = solve_branch(0.999);
    auto reference = [&](std::int64_t q, std::int64_t b, std::int64_t n) -> double {
        const std::int64_t lo = std::min(q, b), hi = std::max(q, b);
        mpfr_t bp, x, num1, num2, den1, den2, r;
        mpfr_inits2(200, bp, x, num1, num2, den1, den2, r, (mpfr_ptr)nullptr);
        mpfr_set_d(bp, br.beta_prime, MPFR_RNDN);
        mpfr_mul_si(x, bp, lo, MPFR_RNDN);
        mpfr_sinh(num1, x, MPFR_RNDN);
        mpfr_mul_si(x, bp, n + 1 - hi, MPFR_RNDN);
        mpfr_sinh(num2, x, MPFR_RNDN);
        mpfr_tanh(den1, bp, MPFR_RNDN);
        mpfr_mul_si(x, bp, n + 1, MPFR_RNDN);
        mpfr_sinh(den2, x, MPFR_RNDN);
        mpfr_mul(r, num1, num2, MPFR_RNDN);
        mpfr_div(r, r, den1, MPFR_RNDN);
        mpfr_div(r, r, den2, MPFR_RNDN);
        const double out = mpfr_get_d(r, MPFR_RNDN);
        mpfr_clears(bp, x, num1, num2, den1, den2, r, (mpfr_ptr)nullptr);
        return out;
    };
    const std::int64_t n = 10000;
    for (auto [q, b] : {std::pair<std::int64_t, std::int64_t>{1, 1},
                        {57, 43},
                        {117, 5000},
                        {9999, 9999},
                        {2, 9999},
                        {4321, 8765}}) {
        const double got = term_rect(br, q, b, n);
        const double ref = reference(q, b, n);
        CHECK(got == doctest::Approx(ref).epsilon(1e-12));
    }
}
#endif

} // TEST_SUITE
