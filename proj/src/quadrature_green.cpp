#include "diagwalk/quadrature_green.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "diagwalk/dispersion.hpp"
#include "diagwalk/errors.hpp"

namespace diagwalk {

namespace {

constexpr double kPi = std::numbers::pi;

// log|cos lam| for lam in [0, pi].  Near the endpoints cos() rounds to +-1
// and the plain log collapses to zero, which would put a spurious pole into
// the kernel; the half-angle form keeps full relative accuracy there.
double log_abs_cos(double lam) {
    const double m = std::min(lam, kPi - lam);
    if (m >= 1.0) return std::log(std::fabs(std::cos(lam)));
    const double s = std::sin(0.5 * m);
    return std::log1p(-2.0 * s * s);
}

// Every axis runs over [0, pi] split at pi/2, where cos changes sign.  The
// integrable corner singularities (|prod cos| -> 1 at the endpoints) are left
// to adaptive bisection: the heap refines a corner cell geometrically, which
// costs a handful of subdivisions per decade of depth.
constexpr double kAxisPoints[3] = {0.0, 0.5 * kPi, kPi};

// Per-level tolerance budget for nested integration.  The outer level gets
// half the requested tolerance; each deeper level runs 50x tighter, so the
// noise its results carry stays well below what the level above is trying to
// resolve — otherwise the outer heap chases that noise and never converges.
// Deeper levels run under a tighter subdivision cap: they are invoked once
// per point evaluation above, so runaway refinement there multiplies.  The
// cap still leaves room for the deep-corner calls, which have to bisect
// their way down to a spike of width comparable to the outer node's own
// distance from the corner.
std::vector<QuadratureSpec> nested_budget(const QuadratureSpec& spec, int levels,
                                          double scale) {
    std::vector<QuadratureSpec> out(static_cast<std::size_t>(levels));
    double f = 2.0;
    for (int l = 0; l < levels; ++l) {
        auto& b = out[static_cast<std::size_t>(l)];
        b.abs_tol = spec.abs_tol / (f * scale);
        b.rel_tol = spec.rel_tol / f;
        b.max_subdivisions = std::min(spec.max_subdivisions, l == 0 ? 4000 : 1000);
        f *= 50.0;
    }
    return out;
}

// Total error: the outer estimate plus one budget's worth of bias per inner
// level (each level integrates (1/pi) * f, so partial integrals stay on the
// final-value scale and the per-level budgets add directly).
QuadratureResult compose_nested(double value, const QuadratureResult& outer,
                                const std::vector<QuadratureSpec>& budget,
                                const QuadratureSpec& spec, std::int64_t kernel_evals,
                                int failed_inner, double scale) {
    QuadratureResult out;
    out.value = scale * value;
    double bias = 0.0;
    for (std::size_t l = 1; l < budget.size(); ++l)
        bias += scale * budget[l].abs_tol + budget[l].rel_tol * std::fabs(out.value);
    out.error_estimate = scale * outer.error_estimate + bias;
    out.evaluations = kernel_evals;
    out.converged =
        outer.converged && failed_inner == 0 &&
        out.error_estimate <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(out.value));
    return out;
}

// Nested integration of the full-lattice kernel
//   prod_k cos(u_k l_k) * term_strip(branch(prod_k cos l_k), |u_d|)
// over [0,pi]^levels.
struct DiagNest {
    std::vector<std::int64_t> ucos;
    std::int64_t kexp = 0;
    int levels = 2;
    std::vector<QuadratureSpec> budget;

    std::int64_t kernel_evals = 0;
    int failed_inner = 0;
    QuadratureResult outer;

    double run(int level, double log_pref, bool neg) {
        const bool innermost = level == levels - 1;
        auto integrand = [&, level, log_pref, neg](double lam) -> double {
            const double c = std::cos(lam);
            const double numer =
                ucos[static_cast<std::size_t>(level)] == 0
                    ? 1.0
                    : std::cos(static_cast<double>(ucos[static_cast<std::size_t>(level)]) *
                               lam);
            const double log_c = log_pref + log_abs_cos(lam);
            const bool c_neg = neg != (c < 0.0);
            if (innermost) {
                ++kernel_evals;
                return numer * term_strip(solve_branch_log(log_c, c_neg), kexp) / kPi;
            }
            return numer * run(level + 1, log_c, c_neg) / kPi;
        };
        QuadratureResult r =
            integrate_adaptive(integrand, std::span<const double>(kAxisPoints),
                               budget[static_cast<std::size_t>(level)]);
        if (level == 0)
            outer = r;
        else if (!r.converged)
            ++failed_inner;
        return r.value;
    }
};

} // namespace

QuadratureResult halfplane_green(std::int64_t a, std::int64_t p, std::int64_t s,
                                 const QuadratureSpec& spec) {
    if (a < 1) throw NotInteriorError("half-plane source distance must be >= 1");
    if (p < 0) throw NotInteriorError("half-plane target distance must be >= 0");
    if (p == 0) return {0.0, 0.0, 0, true}; // on the absorbing wall
    const std::int64_t k = s < 0 ? -s : s;
    const double da = static_cast<double>(a), dp = static_cast<double>(p);
    std::int64_t evals = 0;
    auto integrand = [&](double lam) -> double {
        ++evals;
        // sin a*lam * sin p*lam kills the 1/tanh pole at both endpoints.
        const double t =
            term_strip(solve_branch_log(log_abs_cos(lam), std::cos(lam) < 0.0), k);
        return (2.0 / kPi) * std::sin(da * lam) * std::sin(dp * lam) * t;
    };
    QuadratureResult r =
        integrate_adaptive(integrand, std::span<const double>(kAxisPoints), spec);
    r.evaluations = evals;
    return r;
}

QuadratureResult lattice_green_nd(const LatticePoint& u, const QuadratureSpec& spec) {
    const int d = u.dim();
    if (d <= 2)
        throw RecurrentLatticeError(
            "walk on the full lattice is recurrent for d <= 2; Green value diverges");
    DiagNest nest;
    nest.levels = d - 1;
    nest.ucos.resize(static_cast<std::size_t>(d - 1));
    for (int i = 0; i < d - 1; ++i) nest.ucos[static_cast<std::size_t>(i)] = std::llabs(u[i]);
    nest.kexp = std::llabs(u[d - 1]);
    nest.budget = nested_budget(spec, nest.levels, 1.0);
    const double value = nest.run(0, 0.0, false);
    return compose_nested(value, nest.outer, nest.budget, spec, nest.kernel_evals,
                          nest.failed_inner, 1.0);
}

ReturnConstant return_constant_diagonal(int d, const QuadratureSpec& spec) {
    if (d <= 2)
        throw RecurrentLatticeError(
            "diagonal walk is recurrent for d <= 2; return probability is 1");
    LatticePoint origin;
    origin.coords.assign(static_cast<std::size_t>(d), 0);
    ReturnConstant rc;
    rc.quad = lattice_green_nd(origin, spec);
    rc.green = rc.quad.value;
    rc.p_return = 1.0 - 1.0 / rc.green;
    return rc;
}

ReturnConstant return_constant_regular3d(const QuadratureSpec& spec) {
    // G = (3/pi^2) int int 1/sinh(theta), cosh(theta) = 3 - cos - cos.
    // cosh - 1 built from half-angle sines stays exact near the (0,0) corner,
    // the only singular point.
    const int levels = 2;
    const std::vector<QuadratureSpec> budget = nested_budget(spec, levels, 3.0);
    std::int64_t kernel_evals = 0;
    int failed_inner = 0;

    auto inner_value = [&](double lam) -> double {
        const double sl = std::sin(0.5 * lam);
        auto integrand = [&](double mu) -> double {
            ++kernel_evals;
            const double sm = std::sin(0.5 * mu);
            const double chm1 = 2.0 * (sl * sl + sm * sm);
            return 1.0 / (kPi * std::sqrt(chm1 * (chm1 + 2.0)));
        };
        QuadratureResult r =
            integrate_adaptive(integrand, std::span<const double>(kAxisPoints), budget[1]);
        if (!r.converged) ++failed_inner;
        return r.value;
    };
    auto outer_integrand = [&](double lam) -> double { return inner_value(lam) / kPi; };
    QuadratureResult outer =
        integrate_adaptive(outer_integrand, std::span<const double>(kAxisPoints), budget[0]);

    ReturnConstant rc;
    rc.quad = compose_nested(outer.value, outer, budget, spec, kernel_evals, failed_inner,
                             3.0);
    rc.green = rc.quad.value;
    rc.p_return = 1.0 - 1.0 / rc.green;
    return rc;
}

} // namespace diagwalk
