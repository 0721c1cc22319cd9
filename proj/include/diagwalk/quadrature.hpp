#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace diagwalk {

struct QuadratureSpec {
    double abs_tol = 1e-8;
    double rel_tol = 1e-8;
    int max_subdivisions = 100000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::int64_t evaluations = 0;
    bool converged = false;
};

namespace qk {

// 15-point Kronrod rule with embedded 7-point Gauss rule.  Nodes/weights and
// the error-rescaling heuristic follow the classical QUADPACK dqk15 values.
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct RuleResult {
    double value;    // Kronrod estimate
    double err;      // rescaled |Kronrod - Gauss|
    double resabs;   // integral of |f|
};

template <class F>
RuleResult apply15(F& f, double a, double b) {
    const double hl = 0.5 * (b - a);
    const double ctr = 0.5 * (a + b);

    double fv1[7], fv2[7];
    const double fc = f(ctr);
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    double resabs = std::fabs(resk);
    for (int j = 0; j < 7; ++j) {
        const double dx = hl * xgk[j];
        fv1[j] = f(ctr - dx);
        fv2[j] = f(ctr + dx);
        const double fsum = fv1[j] + fv2[j];
        if (j % 2 == 1) resg += wg[j / 2] * fsum;
        resk += wgk[j] * fsum;
        resabs += wgk[j] * (std::fabs(fv1[j]) + std::fabs(fv2[j]));
    }
    const double reskh = resk * 0.5;
    double resasc = wgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));

    const double ahl = std::fabs(hl);
    resabs *= ahl;
    resasc *= ahl;
    double err = std::fabs((resk - resg) * hl);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    const double uflow = std::numeric_limits<double>::min();
    if (resabs > uflow / (50.0 * eps)) err = std::max(eps * 50.0 * resabs, err);
    return {resk * hl, err, resabs};
}

} // namespace qk

/// Adaptive Gauss-Kronrod integration of f over consecutive intervals given
/// by `points` (ascending).  Worst-interval-first bisection; ties broken by
/// creation order and the final sum taken in positional order, so the result
/// is bitwise deterministic for a given (f, points, spec).
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> points,
                                    const QuadratureSpec& spec) {
    struct Seg {
        double a, b, val, err;
        std::int64_t seq;
    };
    // "less" comparator for a max-heap on error; equal errors pop oldest first.
    auto before = [](const Seg& x, const Seg& y) {
        return x.err < y.err || (x.err == y.err && x.seq > y.seq);
    };
    std::priority_queue<Seg, std::vector<Seg>, decltype(before)> heap(before);
    std::vector<Seg> frozen; // intervals too narrow to bisect further

    QuadratureResult out;
    std::int64_t seq = 0;
    double total_val = 0.0, total_err = 0.0;

    auto push = [&](double a, double b) {
        auto r = qk::apply15(f, a, b);
        out.evaluations += 15;
        Seg s{a, b, r.value, r.err, seq++};
        total_val += s.val;
        total_err += s.err;
        const double eps = std::numeric_limits<double>::epsilon();
        if (b - a <= 8.0 * eps * std::max({std::fabs(a), std::fabs(b), 1.0}))
            frozen.push_back(s);
        else
            heap.push(s);
    };

    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (points[i] < points[i + 1]) push(points[i], points[i + 1]);

    int subdivisions = 0;
    while (!heap.empty() && subdivisions < spec.max_subdivisions) {
        if (total_err <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(total_val))) break;
        Seg worst = heap.top();
        heap.pop();
        total_val -= worst.val;
        total_err -= worst.err;
        const double mid = 0.5 * (worst.a + worst.b);
        push(worst.a, mid);
        push(mid, worst.b);
        ++subdivisions;
    }

    // Recompute the totals from the leaves in positional order: running
    // adjustments above accumulate cancellation error over many steps.
    std::vector<Seg> leaves = std::move(frozen);
    while (!heap.empty()) {
        leaves.push_back(heap.top());
        heap.pop();
    }
    std::sort(leaves.begin(), leaves.end(),
              [](const Seg& x, const Seg& y) { return x.a < y.a || (x.a == y.a && x.b < y.b); });
    double vsum = 0.0, vcomp = 0.0, esum = 0.0;
    for (const Seg& s : leaves) {
        const double t = vsum + s.val;
        vcomp += std::fabs(vsum) >= std::fabs(s.val) ? (vsum - t) + s.val : (s.val - t) + vsum;
        vsum = t;
        esum += s.err;
    }
    out.value = vsum + vcomp;
    out.error_estimate = esum;
    out.converged =
        out.error_estimate <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(out.value));
    return out;
}

template <class F>
QuadratureResult integrate_adaptive(F&& f, double lo, double hi, const QuadratureSpec& spec) {
    const double pts[2] = {lo, hi};
    return integrate_adaptive(std::forward<F>(f), std::span<const double>(pts, 2), spec);
}

} // namespace diagwalk
