#include "diagwalk/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "diagwalk/dispersion.hpp"
#include "diagwalk/errors.hpp"
#include "diagwalk/lattice.hpp"
#include "diagwalk/oracles.hpp"
#include "diagwalk/quadrature_green.hpp"
#include "diagwalk/series_green.hpp"

namespace diagwalk::cli {

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Opts {
    std::string domain;
    std::string style;
    std::string method;
    std::string source;
    std::string target;
    std::string format = "json";
    std::int64_t m = 0, n = 0, l = 0;
    int dim = 0;
    double tol = 1e-8;
    std::int64_t trials = 100000;
    std::uint64_t seed = 0;
    std::int64_t max_steps = 1000000;
    bool no_timing = false;
    bool tol_given = false;
};

LatticePoint parse_point(const std::string& text) {
    LatticePoint p;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string tok = text.substr(pos, comma - pos);
        try {
            std::size_t used = 0;
            p.coords.push_back(std::stoll(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("malformed point '" + text +
                             "': expected comma-separated integers");
        }
        pos = comma + 1;
    }
    return p;
}

std::string point_str(const LatticePoint& p) {
    std::string s;
    for (int i = 0; i < p.dim(); ++i) {
        if (i) s += ',';
        s += std::to_string(p[i]);
    }
    return s;
}

std::string num_str(double v) { return ordered_json(v).dump(); }

// Builds the finite/strip domain named by --domain, validating which size
// flags it needs.
DomainSpec build_domain(const Opts& o) {
    auto need = [&](bool cond, const char* what) {
        if (!cond) throw UsageError(std::string("domain '") + o.domain + "' requires " + what);
    };
    if (o.domain == "rect") {
        need(o.m > 0 && o.n > 0, "--m and --n");
        return Rectangle2D{o.m, o.n};
    }
    if (o.domain == "semistrip") {
        need(o.m > 0, "--m");
        return SemiStrip2D{o.m};
    }
    if (o.domain == "strip") {
        need(o.m > 0, "--m");
        return InfiniteStrip2D{o.m};
    }
    if (o.domain == "halfplane") return HalfPlane2D{};
    if (o.domain == "block") {
        need(o.l > 0 && o.m > 0 && o.n > 0, "--l, --m and --n");
        return Block3D{o.l, o.m, o.n};
    }
    if (o.domain == "lattice") {
        need(o.dim > 0, "--dim");
        return FullLattice{o.dim};
    }
    throw UsageError("unknown domain '" + o.domain + "'");
}

void add_domain_opts(CLI::App* c, Opts& o) {
    c->add_option("--domain", o.domain, "rect|semistrip|strip|halfplane|block|lattice")
        ->check(CLI::IsMember({"rect", "semistrip", "strip", "halfplane", "block", "lattice"}));
    c->add_option("--m", o.m, "first bounded extent");
    c->add_option("--n", o.n, "last bounded extent");
    c->add_option("--l", o.l, "leading extent of a block");
    c->add_option("--dim", o.dim, "dimension of the full lattice");
}

void add_output_opts(CLI::App* c, Opts& o) {
    c->add_option("--format", o.format, "json|csv (csv only for absorb)")
        ->check(CLI::IsMember({"json", "csv"}));
    c->add_flag("--no-timing", o.no_timing, "omit the wall-time field");
}

void add_tol_opt(CLI::App* c, Opts& o) {
    auto* opt = c->add_option(
        "--tol", o.tol,
        "quadrature tolerance, absolute and relative (default 1e-8; 1e-5 for lattice d >= 5)");
    opt->check(CLI::PositiveNumber);
    c->parse_complete_callback([&o, opt] { o.tol_given = opt->count() > 0; });
}

void add_mc_opts(CLI::App* c, Opts& o) {
    c->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--max-steps", o.max_steps, "per-trial step cutoff")
        ->check(CLI::PositiveNumber);
}

QuadratureSpec quad_spec(const Opts& o, int d) {
    double tol = o.tol;
    if (!o.tol_given && d >= 5) tol = 1e-5; // nested quadrature cost grows fast with d
    return {tol, tol, 100000};
}

void require_json(const Opts& o) {
    if (o.format != "json")
        throw UsageError("--format csv is only available for the absorb subcommand");
}

void emit(std::ostream& out, ordered_json rec, const Opts& o, const Clock::time_point& t0) {
    if (!o.no_timing) {
        const double ms =
            std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        rec["metadata"]["wall_time_ms"] = ms;
    }
    if (!rec.contains("metadata")) rec["metadata"] = ordered_json::object();
    out << rec.dump(2) << "\n";
}

// ---------------- green ----------------

ordered_json do_green(const Opts& o) {
    require_json(o);
    const LatticePoint src = parse_point(o.source);
    const LatticePoint tgt = parse_point(o.target);
    ordered_json req{{"command", "green"}, {"domain", o.domain}};
    ordered_json rec;

    auto series_record = [&](double v) {
        req["method"] = "series";
        req["source"] = point_str(src);
        req["target"] = point_str(tgt);
        rec["request"] = req;
        rec["value"] = v;
        rec["metadata"] = ordered_json::object();
    };
    auto quad_record = [&](const QuadratureResult& r, const QuadratureSpec& spec) {
        req["method"] = "quadrature";
        req["source"] = point_str(src);
        req["target"] = point_str(tgt);
        req["abs_tol"] = spec.abs_tol;
        req["rel_tol"] = spec.rel_tol;
        rec["request"] = req;
        rec["value"] = r.value;
        rec["error_estimate"] = r.error_estimate;
        rec["metadata"] = {{"evaluations", r.evaluations}, {"converged", r.converged}};
    };

    if (o.domain == "rect") {
        req["m"] = o.m;
        req["n"] = o.n;
        std::get<Rectangle2D>(build_domain(o)); // validates flags
        series_record(rect_green(o.m, o.n, src, tgt));
    } else if (o.domain == "semistrip") {
        req["m"] = o.m;
        std::get<SemiStrip2D>(build_domain(o));
        series_record(semistrip_green(o.m, src, tgt));
    } else if (o.domain == "strip") {
        req["m"] = o.m;
        std::get<InfiniteStrip2D>(build_domain(o));
        if (src.dim() != 2 || tgt.dim() != 2)
            throw DimensionMismatchError("strip points have 2 coordinates");
        series_record(strip_green(o.m, src[0], tgt[0], tgt[1] - src[1]));
    } else if (o.domain == "block") {
        req["l"] = o.l;
        req["m"] = o.m;
        req["n"] = o.n;
        std::get<Block3D>(build_domain(o));
        series_record(block_green(o.l, o.m, o.n, src, tgt));
    } else if (o.domain == "halfplane") {
        if (src.dim() != 2 || tgt.dim() != 2)
            throw DimensionMismatchError("half-plane points have 2 coordinates");
        const QuadratureSpec spec = quad_spec(o, 2);
        quad_record(halfplane_green(src[0], tgt[0], tgt[1] - src[1], spec), spec);
    } else if (o.domain == "lattice") {
        const DomainSpec dom = build_domain(o);
        if (src.dim() != o.dim || tgt.dim() != o.dim)
            throw DimensionMismatchError("point dimension does not match --dim");
        req["dim"] = o.dim;
        LatticePoint u;
        for (int i = 0; i < o.dim; ++i) u.coords.push_back(tgt[i] - src[i]);
        const QuadratureSpec spec = quad_spec(o, o.dim);
        quad_record(lattice_green_nd(u, spec), spec);
    } else {
        throw UsageError("green requires --domain");
    }
    return rec;
}

// ---------------- absorb ----------------

int do_absorb(const Opts& o, std::ostream& out, const Clock::time_point& t0) {
    if (o.domain.empty()) throw UsageError("absorb requires --domain rect or block");
    const DomainSpec dom = build_domain(o);
    const LatticePoint src = parse_point(o.source);
    const AbsorptionMap amap = absorption_probs(dom, src);

    if (o.format == "csv") {
        std::string body = "point,probability\n";
        for (const auto& [pt, prob] : amap.entries)
            body += "\"" + point_str(pt) + "\"," + num_str(prob) + "\n";
        out << body;
        return 0;
    }
    ordered_json req{{"command", "absorb"}, {"domain", o.domain}};
    if (o.domain == "rect") {
        req["m"] = o.m;
        req["n"] = o.n;
    } else {
        req["l"] = o.l;
        req["m"] = o.m;
        req["n"] = o.n;
    }
    req["source"] = point_str(src);
    req["method"] = "series";
    ordered_json entries = ordered_json::array();
    for (const auto& [pt, prob] : amap.entries)
        entries.push_back({{"point", point_str(pt)}, {"probability", prob}});
    ordered_json rec{{"request", req},
                     {"entries", entries},
                     {"total", amap.total()},
                     {"metadata", ordered_json::object()}};
    emit(out, rec, o, t0);
    return 0;
}

// ---------------- return-prob ----------------

ordered_json do_return_prob(const Opts& o) {
    require_json(o);
    ordered_json req{{"command", "return-prob"}};
    ordered_json rec;

    if (!o.style.empty() && !o.domain.empty())
        throw UsageError("choose either --style or --domain, not both");

    if (!o.style.empty()) {
        const QuadratureSpec spec = quad_spec(o, o.style == "diagonal" ? o.dim : 3);
        ReturnConstant rc;
        if (o.style == "diagonal") {
            if (o.dim <= 0) throw UsageError("--style diagonal requires --dim");
            req["style"] = "diagonal";
            req["dim"] = o.dim;
            rc = return_constant_diagonal(o.dim, spec);
        } else {
            if (o.dim != 0 && o.dim != 3)
                throw UsageError("--style regular is the 3D cubic lattice; omit --dim");
            req["style"] = "regular";
            rc = return_constant_regular3d(spec);
        }
        req["method"] = "quadrature";
        req["abs_tol"] = spec.abs_tol;
        req["rel_tol"] = spec.rel_tol;
        rec["request"] = req;
        rec["value"] = rc.p_return;
        rec["green_constant"] = rc.green;
        // d p/d F = 1/F^2 propagates the quadrature error to the probability.
        rec["error_estimate"] = rc.quad.error_estimate / (rc.green * rc.green);
        rec["metadata"] = {{"evaluations", rc.quad.evaluations},
                           {"converged", rc.quad.converged},
                           {"green_error_estimate", rc.quad.error_estimate}};
        return rec;
    }

    if (o.domain.empty())
        throw UsageError("return-prob requires --style diagonal|regular or a finite --domain");
    const DomainSpec dom = build_domain(o);
    const LatticePoint src = parse_point(o.source);
    const double p = return_prob_finite(dom, src);
    req["domain"] = o.domain;
    if (o.domain == "block") req["l"] = o.l;
    req["m"] = o.m;
    req["n"] = o.n;
    req["source"] = point_str(src);
    req["method"] = "series";
    rec["request"] = req;
    rec["value"] = p;
    rec["green_constant"] = 1.0 / (1.0 - p);
    rec["metadata"] = ordered_json::object();
    return rec;
}

// ---------------- oracle ----------------

ordered_json do_oracle(const Opts& o) {
    require_json(o);
    ordered_json req{{"command", "oracle"}, {"method", o.method}};
    ordered_json rec;

    if (o.method == "fm") {
        const DomainSpec dom = build_domain(o);
        const LatticePoint src = parse_point(o.source);
        const LatticePoint tgt = parse_point(o.target);
        const auto row = fundamental_matrix_green(dom, src);
        double value = 0.0;
        bool found = false;
        for (const auto& [pt, v] : row)
            if (pt == tgt) {
                value = v;
                found = true;
                break;
            }
        if (!found) throw NotInteriorError("target point is not interior to the domain");
        req["domain"] = o.domain;
        req["source"] = point_str(src);
        req["target"] = point_str(tgt);
        rec["request"] = req;
        rec["value"] = value;
        rec["metadata"] = {{"states", row.size()}};
        return rec;
    }

    McConfig cfg{o.trials, o.seed, o.max_steps};
    McEstimate est;
    if (o.method == "mc") {
        const DomainSpec dom = build_domain(o);
        const LatticePoint src = parse_point(o.source);
        const LatticePoint tgt = parse_point(o.target);
        est = mc_expected_departures(dom, src, tgt, cfg);
        req["domain"] = o.domain;
        req["source"] = point_str(src);
        req["target"] = point_str(tgt);
    } else if (o.method == "mc-return") {
        if (o.dim <= 0) throw UsageError("--method mc-return requires --dim");
        est = mc_return_prob(o.dim, cfg);
        req["dim"] = o.dim;
    } else {
        throw UsageError("oracle requires --method fm|mc|mc-return");
    }
    req["trials"] = cfg.trials;
    req["seed"] = cfg.seed;
    req["max_steps"] = cfg.max_steps;
    rec["request"] = req;
    rec["value"] = est.mean;
    rec["std_error"] = est.std_error;
    rec["metadata"] = {{"trials", est.trials}, {"truncated_trials", est.truncated_trials}};
    return rec;
}

// ---------------- check ----------------

struct CheckReport {
    std::ostream& out;
    bool ok = true;

    void line(const std::string& name, double worst, double tol) {
        const bool pass = worst <= tol;
        ok = ok && pass;
        out << (pass ? "[PASS] " : "[FAIL] ") << name << ": max |dev| " << num_str(worst)
            << " (tol " << num_str(tol) << ")\n";
    }
};

double finite_green(const DomainSpec& dom, const LatticePoint& src, const LatticePoint& tgt) {
    if (const auto* r = std::get_if<Rectangle2D>(&dom)) return rect_green(r->m, r->n, src, tgt);
    const auto& b = std::get<Block3D>(dom);
    return block_green(b.l, b.m, b.n, src, tgt);
}

std::vector<LatticePoint> finite_interior(const DomainSpec& dom) {
    std::vector<LatticePoint> pts;
    if (const auto* r = std::get_if<Rectangle2D>(&dom)) {
        for (std::int64_t p = 1; p <= r->m; ++p)
            for (std::int64_t q = 1; q <= r->n; ++q) pts.push_back(LatticePoint{p, q});
    } else {
        const auto& b = std::get<Block3D>(dom);
        for (std::int64_t p = 1; p <= b.l; ++p)
            for (std::int64_t q = 1; q <= b.m; ++q)
                for (std::int64_t s = 1; s <= b.n; ++s) pts.push_back(LatticePoint{p, q, s});
    }
    return pts;
}

LatticePoint finite_center(const DomainSpec& dom) {
    if (const auto* r = std::get_if<Rectangle2D>(&dom))
        return LatticePoint{(r->m + 1) / 2, (r->n + 1) / 2};
    const auto& b = std::get<Block3D>(dom);
    return LatticePoint{(b.l + 1) / 2, (b.m + 1) / 2, (b.n + 1) / 2};
}

std::string dom_name(const DomainSpec& dom) {
    if (const auto* r = std::get_if<Rectangle2D>(&dom))
        return "rect(" + std::to_string(r->m) + "," + std::to_string(r->n) + ")";
    const auto& b = std::get<Block3D>(dom);
    return "block(" + std::to_string(b.l) + "," + std::to_string(b.m) + "," +
           std::to_string(b.n) + ")";
}

void check_finite_domain(CheckReport& rep, const DomainSpec& dom) {
    const std::string name = dom_name(dom);
    const auto pts = finite_interior(dom);
    const LatticePoint src = finite_center(dom);
    const int d = dimension(dom);
    const double w = 1.0 / static_cast<double>(std::int64_t{1} << d);

    // Defining difference equation: F is 1/2^d times the neighbor sum plus
    // the source delta, with F = 0 on the absorbing boundary.
    double worst = 0.0;
    for (const auto& tgt : pts) {
        double nbsum = 0.0;
        for (const auto& nb : diagonal_neighbors(tgt))
            if (classify_point(dom, nb) == PointClass::Interior)
                nbsum += finite_green(dom, src, nb);
        const double delta = tgt == src ? 1.0 : 0.0;
        worst = std::max(worst,
                         std::fabs(finite_green(dom, src, tgt) - w * nbsum - delta));
    }
    rep.line(name + " difference-equation residual", worst, 1e-9);

    worst = 0.0;
    for (const auto& x : pts)
        for (const auto& y : pts)
            worst = std::max(worst, std::fabs(finite_green(dom, x, y) - finite_green(dom, y, x)));
    rep.line(name + " reciprocity", worst, 1e-10);

    worst = 0.0;
    for (const auto& x : pts)
        for (const auto& y : pts)
            if (!parity_compatible(x, y))
                worst = std::max(worst, std::fabs(finite_green(dom, x, y)));
    rep.line(name + " series parity zeros", worst, 1e-12);

    rep.line(name + " absorption total vs 1",
             std::fabs(absorption_probs(dom, src).total() - 1.0), 1e-10);
}

void check_semistrip(CheckReport& rep, std::int64_t m) {
    const DomainSpec dom = SemiStrip2D{m};
    const LatticePoint src{(m + 1) / 2, 3};
    double worst = 0.0;
    for (std::int64_t p = 1; p <= m; ++p)
        for (std::int64_t q = 1; q <= 8; ++q) {
            const LatticePoint tgt{p, q};
            double nbsum = 0.0;
            for (const auto& nb : diagonal_neighbors(tgt))
                if (classify_point(dom, nb) == PointClass::Interior)
                    nbsum += semistrip_green(m, src, nb);
            const double delta = tgt == src ? 1.0 : 0.0;
            worst = std::max(
                worst, std::fabs(semistrip_green(m, src, tgt) - 0.25 * nbsum - delta));
        }
    rep.line("semistrip(" + std::to_string(m) + ") difference-equation residual", worst, 1e-9);
}

void check_strip(CheckReport& rep, std::int64_t m) {
    const std::int64_t a = std::min<std::int64_t>(2, m);
    double worst = 0.0;
    for (std::int64_t p = 1; p <= m; ++p)
        for (std::int64_t s = -6; s <= 6; ++s) {
            // strip_green returns exact 0 on the side walls p = 0, m+1.
            const double nbsum = strip_green(m, a, p - 1, s - 1) +
                                 strip_green(m, a, p - 1, s + 1) +
                                 strip_green(m, a, p + 1, s - 1) +
                                 strip_green(m, a, p + 1, s + 1);
            const double delta = p == a && s == 0 ? 1.0 : 0.0;
            worst = std::max(worst,
                             std::fabs(strip_green(m, a, p, s) - 0.25 * nbsum - delta));
        }
    rep.line("strip(" + std::to_string(m) + ") difference-equation residual", worst, 1e-9);
}

void check_orthogonality(CheckReport& rep) {
    double worst = 0.0;
    for (std::int64_t m = 1; m <= 50; ++m) {
        const std::int64_t M = m + 1;
        for (std::int64_t a = 1; a <= m; ++a)
            for (std::int64_t p = 1; p <= m; ++p) {
                double s = 0.0;
                for (std::int64_t r = 1; r <= m; ++r)
                    s += sin_pi_ratio(a * r, M) * sin_pi_ratio(p * r, M);
                const double delta = a == p ? 1.0 : 0.0;
                worst = std::max(worst, std::fabs(2.0 / static_cast<double>(M) * s - delta));
            }
    }
    rep.line("transverse-mode orthogonality (m <= 50)", worst, 1e-12);
}

void check_mc_parity(CheckReport& rep) {
    const McConfig cfg{2000, 1, 1000000};
    const McEstimate est =
        mc_expected_departures(Rectangle2D{2, 2}, LatticePoint{1, 1}, LatticePoint{1, 2}, cfg);
    // Parity holds pathwise, so the Monte Carlo mean must be exactly zero.
    rep.line("Monte Carlo parity zero (exact)", std::fabs(est.mean), 0.0);
}

int do_check(const Opts& o, std::ostream& out) {
    CheckReport rep{out};
    if (!o.domain.empty()) {
        if (o.domain == "rect" || o.domain == "block") {
            check_finite_domain(rep, build_domain(o));
        } else if (o.domain == "semistrip") {
            if (o.m <= 0) throw UsageError("domain 'semistrip' requires --m");
            check_semistrip(rep, o.m);
        } else if (o.domain == "strip") {
            if (o.m <= 0) throw UsageError("domain 'strip' requires --m");
            check_strip(rep, o.m);
        } else {
            throw UsageError("check supports rect, block, semistrip and strip domains");
        }
    } else {
        check_finite_domain(rep, Rectangle2D{4, 3});
        check_finite_domain(rep, Rectangle2D{2, 5});
        check_finite_domain(rep, Block3D{2, 3, 2});
        check_semistrip(rep, 3);
        check_strip(rep, 3);
        check_orthogonality(rep);
        check_mc_parity(rep);
    }
    out << (rep.ok ? "check: all invariants hold\n" : "check: FAILURES above\n");
    return rep.ok ? 0 : 1;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Diagonal-step lattice walks: Green values, absorption maps, return "
                 "probabilities, and independent oracles"};
    app.name("diagwalk");
    app.require_subcommand(0, 1);
    Opts o;

    auto* green = app.add_subcommand("green", "Expected departures between two points");
    add_domain_opts(green, o);
    green->add_option("--source", o.source, "source point, e.g. 1,1")->required();
    green->add_option("--target", o.target, "target point")->required();
    add_tol_opt(green, o);
    add_output_opts(green, o);

    auto* absorb = app.add_subcommand("absorb", "Absorption probability per boundary point");
    add_domain_opts(absorb, o);
    absorb->add_option("--source", o.source, "source point")->required();
    add_output_opts(absorb, o);

    auto* rprob = app.add_subcommand("return-prob", "Probability of returning to the start");
    add_domain_opts(rprob, o);
    rprob->add_option("--style", o.style, "diagonal|regular (infinite-lattice constants)")
        ->check(CLI::IsMember({"diagonal", "regular"}));
    rprob->add_option("--source", o.source, "source point (finite domains)");
    add_tol_opt(rprob, o);
    add_output_opts(rprob, o);

    auto* oracle = app.add_subcommand("oracle", "Ground-truth engines (linear solve, Monte Carlo)");
    add_domain_opts(oracle, o);
    oracle->add_option("--method", o.method, "fm|mc|mc-return")
        ->required()
        ->check(CLI::IsMember({"fm", "mc", "mc-return"}));
    oracle->add_option("--source", o.source, "source point");
    oracle->add_option("--target", o.target, "target point");
    add_mc_opts(oracle, o);
    add_output_opts(oracle, o);

    auto* check = app.add_subcommand("check", "Run the invariant suite and report pass/fail");
    add_domain_opts(check, o);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("diagwalk");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    const Clock::time_point t0 = Clock::now();
    try {
        if (green->parsed()) {
            emit(out, do_green(o), o, t0);
            return 0;
        }
        if (absorb->parsed()) return do_absorb(o, out, t0);
        if (rprob->parsed()) {
            emit(out, do_return_prob(o), o, t0);
            return 0;
        }
        if (oracle->parsed()) {
            emit(out, do_oracle(o), o, t0);
            return 0;
        }
        if (check->parsed()) return do_check(o, out);
        out << app.help();
        return 0;
    } catch (const RecurrentLatticeError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace diagwalk::cli
