// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Everything here goes through the public library and CLI entry points.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagwalk/cli.hpp"
#include "diagwalk/lattice.hpp"
#include "diagwalk/oracles.hpp"
#include "diagwalk/quadrature_green.hpp"
#include "diagwalk/series_green.hpp"

using namespace diagwalk;
using nlohmann::json;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << v;
    return os.str();
}

std::string secs(const Timer& t) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << t.s() << "s";
    return os.str();
}

void report(int idx, const std::string& title, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << idx << ". " << title << " (" << detail
              << ")" << std::endl;
}

json run_cli_json(const std::vector<std::string>& args, int& code) {
    std::ostringstream out, err;
    code = cli::run(args, out, err);
    if (code != 0) return json{{"error", err.str()}};
    return json::parse(out.str());
}

void criterion1() {
    Timer t;
    bool pass = false;
    std::string detail;
    try {
        int code = -1;
        const json j = run_cli_json({"return-prob", "--style", "diagonal", "--dim", "3"}, code);
        const double green = j["green_constant"].get<double>();
        const double p = j["value"].get<double>();
        const double dg = std::fabs(green - 1.3932039297);
        const double dp = std::fabs(p - 0.282229985);
        pass = code == 0 && dg <= 1e-6 && dp <= 1e-6 && t.s() <= 60.0;
        detail = "|F-1.3932039297|=" + sci(dg) + ", |p-0.282229985|=" + sci(dp) + ", " + secs(t);
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(1, "diagonal-walk return constant, 3D", pass, detail);
}

void criterion2() {
    Timer t;
    bool pass = false;
    std::string detail;
    try {
        int code = -1;
        const json j = run_cli_json({"return-prob", "--style", "regular"}, code);
        const double green = j["green_constant"].get<double>();
        const double p = j["value"].get<double>();
        const double dg = std::fabs(green - 1.5163860591);
        const double dp = std::fabs(p - 0.340537330);
        const double coarse = std::fabs(green - 1.53);
        pass = code == 0 && dg <= 1e-5 && dp <= 1e-5 && coarse <= 0.015 && t.s() <= 60.0;
        detail = "|G-1.5163860591|=" + sci(dg) + ", |p-0.340537330|=" + sci(dp) +
                 ", |G-1.53|=" + sci(coarse) + ", " + secs(t);
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(2, "simple-cubic return constant, 3D", pass, detail);
}

void criterion3() {
    Timer t;
    bool pass = false;
    std::string detail;
    try {
        double worst = 0.0;
        for (std::int64_t m = 1; m <= 5; ++m)
            for (std::int64_t n = 1; n <= 5; ++n) {
                const DomainSpec dom = Rectangle2D{m, n};
                for (std::int64_t a = 1; a <= m; ++a)
                    for (std::int64_t b = 1; b <= n; ++b) {
                        const LatticePoint src{a, b};
                        for (const auto& [tgt, val] : fundamental_matrix_green(dom, src))
                            worst = std::max(worst,
                                             std::fabs(val - rect_green(m, n, src, tgt)));
                    }
            }
        for (std::int64_t l = 1; l <= 3; ++l)
            for (std::int64_t m = 1; m <= 3; ++m)
                for (std::int64_t n = 1; n <= 3; ++n) {
                    const DomainSpec dom = Block3D{l, m, n};
                    for (std::int64_t a = 1; a <= l; ++a)
                        for (std::int64_t b = 1; b <= m; ++b)
                            for (std::int64_t c = 1; c <= n; ++c) {
                                const LatticePoint src{a, b, c};
                                for (const auto& [tgt, val] :
                                     fundamental_matrix_green(dom, src))
                                    worst = std::max(
                                        worst,
                                        std::fabs(val - block_green(l, m, n, src, tgt)));
                            }
                }
        pass = worst <= 1e-10 && t.s() <= 30.0;
        detail = "max |series - solve|=" + sci(worst) + " over all pairs, " + secs(t);
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(3, "series equals dense linear solve on every small domain", pass, detail);
}

void criterion4() {
    bool pass = false;
    std::string detail;
    try {
        double worst = 0.0;
        worst = std::max(worst,
                         std::fabs(rect_green(2, 2, {1, 1}, {1, 1}) - 16.0 / 15.0));
        worst = std::max(worst, std::fabs(rect_green(2, 2, {1, 1}, {2, 2}) - 4.0 / 15.0));
        worst = std::max(
            worst, std::fabs(block_green(2, 2, 2, {1, 1, 1}, {1, 1, 1}) - 64.0 / 63.0));
        worst = std::max(
            worst, std::fabs(return_prob_finite(Rectangle2D{2, 2}, {1, 1}) - 1.0 / 16.0));
        worst = std::max(
            worst,
            std::fabs(return_prob_finite(Block3D{2, 2, 2}, {1, 1, 1}) - 1.0 / 64.0));
        pass = worst <= 1e-12;
        detail = "max deviation from 16/15, 4/15, 64/63, 1/16, 1/64: " + sci(worst);
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(4, "hand-computed exact values", pass, detail);
}

void criterion5() {
    Timer t;
    bool pass = false;
    std::string detail;
    try {
        auto balance = [](std::int64_t a, std::int64_t p) {
            double nb = 0.0;
            for (int dp : {-1, 1})
                for (int ds : {-1, 1}) nb += halfplane_green(a, p + dp, ds).value;
            return 4.0 * halfplane_green(a, p, 0).value - nb;
        };
        const double on = std::fabs(balance(3, 3) - 4.0);
        const double off = std::fabs(balance(3, 5));
        pass = on <= 1e-6 && off <= 1e-6 && t.s() <= 30.0;
        detail = "|resid(3,3)-4|=" + sci(on) + ", |resid(3,5)|=" + sci(off) + ", " + secs(t);
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(5, "half-plane single-step balance", pass, detail);
}

void criterion6() {
    bool pass = false;
    std::string detail;
    try {
        std::mt19937 gen(2024);
        auto pick = [&](int lo, int hi) {
            return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen);
        };
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            DomainSpec dom;
            LatticePoint src;
            if (i % 2 == 0) {
                const std::int64_t m = pick(1, 8), n = pick(1, 8);
                dom = Rectangle2D{m, n};
                src = LatticePoint{pick(1, m), pick(1, n)};
            } else {
                const std::int64_t l = pick(1, 8), m = pick(1, 8), n = pick(1, 8);
                dom = Block3D{l, m, n};
                src = LatticePoint{pick(1, l), pick(1, m), pick(1, n)};
            }
            worst = std::max(worst, std::fabs(absorption_probs(dom, src).total() - 1.0));
        }
        pass = worst <= 1e-10;
        detail = "max |total-1|=" + sci(worst) + " over 20 seeded domains";
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(6, "absorption probabilities sum to one", pass, detail);
}

void criterion7() {
    bool pass = false;
    std::string detail;
    try {
        const LatticePoint src{2, 3};
        const std::vector<LatticePoint> tgts{{1, 1}, {2, 2}, {3, 1}, {1, 3}, {2, 4},
                                             {3, 5}, {1, 5}, {2, 6}, {3, 3}, {2, 8}};
        double worst_rect = 0.0;
        for (const auto& tgt : tgts)
            worst_rect = std::max(worst_rect, std::fabs(rect_green(3, 120, src, tgt) -
                                                        semistrip_green(3, src, tgt)));

        double worst_semi = 0.0;
        const std::vector<std::array<std::int64_t, 3>> aps{{1, 1, 0}, {2, 2, 2}, {3, 1, 4}};
        for (const auto& [a, p, s] : aps)
            worst_semi = std::max(
                worst_semi, std::fabs(semistrip_green(3, LatticePoint{a, 60},
                                                      LatticePoint{p, 60 + s}) -
                                      strip_green(3, a, p, s)));

        double worst_hp = 0.0;
        for (std::int64_t s : {0, 2, 4})
            worst_hp = std::max(worst_hp, std::fabs(strip_green(401, 1, 1, s) -
                                                    halfplane_green(1, 1, s).value));

        pass = worst_rect <= 1e-8 && worst_semi <= 1e-8 && worst_hp <= 1e-5;
        detail = "rect/semistrip=" + sci(worst_rect) + ", semistrip/strip=" + sci(worst_semi) +
                 ", strip/halfplane=" + sci(worst_hp);
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(7, "finite domains converge to their infinite limits", pass, detail);
}

void criterion8() {
    Timer t;
    bool pass = false;
    std::string detail;
    try {
        const McConfig cfg{1000000, 42, 1000000};
        struct Case {
            McEstimate est;
            double exact;
        };
        const Case cases[3] = {
            {mc_expected_departures(Rectangle2D{2, 2}, {1, 1}, {1, 1}, cfg), 16.0 / 15.0},
            {mc_expected_departures(Rectangle2D{2, 2}, {1, 1}, {2, 2}, cfg), 4.0 / 15.0},
            {mc_expected_departures(Block3D{2, 2, 2}, {1, 1, 1}, {1, 1, 1}, cfg), 64.0 / 63.0},
        };
        bool ok = true;
        std::string dev;
        for (const auto& c : cases) {
            const double sigmas = std::fabs(c.est.mean - c.exact) / c.est.std_error;
            ok = ok && sigmas <= 4.0;
            if (!dev.empty()) dev += ", ";
            dev += std::to_string(sigmas).substr(0, 4) + "se";
        }
        const McEstimate ret = mc_return_prob(3, {1000000, 7, 100000});
        const bool ret_ok = ret.mean >= 0.2805 && ret.mean <= 0.2830;
        pass = ok && ret_ok && t.s() <= 120.0;
        detail = "deviations " + dev + "; return estimate " + sci(ret.mean) + " in [0.2805,0.2830]" +
                 (ret_ok ? "" : " VIOLATED") + ", " + secs(t);
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(8, "Monte Carlo brackets the exact values", pass, detail);
}

void criterion9() {
    Timer t;
    bool pass = false;
    std::string detail;
    try {
        std::ostringstream out, err;
        const int code = cli::run({"check"}, out, err);
        const std::string text = out.str();
        pass = code == 0 && text.find("[FAIL]") == std::string::npos &&
               text.find("[PASS]") != std::string::npos;
        int lines = 0;
        for (std::size_t p = text.find("[PASS]"); p != std::string::npos;
             p = text.find("[PASS]", p + 1))
            ++lines;
        detail = std::to_string(lines) + " invariants, exit " + std::to_string(code) + ", " +
                 secs(t);
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(9, "built-in invariant suite", pass, detail);
}

} // namespace

int main() {
    std::cout << "acceptance: expected departures, absorption and return constants\n";
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    if (failures == 0) {
        std::cout << "acceptance: all 9 criteria hold\n";
        return 0;
    }
    std::cout << "acceptance: " << failures << " of 9 criteria FAILED\n";
    return 1;
}
