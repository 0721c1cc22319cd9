#include "diagwalk/oracles.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "diagwalk/errors.hpp"
#include "diagwalk/philox.hpp"

namespace diagwalk {

namespace {

// Stream tags keep the bit streams of different oracle operations disjoint
// even under the same seed.
constexpr std::uint64_t kStreamDepartures = 1;
constexpr std::uint64_t kStreamReturn = 2;

// ---------- dense elimination ----------

// In-place LU with partial pivoting, then solve.  The system is strictly
// smaller than the cap, symmetric and irreducibly diagonally dominant, so a
// vanishing pivot cannot occur.
void solve_dense(std::vector<double>& a, std::vector<double>& rhs, std::int64_t n) {
    for (std::int64_t k = 0; k < n; ++k) {
        std::int64_t piv = k;
        double best = std::fabs(a[static_cast<std::size_t>(k * n + k)]);
        for (std::int64_t i = k + 1; i < n; ++i) {
            const double v = std::fabs(a[static_cast<std::size_t>(i * n + k)]);
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (piv != k) {
            for (std::int64_t j = k; j < n; ++j)
                std::swap(a[static_cast<std::size_t>(k * n + j)],
                          a[static_cast<std::size_t>(piv * n + j)]);
            std::swap(rhs[static_cast<std::size_t>(k)], rhs[static_cast<std::size_t>(piv)]);
        }
        const double d = a[static_cast<std::size_t>(k * n + k)];
        for (std::int64_t i = k + 1; i < n; ++i) {
            const double f = a[static_cast<std::size_t>(i * n + k)] / d;
            if (f == 0.0) continue;
            for (std::int64_t j = k + 1; j < n; ++j)
                a[static_cast<std::size_t>(i * n + j)] -= f * a[static_cast<std::size_t>(k * n + j)];
            rhs[static_cast<std::size_t>(i)] -= f * rhs[static_cast<std::size_t>(k)];
        }
    }
    for (std::int64_t i = n - 1; i >= 0; --i) {
        double s = rhs[static_cast<std::size_t>(i)];
        for (std::int64_t j = i + 1; j < n; ++j)
            s -= a[static_cast<std::size_t>(i * n + j)] * rhs[static_cast<std::size_t>(j)];
        rhs[static_cast<std::size_t>(i)] = s / a[static_cast<std::size_t>(i * n + i)];
    }
}

std::vector<LatticePoint> interior_points(const DomainSpec& dom) {
    std::vector<LatticePoint> pts;
    if (const auto* r = std::get_if<Rectangle2D>(&dom)) {
        pts.reserve(static_cast<std::size_t>(r->m * r->n));
        for (std::int64_t p = 1; p <= r->m; ++p)
            for (std::int64_t q = 1; q <= r->n; ++q) pts.push_back(LatticePoint{p, q});
    } else {
        const auto& b = std::get<Block3D>(dom);
        pts.reserve(static_cast<std::size_t>(b.l * b.m * b.n));
        for (std::int64_t p = 1; p <= b.l; ++p)
            for (std::int64_t q = 1; q <= b.m; ++q)
                for (std::int64_t s = 1; s <= b.n; ++s) pts.push_back(LatticePoint{p, q, s});
    }
    return pts;
}

// ---------- Monte Carlo scaffolding ----------

struct BlockTotals {
    unsigned __int128 sum = 0;
    unsigned __int128 sumsq = 0;
    std::int64_t truncated = 0;
};

constexpr std::int64_t kTrialsPerBlock = 4096;

// Runs `trial(index) -> (count, truncated)` for indices [0, trials) split
// into fixed blocks.  Blocks are processed by a small thread pool but
// accumulated per block and reduced in block order with integer arithmetic,
// so the estimate is bitwise independent of the thread count.
template <class TrialFn>
McEstimate run_blocks(std::int64_t trials, TrialFn&& trial) {
    const std::int64_t nblocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
    std::vector<BlockTotals> blocks(static_cast<std::size_t>(nblocks));

    auto worker_loop = [&](std::atomic<std::int64_t>& next) {
        for (;;) {
            const std::int64_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= nblocks) break;
            BlockTotals tot;
            const std::int64_t lo = b * kTrialsPerBlock;
            const std::int64_t hi = std::min(trials, lo + kTrialsPerBlock);
            for (std::int64_t t = lo; t < hi; ++t) {
                const auto [count, truncated] = trial(static_cast<std::uint64_t>(t));
                const auto c = static_cast<unsigned __int128>(count);
                tot.sum += c;
                tot.sumsq += c * c;
                tot.truncated += truncated ? 1 : 0;
            }
            blocks[static_cast<std::size_t>(b)] = tot;
        }
    };

    const int nthreads =
        static_cast<int>(std::min<std::int64_t>(mc_thread_count(), nblocks));
    std::atomic<std::int64_t> next{0};
    if (nthreads <= 1) {
        worker_loop(next);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back([&] { worker_loop(next); });
        for (auto& th : pool) th.join();
    }

    unsigned __int128 sum = 0, sumsq = 0;
    std::int64_t truncated = 0;
    for (const auto& blk : blocks) { // fixed order; integer, so exact anyway
        sum += blk.sum;
        sumsq += blk.sumsq;
        truncated += blk.truncated;
    }

    McEstimate est;
    est.trials = trials;
    est.truncated_trials = truncated;
    const double t = static_cast<double>(trials);
    est.mean = static_cast<double>(sum) / t;
    if (trials > 1) {
        // trials*sumsq - sum^2 fits in 128 bits for any sane config and is
        // >= 0 by Cauchy-Schwarz.
        const unsigned __int128 num =
            static_cast<unsigned __int128>(trials) * sumsq - sum * sum;
        const double var = static_cast<double>(num) / (t * (t - 1.0));
        est.std_error = std::sqrt(var / t);
    }
    return est;
}

template <class InteriorFn>
McEstimate run_departure_trials(int d, const LatticePoint& src, const LatticePoint& tgt,
                                const McConfig& cfg, InteriorFn interior) {
    return run_blocks(cfg.trials, [&](std::uint64_t t) -> std::pair<std::int64_t, bool> {
        BitStream bits(cfg.seed, t, kStreamDepartures);
        std::array<std::int64_t, 64> pos{};
        for (int i = 0; i < d; ++i) pos[static_cast<std::size_t>(i)] = src[i];
        std::int64_t count = 0;
        for (std::int64_t step = 0; step < cfg.max_steps; ++step) {
            bool at_tgt = true;
            for (int i = 0; i < d; ++i)
                if (pos[static_cast<std::size_t>(i)] != tgt[i]) {
                    at_tgt = false;
                    break;
                }
            if (at_tgt) ++count;
            const std::uint64_t m = bits.take(d);
            for (int i = 0; i < d; ++i)
                pos[static_cast<std::size_t>(i)] += (m >> i) & 1u ? -1 : +1;
            if (!interior(pos)) return {count, false};
        }
        return {count, true};
    });
}

// ---------- packed 3D return-probability walker ----------

// Three 21-bit biased coordinate fields in one word; a 64-entry table maps
// 6 random bits (two steps x three sign bits) to the packed two-step delta.
// Field drift stays below the 2^20 bias whenever max_steps < 2^20, so
// two's-complement addition never carries across fields.
constexpr std::uint64_t kFieldBias = 1ull << 20;
constexpr std::uint64_t kPackedOrigin = (kFieldBias << 42) | (kFieldBias << 21) | kFieldBias;

constexpr std::array<std::uint64_t, 64> make_delta2() {
    std::array<std::uint64_t, 64> t{};
    for (unsigned j = 0; j < 64; ++j) {
        std::uint64_t v = 0;
        for (int i = 0; i < 3; ++i) {
            const int step1 = (j >> i) & 1u ? -1 : +1;
            const int step2 = (j >> (3 + i)) & 1u ? -1 : +1;
            v += static_cast<std::uint64_t>(static_cast<std::int64_t>(step1 + step2))
                 << (21 * i);
        }
        t[j] = v;
    }
    return t;
}

constexpr std::array<std::uint64_t, 64> kDelta2 = make_delta2();

} // namespace

int mc_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    int n = hw == 0 ? 1 : static_cast<int>(hw);
    if (const char* s = std::getenv("DIAGWALK_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(s, &end, 10);
        if (end != s && *end == '\0' && v >= 1) n = static_cast<int>(std::min(v, 1024L));
    }
    return n;
}

std::vector<std::pair<LatticePoint, GreenValue>> fundamental_matrix_green(
    const DomainSpec& dom, const LatticePoint& src) {
    validate(dom);
    if (!is_finite(dom))
        throw UnsupportedDomainError("fundamental matrix requires a finite domain");
    if (classify_point(dom, src) != PointClass::Interior)
        throw NotInteriorError("source point is not interior to the domain");

    const std::vector<LatticePoint> pts = interior_points(dom);
    const std::int64_t n = static_cast<std::int64_t>(pts.size());
    if (n > 20000)
        throw TooLargeError("domain has " + std::to_string(n) +
                            " interior states; dense-solver cap is 20000");

    const int d = dimension(dom);
    const double w = 1.0 / static_cast<double>(std::int64_t{1} << d);
    auto index_of = [&](const LatticePoint& x) -> std::int64_t {
        if (const auto* r = std::get_if<Rectangle2D>(&dom))
            return (x[0] - 1) * r->n + (x[1] - 1);
        const auto& b = std::get<Block3D>(dom);
        return ((x[0] - 1) * b.m + (x[1] - 1)) * b.n + (x[2] - 1);
    };

    std::vector<double> a(static_cast<std::size_t>(n * n), 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        a[static_cast<std::size_t>(i * n + i)] = 1.0;
        for (const auto& nb : diagonal_neighbors(pts[static_cast<std::size_t>(i)]))
            if (classify_point(dom, nb) == PointClass::Interior)
                a[static_cast<std::size_t>(i * n + index_of(nb))] -= w;
    }
    rhs[static_cast<std::size_t>(index_of(src))] = 1.0;
    solve_dense(a, rhs, n);

    std::vector<std::pair<LatticePoint, GreenValue>> out;
    out.reserve(pts.size());
    for (std::int64_t i = 0; i < n; ++i)
        out.emplace_back(pts[static_cast<std::size_t>(i)], rhs[static_cast<std::size_t>(i)]);
    return out;
}

McEstimate mc_expected_departures(const DomainSpec& dom, const LatticePoint& src,
                                  const LatticePoint& tgt, const McConfig& cfg) {
    validate(dom);
    if (const auto* f = std::get_if<FullLattice>(&dom); f && f->d <= 2)
        throw RecurrentLatticeError("full lattice with d <= 2 is recurrent; departures diverge");
    if (classify_point(dom, src) != PointClass::Interior)
        throw NotInteriorError("source point is not interior to the domain");
    if (classify_point(dom, tgt) != PointClass::Interior)
        throw NotInteriorError("target point is not interior to the domain");
    const int d = dimension(dom);
    if (d > 63) throw TooLargeError("Monte Carlo walker supports at most 63 dimensions");

    return std::visit(
        [&](const auto& dd) -> McEstimate {
            using T = std::decay_t<decltype(dd)>;
            if constexpr (std::is_same_v<T, Rectangle2D>) {
                return run_departure_trials(d, src, tgt, cfg, [dd](const auto& pos) {
                    return pos[0] >= 1 && pos[0] <= dd.m && pos[1] >= 1 && pos[1] <= dd.n;
                });
            } else if constexpr (std::is_same_v<T, SemiStrip2D>) {
                return run_departure_trials(d, src, tgt, cfg, [dd](const auto& pos) {
                    return pos[0] >= 1 && pos[0] <= dd.m && pos[1] >= 1;
                });
            } else if constexpr (std::is_same_v<T, InfiniteStrip2D>) {
                return run_departure_trials(d, src, tgt, cfg, [dd](const auto& pos) {
                    return pos[0] >= 1 && pos[0] <= dd.m;
                });
            } else if constexpr (std::is_same_v<T, HalfPlane2D>) {
                return run_departure_trials(d, src, tgt, cfg,
                                            [](const auto& pos) { return pos[0] >= 1; });
            } else if constexpr (std::is_same_v<T, Block3D>) {
                return run_departure_trials(d, src, tgt, cfg, [dd](const auto& pos) {
                    return pos[0] >= 1 && pos[0] <= dd.l && pos[1] >= 1 && pos[1] <= dd.m &&
                           pos[2] >= 1 && pos[2] <= dd.n;
                });
            } else {
                return run_departure_trials(d, src, tgt, cfg,
                                            [](const auto&) { return true; });
            }
        },
        dom);
}

McEstimate mc_return_prob(int d, const McConfig& cfg) {
    if (d <= 2)
        throw RecurrentLatticeError(
            "full lattice with d <= 2 is recurrent; the estimator tends to 1");
    if (d > 63) throw TooLargeError("Monte Carlo walker supports at most 63 dimensions");

    // Returns are only possible at even step counts, so walk in double steps.
    const std::int64_t double_steps = cfg.max_steps / 2;

    if (d == 3 && cfg.max_steps < static_cast<std::int64_t>(kFieldBias)) {
        return run_blocks(cfg.trials, [&](std::uint64_t t) -> std::pair<std::int64_t, bool> {
            BitStream bits(cfg.seed, t, kStreamReturn);
            std::uint64_t pos = kPackedOrigin;
            for (std::int64_t k = 0; k < double_steps; ++k) {
                pos += kDelta2[bits.take(6)];
                if (pos == kPackedOrigin) return {1, false};
            }
            return {0, true};
        });
    }

    return run_blocks(cfg.trials, [&](std::uint64_t t) -> std::pair<std::int64_t, bool> {
        BitStream bits(cfg.seed, t, kStreamReturn);
        std::array<std::int64_t, 64> pos{};
        for (std::int64_t k = 0; k < double_steps; ++k) {
            const std::uint64_t m1 = bits.take(d);
            const std::uint64_t m2 = bits.take(d);
            bool zero = true;
            for (int i = 0; i < d; ++i) {
                auto& c = pos[static_cast<std::size_t>(i)];
                c += ((m1 >> i) & 1u ? -1 : +1) + ((m2 >> i) & 1u ? -1 : +1);
                zero = zero && c == 0;
            }
            if (zero) return {1, false};
        }
        return {0, true};
    });
}

} // namespace diagwalk
