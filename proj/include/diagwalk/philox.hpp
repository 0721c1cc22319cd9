#pragma once

#include <array>
#include <cassert>
#include <cstdint>

namespace diagwalk {

// Philox4x64-10 counter-based generator (Salmon, Moraes, Dror, Shaw;
// "Parallel Random Numbers: As Easy as 1, 2, 3", SC'11).  block() is a pure
// function of (counter, key), so any trial can be generated independently of
// scheduling; reference constants match the widely deployed implementations
// and are pinned by known-answer tests.
struct Philox4x64 {
    using Counter = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * ctr[0];
            const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * ctr[2];
            const Counter next = {static_cast<std::uint64_t>(p1 >> 64) ^ ctr[1] ^ key[0],
                                  static_cast<std::uint64_t>(p1),
                                  static_cast<std::uint64_t>(p0 >> 64) ^ ctr[3] ^ key[1],
                                  static_cast<std::uint64_t>(p0)};
            ctr = next;
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

/// Bit source for one Monte Carlo trial.  Stream layout (fixed; part of the
/// reproducibility contract): key = (seed, stream tag), counter = (block
/// index, trial index, 0, 0); the four words of a block are consumed in
/// order, least-significant bits first.  take(n) never straddles a word: a
/// tail shorter than n bits is discarded.
class BitStream {
public:
    BitStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream)
        : key_{seed, stream}, ctr_{0, trial, 0, 0} {}

    std::uint64_t take(int n) {
        assert(n >= 1 && n <= 63);
        if (bits_left_ < n) refill();
        const std::uint64_t v = word_ & ((1ull << n) - 1ull);
        word_ >>= n;
        bits_left_ -= n;
        return v;
    }

private:
    void refill() {
        if (word_idx_ == 4) {
            buf_ = Philox4x64::block(ctr_, key_);
            ++ctr_[0];
            word_idx_ = 0;
        }
        word_ = buf_[word_idx_++];
        bits_left_ = 64;
    }

    Philox4x64::Key key_;
    Philox4x64::Counter ctr_;
    Philox4x64::Counter buf_{};
    std::uint64_t word_ = 0;
    int bits_left_ = 0;
    int word_idx_ = 4;
};

} // namespace diagwalk
