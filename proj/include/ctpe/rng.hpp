#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ctpe {

namespace detail {

// SplitMix64 finalizer, used to derive child stream identifiers.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace detail

// Philox4x32-10 counter-based block function.
// Multipliers and Weyl constants are the standard published ones; the
// 10-round variant passes the published known-answer vectors (see tests).
struct Philox4x32 {
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += W0;
                key[1] += W1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

// Substream purposes used by the simulator. Every consumer of randomness
// derives its own stream so that adding draws in one place never shifts
// the sequence seen by another.
enum class Purpose : std::uint64_t { Init = 1, Path = 2, Reward = 3 };

// Counter-based stream: the key carries the user seed, the upper counter
// words carry the stream id, the lower words the block index. Splitting is
// cheap and never touches the parent's state.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    RandomStream split(std::uint64_t purpose) const {
        const std::uint64_t child =
            detail::splitmix64(stream_ ^ detail::splitmix64(purpose ^ 0xA3C59AC2F1ED8B1DULL));
        return RandomStream(seed_, child);
    }
    RandomStream split(Purpose p) const { return split(static_cast<std::uint64_t>(p)); }

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // 53-bit uniform on [0,1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via Box-Muller; the second draw of each pair is cached.
    double gaussian() {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; // (0,1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        cache_ = r * std::sin(t);
        has_cache_ = true;
        return r * std::cos(t);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

  private:
    void refill() {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                                  static_cast<std::uint32_t>(seed_ >> 32)};
        buf_ = Philox4x32::block(ctr, key);
        ++block_;
        pos_ = 0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    double cache_ = 0.0;
    bool has_cache_ = false;
};

} // namespace ctpe
