#ifndef MPD_RNG_HPP
#define MPD_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace mpd {

// Philox4x32-10 counter-based generator. Stateless core: a (key, counter)
// pair maps to four 32-bit words. Streams derived from distinct keys are
// independent, which gives position-independent per-replication and
// per-draw-site randomness: parallel and serial schedules consume identical
// values.
namespace philox {

struct Block {
    std::array<std::uint32_t, 4> w;
};

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline Block generate(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, ctr[0], hi0, lo0);
        mulhilo(M1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return Block{ctr};
}

}  // namespace philox

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// A seedable random stream with cheap key-derived children. child(tag) yields
// an independent stream; successive draws advance a 64-bit block counter.
// Copying a stream copies its position.
class RngStream {
public:
    RngStream() : RngStream(0) {}
    explicit RngStream(std::uint64_t seed) : key_(splitmix64(seed)) {}

    // Derived stream, independent of this one and of siblings with other tags.
    RngStream child(std::uint64_t tag) const {
        RngStream s;
        s.key_ = splitmix64(key_ ^ splitmix64(tag + 0x1F123BB5ull));
        return s;
    }
    RngStream child(std::uint64_t a, std::uint64_t b) const { return child(a).child(b); }
    RngStream child(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
        return child(a).child(b).child(c);
    }

    std::uint32_t next_u32() {
        if (avail_ == 0) refill();
        return block_.w[4 - avail_--];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe under log().
    double next_double_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; spare value cached.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double_pos();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t key() const { return key_; }

private:
    void refill() {
        std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
            0u, 0u};
        std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(key_),
                                            static_cast<std::uint32_t>(key_ >> 32)};
        block_ = philox::generate(ctr, key);
        ++counter_;
        avail_ = 4;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    philox::Block block_{};
    int avail_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mpd

#endif
