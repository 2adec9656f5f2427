#pragma once

#include <cmath>
#include <cstdint>

namespace chainsel {

// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// Counter-based generator (SplitMix64 in counter mode). A stream is a pure
// function of (seed, stream), and each draw depends only on the call count,
// so replicate streams keyed by (seed, replicate) reproduce bit-identically
// no matter how work is divided between threads.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^
                     mix64(stream + 0xd1b54a32d192ed03ULL))),
          counter_(0) {}

    std::uint64_t next_u64() noexcept {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return mix64(key_ ^ counter_);
    }

    // Uniform on [0,1).
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0,1].
    double uniform_pos() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform on the open interval (0,1).
    double uniform_oo() noexcept {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    // Exponential(rate); strictly positive.
    double exponential(double rate) noexcept {
        return -std::log(uniform_oo()) / rate;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace chainsel
