#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arl {

// Error taxonomy. The CLI maps config/data errors to exit code 1 and
// numeric failures to exit code 2.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct shape_error : error {
    using error::error;
};
struct data_error : error {
    using error::error;
};
struct config_error : error {
    using error::error;
};
struct numeric_error : error {
    using error::error;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Deterministic random source. All randomness in the library flows through
/// this class; std distributions are avoided because their outputs are
/// implementation-defined, which would break seed reproducibility across
/// toolchains.
class rng {
public:
    explicit rng(std::uint64_t seed) : state_(detail::splitmix64(seed)) {
        // warm up so nearby seeds decorrelate
        next_u64();
        next_u64();
    }

    /// Independent substream, e.g. rng::stream(seed, "learner-init").
    /// Distinct purposes never share a sequence for the same seed.
    static rng stream(std::uint64_t seed, std::string_view purpose) {
        return rng(detail::splitmix64(seed ^ detail::fnv1a(purpose)));
    }

    std::uint64_t next_u64() {
        state_ = detail::splitmix64(state_);
        return state_;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (no cached spare, keeps the
    /// consumption pattern predictable).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stdev) { return mean + stdev * normal(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Unbiased integer in [0, n) by rejection.
    std::size_t below(std::size_t n) {
        if (n == 0) throw error("rng::below: n must be positive");
        const std::uint64_t bound = n;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r = next_u64();
        while (r >= limit) r = next_u64();
        return static_cast<std::size_t>(r % bound);
    }

    /// Fisher-Yates.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        shuffle(idx);
        return idx;
    }

private:
    std::uint64_t state_;
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

} // namespace arl
