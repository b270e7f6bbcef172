#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace robustbid {

// splitmix64 step; doubles as the seed-mixing hash for substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from (seed, stream). Used so that e.g.
// the CTR noise of campaign 3 never overlaps the competitor-bid stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (stream * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull);
    return splitmix64(s);
}

// Small self-contained generator. The standard <random> distributions are not
// bit-stable across library implementations, and the result files are meant
// to be byte-reproducible, so sampling is done by hand here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform in (lo, hi]; rate ranges exclude their low endpoint
    double uniform_open_low(double lo, double hi) { return hi - (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // Box-Muller; u1 in (0, 1] keeps the log finite.
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // uniform direction on the unit sphere in R^n
    std::vector<double> sphere_direction(int n) {
        std::vector<double> d(static_cast<std::size_t>(n));
        double norm_sq = 0.0;
        do {
            norm_sq = 0.0;
            for (auto& v : d) {
                v = normal();
                norm_sq += v * v;
            }
        } while (norm_sq == 0.0);
        double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& v : d) v *= inv;
        return d;
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace robustbid
