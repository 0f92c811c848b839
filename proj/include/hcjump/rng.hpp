#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace hcj {

// Deterministic counter-style stream keyed by (seed, stream index).
// Every trajectory gets its own stream, so aggregated Monte Carlo output
// is independent of how trajectories are distributed over workers.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        state_ = mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL));
        state_ = mix(state_ + seed);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // uniform on (0,1), never returns an exact endpoint
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    // index into a cumulative distribution (cdf strictly increasing, back() ~ 1)
    std::size_t categorical(const std::vector<double>& cdf) {
        const double u = uniform() * cdf.back();
        std::size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cdf[mid] < u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Walker alias table: O(1) sampling from a fixed finite distribution.
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(const std::vector<double>& weights);

    std::size_t sample(RngStream& rng) const {
        const std::size_t k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(prob_.size()));
        const std::size_t i = k < prob_.size() ? k : prob_.size() - 1;
        return rng.uniform() < prob_[i] ? i : alias_[i];
    }

    bool empty() const { return prob_.empty(); }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

} // namespace hcj
