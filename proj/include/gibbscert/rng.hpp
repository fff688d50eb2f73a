#pragma once

#include <cstdint>
#include <random>

#include "gibbscert/numeric.hpp"

namespace gibbscert {

// Seedable random stream.  All sampling in the toolkit flows through this
// class so a run is reproducible from a single integer.  Distribution
// objects are constructed fresh per draw: std:: distributions may buffer
// state between calls, and a buffered value would make results depend on
// the interleaving of draw types.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Independent stream for replicate `index` under `seed`.  Streams can be
    // created in any order (or concurrently) without changing their output.
    static Rng for_replicate(std::uint64_t seed, std::uint64_t index) {
        return Rng(derive_seed(seed, index));
    }

    double uniform() {
        // 53-bit mantissa-exact uniform in [0, 1).
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal(double mean, double stddev) {
        std::normal_distribution<double> d(mean, stddev);
        return d(engine_);
    }

    // Gamma with shape/rate parameterization (mean = shape / rate).
    double gamma_rate(double shape, double rate) {
        std::gamma_distribution<double> d(shape, 1.0 / rate);
        return d(engine_);
    }

    double beta(double a, double b) {
        // Ratio-of-gammas construction; exact in distribution.
        const double x = gamma_rate(a, 1.0);
        const double y = gamma_rate(b, 1.0);
        return x / (x + y);
    }

    long binomial(long trials, double p) {
        std::binomial_distribution<long> d(trials, p);
        return d(engine_);
    }

    long poisson(double mean) {
        std::poisson_distribution<long> d(mean);
        return d(engine_);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace gibbscert
