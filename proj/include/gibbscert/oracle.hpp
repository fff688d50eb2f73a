#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gibbscert/errors.hpp"
#include "gibbscert/models.hpp"

namespace gibbscert {

// A (possibly degenerate) normal law; variance 0 encodes a point mass.
struct GaussianLaw {
    double mean = 0.0;
    double variance = 0.0;
};

// Exact distribution of the gaussian x-chain after l scans from x0.
struct LStepLaw {
    long l = 0;
    double mean = 0.0;
    double variance = 0.0;
};

// Closed-form l-step law of the gaussian chain: iterating the one-scan
// autoregression keeps the law normal with geometrically mixed mean and a
// geometric-series variance.  Throws inapplicable_oracle_error for the
// discrete families and std::invalid_argument for l < 0.  l = 0 is the
// point mass at x0.
LStepLaw exact_l_step_law(const ModelSpec& model, double x0, long l);

// Exact total variation distance between two normal laws via the analytic
// density crossing points.  Point masses are handled as singular cases
// (distance 1 against any continuous law, 0/1 against another point mass).
double exact_tv(const GaussianLaw& p, const GaussianLaw& q);

// The same distance by adaptive quadrature of (1/2) * integral |p - q|,
// split at the analytic crossing points so each panel is smooth.  Used as
// an independent cross-check of exact_tv; both laws must be continuous.
double exact_tv_quadrature(const GaussianLaw& p, const GaussianLaw& q,
                           double tol = 1e-12);

// A simulated trajectory of the two-block sampler.  xs[t] is the data value
// after t+1 scans; thetas[t] is the parameter draw inside scan t+1.
struct ChainPath {
    double x0 = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> thetas;
    std::vector<double> xs;

    // Number of stored states including the start point.
    std::size_t num_states() const { return xs.size() + 1; }

    // State after i scans (state(0) == x0).
    double state(std::size_t i) const { return i == 0 ? x0 : xs[i - 1]; }
};

ChainPath simulate_chain(const ModelSpec& model, double x0, std::size_t length,
                         std::uint64_t seed);

// Mean of g over the n states following a burn-in of b scans:
// (1/n) * sum of g(state(b + i)) for i = 1..n.  Throws
// insufficient_path_error when the path holds fewer than b + n transitions.
template <class G>
double ergodic_average(const ChainPath& path, G&& g, std::size_t burn_in,
                       std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("ergodic_average: need n >= 1");
    }
    if (burn_in + n > path.xs.size()) {
        throw insufficient_path_error(
            "ergodic_average: path has " + std::to_string(path.xs.size()) +
            " transitions, need burn_in + n = " + std::to_string(burn_in + n));
    }
    double acc = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        acc += g(path.state(burn_in + i));
    }
    return acc / static_cast<double>(n);
}

// Value of X after l scans from x0, replicated `replicates` times with
// independent streams derived from (seed, replicate index).
std::vector<double> ensemble_at_step(const ModelSpec& model, double x0, long l,
                                     std::size_t replicates, std::uint64_t seed);

// Histogram / pmf estimate of the total variation distance between an
// ensemble and a reference law.
struct TvEstimate {
    double estimate = 0.0;
    std::size_t bins = 0;          // histogram bins (continuous reference)
    bool low_replicates = false;   // fewer than 10^4 points: noisy estimate
    // (bins, estimate) at half / default / double bin counts; empty for
    // discrete references, where no binning choice exists.
    std::vector<std::pair<std::size_t, double>> sensitivity;
};

// Estimates TV(ensemble, reference).  Continuous references use a histogram
// with Freedman-Diaconis bin width by default (bins = 0) plus a sensitivity
// sweep, and count mass outside the sample range toward the distance.
// Discrete references compare empirical frequencies against the pmf over
// the full support.  A degenerate ensemble against a continuous reference
// has distance 1.
TvEstimate empirical_tv(std::span<const double> ensemble, const MarginalLaw& reference,
                        std::size_t bins = 0);

} // namespace gibbscert
