#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gibbscert/models.hpp"

namespace gibbscert {

// A verified drift condition for the x-chain: with V(y) = (y - u)^2 the
// one-scan expectation satisfies the exact identity
//   E[V(X_1) | X_0 = x] = ch * V(x) + L,
// so E[V(X_1) | X_0 = x] <= gamma * V(x) + L holds for any rate
// gamma in [ch, 1).
struct DriftCertificate {
    double u = 0.0;     // center of the quadratic test function
    double ch = 0.0;    // exact contraction factor of the scan
    double gamma = 0.0; // certified rate (>= ch)
    double L = 0.0;     // additive constant

    double V(double x) const { return (x - u) * (x - u); }

    // Small-set radii w must exceed this for the drift/minorization pair to
    // produce a nonvacuous convergence bound.
    double small_set_threshold() const { return 2.0 * L / (1.0 - gamma); }
};

// Builds the drift certificate from moment constants.  The center u
// minimizes the additive constant L over all quadratic test functions; it
// is the fixed point weighting that makes the identity exact.  Throws
// family_restriction_error when ch >= 1 (no quadratic drift for these
// hyperparameters) and degenerate_center_error when af == ch (center
// undefined).  The one-argument overload certifies the sharpest rate
// gamma = ch.
DriftCertificate build_drift(const MomentConstants& mc, double gamma);
DriftCertificate build_drift(const MomentConstants& mc);

// One row of a drift-identity check at a starting point x.  For the
// beta_binomial family the scan expectation is computed exactly (finite
// support), so stderr and zscore are zero and `exact` is set; otherwise the
// estimate is a Monte Carlo mean over n_samples independent scans and
// zscore = (estimate - predicted) / stderr.
struct DriftCheckRow {
    double x = 0.0;
    double predicted = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double zscore = 0.0;
    bool exact = false;
};

// Checks E[V(X_1) | X_0 = x] = ch V(x) + L at each grid point.  Each point
// uses an independent random stream derived from (seed, index), so rows may
// be computed in any order or concurrently.  Requires n_samples >= 1000 for
// a meaningful standard error.
std::vector<DriftCheckRow> verify_drift_identity(const ModelSpec& model,
                                                 const DriftCertificate& cert,
                                                 std::span<const double> x_grid,
                                                 std::size_t n_samples,
                                                 std::uint64_t seed);

} // namespace gibbscert
