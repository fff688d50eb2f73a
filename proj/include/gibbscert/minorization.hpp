#pragma once

#include <span>

#include "gibbscert/models.hpp"

namespace gibbscert {

// One-scan law of the gaussian x-chain.  Integrating theta out of the two
// conditional draws leaves a first-order autoregression:
//   X_1 | X_0 = x  ~  N(rho * x + offset, s2).
struct Ar1Law {
    double rho = 0.0;    // posterior shrinkage weight on x
    double offset = 0.0; // prior pull, (1 - rho) * prior mean
    double s2 = 0.0;     // one-scan noise variance
};

// Reduces a gaussian model to its autoregressive scan law.  Throws
// not_gaussian_error for the discrete families, whose scan law is not of
// this form.
Ar1Law ar1_law(const ModelSpec& model);

// Transition density k_x(y) of one scan from x.
double transition_density(const Ar1Law& law, double x, double y);

// A minorization condition on the small set C = {x : (x-u)^2 <= w}:
//   k_x(y) >= epsilon * q(y)   for every x in C and every y,
// where q integrates to one.  epsilon * q is the pointwise envelope
//   residual(y) = min over x in C of k_x(y),
// a two-sided folded normal tail, and epsilon is its total mass
// 2 * Phi(-rho * sqrt(w) / s).
struct MinorizationCertificate {
    double u = 0.0;       // small-set center (drift center)
    double w = 0.0;       // small-set squared radius
    double epsilon = 0.0; // overlap mass
    double rho = 0.0;
    double offset = 0.0;
    double s2 = 0.0;

    // min over x in C of k_x(y); equals epsilon * q(y).
    double residual_density(double y) const;

    // The minorizing probability density q(y).
    double q_density(double y) const;
};

// Builds the certificate for the given center and squared radius.  Throws
// invalid_small_set_error when w <= 0.
MinorizationCertificate build_minorization(const Ar1Law& law, double u, double w);

// Result of a grid check that k_x(y) - epsilon * q(y) >= 0 on C x R.
struct DominationReport {
    double worst_margin = 0.0; // min over the grid of k_x(y) - epsilon q(y)
    double argmin_x = 0.0;
    double argmin_y = 0.0;
};

// Evaluates the domination margin over x_grid x y_grid.  Every x must lie
// in the small set (up to roundoff); otherwise a grid_error is thrown.
DominationReport check_domination(const MinorizationCertificate& cert, const Ar1Law& law,
                                  std::span<const double> x_grid,
                                  std::span<const double> y_grid);

} // namespace gibbscert
