#pragma once

#include <span>
#include <string>

#include "gibbscert/rng.hpp"

namespace gibbscert {

// Conjugate pairs with the two-block Gibbs structure
//   theta | x  ~ posterior,   Y | theta ~ likelihood,
// for which the x-chain transition y -> E[V(Y) | x] has closed-form moments.
enum class Family {
    gaussian,       // Y | theta ~ N(theta, sigma2), theta ~ N(nu, tau2)
    beta_binomial,  // Y | theta ~ Bin(n, theta),    theta ~ Beta(alpha, beta)
    poisson_gamma,  // Y | theta ~ Poisson(theta),   theta ~ Gamma(alpha, rate beta)
};

// Coefficients of the four conditional-moment identities
//   E[X | theta]   = a * theta   + b
//   E[X^2 | theta] = c * theta^2 + d * theta + e
//   E[theta | X]   = f * X       + g
//   E[theta^2 | X] = h * X^2     + j * X     + k
// that drive every closed-form construction in the toolkit.  The fields are
// public and the struct is aggregate-initializable so users can supply
// constants for conjugate pairs beyond the built-in three; validity of a
// hand-filled set can be spot-checked with second_moments_valid().
struct MomentConstants {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
    double f = 0.0;
    double g = 0.0;
    double h = 0.0;
    double j = 0.0;
    double k = 0.0;

    // Contraction factor of the squared-distance drift; the construction
    // requires ch < 1.
    double ch() const { return c * h; }
};

// A fully parameterized model.  Only the hyperparameters of the active
// family are meaningful; the factories validate them.
struct ModelSpec {
    Family family = Family::gaussian;

    // gaussian
    double nu = 0.0;     // prior mean
    double sigma2 = 1.0; // likelihood variance
    double tau2 = 1.0;   // prior variance

    // beta_binomial / poisson_gamma
    long trials = 1;     // binomial trial count n
    double alpha = 1.0;
    double beta = 1.0;   // Beta second shape, or Gamma rate

    static ModelSpec gaussian(double nu, double sigma2, double tau2);
    static ModelSpec beta_binomial(long trials, double alpha, double beta);
    static ModelSpec poisson_gamma(double alpha, double beta);

    std::string name() const;
};

// Closed-form moment constants per family.
MomentConstants moments_gaussian(double nu, double sigma2, double tau2);
MomentConstants moments_beta_binomial(long trials, double alpha, double beta);
MomentConstants moments_poisson_gamma(double alpha, double beta);
MomentConstants moment_constants(const ModelSpec& model);

// Spot-check that a constants set is coherent: the implied conditional
// variances E[X^2|theta] - E[X|theta]^2 and E[theta^2|X] - E[theta|X]^2 must
// be nonnegative over the supplied grids.  Returns false at the first
// violation.  A grid check cannot prove validity, but it catches sign and
// transcription mistakes in hand-filled constants.
bool second_moments_valid(const MomentConstants& mc, std::span<const double> theta_grid,
                          std::span<const double> x_grid);

// Whether x is a possible data value under the model's likelihood
// (any real for gaussian, {0..n} for beta_binomial, {0,1,...} for
// poisson_gamma).
bool in_data_support(const ModelSpec& model, double x);

// Throws support_error if x is not a valid data value.
void require_in_support(const ModelSpec& model, double x);

// One scan of the two-block sampler started from data value x:
// theta ~ posterior(. | x), then x_next ~ likelihood(. | theta).
struct ConditionalDraw {
    double theta = 0.0;
    double x_next = 0.0;
};

ConditionalDraw sample_conditionals(const ModelSpec& model, double x, Rng& rng);

// Stationary law of the x-chain: the prior predictive (marginal) law of the
// data.  Continuous only for the gaussian family; the two discrete families
// expose a pmf over nonnegative integers.
struct MarginalLaw {
    Family family = Family::gaussian;
    double mean = 0.0;
    double variance = 0.0;

    // Discrete-family parameters (posterior-predictive form).
    long trials = 0;
    double alpha = 0.0;
    double beta = 0.0;

    bool discrete() const { return family != Family::gaussian; }

    // Density at x (pmf for the discrete families; 0 off-support).
    double density(double x) const;

    double sample(Rng& rng) const;
};

MarginalLaw marginal_law(const ModelSpec& model);

// Beta-binomial pmf P(X = k) for X ~ BetaBin(n, a, b).  Doubles as the
// posterior predictive of the beta_binomial family under updated (a, b).
double beta_binomial_pmf(long k, long n, double a, double b);

// Negative-binomial pmf P(X = k) when X | theta ~ Poisson(theta) and
// theta ~ Gamma(shape, rate).
double negative_binomial_pmf(long k, double shape, double rate);

} // namespace gibbscert
