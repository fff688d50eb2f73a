#pragma once

#include <cstdint>
#include <functional>

namespace gibbscert {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Density of N(mean, variance) at x.  variance must be positive.
double normal_pdf(double x, double mean, double variance);

// Standard normal CDF.  Built on erfc so the lower tail keeps full relative
// accuracy instead of cancelling to 0 near z ~ -8; absolute error stays
// below 1e-15 over the whole line.
double normal_cdf(double z);

// CDF of N(mean, variance) at x.
double normal_cdf(double x, double mean, double variance);

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
// Bisects until the local Richardson error estimate is below the local
// tolerance share; depth is capped so pathological integrands terminate.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol);

// SplitMix64 mixing step.  Used to derive statistically independent child
// seeds from (base seed, stream index) pairs so that per-replicate and
// per-grid-point streams can be generated in any order, or in parallel,
// without changing results.
std::uint64_t splitmix64(std::uint64_t x);

// Child seed for stream `index` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// log of the binomial coefficient C(n, k) for 0 <= k <= n.
double log_choose(long n, long k);

// log of the Beta function B(a, b) for positive a, b.
double log_beta(double a, double b);

} // namespace gibbscert
