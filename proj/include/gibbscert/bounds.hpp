#pragma once

#include <span>
#include <vector>

#include "gibbscert/drift.hpp"
#include "gibbscert/models.hpp"

namespace gibbscert {

// Ingredients of the drift-and-minorization total-variation bound
// (Rosenthal 1995, Theorem 12): after l scans started from x0,
//   ||P^l(x0, .) - pi|| <= (1 - epsilon)^(r l)
//                          + (alpha^-(1-r) A^r)^l (1 + L/(1-gamma) + V0)
// with alpha = (1 + w) / (1 + 2L + gamma w), A = 1 + 2(gamma w + L) and
// V0 = (x0 - u)^2.
struct RosenthalInputs {
    double r = 0.0;       // split exponent in (0, 1)
    double gamma = 0.0;   // drift rate in [ch, 1)
    double L = 0.0;       // drift additive constant
    double w = 0.0;       // small-set squared radius
    double epsilon = 0.0; // minorization mass in (0, 1]
    double v0 = 0.0;      // V(x0) at the start point
};

enum class BoundForm {
    rosenthal, // two-geometric-term drift/minorization bound
    dksc,      // closed-form chi-square bound for the standard gaussian chain
};

// A total-variation bound as a function of the scan count l.
struct BoundCurve {
    BoundForm form = BoundForm::rosenthal;

    // rosenthal form: value(l) = base1^l + coeff * base2^l.
    double base1 = 0.0;
    double base2 = 0.0;
    double coeff = 0.0;
    // Set when base2 >= 1: the curve is reported as computed but can never
    // certify convergence.
    bool vacuous = false;

    // dksc form: start point of the chain.
    double x = 0.0;

    double value(long l) const;
};

// Assembles the Rosenthal curve, validating every ingredient:
// gamma in [ch-free sense] (0,1) with L >= 0 feasibility via w, r in (0,1),
// epsilon in (0,1], and the usability threshold w > 2L/(1-gamma)
// (small_set_too_small_error otherwise).  A curve with base2 >= 1 is
// returned with `vacuous` set rather than rejected.
BoundCurve rosenthal_curve(const RosenthalInputs& in);

// Closed-form bound for the gaussian family in its standard form (prior
// mean 0, sigma2 + tau2 = 1/2, equal variances), after Diaconis, Khare and
// Saloff-Coste's chi-square analysis of this chain:
//   value(l) = (1/2) sqrt( exp(x^2 2^(1-2l) / (1 + 2^(-2l)))
//                          / sqrt(1 - 2^(-4l)) - 1 ),   l >= 1.
// Throws inapplicable_bound_error for any other model.
BoundCurve dksc_curve(double x, const ModelSpec& model);

// Smallest l >= 1 with curve(l) <= omega.  Searches by exponential
// bracketing plus bisection under the cap 10^6; throws no_solution_error
// (with the curve's parameters in the message) when no such l exists.
long solve_n_star(const BoundCurve& curve, double omega);

// Geometric-ergodicity envelope ||P^l(x0,.) - pi|| <= M0 * t^l extracted
// from a rosenthal-form curve: t = max(base1, base2), M0 = 1 + coeff.
// Throws not_geometrically_certified_error for vacuous or dksc curves.
struct GeometricErgodicityCertificate {
    double m0 = 0.0;
    double t = 0.0;
};

GeometricErgodicityCertificate certificate_from_curve(const BoundCurve& curve);

// One incumbent improvement during a parameter search.
struct SearchTraceRow {
    int stage = 0;
    double r = 0.0;
    double gamma = 0.0;
    double w = 0.0;
    double epsilon = 0.0;
    long n_star = 0;
    double bound_at_n_star = 0.0;
};

struct GridSearchResult {
    RosenthalInputs best;
    long n_star = 0;
    double bound_at_n_star = 0.0;
    BoundCurve curve;
    std::vector<SearchTraceRow> trace;
};

// Exhaustive search of the supplied grids for the (r, gamma, w) triple
// minimizing (n_star, bound at n_star, r, gamma, w) lexicographically.
// epsilon is recomputed per w from the gaussian minorization; for the other
// families pass user_epsilon > 0 (a minorization mass established by other
// means), which is used for every w.  gamma values must lie in [ch, 1)
// (invalid_rate_error); infeasible w are skipped; if no cell yields a
// finite n_star an infeasible_search_error is thrown.
GridSearchResult grid_search(const ModelSpec& model, double x0, double omega,
                             std::span<const double> r_grid,
                             std::span<const double> gamma_grid,
                             std::span<const double> w_grid,
                             double user_epsilon = 0.0);

// Default-grid search plus local refinement of r (to step 1e-4) and w
// around the incumbent.  Deterministic; the trace records incumbent
// improvements per stage.
GridSearchResult optimize_bound(const ModelSpec& model, double x0, double omega,
                                double user_epsilon = 0.0);

// Default grids.  r: 0.01..0.99 step 0.01.  gamma: 50 values from ch
// toward 1, ch + i*(1-ch)/50.  w: 200 log-spaced points in
// (2L/(1-gamma), 20].
std::vector<double> default_r_grid();
std::vector<double> default_gamma_grid(double ch);
std::vector<double> default_w_grid(double threshold);

} // namespace gibbscert
