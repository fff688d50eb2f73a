#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gibbscert/bounds.hpp"
#include "gibbscert/errors.hpp"
#include "gibbscert/minorization.hpp"
#include "gibbscert/models.hpp"

using namespace gibbscert;

namespace {

const ModelSpec worked = ModelSpec::gaussian(0.0, 0.25, 0.25);

// The hand-optimized operating point for the worked model.
constexpr double kR = 0.1895820;
constexpr double kGamma = 0.25;
constexpr double kW = 2.203030;

RosenthalInputs reference_inputs() {
    const double eps = build_minorization(ar1_law(worked), 0.0, kW).epsilon;
    return RosenthalInputs{kR, kGamma, 0.375, kW, eps, 0.0};
}

GridSearchResult search(const ModelSpec& model, double x0, double omega,
                        std::vector<double> rs, std::vector<double> gs,
                        std::vector<double> ws, double user_epsilon = 0.0) {
    return grid_search(model, x0, omega, rs, gs, ws, user_epsilon);
}

} // namespace

TEST_SUITE("bounds") {

TEST_CASE("rosenthal coefficients at the reference operating point") {
    const BoundCurve curve = rosenthal_curve(reference_inputs());
    CHECK(curve.form == BoundForm::rosenthal);
    CHECK_FALSE(curve.vacuous);
    // 60-digit references for base1 = (1-eps)^r, base2 = alpha^-(1-r) A^r.
    CHECK(curve.base1 == doctest::Approx(0.95269705433562578908).epsilon(1e-12));
    CHECK(curve.base2 == doctest::Approx(0.93287845232227331731).epsilon(1e-12));
    CHECK(curve.coeff == doctest::Approx(1.5).epsilon(1e-15)); // 1 + L/(1-gamma) + V0
    CHECK(curve.value(0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(curve.value(1) ==
          doctest::Approx(curve.base1 + curve.coeff * curve.base2).epsilon(1e-15));
    CHECK(curve.value(-1) == std::numeric_limits<double>::infinity());
}

TEST_CASE("rosenthal curve reaches the target at the published step count") {
    const BoundCurve curve = rosenthal_curve(reference_inputs());
    CHECK(curve.value(98) == doctest::Approx(0.010316660026968638).epsilon(1e-12));
    CHECK(curve.value(99) == doctest::Approx(0.0097958405526657931).epsilon(1e-12));
    CHECK(solve_n_star(curve, 0.01) == 99);
}

TEST_CASE("rosenthal input validation") {
    RosenthalInputs in = reference_inputs();
    in.r = 0.0;
    CHECK_THROWS_AS(rosenthal_curve(in), std::invalid_argument);
    in = reference_inputs();
    in.r = 1.0;
    CHECK_THROWS_AS(rosenthal_curve(in), std::invalid_argument);
    in = reference_inputs();
    in.gamma = 1.0;
    CHECK_THROWS_AS(rosenthal_curve(in), invalid_rate_error);
    in = reference_inputs();
    in.gamma = 0.0;
    CHECK_THROWS_AS(rosenthal_curve(in), invalid_rate_error);
    in = reference_inputs();
    in.epsilon = 0.0;
    CHECK_THROWS_AS(rosenthal_curve(in), std::invalid_argument);
    in = reference_inputs();
    in.w = -1.0;
    CHECK_THROWS_AS(rosenthal_curve(in), invalid_small_set_error);
    // w must exceed 2L/(1-gamma) = 1 for the split-chain argument to bite.
    in = reference_inputs();
    in.w = 1.0;
    CHECK_THROWS_AS(rosenthal_curve(in), small_set_too_small_error);
    in = reference_inputs();
    in.w = 0.5;
    CHECK_THROWS_AS(rosenthal_curve(in), small_set_too_small_error);
}

TEST_CASE("vacuous parameter choices are flagged, not hidden") {
    RosenthalInputs in = reference_inputs();
    in.r = 0.9;
    in.gamma = 0.9;
    in.w = 19.0;
    in.epsilon = build_minorization(ar1_law(worked), 0.0, in.w).epsilon;
    const BoundCurve curve = rosenthal_curve(in);
    CHECK(curve.vacuous);
    CHECK(curve.base2 >= 1.0);
    CHECK(curve.value(5) > 1.0);
    CHECK_THROWS_AS(solve_n_star(curve, 0.01), no_solution_error);
}

TEST_CASE("closed-form gaussian bound applicability") {
    CHECK_NOTHROW(dksc_curve(0.0, worked));
    CHECK_THROWS_AS(dksc_curve(0.0, ModelSpec::gaussian(0.1, 0.25, 0.25)),
                    inapplicable_bound_error);
    CHECK_THROWS_AS(dksc_curve(0.0, ModelSpec::gaussian(0.0, 0.2, 0.3)),
                    inapplicable_bound_error);
    CHECK_THROWS_AS(dksc_curve(0.0, ModelSpec::gaussian(0.0, 1.0, 1.0)),
                    inapplicable_bound_error);
    CHECK_THROWS_AS(dksc_curve(0.0, ModelSpec::beta_binomial(2, 1.0, 1.0)),
                    inapplicable_bound_error);
}

TEST_CASE("closed-form gaussian bound frozen values from the center") {
    const BoundCurve curve = dksc_curve(0.0, worked);
    CHECK(curve.form == BoundForm::dksc);
    CHECK(curve.value(1) == doctest::Approx(0.090547720828086698).epsilon(1e-12));
    CHECK(curve.value(2) == doctest::Approx(0.022129537592543502).epsilon(1e-12));
    CHECK(curve.value(3) == doctest::Approx(0.0055247775699623406).epsilon(1e-12));
    CHECK(curve.value(4) == doctest::Approx(0.0013810758346169489).epsilon(1e-12));
    CHECK(curve.value(6) == doctest::Approx(8.6316747679640665e-5).epsilon(1e-12));
    CHECK(curve.value(10) == doctest::Approx(3.3717478808726725e-7).epsilon(1e-12));
    CHECK(solve_n_star(curve, 0.01) == 3);
    CHECK(curve.value(2) > 0.01);
    CHECK(curve.value(0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("closed-form bound stays positive deep into the tail") {
    // A naive evaluation of the chi-square identity rounds to exactly zero
    // near l = 14, which would falsely undercut the exact distance.
    const BoundCurve curve = dksc_curve(0.0, worked);
    CHECK(curve.value(14) == doctest::Approx(1.3170890159654385e-9).epsilon(1e-12));
    CHECK(curve.value(20) == doctest::Approx(3.2155493553843713e-13).epsilon(1e-12));
    CHECK(curve.value(50) > 0.0);
    for (int l = 1; l < 60; ++l) {
        CHECK(curve.value(l + 1) < curve.value(l));
    }
}

TEST_CASE("closed-form bound away from the center") {
    const BoundCurve curve = dksc_curve(1.0, worked);
    // Independent evaluation of the chi-square contraction at l = 1, where
    // naive arithmetic is still exact.
    const double a = 1.0 * std::exp2(-1.0) / (1.0 + 0.25);
    const double direct =
        0.5 * std::sqrt(std::exp(a) / std::sqrt(1.0 - std::exp2(-4.0)) - 1.0);
    CHECK(curve.value(1) == doctest::Approx(direct).epsilon(1e-12));
    for (int l = 1; l < 40; ++l) {
        CHECK(curve.value(l + 1) < curve.value(l));
    }
}

TEST_CASE("burn-in solver consistency") {
    const BoundCurve ros = rosenthal_curve(reference_inputs());
    for (double omega : {0.3, 0.1, 0.01, 0.001, 1e-6}) {
        const long n = solve_n_star(ros, omega);
        CHECK(n >= 1);
        CHECK(ros.value(n) <= omega);
        if (n > 1) {
            CHECK(ros.value(n - 1) > omega);
        }
    }
    const BoundCurve dksc = dksc_curve(0.0, worked);
    CHECK(solve_n_star(dksc, 0.5) == 1); // already below the target at l = 1
    CHECK_THROWS_AS(solve_n_star(ros, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_n_star(ros, 1.0), std::invalid_argument);
}

TEST_CASE("burn-in solver reports an honest failure") {
    // A nearly-flat curve cannot reach the target within the step cap.
    RosenthalInputs in = reference_inputs();
    in.epsilon = 1e-9;
    const BoundCurve curve = rosenthal_curve(in);
    CHECK_FALSE(curve.vacuous);
    CHECK_THROWS_AS(solve_n_star(curve, 0.01), no_solution_error);
}

TEST_CASE("geometric ergodicity envelope") {
    const BoundCurve curve = rosenthal_curve(reference_inputs());
    const GeometricErgodicityCertificate cert = certificate_from_curve(curve);
    CHECK(cert.m0 == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(cert.t == doctest::Approx(0.95269705433562578908).epsilon(1e-12));
    for (int l = 0; l <= 200; ++l) {
        CHECK(cert.m0 * std::pow(cert.t, l) >= curve.value(l) * (1.0 - 1e-12));
    }
    CHECK_THROWS_AS(certificate_from_curve(dksc_curve(0.0, worked)),
                    not_geometrically_certified_error);
    RosenthalInputs bad = reference_inputs();
    bad.r = 0.9;
    bad.gamma = 0.9;
    bad.w = 19.0;
    bad.epsilon = build_minorization(ar1_law(worked), 0.0, bad.w).epsilon;
    CHECK_THROWS_AS(certificate_from_curve(rosenthal_curve(bad)),
                    not_geometrically_certified_error);
}

TEST_CASE("single-cell search reproduces the reference point") {
    const GridSearchResult res = search(worked, 0.0, 0.01, {kR}, {kGamma}, {kW});
    CHECK(res.best.r == doctest::Approx(kR).epsilon(1e-15));
    CHECK(res.best.gamma == doctest::Approx(kGamma).epsilon(1e-15));
    CHECK(res.best.w == doctest::Approx(kW).epsilon(1e-15));
    CHECK(res.n_star == 99);
    CHECK(res.curve.base1 == doctest::Approx(0.95269705433562578908).epsilon(1e-12));
    CHECK(res.curve.base2 == doctest::Approx(0.93287845232227331731).epsilon(1e-12));
    CHECK(res.trace.size() == 1);
}

TEST_CASE("a grid containing the reference point does at least as well") {
    const GridSearchResult res = search(worked, 0.0, 0.01, {0.1, kR, 0.3},
                                        {kGamma, 0.5}, {1.5, kW, 4.0});
    CHECK(res.n_star <= 99);
    CHECK(res.trace.size() >= 1);
    // Every trace entry must improve on its predecessor.
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
        const bool better =
            res.trace[i].n_star < res.trace[i - 1].n_star ||
            (res.trace[i].n_star == res.trace[i - 1].n_star &&
             res.trace[i].bound_at_n_star < res.trace[i - 1].bound_at_n_star);
        CHECK(better);
    }
}

TEST_CASE("tie-breaking picks the winner a pairwise comparison would") {
    const GridSearchResult combined =
        search(worked, 0.0, 0.01, {kR}, {kGamma}, {kW, 2.31});
    const GridSearchResult lone_a = search(worked, 0.0, 0.01, {kR}, {kGamma}, {kW});
    const GridSearchResult lone_b = search(worked, 0.0, 0.01, {kR}, {kGamma}, {2.31});
    const GridSearchResult& expected =
        (lone_a.n_star != lone_b.n_star)
            ? (lone_a.n_star < lone_b.n_star ? lone_a : lone_b)
            : (lone_a.bound_at_n_star <= lone_b.bound_at_n_star ? lone_a : lone_b);
    CHECK(combined.n_star == expected.n_star);
    CHECK(combined.best.w == doctest::Approx(expected.best.w).epsilon(1e-15));
    CHECK(combined.bound_at_n_star ==
          doctest::Approx(expected.bound_at_n_star).epsilon(1e-15));
}

TEST_CASE("search grid validation") {
    CHECK_THROWS_AS(search(worked, 0.0, 0.01, {}, {kGamma}, {kW}),
                    infeasible_search_error);
    CHECK_THROWS_AS(search(worked, 0.0, 0.01, {kR}, {0.1}, {kW}),
                    invalid_rate_error); // below the drift floor ch = 0.25
    CHECK_THROWS_AS(search(worked, 0.0, 0.01, {kR}, {1.0}, {kW}),
                    invalid_rate_error);
    CHECK_THROWS_AS(search(worked, 0.0, 0.01, {kR}, {kGamma}, {-1.0}),
                    invalid_small_set_error);
    CHECK_THROWS_AS(search(worked, 0.0, 0.01, {1.5}, {kGamma}, {kW}),
                    std::invalid_argument);
    // Feasible shapes, but every cell violates w > 2L/(1-gamma).
    CHECK_THROWS_AS(search(worked, 0.0, 0.01, {kR}, {kGamma}, {0.5, 0.9}),
                    infeasible_search_error);
}

TEST_CASE("non-gaussian families need a caller-supplied overlap mass") {
    const ModelSpec bb = ModelSpec::beta_binomial(1, 1.0, 1.0);
    CHECK_THROWS_AS(search(bb, 0.0, 0.01, {0.2}, {0.2}, {2.0}), not_gaussian_error);
    // r = 0.2 keeps base2 = alpha^-(1-r) A^r below one at this (gamma, w).
    const GridSearchResult res = search(bb, 0.0, 0.01, {0.2}, {0.2}, {2.0}, 0.3);
    CHECK(res.best.epsilon == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(res.n_star >= 1);
    CHECK(res.curve.value(res.n_star) <= 0.01);
}

TEST_CASE("default grids honour the feasibility constraints") {
    const std::vector<double> rs = default_r_grid();
    CHECK(rs.size() == 99);
    CHECK(rs.front() > 0.0);
    CHECK(rs.back() < 1.0);
    const std::vector<double> gs = default_gamma_grid(0.25);
    CHECK(gs.size() == 50);
    CHECK(gs.front() >= 0.25);
    CHECK(gs.back() < 1.0);
    const std::vector<double> ws = default_w_grid(1.0);
    CHECK(ws.size() == 200);
    for (double w : ws) {
        CHECK(w > 1.0);
        CHECK(w <= 20.0 * (1.0 + 1e-12));
    }
}

TEST_CASE("staged refinement beats or matches the published operating point") {
    const GridSearchResult res = optimize_bound(worked, 0.0, 0.01);
    CHECK(res.n_star <= 99);
    CHECK(res.curve.value(res.n_star) <= 0.01);
    CHECK(res.trace.size() >= 1);
    // Deterministic: a second run reproduces the same winner and trace.
    const GridSearchResult again = optimize_bound(worked, 0.0, 0.01);
    CHECK(again.n_star == res.n_star);
    CHECK(again.best.r == doctest::Approx(res.best.r).epsilon(1e-15));
    CHECK(again.best.gamma == doctest::Approx(res.best.gamma).epsilon(1e-15));
    CHECK(again.best.w == doctest::Approx(res.best.w).epsilon(1e-15));
    CHECK(again.trace.size() == res.trace.size());
}

} // TEST_SUITE
