#include <cmath>
#include <vector>

#include "doctest.h"
#include "gibbscert/errors.hpp"
#include "gibbscert/minorization.hpp"
#include "gibbscert/numeric.hpp"

using namespace gibbscert;

namespace {

const ModelSpec worked = ModelSpec::gaussian(0.0, 0.25, 0.25);

} // namespace

TEST_SUITE("minorization") {

TEST_CASE("autoregressive reduction of the gaussian scan") {
    const Ar1Law law = ar1_law(worked);
    CHECK(law.rho == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(law.offset == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(law.s2 == doctest::Approx(0.375).epsilon(1e-15));

    const Ar1Law general = ar1_law(ModelSpec::gaussian(3.0, 1.0, 2.0));
    CHECK(general.rho == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(general.offset == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(general.s2 == doctest::Approx(5.0 / 3.0).epsilon(1e-15));

    CHECK_THROWS_AS(ar1_law(ModelSpec::beta_binomial(2, 1.0, 1.0)),
                    not_gaussian_error);
}

TEST_CASE("transition density closed form") {
    const Ar1Law law = ar1_law(worked);
    // k_x(y) = sqrt(4/(3 pi)) exp(-(4/3)(y - x/2)^2) for this model.
    const double norm = 0.65147001587055989545; // sqrt(4/(3 pi))
    CHECK(transition_density(law, 1.0, 0.5) == doctest::Approx(norm).epsilon(1e-12));
    const double x = 1.0;
    const double y = 0.3;
    const double direct = norm * std::exp(-(4.0 / 3.0) * (y - x / 2.0) * (y - x / 2.0));
    CHECK(transition_density(law, x, y) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(transition_density(law, x, y) ==
          doctest::Approx(normal_pdf(y, 0.5, 0.375)).epsilon(1e-15));
}

TEST_CASE("overlap mass matches the closed form") {
    const Ar1Law law = ar1_law(worked);
    // epsilon = 2 Phi(-rho sqrt(w) / s); 60-digit references.
    const MinorizationCertificate a = build_minorization(law, 0.0, 2.203030);
    CHECK(a.epsilon == doctest::Approx(0.22555302247010686).epsilon(1e-12));
    const MinorizationCertificate b = build_minorization(law, 0.0, 3.0);
    CHECK(b.epsilon == doctest::Approx(0.15729920705028513).epsilon(1e-12));
    CHECK(a.epsilon ==
          doctest::Approx(2.0 * normal_cdf(-std::sqrt(2.0 * 2.203030 / 3.0)))
              .epsilon(1e-15));
}

TEST_CASE("overlap mass decreases as the small set grows") {
    const Ar1Law law = ar1_law(worked);
    double prev = 1.0;
    for (double w = 0.25; w <= 16.0; w *= 2.0) {
        const double eps = build_minorization(law, 0.0, w).epsilon;
        CHECK(eps > 0.0);
        CHECK(eps < prev);
        prev = eps;
    }
}

TEST_CASE("residual envelope integrates to epsilon and q to one") {
    const Ar1Law law = ar1_law(worked);
    const MinorizationCertificate cert = build_minorization(law, 0.0, 2.203030);
    const double s = std::sqrt(cert.s2);
    const double kink = cert.offset + cert.rho * cert.u; // fold point of |.|
    const double reach = 12.0 * s + cert.rho * std::sqrt(cert.w);
    const double mass =
        adaptive_simpson([&](double y) { return cert.residual_density(y); },
                         kink - reach, kink, 1e-13) +
        adaptive_simpson([&](double y) { return cert.residual_density(y); }, kink,
                         kink + reach, 1e-13);
    CHECK(mass == doctest::Approx(cert.epsilon).epsilon(1e-10));
    const double q_mass =
        adaptive_simpson([&](double y) { return cert.q_density(y); }, kink - reach,
                         kink, 1e-13) +
        adaptive_simpson([&](double y) { return cert.q_density(y); }, kink,
                         kink + reach, 1e-13);
    CHECK(q_mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("small set radius validation") {
    const Ar1Law law = ar1_law(worked);
    CHECK_THROWS_AS(build_minorization(law, 0.0, 0.0), invalid_small_set_error);
    CHECK_THROWS_AS(build_minorization(law, 0.0, -1.0), invalid_small_set_error);
}

TEST_CASE("domination holds on the small set with boundary equality") {
    const Ar1Law law = ar1_law(worked);
    const double w = 2.203030;
    const MinorizationCertificate cert = build_minorization(law, 0.0, w);
    const double radius = std::sqrt(w);
    std::vector<double> xs;
    for (int i = 0; i <= 20; ++i) {
        xs.push_back(-radius + 2.0 * radius * static_cast<double>(i) / 20.0);
    }
    std::vector<double> ys;
    for (int i = 0; i <= 80; ++i) {
        ys.push_back(-6.0 + 12.0 * static_cast<double>(i) / 80.0);
    }
    const DominationReport report = check_domination(cert, law, xs, ys);
    CHECK(report.worst_margin >= -1e-12);
    CHECK(report.worst_margin <= 1e-6); // the envelope is tight, not slack

    // At the right edge of the set, the envelope equals the density on the
    // opposite half-line exactly.
    for (double y : {-3.0, -1.0, -0.25, 0.0}) {
        const double k = transition_density(law, radius, y);
        const double g = cert.residual_density(y);
        CHECK(g == doctest::Approx(k).epsilon(1e-9));
    }
    // ... and sits strictly below it on the same side.
    CHECK(cert.residual_density(1.0) < transition_density(law, radius, 1.0));
}

TEST_CASE("a point outside the small set is rejected") {
    const Ar1Law law = ar1_law(worked);
    const MinorizationCertificate cert = build_minorization(law, 0.0, 1.0);
    const std::vector<double> xs = {0.0, 1.5}; // 1.5^2 > w = 1
    const std::vector<double> ys = {0.0};
    CHECK_THROWS_AS(check_domination(cert, law, xs, ys), grid_error);
}

TEST_CASE("memoryless scan dominates itself with full mass") {
    // rho = 0: the scan ignores x, epsilon is 1 and the envelope is the
    // transition density itself.
    const Ar1Law law{0.0, 0.0, 1.0};
    const MinorizationCertificate cert = build_minorization(law, 0.0, 5.0);
    CHECK(cert.epsilon == doctest::Approx(1.0).epsilon(1e-15));
    for (double y : {-2.0, 0.0, 1.0}) {
        CHECK(cert.residual_density(y) ==
              doctest::Approx(transition_density(law, 1.0, y)).epsilon(1e-15));
    }
}

} // TEST_SUITE
