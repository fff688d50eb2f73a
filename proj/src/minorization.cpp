#include "gibbscert/minorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gibbscert/errors.hpp"
#include "gibbscert/numeric.hpp"

namespace gibbscert {

Ar1Law ar1_law(const ModelSpec& model) {
    if (model.family != Family::gaussian) {
        throw not_gaussian_error("the autoregressive scan law applies to the gaussian "
                                 "family only; got " +
                                 model.name());
    }
    const double denom = model.sigma2 + model.tau2;
    Ar1Law law;
    law.rho = model.tau2 / denom;
    law.offset = model.sigma2 * model.nu / denom;
    // Noise = likelihood noise plus the posterior uncertainty of theta.
    law.s2 = model.sigma2 + model.sigma2 * model.tau2 / denom;
    return law;
}

double transition_density(const Ar1Law& law, double x, double y) {
    return normal_pdf(y, law.rho * x + law.offset, law.s2);
}

double MinorizationCertificate::residual_density(double y) const {
    // Over x in C the scan means sweep [rho*(u - sqrt(w)), rho*(u + sqrt(w))]
    // (plus offset); the smallest density at y uses the far end, which sits
    // |y - offset - rho*u| + rho*sqrt(w) away from y.
    const double s = std::sqrt(s2);
    const double t = std::abs(y - offset - rho * u) + rho * std::sqrt(w);
    return std::exp(-0.5 * t * t / s2) / (s * std::sqrt(2.0 * pi));
}

double MinorizationCertificate::q_density(double y) const {
    return residual_density(y) / epsilon;
}

MinorizationCertificate build_minorization(const Ar1Law& law, double u, double w) {
    if (!(w > 0.0) || !std::isfinite(w)) {
        std::ostringstream msg;
        msg << "small set needs a positive squared radius; got w=" << w;
        throw invalid_small_set_error(msg.str());
    }
    if (!(law.s2 > 0.0) || law.rho < 0.0) {
        throw std::invalid_argument(
            "build_minorization: scan law needs s2 > 0 and rho >= 0");
    }
    MinorizationCertificate cert;
    cert.u = u;
    cert.w = w;
    cert.rho = law.rho;
    cert.offset = law.offset;
    cert.s2 = law.s2;
    // Total mass of the residual envelope: both folded-normal tails beyond
    // rho*sqrt(w) of the centred scan noise.
    cert.epsilon = 2.0 * normal_cdf(-law.rho * std::sqrt(w) / std::sqrt(law.s2));
    return cert;
}

DominationReport check_domination(const MinorizationCertificate& cert, const Ar1Law& law,
                                  std::span<const double> x_grid,
                                  std::span<const double> y_grid) {
    DominationReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    // Roundoff slack so that an endpoint like u + sqrt(w) computed in
    // floating point still counts as inside the set.
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, cert.w);
    bool any = false;
    for (const double x : x_grid) {
        const double dev = (x - cert.u) * (x - cert.u);
        if (dev > cert.w + slack) {
            std::ostringstream msg;
            msg << "domination grid point x=" << x << " lies outside the small set "
                << "((x-u)^2=" << dev << " > w=" << cert.w << ")";
            throw grid_error(msg.str());
        }
        for (const double y : y_grid) {
            const double margin = transition_density(law, x, y) -
                                  cert.residual_density(y);
            if (margin < report.worst_margin) {
                report.worst_margin = margin;
                report.argmin_x = x;
                report.argmin_y = y;
            }
            any = true;
        }
    }
    if (!any) {
        throw grid_error("check_domination: empty grid");
    }
    return report;
}

} // namespace gibbscert
