#include "gibbscert/drift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gibbscert/errors.hpp"
#include "gibbscert/numeric.hpp"

namespace gibbscert {

DriftCertificate build_drift(const MomentConstants& mc, double gamma) {
    const double ch = mc.ch();
    if (!(ch < 1.0)) {
        std::ostringstream msg;
        msg << "quadratic drift requires ch < 1; got ch=" << ch
            << " (restrict the hyperparameters of this family)";
        throw family_restriction_error(msg.str());
    }
    const double denom = mc.a * mc.f - ch;
    const double u = (mc.d * mc.f + mc.c * mc.j) / (2.0 * denom);
    if (denom == 0.0 || !std::isfinite(u)) {
        std::ostringstream msg;
        msg << "drift center undefined: af=" << mc.a * mc.f << " equals ch=" << ch;
        throw degenerate_center_error(msg.str());
    }
    if (!(gamma >= ch) || !(gamma < 1.0)) {
        std::ostringstream msg;
        msg << "drift rate gamma must lie in [ch, 1); got gamma=" << gamma
            << " with ch=" << ch;
        throw invalid_rate_error(msg.str());
    }
    DriftCertificate cert;
    cert.u = u;
    cert.ch = ch;
    cert.gamma = gamma;
    // Additive constant of the exact identity E[V(X_1)|x] = ch V(x) + L,
    // obtained by expanding E[(X_1 - u)^2 | x] through both conditional
    // moment identities and collecting the x-free terms.
    cert.L = mc.c * mc.k + mc.g * mc.d + mc.e + u * u * (1.0 - ch) -
             2.0 * u * (mc.g * mc.a + mc.b);
    return cert;
}

DriftCertificate build_drift(const MomentConstants& mc) {
    return build_drift(mc, mc.ch());
}

namespace {

// Exact scan expectation for the beta_binomial family: X_1 | X_0 = x is
// beta-binomial with posterior-updated shapes, and its support is finite.
double exact_scan_expectation(const ModelSpec& model, const DriftCertificate& cert,
                              double x) {
    const double n = static_cast<double>(model.trials);
    double acc = 0.0;
    for (long y = 0; y <= model.trials; ++y) {
        const double p =
            beta_binomial_pmf(y, model.trials, model.alpha + x, model.beta + n - x);
        acc += p * cert.V(static_cast<double>(y));
    }
    return acc;
}

} // namespace

std::vector<DriftCheckRow> verify_drift_identity(const ModelSpec& model,
                                                 const DriftCertificate& cert,
                                                 std::span<const double> x_grid,
                                                 std::size_t n_samples,
                                                 std::uint64_t seed) {
    if (n_samples < 1000) {
        throw std::invalid_argument(
            "verify_drift_identity: need n_samples >= 1000 for a usable standard error");
    }
    std::vector<DriftCheckRow> rows;
    rows.reserve(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const double x = x_grid[i];
        require_in_support(model, x);
        DriftCheckRow row;
        row.x = x;
        row.predicted = cert.ch * cert.V(x) + cert.L;
        if (model.family == Family::beta_binomial) {
            row.estimate = exact_scan_expectation(model, cert, x);
            row.exact = true;
            rows.push_back(row);
            continue;
        }
        Rng rng = Rng::for_replicate(seed, i);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t s = 0; s < n_samples; ++s) {
            const double v = cert.V(sample_conditionals(model, x, rng).x_next);
            sum += v;
            sum_sq += v * v;
        }
        const double nd = static_cast<double>(n_samples);
        row.estimate = sum / nd;
        const double var = (sum_sq - nd * row.estimate * row.estimate) / (nd - 1.0);
        row.stderr_ = std::sqrt(std::max(var, 0.0) / nd);
        row.zscore = row.stderr_ > 0.0 ? (row.estimate - row.predicted) / row.stderr_
                                       : 0.0;
        rows.push_back(row);
    }
    return rows;
}

} // namespace gibbscert
