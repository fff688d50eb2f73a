#include "gibbscert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gibbscert/minorization.hpp"
#include "gibbscert/numeric.hpp"

namespace gibbscert {

namespace {

void require_law(const GaussianLaw& law, const char* who) {
    if (!std::isfinite(law.mean) || !std::isfinite(law.variance) || law.variance < 0.0) {
        std::ostringstream msg;
        msg << who << ": law needs a finite mean and nonnegative variance; got mean="
            << law.mean << " variance=" << law.variance;
        throw std::invalid_argument(msg.str());
    }
}

// Density crossing points of two distinct continuous normal laws, ordered.
// Two crossings when the variances differ, one when only the means do.
std::vector<double> density_crossings(const GaussianLaw& p, const GaussianLaw& q) {
    const double v1 = p.variance;
    const double v2 = q.variance;
    const double m1 = p.mean;
    const double m2 = q.mean;
    if (v1 == v2) {
        if (m1 == m2) {
            return {};
        }
        return {0.5 * (m1 + m2)};
    }
    // log p - log q is quadratic in y with coefficients below; the shared
    // 1/(v1 v2) scaling is kept inside the differences so nearby variances
    // lose no precision (v1 - v2 is exact for close doubles).
    const double a2 = (v1 - v2) / (v1 * v2);
    const double b2 = -2.0 * (m2 * v1 - m1 * v2) / (v1 * v2);
    const double c2 = (m2 * m2 * v1 - m1 * m1 * v2) / (v1 * v2) + std::log(v2 / v1);
    const double disc = b2 * b2 - 4.0 * a2 * c2;
    if (!(disc > 0.0)) {
        // Distinct normal densities always cross twice when variances
        // differ; a nonpositive discriminant can only be roundoff from
        // near-identical laws.  Treat as no crossing (distance ~ 0).
        return {};
    }
    const double root = std::sqrt(disc);
    const double qq = -0.5 * (b2 + std::copysign(root, b2));
    double y1 = qq / a2;
    double y2 = c2 / qq;
    if (y1 > y2) {
        std::swap(y1, y2);
    }
    return {y1, y2};
}

} // namespace

double exact_tv(const GaussianLaw& p, const GaussianLaw& q) {
    require_law(p, "exact_tv");
    require_law(q, "exact_tv");
    const bool p_point = p.variance == 0.0;
    const bool q_point = q.variance == 0.0;
    if (p_point && q_point) {
        return p.mean == q.mean ? 0.0 : 1.0;
    }
    if (p_point || q_point) {
        return 1.0; // a point mass is singular to any continuous law
    }
    if (p.variance == q.variance) {
        if (p.mean == q.mean) {
            return 0.0;
        }
        // Equal variances: one crossing at the midpoint, and the distance
        // reduces to erf of the standardized half-gap (erf keeps full
        // precision where 2*Phi - 1 would cancel).
        const double z = std::abs(p.mean - q.mean) / (2.0 * std::sqrt(p.variance));
        return std::erf(z / std::sqrt(2.0));
    }
    const std::vector<double> cross = density_crossings(p, q);
    if (cross.empty()) {
        return 0.0;
    }
    const double y1 = cross.front();
    const double y2 = cross.back();
    const double mass_p = normal_cdf(y2, p.mean, p.variance) -
                          normal_cdf(y1, p.mean, p.variance);
    const double mass_q = normal_cdf(y2, q.mean, q.variance) -
                          normal_cdf(y1, q.mean, q.variance);
    return std::abs(mass_p - mass_q);
}

double exact_tv_quadrature(const GaussianLaw& p, const GaussianLaw& q, double tol) {
    require_law(p, "exact_tv_quadrature");
    require_law(q, "exact_tv_quadrature");
    if (p.variance == 0.0 || q.variance == 0.0) {
        throw std::invalid_argument(
            "exact_tv_quadrature: both laws must be continuous");
    }
    const double s1 = std::sqrt(p.variance);
    const double s2 = std::sqrt(q.variance);
    // 12 standard deviations hold all mass to ~1e-33.
    double lo = std::min(p.mean - 12.0 * s1, q.mean - 12.0 * s2);
    double hi = std::max(p.mean + 12.0 * s1, q.mean + 12.0 * s2);
    std::vector<double> knots = {lo};
    for (const double c : density_crossings(p, q)) {
        if (c > lo && c < hi) {
            knots.push_back(c); // split panels at the |.| kinks
        }
    }
    knots.push_back(hi);
    const auto integrand = [&](double y) {
        return std::abs(normal_pdf(y, p.mean, p.variance) -
                        normal_pdf(y, q.mean, q.variance));
    };
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        acc += adaptive_simpson(integrand, knots[i], knots[i + 1],
                                tol / static_cast<double>(knots.size()));
    }
    return 0.5 * acc;
}

LStepLaw exact_l_step_law(const ModelSpec& model, double x0, long l) {
    if (model.family != Family::gaussian) {
        throw inapplicable_oracle_error(
            "the closed-form multi-scan law exists for the gaussian family only; got " +
            model.name());
    }
    if (l < 0) {
        throw std::invalid_argument("exact_l_step_law: need l >= 0");
    }
    require_in_support(model, x0);
    LStepLaw law;
    law.l = l;
    if (l == 0) {
        law.mean = x0;
        law.variance = 0.0;
        return law;
    }
    const Ar1Law scan = ar1_law(model);
    const double rho_l = std::pow(scan.rho, static_cast<double>(l));
    law.mean = rho_l * x0 + scan.offset * (1.0 - rho_l) / (1.0 - scan.rho);
    law.variance = scan.s2 * (1.0 - rho_l * rho_l) / (1.0 - scan.rho * scan.rho);
    return law;
}

ChainPath simulate_chain(const ModelSpec& model, double x0, std::size_t length,
                         std::uint64_t seed) {
    require_in_support(model, x0);
    ChainPath path;
    path.x0 = x0;
    path.seed = seed;
    path.thetas.reserve(length);
    path.xs.reserve(length);
    Rng rng(seed);
    double x = x0;
    for (std::size_t t = 0; t < length; ++t) {
        const ConditionalDraw draw = sample_conditionals(model, x, rng);
        path.thetas.push_back(draw.theta);
        path.xs.push_back(draw.x_next);
        x = draw.x_next;
    }
    return path;
}

std::vector<double> ensemble_at_step(const ModelSpec& model, double x0, long l,
                                     std::size_t replicates, std::uint64_t seed) {
    if (l < 0) {
        throw std::invalid_argument("ensemble_at_step: need l >= 0");
    }
    if (replicates == 0) {
        throw std::invalid_argument("ensemble_at_step: need replicates >= 1");
    }
    require_in_support(model, x0);
    std::vector<double> out;
    out.reserve(replicates);
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        Rng rng = Rng::for_replicate(seed, rep);
        double x = x0;
        for (long step = 0; step < l; ++step) {
            x = sample_conditionals(model, x, rng).x_next;
        }
        out.push_back(x);
    }
    return out;
}

namespace {

// Histogram TV against a continuous reference: compare per-bin masses over
// the sample range and charge the reference mass outside the range in full.
double histogram_tv(std::span<const double> ensemble, const MarginalLaw& reference,
                    double mn, double mx, std::size_t bins) {
    const double n = static_cast<double>(ensemble.size());
    std::vector<double> counts(bins, 0.0);
    const double width = (mx - mn) / static_cast<double>(bins);
    for (const double v : ensemble) {
        auto idx = static_cast<std::size_t>((v - mn) / width);
        counts[std::min(idx, bins - 1)] += 1.0;
    }
    const auto cdf = [&](double x) {
        return normal_cdf(x, reference.mean, reference.variance);
    };
    double acc = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double e0 = mn + width * static_cast<double>(b);
        const double e1 = b + 1 == bins ? mx : mn + width * static_cast<double>(b + 1);
        acc += std::abs(counts[b] / n - (cdf(e1) - cdf(e0)));
    }
    const double outside = cdf(mn) + (1.0 - cdf(mx));
    return 0.5 * (acc + outside);
}

TvEstimate discrete_tv(std::span<const double> ensemble, const MarginalLaw& reference) {
    const double n = static_cast<double>(ensemble.size());
    std::map<long, double> counts;
    double off_support = 0.0;
    long k_max = 0;
    for (const double v : ensemble) {
        if (v < 0.0 || v != std::floor(v)) {
            off_support += 1.0; // impossible under the reference: full weight
            continue;
        }
        const long k = static_cast<long>(v);
        counts[k] += 1.0;
        k_max = std::max(k_max, k);
    }
    constexpr long support_cap = 2'000'000;
    constexpr double tail_tol = 1e-12;
    double acc = 0.0;
    double cum = 0.0;
    long k = 0;
    for (; k <= k_max || (cum < 1.0 - tail_tol && k <= support_cap); ++k) {
        const double pk = reference.density(static_cast<double>(k));
        const auto it = counts.find(k);
        const double freq = it == counts.end() ? 0.0 : it->second / n;
        acc += std::abs(freq - pk);
        cum += pk;
    }
    // Any reference mass beyond the scanned support carries no sample mass.
    acc += std::max(1.0 - cum, 0.0) + off_support / n;

    TvEstimate est;
    est.estimate = 0.5 * acc;
    est.bins = static_cast<std::size_t>(k);
    est.low_replicates = ensemble.size() < 10'000;
    return est;
}

std::size_t freedman_diaconis_bins(std::vector<double> sorted, double mn, double mx) {
    const std::size_t n = sorted.size();
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return i + 1 < n ? sorted[i] * (1.0 - frac) + sorted[i + 1] * frac : sorted[i];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double h = 2.0 * iqr * std::pow(static_cast<double>(n), -1.0 / 3.0);
    std::size_t bins;
    if (h <= 0.0) {
        // Degenerate interquartile range: fall back to a log2 rule.
        bins = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
    } else {
        bins = static_cast<std::size_t>(std::ceil((mx - mn) / h));
    }
    return std::clamp<std::size_t>(bins, 4, 8192);
}

} // namespace

TvEstimate empirical_tv(std::span<const double> ensemble, const MarginalLaw& reference,
                        std::size_t bins) {
    if (ensemble.empty()) {
        throw std::invalid_argument("empirical_tv: empty ensemble");
    }
    for (const double v : ensemble) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("empirical_tv: ensemble has nonfinite values");
        }
    }
    if (reference.discrete()) {
        return discrete_tv(ensemble, reference);
    }

    const auto [mn_it, mx_it] = std::minmax_element(ensemble.begin(), ensemble.end());
    const double mn = *mn_it;
    const double mx = *mx_it;
    TvEstimate est;
    est.low_replicates = ensemble.size() < 10'000;
    if (mn == mx) {
        // A degenerate ensemble is singular to a continuous reference.
        est.estimate = 1.0;
        est.bins = 1;
        return est;
    }
    if (bins == 0) {
        std::vector<double> sorted(ensemble.begin(), ensemble.end());
        std::sort(sorted.begin(), sorted.end());
        bins = freedman_diaconis_bins(std::move(sorted), mn, mx);
    }
    est.bins = bins;
    est.estimate = histogram_tv(ensemble, reference, mn, mx, bins);
    // The histogram estimate is binning-biased; report how it moves under
    // half and double resolution so consumers can see the sensitivity.
    for (const std::size_t b : {std::max<std::size_t>(bins / 2, 1), bins, bins * 2}) {
        est.sensitivity.emplace_back(b, b == bins ? est.estimate
                                                  : histogram_tv(ensemble, reference,
                                                                 mn, mx, b));
    }
    return est;
}

} // namespace gibbscert
