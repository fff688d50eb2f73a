#include "gibbscert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gibbscert/errors.hpp"
#include "gibbscert/minorization.hpp"

namespace gibbscert {

namespace {

constexpr long solve_cap = 1'000'000;

double dksc_value(double x, long l) {
    if (l < 1) {
        return std::numeric_limits<double>::infinity();
    }
    const double ld = static_cast<double>(l);
    // Mean shift term x^2 * 2^(1-2l) / (1 + 2^(-2l)) and variance-ratio term
    // 1/sqrt(1 - 2^(-4l)).  Combined through expm1/log1p: the naive
    // exp(.)/sqrt(.) - 1 cancels to exactly 0 once 2^(-4l) drops below the
    // double rounding threshold (l ~ 14), and this bound must stay above the
    // exact total variation distance, which is still ~1e-9 there.
    const double a = x * x * std::exp2(1.0 - 2.0 * ld) / (1.0 + std::exp2(-2.0 * ld));
    const double inner = std::expm1(a - 0.5 * std::log1p(-std::exp2(-4.0 * ld)));
    return 0.5 * std::sqrt(inner);
}

} // namespace

double BoundCurve::value(long l) const {
    if (form == BoundForm::dksc) {
        return dksc_value(x, l);
    }
    if (l < 0) {
        return std::numeric_limits<double>::infinity();
    }
    const double ld = static_cast<double>(l);
    return std::pow(base1, ld) + coeff * std::pow(base2, ld);
}

BoundCurve rosenthal_curve(const RosenthalInputs& in) {
    if (!(in.r > 0.0) || !(in.r < 1.0)) {
        std::ostringstream msg;
        msg << "split exponent r must lie in (0,1); got r=" << in.r;
        throw std::invalid_argument(msg.str());
    }
    if (!(in.gamma > 0.0) || !(in.gamma < 1.0)) {
        std::ostringstream msg;
        msg << "drift rate gamma must lie in (0,1); got gamma=" << in.gamma;
        throw invalid_rate_error(msg.str());
    }
    if (!(in.epsilon > 0.0) || !(in.epsilon <= 1.0)) {
        std::ostringstream msg;
        msg << "minorization mass epsilon must lie in (0,1]; got epsilon=" << in.epsilon;
        throw std::invalid_argument(msg.str());
    }
    if (!(in.v0 >= 0.0)) {
        throw std::invalid_argument("rosenthal_curve: V(x0) must be nonnegative");
    }
    if (!(in.w > 0.0)) {
        std::ostringstream msg;
        msg << "small set needs a positive squared radius; got w=" << in.w;
        throw invalid_small_set_error(msg.str());
    }
    const double threshold = 2.0 * in.L / (1.0 - in.gamma);
    if (!(in.w > threshold)) {
        std::ostringstream msg;
        msg << "small-set squared radius w=" << in.w
            << " must exceed 2L/(1-gamma)=" << threshold
            << " for the bound to contract";
        throw small_set_too_small_error(msg.str());
    }
    const double alpha = (1.0 + in.w) / (1.0 + 2.0 * in.L + in.gamma * in.w);
    const double big_a = 1.0 + 2.0 * (in.gamma * in.w + in.L);
    if (!(alpha > 0.0) || !(big_a > 0.0)) {
        throw std::invalid_argument(
            "rosenthal_curve: contraction ingredients are nonpositive (is L < -1/2?)");
    }
    BoundCurve curve;
    curve.form = BoundForm::rosenthal;
    curve.base1 = std::pow(1.0 - in.epsilon, in.r);
    curve.base2 = std::pow(alpha, in.r - 1.0) * std::pow(big_a, in.r);
    curve.coeff = 1.0 + in.L / (1.0 - in.gamma) + in.v0;
    curve.vacuous = !(curve.base2 < 1.0);
    return curve;
}

BoundCurve dksc_curve(double x, const ModelSpec& model) {
    // The closed form hard-codes the autoregression weight 1/2 (the powers
    // of 2) and a stationary variance of 1/2, i.e. the gaussian model with
    // prior mean 0 and sigma2 = tau2 = 1/4.  sigma2 + tau2 = 1/2 alone
    // would fix the stationary variance but not the weight, so equality of
    // the two variances is enforced as well.
    constexpr double tol = 1e-12;
    const bool applicable = model.family == Family::gaussian && model.nu == 0.0 &&
                            std::abs(model.sigma2 + model.tau2 - 0.5) <= tol &&
                            std::abs(model.sigma2 - model.tau2) <= tol;
    if (!applicable) {
        std::ostringstream msg;
        msg << "the closed-form chi-square bound applies only to the gaussian model "
               "with nu=0 and sigma2=tau2=1/4; got "
            << model.name();
        if (model.family == Family::gaussian) {
            msg << " (nu=" << model.nu << ", sigma2=" << model.sigma2
                << ", tau2=" << model.tau2 << ")";
        }
        throw inapplicable_bound_error(msg.str());
    }
    if (!std::isfinite(x)) {
        throw std::invalid_argument("dksc_curve: start point must be finite");
    }
    BoundCurve curve;
    curve.form = BoundForm::dksc;
    curve.x = x;
    return curve;
}

long solve_n_star(const BoundCurve& curve, double omega) {
    if (!(omega > 0.0) || !(omega < 1.0)) {
        std::ostringstream msg;
        msg << "target accuracy omega must lie in (0,1); got " << omega;
        throw std::invalid_argument(msg.str());
    }
    const auto fail = [&]() -> void {
        std::ostringstream msg;
        msg << "no scan count l <= " << solve_cap << " brings the bound below omega="
            << omega << " (";
        if (curve.form == BoundForm::rosenthal) {
            msg << "base1=" << curve.base1 << ", base2=" << curve.base2
                << ", coeff=" << curve.coeff;
            if (curve.vacuous) {
                msg << "; the curve is vacuous: base2 >= 1";
            }
        } else {
            msg << "dksc form, x=" << curve.x;
        }
        msg << ")";
        throw no_solution_error(msg.str());
    };

    // Exponential bracketing: find the first probe with curve(l) <= omega.
    long lo = 0; // curve(lo) > omega (l=0 is never a valid answer)
    long hi = -1;
    for (long probe = 1; probe <= solve_cap; probe = probe > solve_cap / 2
                                                        ? solve_cap + 1
                                                        : 2 * probe) {
        if (curve.value(probe) <= omega) {
            hi = probe;
            break;
        }
        lo = probe;
    }
    if (hi < 0) {
        if (curve.value(solve_cap) <= omega) {
            hi = solve_cap;
        } else {
            fail();
        }
    }
    // The curves used here decrease in l wherever they can reach omega, so
    // bisection on [lo, hi] pins the first crossing.
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (curve.value(mid) <= omega) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if (curve.value(hi) <= omega && (hi == 1 || curve.value(hi - 1) > omega)) {
        return hi;
    }
    // Non-monotone corner (possible only for pathological inputs): fall back
    // to a linear scan so the answer is still the smallest crossing.
    for (long l = 1; l <= solve_cap; ++l) {
        if (curve.value(l) <= omega) {
            return l;
        }
    }
    fail();
    return -1; // unreachable
}

GeometricErgodicityCertificate certificate_from_curve(const BoundCurve& curve) {
    if (curve.form != BoundForm::rosenthal) {
        throw not_geometrically_certified_error(
            "geometric envelopes are extracted from rosenthal-form curves only");
    }
    if (!(curve.base1 < 1.0) || !(curve.base2 < 1.0)) {
        std::ostringstream msg;
        msg << "curve does not certify geometric ergodicity: base1=" << curve.base1
            << ", base2=" << curve.base2 << " (both must be < 1)";
        throw not_geometrically_certified_error(msg.str());
    }
    GeometricErgodicityCertificate cert;
    cert.m0 = 1.0 + curve.coeff;
    cert.t = std::max(curve.base1, curve.base2);
    return cert;
}

std::vector<double> default_r_grid() {
    std::vector<double> r;
    r.reserve(99);
    for (int i = 1; i <= 99; ++i) {
        r.push_back(static_cast<double>(i) / 100.0);
    }
    return r;
}

std::vector<double> default_gamma_grid(double ch) {
    std::vector<double> g;
    g.reserve(50);
    for (int i = 0; i < 50; ++i) {
        g.push_back(ch + static_cast<double>(i) * (1.0 - ch) / 50.0);
    }
    return g;
}

std::vector<double> default_w_grid(double threshold) {
    constexpr double w_max = 20.0;
    constexpr int points = 200;
    // Log spacing needs a positive anchor; a zero threshold (L = 0) gets a
    // tiny one so the grid still sweeps several orders of magnitude.
    const double lb = std::max(threshold, 2e-7);
    std::vector<double> w;
    if (lb >= w_max) {
        return w; // no feasible radius below the default ceiling
    }
    w.reserve(points);
    const double factor = w_max / lb;
    for (int i = 1; i <= points; ++i) {
        w.push_back(lb * std::pow(factor, static_cast<double>(i) / points));
    }
    return w;
}

namespace {

// Supplies the minorization mass for a candidate small set: recomputed from
// the gaussian overlap when available, or a user-supplied constant mass for
// families whose minorization was established by other means.
class EpsilonSource {
public:
    EpsilonSource(const ModelSpec& model, double u, double user_epsilon) {
        if (user_epsilon != 0.0) {
            if (!(user_epsilon > 0.0) || !(user_epsilon <= 1.0)) {
                std::ostringstream msg;
                msg << "user-supplied epsilon must lie in (0,1]; got " << user_epsilon;
                throw std::invalid_argument(msg.str());
            }
            fixed_ = user_epsilon;
            return;
        }
        if (model.family != Family::gaussian) {
            throw not_gaussian_error(
                "no built-in minorization for the " + model.name() +
                " family; supply a user epsilon established by other means");
        }
        law_ = ar1_law(model);
        u_ = u;
    }

    double operator()(double w) const {
        if (fixed_ > 0.0) {
            return fixed_;
        }
        return build_minorization(law_, u_, w).epsilon;
    }

private:
    Ar1Law law_;
    double u_ = 0.0;
    double fixed_ = 0.0;
};

struct SearchState {
    bool found = false;
    long n_star = 0;
    double bound = 0.0;
    RosenthalInputs best;
    BoundCurve curve;
    std::vector<SearchTraceRow> trace;
};

// Lexicographic objective (n*, bound at n*, r, gamma, w): fewer scans first,
// then the tighter curve, then the smaller parameters for determinism.
bool better(const SearchState& s, long n, double bound, const RosenthalInputs& in) {
    if (!s.found) {
        return true;
    }
    if (n != s.n_star) {
        return n < s.n_star;
    }
    if (bound != s.bound) {
        return bound < s.bound;
    }
    if (in.r != s.best.r) {
        return in.r < s.best.r;
    }
    if (in.gamma != s.best.gamma) {
        return in.gamma < s.best.gamma;
    }
    return in.w < s.best.w;
}

void consider_cell(SearchState& s, int stage, double r, double gamma, double w,
                   double epsilon, double L, double v0, double omega) {
    if (gamma <= 0.0) {
        return; // drift rates of 0 (possible when ch = 0) have no curve form
    }
    RosenthalInputs in;
    in.r = r;
    in.gamma = gamma;
    in.L = L;
    in.w = w;
    in.epsilon = epsilon;
    in.v0 = v0;
    const BoundCurve curve = rosenthal_curve(in);
    if (curve.vacuous) {
        return;
    }
    long n = 0;
    try {
        n = solve_n_star(curve, omega);
    } catch (const no_solution_error&) {
        return; // contracting too slowly to reach omega under the cap
    }
    const double bound = curve.value(n);
    if (better(s, n, bound, in)) {
        s.found = true;
        s.n_star = n;
        s.bound = bound;
        s.best = in;
        s.curve = curve;
        s.trace.push_back({stage, r, gamma, w, epsilon, n, bound});
    }
}

struct SearchContext {
    double ch = 0.0;
    double u = 0.0;
    double L = 0.0;
    double v0 = 0.0;
};

SearchContext make_context(const ModelSpec& model, double x0) {
    require_in_support(model, x0);
    const MomentConstants mc = moment_constants(model);
    const DriftCertificate drift = build_drift(mc); // L and u do not depend on gamma
    SearchContext ctx;
    ctx.ch = mc.ch();
    ctx.u = drift.u;
    ctx.L = drift.L;
    ctx.v0 = drift.V(x0);
    return ctx;
}

void run_grid(SearchState& s, int stage, const SearchContext& ctx,
              const EpsilonSource& eps, std::span<const double> r_grid,
              std::span<const double> gamma_grid, std::span<const double> w_grid,
              double omega) {
    for (const double gamma : gamma_grid) {
        const double threshold = 2.0 * ctx.L / (1.0 - gamma);
        for (const double w : w_grid) {
            if (!(w > threshold)) {
                continue; // infeasible radius for this rate
            }
            const double epsilon = eps(w);
            for (const double r : r_grid) {
                consider_cell(s, stage, r, gamma, w, epsilon, ctx.L, ctx.v0, omega);
            }
        }
    }
}

GridSearchResult finish(SearchState&& s) {
    if (!s.found) {
        throw infeasible_search_error(
            "no feasible (r, gamma, w) cell reached the target accuracy; enlarge the "
            "grids or relax omega");
    }
    GridSearchResult out;
    out.best = s.best;
    out.n_star = s.n_star;
    out.bound_at_n_star = s.bound;
    out.curve = s.curve;
    out.trace = std::move(s.trace);
    return out;
}

std::vector<double> linear_grid(double center, double halfwidth, double step,
                                double lo, double hi) {
    std::vector<double> g;
    const long steps = std::lround(halfwidth / step);
    for (long i = -steps; i <= steps; ++i) {
        const double v = center + static_cast<double>(i) * step;
        if (v > lo && v < hi) {
            g.push_back(v);
        }
    }
    return g;
}

} // namespace

GridSearchResult grid_search(const ModelSpec& model, double x0, double omega,
                             std::span<const double> r_grid,
                             std::span<const double> gamma_grid,
                             std::span<const double> w_grid, double user_epsilon) {
    if (r_grid.empty() || gamma_grid.empty() || w_grid.empty()) {
        throw infeasible_search_error("grid_search: empty grid");
    }
    const SearchContext ctx = make_context(model, x0);
    for (const double gamma : gamma_grid) {
        if (!(gamma >= ctx.ch) || !(gamma < 1.0)) {
            std::ostringstream msg;
            msg << "gamma grid entry " << gamma << " outside [ch, 1) with ch="
                << ctx.ch;
            throw invalid_rate_error(msg.str());
        }
    }
    for (const double w : w_grid) {
        if (!(w > 0.0)) {
            std::ostringstream msg;
            msg << "w grid entry " << w << " is not a positive squared radius";
            throw invalid_small_set_error(msg.str());
        }
    }
    const EpsilonSource eps(model, ctx.u, user_epsilon);
    SearchState s;
    run_grid(s, 0, ctx, eps, r_grid, gamma_grid, w_grid, omega);
    return finish(std::move(s));
}

GridSearchResult optimize_bound(const ModelSpec& model, double x0, double omega,
                                double user_epsilon) {
    const SearchContext ctx = make_context(model, x0);
    const EpsilonSource eps(model, ctx.u, user_epsilon);
    SearchState s;

    // Stage 1: coarse sweep of the default grids, with the radius grid
    // rebuilt per rate so it starts at that rate's feasibility threshold.
    const std::vector<double> r_coarse = default_r_grid();
    for (const double gamma : default_gamma_grid(ctx.ch)) {
        const double threshold = 2.0 * ctx.L / (1.0 - gamma);
        const std::vector<double> w_grid = default_w_grid(threshold);
        const double g[] = {gamma};
        run_grid(s, 1, ctx, eps, r_coarse, g, w_grid, omega);
    }
    if (!s.found) {
        return finish(std::move(s)); // throws with the standard message
    }

    // Stage 2 and 3: sharpen the split exponent around the incumbent, first
    // to 1e-3 then to 1e-4.
    const double g_best[] = {s.best.gamma};
    {
        const std::vector<double> r_fine =
            linear_grid(s.best.r, 0.01, 1e-3, 0.0, 1.0);
        const double w_best[] = {s.best.w};
        run_grid(s, 2, ctx, eps, r_fine, g_best, w_best, omega);
    }
    {
        const std::vector<double> r_finer =
            linear_grid(s.best.r, 1e-3, 1e-4, 0.0, 1.0);
        const double w_best[] = {s.best.w};
        run_grid(s, 3, ctx, eps, r_finer, g_best, w_best, omega);
    }

    // Stage 4: sharpen the radius around the incumbent, spanning one coarse
    // log-grid spacing either side, then re-polish r at 1e-4.
    {
        const double threshold = 2.0 * ctx.L / (1.0 - s.best.gamma);
        const double lb = std::max(threshold, 2e-7);
        const double spacing = std::pow(20.0 / lb, 1.0 / 200.0);
        std::vector<double> w_fine;
        for (int i = -20; i <= 20; ++i) {
            const double w = s.best.w * std::pow(spacing, static_cast<double>(i) / 20.0);
            if (w > threshold && w <= 20.0) {
                w_fine.push_back(w);
            }
        }
        const std::vector<double> r_near =
            linear_grid(s.best.r, 2e-3, 1e-4, 0.0, 1.0);
        run_grid(s, 4, ctx, eps, r_near, g_best, w_fine, omega);
    }
    {
        const std::vector<double> r_polish =
            linear_grid(s.best.r, 1e-3, 1e-4, 0.0, 1.0);
        const double w_best[] = {s.best.w};
        run_grid(s, 5, ctx, eps, r_polish, g_best, w_best, omega);
    }
    return finish(std::move(s));
}

} // namespace gibbscert
