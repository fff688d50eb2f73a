#include "gibbscert/models.hpp"

#include <cmath>
#include <sstream>

#include "gibbscert/errors.hpp"
#include "gibbscert/numeric.hpp"

namespace gibbscert {

ModelSpec ModelSpec::gaussian(double nu, double sigma2, double tau2) {
    if (!std::isfinite(nu) || !std::isfinite(sigma2) || !std::isfinite(tau2) ||
        sigma2 <= 0.0 || tau2 <= 0.0) {
        std::ostringstream msg;
        msg << "gaussian model needs finite nu and positive sigma2, tau2; got nu=" << nu
            << " sigma2=" << sigma2 << " tau2=" << tau2;
        throw invalid_hyperparameter_error(msg.str());
    }
    ModelSpec m;
    m.family = Family::gaussian;
    m.nu = nu;
    m.sigma2 = sigma2;
    m.tau2 = tau2;
    return m;
}

ModelSpec ModelSpec::beta_binomial(long trials, double alpha, double beta) {
    if (trials < 1 || !std::isfinite(alpha) || !std::isfinite(beta) || alpha <= 0.0 ||
        beta <= 0.0) {
        std::ostringstream msg;
        msg << "beta_binomial model needs trials >= 1 and positive alpha, beta; got n="
            << trials << " alpha=" << alpha << " beta=" << beta;
        throw invalid_hyperparameter_error(msg.str());
    }
    ModelSpec m;
    m.family = Family::beta_binomial;
    m.trials = trials;
    m.alpha = alpha;
    m.beta = beta;
    return m;
}

ModelSpec ModelSpec::poisson_gamma(double alpha, double beta) {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha <= 0.0 || beta <= 0.0) {
        std::ostringstream msg;
        msg << "poisson_gamma model needs positive alpha and rate beta; got alpha="
            << alpha << " beta=" << beta;
        throw invalid_hyperparameter_error(msg.str());
    }
    ModelSpec m;
    m.family = Family::poisson_gamma;
    m.alpha = alpha;
    m.beta = beta;
    return m;
}

std::string ModelSpec::name() const {
    switch (family) {
    case Family::gaussian:
        return "gaussian";
    case Family::beta_binomial:
        return "beta_binomial";
    case Family::poisson_gamma:
        return "poisson_gamma";
    }
    return "unknown";
}

MomentConstants moments_gaussian(double nu, double sigma2, double tau2) {
    ModelSpec::gaussian(nu, sigma2, tau2); // validate
    const double denom = sigma2 + tau2;
    MomentConstants mc;
    mc.a = 1.0;
    mc.b = 0.0;
    mc.c = 1.0;
    mc.d = 0.0;
    mc.e = sigma2;
    mc.f = tau2 / denom;
    mc.g = sigma2 * nu / denom;
    // theta | X is normal with mean f*X + g and variance sigma2*tau2/denom,
    // so the second moment is that variance plus the squared mean.
    const double post_var = sigma2 * tau2 / denom;
    mc.h = mc.f * mc.f;
    mc.j = 2.0 * mc.f * mc.g;
    mc.k = mc.g * mc.g + post_var;
    return mc;
}

MomentConstants moments_beta_binomial(long trials, double alpha, double beta) {
    ModelSpec::beta_binomial(trials, alpha, beta); // validate
    const double n = static_cast<double>(trials);
    const double s = alpha + beta + n; // posterior shape total
    MomentConstants mc;
    mc.a = n;
    mc.b = 0.0;
    mc.c = n * (n - 1.0);
    mc.d = n;
    mc.e = 0.0;
    // theta | X ~ Beta(alpha + X, beta + n - X).
    mc.f = 1.0 / s;
    mc.g = alpha / s;
    mc.h = 1.0 / (s * (s + 1.0));
    mc.j = (2.0 * alpha + 1.0) / (s * (s + 1.0));
    mc.k = alpha * (alpha + 1.0) / (s * (s + 1.0));
    return mc;
}

MomentConstants moments_poisson_gamma(double alpha, double beta) {
    ModelSpec::poisson_gamma(alpha, beta); // validate
    const double rate = beta + 1.0; // posterior rate
    MomentConstants mc;
    mc.a = 1.0;
    mc.b = 0.0;
    mc.c = 1.0;
    mc.d = 1.0;
    mc.e = 0.0;
    // theta | X ~ Gamma(alpha + X, rate beta + 1).
    mc.f = 1.0 / rate;
    mc.g = alpha / rate;
    mc.h = 1.0 / (rate * rate);
    mc.j = (2.0 * alpha + 1.0) / (rate * rate);
    mc.k = alpha * (alpha + 1.0) / (rate * rate);
    return mc;
}

MomentConstants moment_constants(const ModelSpec& model) {
    switch (model.family) {
    case Family::gaussian:
        return moments_gaussian(model.nu, model.sigma2, model.tau2);
    case Family::beta_binomial:
        return moments_beta_binomial(model.trials, model.alpha, model.beta);
    case Family::poisson_gamma:
        return moments_poisson_gamma(model.alpha, model.beta);
    }
    throw invalid_hyperparameter_error("moment_constants: unknown family");
}

bool second_moments_valid(const MomentConstants& mc, std::span<const double> theta_grid,
                          std::span<const double> x_grid) {
    for (const double t : theta_grid) {
        const double mean = mc.a * t + mc.b;
        const double second = mc.c * t * t + mc.d * t + mc.e;
        if (second - mean * mean < 0.0) {
            return false;
        }
    }
    for (const double x : x_grid) {
        const double mean = mc.f * x + mc.g;
        const double second = mc.h * x * x + mc.j * x + mc.k;
        if (second - mean * mean < 0.0) {
            return false;
        }
    }
    return true;
}

bool in_data_support(const ModelSpec& model, double x) {
    switch (model.family) {
    case Family::gaussian:
        return std::isfinite(x);
    case Family::beta_binomial:
        return x >= 0.0 && x <= static_cast<double>(model.trials) &&
               x == std::floor(x);
    case Family::poisson_gamma:
        return x >= 0.0 && std::isfinite(x) && x == std::floor(x);
    }
    return false;
}

void require_in_support(const ModelSpec& model, double x) {
    if (!in_data_support(model, x)) {
        std::ostringstream msg;
        msg << "x=" << x << " is not a valid data value for the " << model.name()
            << " model";
        throw support_error(msg.str());
    }
}

ConditionalDraw sample_conditionals(const ModelSpec& model, double x, Rng& rng) {
    require_in_support(model, x);
    ConditionalDraw out;
    switch (model.family) {
    case Family::gaussian: {
        const double denom = model.sigma2 + model.tau2;
        const double post_mean = (model.tau2 * x + model.sigma2 * model.nu) / denom;
        const double post_var = model.sigma2 * model.tau2 / denom;
        out.theta = rng.normal(post_mean, std::sqrt(post_var));
        out.x_next = rng.normal(out.theta, std::sqrt(model.sigma2));
        return out;
    }
    case Family::beta_binomial: {
        const double n = static_cast<double>(model.trials);
        out.theta = rng.beta(model.alpha + x, model.beta + n - x);
        out.x_next = static_cast<double>(rng.binomial(model.trials, out.theta));
        return out;
    }
    case Family::poisson_gamma: {
        out.theta = rng.gamma_rate(model.alpha + x, model.beta + 1.0);
        out.x_next = static_cast<double>(rng.poisson(out.theta));
        return out;
    }
    }
    throw invalid_hyperparameter_error("sample_conditionals: unknown family");
}

double beta_binomial_pmf(long k, long n, double a, double b) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    return std::exp(log_choose(n, k) +
                    log_beta(a + static_cast<double>(k),
                             b + static_cast<double>(n - k)) -
                    log_beta(a, b));
}

double negative_binomial_pmf(long k, double shape, double rate) {
    if (k < 0) {
        return 0.0;
    }
    const double kd = static_cast<double>(k);
    // P(X=k) = C(shape+k-1, k) p^shape (1-p)^k with success odds p = rate/(rate+1).
    return std::exp(std::lgamma(shape + kd) - std::lgamma(shape) - std::lgamma(kd + 1.0) +
                    shape * std::log(rate / (rate + 1.0)) -
                    kd * std::log(rate + 1.0));
}

double MarginalLaw::density(double x) const {
    switch (family) {
    case Family::gaussian:
        return normal_pdf(x, mean, variance);
    case Family::beta_binomial: {
        if (x != std::floor(x)) {
            return 0.0;
        }
        return beta_binomial_pmf(static_cast<long>(x), trials, alpha, beta);
    }
    case Family::poisson_gamma: {
        if (x != std::floor(x)) {
            return 0.0;
        }
        return negative_binomial_pmf(static_cast<long>(x), alpha, beta);
    }
    }
    return 0.0;
}

double MarginalLaw::sample(Rng& rng) const {
    switch (family) {
    case Family::gaussian:
        return rng.normal(mean, std::sqrt(variance));
    case Family::beta_binomial: {
        const double theta = rng.beta(alpha, beta);
        return static_cast<double>(rng.binomial(trials, theta));
    }
    case Family::poisson_gamma: {
        const double theta = rng.gamma_rate(alpha, beta);
        return static_cast<double>(rng.poisson(theta));
    }
    }
    return 0.0;
}

MarginalLaw marginal_law(const ModelSpec& model) {
    MarginalLaw law;
    law.family = model.family;
    switch (model.family) {
    case Family::gaussian:
        law.mean = model.nu;
        law.variance = model.sigma2 + model.tau2;
        return law;
    case Family::beta_binomial: {
        law.trials = model.trials;
        law.alpha = model.alpha;
        law.beta = model.beta;
        const double n = static_cast<double>(model.trials);
        const double s = model.alpha + model.beta;
        const double p = model.alpha / s;
        law.mean = n * p;
        law.variance = n * p * (1.0 - p) * (s + n) / (s + 1.0);
        return law;
    }
    case Family::poisson_gamma: {
        law.alpha = model.alpha;
        law.beta = model.beta;
        law.mean = model.alpha / model.beta;
        // Poisson mixed over a Gamma mean adds the mean's variance.
        law.variance = law.mean + model.alpha / (model.beta * model.beta);
        return law;
    }
    }
    throw invalid_hyperparameter_error("marginal_law: unknown family");
}

} // namespace gibbscert
