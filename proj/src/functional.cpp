#include "tmlab/functional.hpp"

#include <cmath>

namespace tmlab {

namespace {

// Tail series sum_{j>=j0} t^j/j!, forward recurrence.
double exp_tail_series(int j0, double t) {
    double term = 1.0;
    for (int j = 1; j <= j0; ++j) term *= t / j;
    CompensatedSum s;
    s.add(term);
    for (int j = j0 + 1; j < j0 + 400; ++j) {
        term *= t / j;
        s.add(term);
        if (term < 1e-18 * s.value()) break;
    }
    return s.value();
}

void check_t(double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("phi: argument must be >= 0");
}

void check_n(int n) {
    if (n < 2) throw std::invalid_argument("phi: dimension must be >= 2");
}

}  // namespace

double phi(int n, double t) {
    check_n(n);
    check_t(t);
    if (t == 0.0) return 0.0;
    if (t < n) return exp_tail_series(n - 1, t);
    return std::exp(t) - exp_partial_sum(n - 2, t);
}

double phi_prime(int n, double t) {
    check_n(n);
    check_t(t);
    if (n == 2) return std::exp(t);
    if (t == 0.0) return 0.0;  // series starts at j = n-2 >= 1
    if (t < n) return exp_tail_series(n - 2, t);
    return std::exp(t) - exp_partial_sum(n - 3, t);
}

double log_phi(int n, double t) {
    check_n(n);
    check_t(t);
    if (t == 0.0) return -std::numeric_limits<double>::infinity();
    if (t < 700.0) return std::log(phi(n, t));
    // e^{-t} * partial sum is far below 1 here.
    double log_poly = std::log(exp_partial_sum(n - 2, t));
    double corr = log_poly - t;
    return corr > -700.0 ? t + std::log1p(-std::exp(corr)) : t;
}

TMParams TMParams::critical(int n, double alpha) {
    TMParams p;
    p.n = n;
    p.alpha = alpha;
    p.alpha_n = critical_exponent(n);
    p.beta = p.alpha_n;
    p.validate();
    return p;
}

TMParams TMParams::subcritical(int n, double alpha, double beta_fraction) {
    if (!(beta_fraction > 0.0) || beta_fraction > 1.0)
        throw std::invalid_argument("TMParams: beta fraction must lie in (0, 1]");
    TMParams p;
    p.n = n;
    p.alpha = alpha;
    p.alpha_n = critical_exponent(n);
    p.beta = beta_fraction * p.alpha_n;
    p.validate();
    return p;
}

void TMParams::validate() const {
    if (n < 2) throw std::invalid_argument("TMParams: dimension must be >= 2");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("TMParams: alpha must be >= 0");
    if (!(beta > 0.0) || beta > alpha_n * (1.0 + 1e-12))
        throw std::invalid_argument("TMParams: beta must lie in (0, alpha_n]");
}

FunctionalValue tm_functional(const RadialFunction& u, const TMParams& params) {
    params.validate();
    const RadialGrid& g = u.grid();
    const int n = g.dim();
    if (n != params.n) throw std::invalid_argument("tm_functional: dimension mismatch");

    FunctionalValue out;
    out.norms = norms(u);
    const double N = std::pow(out.norms.lp_n, n);
    const double coupling = std::pow(1.0 + params.alpha * N, 1.0 / (n - 1));
    out.exponent_used = params.beta * coupling;

    const double p = static_cast<double>(n) / (n - 1);
    const double t_switch = 700.0;
    CompensatedSum lin;
    double log_acc = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) {
        double t = out.exponent_used * std::pow(std::abs(u.value(i)), p);
        if (!std::isfinite(t)) throw std::invalid_argument("tm_functional: non-finite exponent");
        if (t > t_switch) out.overflowed = true;
        if (out.overflowed) break;
        lin.add(g.weight(i) * phi(n, t));
    }
    if (!out.overflowed) {
        out.value = std::max(lin.value(), 0.0);
        out.log_value = out.value > 0.0 ? std::log(out.value)
                                        : -std::numeric_limits<double>::infinity();
    } else {
        for (std::size_t i = 0; i < u.size(); ++i) {
            double t = out.exponent_used * std::pow(std::abs(u.value(i)), p);
            if (g.weight(i) > 0.0)
                log_acc = log_add_exp(log_acc, std::log(g.weight(i)) + log_phi(n, t));
        }
        out.log_value = log_acc;
        out.value = log_acc < 700.0 ? std::exp(log_acc)
                                    : std::numeric_limits<double>::infinity();
    }

    // Beyond the grid only the pointwise bound (decay_bound) is available; it
    // caps the integrand by c t^{n-1} ~ u^n, whose shellwise integral is a rate
    // per e-fold in radius. Report one e-fold, never add it.
    double uR = u.value(u.size() - 1);
    if (uR > 0.0) {
        double t_R = out.exponent_used * std::pow(uR, p);
        double env = t_R < 1e-12 ? 1.0 / std::tgamma(n) : phi(n, t_R) / std::pow(t_R, n - 1);
        out.tail_estimate =
            env * std::pow(out.exponent_used, n - 1) * n * N;
    }
    return out;
}

Multipliers multipliers(const RadialFunction& u, const TMParams& params) {
    params.validate();
    const RadialGrid& g = u.grid();
    const int n = g.dim();
    const double p = static_cast<double>(n) / (n - 1);
    double N = 0.0;
    {
        CompensatedSum s;
        for (std::size_t i = 0; i < u.size(); ++i)
            s.add(g.weight(i) * std::pow(std::abs(u.value(i)), n));
        N = s.value();
    }
    Multipliers m;
    m.alpha_k = params.beta * std::pow(1.0 + params.alpha * N, 1.0 / (n - 1));
    m.mu_k = (1.0 + params.alpha * N) / (1.0 + 2.0 * params.alpha * N);
    m.gamma_k = params.alpha / (1.0 + 2.0 * params.alpha * N);
    CompensatedSum lam;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double up = std::pow(std::abs(u.value(i)), p);
        lam.add(g.weight(i) * up * phi_prime(n, m.alpha_k * up));
    }
    m.lambda_k = lam.value();
    return m;
}

}  // namespace tmlab
