#include "tmlab/greens.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tmlab {

namespace {

// omega * int_0^{r0} (B - K log s)^{m} s^{n-1} ds, binomially expanded with
// int_0^{r0} (-log s)^j s^{n-1} ds = Gamma(j+1, -n log r0) / n^{j+1}.
double core_moment(int n, int m, double K, double B, double r0) {
    double x = -n * std::log(r0);
    CompensatedSum s;
    for (int j = 0; j <= m; ++j)
        s.add(binomial(m, j) * ipow(B, m - j) * ipow(K, j) * upper_gamma_int(j, x) /
              ipow(static_cast<double>(n), j + 1));
    return omega(n) * s.value();
}

// Source mass hiding inside the truncated core, from the log asymptotic.
double core_source_mass(int n, double K, double B, double r0) {
    return core_moment(n, n - 1, K, B, r0);
}

struct Trajectory {
    std::vector<double> tau;   // log r nodes
    std::vector<double> y;     // G
    std::vector<double> flux;  // signed n-flux
    int event = 0;             // 0 none, +1 flux reached 0 (A too large), -1 G crossed 0 (A too small)
    std::size_t event_index = 0;
};

// Flux form in tau = log r:  dS/dtau = (1-alpha) omega |y|^{n-2} y e^{n tau},
//                            dy/dtau = sgn(S) |S/omega|^{1/(n-1)}.
Trajectory integrate(int n, double alpha, double tau0, double tau1, int steps, double y0,
                     double S0, bool source_enabled) {
    const double w = omega(n);
    const double pinv = 1.0 / (n - 1);
    auto dy = [&](double S) { return sgn_pow(S / w, pinv); };
    auto dS = [&](double tau, double y) {
        if (!source_enabled) return 0.0;
        return (1.0 - alpha) * w * sgn_pow(y, n - 1) * std::exp(n * tau);
    };

    Trajectory tr;
    tr.tau.resize(steps + 1);
    tr.y.resize(steps + 1);
    tr.flux.resize(steps + 1);
    const double h = (tau1 - tau0) / steps;
    double y = y0, S = S0;
    tr.tau[0] = tau0;
    tr.y[0] = y0;
    tr.flux[0] = S0;
    for (int i = 0; i < steps; ++i) {
        double tau = tau0 + i * h;
        double k1y = dy(S), k1S = dS(tau, y);
        double k2y = dy(S + 0.5 * h * k1S), k2S = dS(tau + 0.5 * h, y + 0.5 * h * k1y);
        double k3y = dy(S + 0.5 * h * k2S), k3S = dS(tau + 0.5 * h, y + 0.5 * h * k2y);
        double k4y = dy(S + h * k3S), k4S = dS(tau + h, y + h * k3y);
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
        S += h / 6.0 * (k1S + 2 * k2S + 2 * k3S + k4S);
        tr.tau[i + 1] = tau0 + (i + 1) * h;
        tr.y[i + 1] = y;
        tr.flux[i + 1] = S;
        if (source_enabled) {
            if (y < 0.0) {
                tr.event = -1;
                tr.event_index = i + 1;
                break;
            }
            if (S >= 0.0) {
                tr.event = +1;
                tr.event_index = i + 1;
                break;
            }
        }
    }
    return tr;
}

GreenFunction finalize(int n, double alpha, double r0, double Rmax, const Trajectory& tr,
                       double A_shoot, double I0, bool source_enabled) {
    GreenFunction g;
    g.n = n;
    g.alpha = alpha;
    g.Rmax = Rmax;
    const double w = omega(n);
    const double pinv = 1.0 / (n - 1);

    std::vector<double> r(tr.tau.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::exp(tr.tau[i]);
    r.front() = r0;
    r.back() = Rmax;
    g.grid = std::make_shared<RadialGrid>(
        RadialGrid::from_nodes(n, std::move(r), SpacingKind::geometric));
    g.values = tr.y;
    g.fluxes = tr.flux;
    g.derivs.resize(tr.y.size());
    for (std::size_t i = 0; i < g.derivs.size(); ++i)
        g.derivs[i] = sgn_pow(tr.flux[i] / w, pinv) / g.grid->node(i);
    g.G_at_Rmax = tr.y.back();

    // Integrated flux law: -S(r) = 1 + (alpha-1) * [I0 + omega int_{r0}^{r} G^{n-1} s^{n-1} ds].
    double acc = I0;
    double defect = std::abs(-tr.flux[0] - (1.0 + (alpha - 1.0) * acc));
    for (std::size_t i = 1; i < tr.y.size(); ++i) {
        if (source_enabled) {
            double f0 = w * sgn_pow(tr.y[i - 1], n - 1) * std::exp(n * tr.tau[i - 1]);
            double f1 = w * sgn_pow(tr.y[i], n - 1) * std::exp(n * tr.tau[i]);
            acc += 0.5 * (tr.tau[i] - tr.tau[i - 1]) * (f0 + f1);
        }
        defect = std::max(defect, std::abs(-tr.flux[i] - (1.0 + (alpha - 1.0) * acc)));
    }
    g.flux_residual = defect;

    // ||G||_n^n: trapezoid over the solved range plus the analytic core piece.
    CompensatedSum lp;
    for (std::size_t i = 1; i < tr.y.size(); ++i) {
        double f0 = w * ipow(std::abs(tr.y[i - 1]), n) * std::exp(n * tr.tau[i - 1]);
        double f1 = w * ipow(std::abs(tr.y[i]), n) * std::exp(n * tr.tau[i]);
        lp.add(0.5 * (tr.tau[i] - tr.tau[i - 1]) * (f0 + f1));
    }
    double K = static_cast<double>(n) / critical_exponent(n);
    lp.add(core_moment(n, n, K, A_shoot, r0));
    g.ln_norm_pow_n = std::max(lp.value(), 0.0);
    g.ln_norm = std::pow(g.ln_norm_pow_n, 1.0 / n);

    double fit_hi = std::min(0.05, 40.0 * r0);
    double fit_lo = 2.0 * r0;
    g.A = extract_A(g, fit_lo, fit_hi);
    return g;
}

}  // namespace

GreenFunction solve_green(int n, double alpha, double r0, double Rmax, double tol,
                          GreenOptions opts) {
    if (n < 2) throw std::invalid_argument("solve_green: dimension must be >= 2");
    if (!(alpha >= 0.0) || alpha >= 1.0)
        throw std::invalid_argument("solve_green: requires 0 <= alpha < 1");
    if (!(r0 > 0.0) || !(r0 < 1.0) || !(Rmax > 1.0))
        throw std::invalid_argument("solve_green: need 0 < r0 << 1 < Rmax");
    (void)tol;

    const double tau0 = std::log(r0), tau1 = std::log(Rmax);
    const double K = static_cast<double>(n) / critical_exponent(n);

    if (!opts.source_enabled) {
        double A = opts.hook_constant;
        Trajectory tr = integrate(n, alpha, tau0, tau1, opts.steps, -K * tau0 + A, -1.0, false);
        return finalize(n, alpha, r0, Rmax, tr, A, 0.0, false);
    }

    auto shoot = [&](double A) {
        double I0 = core_source_mass(n, K, A, r0);
        double S0 = -(1.0 + (alpha - 1.0) * I0);
        return integrate(n, alpha, tau0, tau1, opts.steps, -K * tau0 + A, S0, true);
    };
    auto classify = [&](const Trajectory& tr) {
        if (tr.event != 0) return tr.event;  // +1: A too large, -1: too small
        if (tr.y.back() > opts.decay_target) return +1;
        if (tr.y.back() < 0.0) return -1;
        return 0;
    };

    // Bracket: a_small undershoots (G crosses 0), a_large overshoots (flux turns).
    double a_small = opts.bracket_lo, a_large = opts.bracket_hi;
    int side_small = classify(shoot(a_small));
    int side_large = classify(shoot(a_large));
    for (int widen = 0; widen < 8 && side_small > 0; ++widen) {
        a_small -= (a_large - a_small);
        side_small = classify(shoot(a_small));
    }
    for (int widen = 0; widen < 8 && side_large < 0; ++widen) {
        a_large += (a_large - a_small);
        side_large = classify(shoot(a_large));
    }
    double A;
    if (side_small == 0)
        A = a_small;
    else if (side_large == 0)
        A = a_large;
    else if (side_small < 0 && side_large > 0) {
        A = 0.5 * (a_small + a_large);
        for (int it = 0; it < opts.max_bisect; ++it) {
            A = 0.5 * (a_small + a_large);
            int side = classify(shoot(A));
            if (side == 0) break;
            if (side < 0)
                a_small = A;
            else
                a_large = A;
            if (a_large <= std::nextafter(a_small, a_large)) {
                A = a_small;
                break;
            }
        }
    } else {
        std::ostringstream msg;
        msg << "solve_green: bisection bracket failure (n=" << n << ", alpha=" << alpha
            << ", sides " << side_small << "/" << side_large << " on [" << a_small << ", "
            << a_large << "])";
        throw numerical_error(msg.str());
    }
    Trajectory tr = shoot(A);
    if (classify(tr) != 0)
        throw numerical_error("solve_green: shooting did not reach the decay window");
    double I0 = core_source_mass(n, K, A, r0);
    return finalize(n, alpha, r0, Rmax, tr, A, I0, true);
}

double extract_A(const GreenFunction& g, double r_lo, double r_hi, double* max_deviation) {
    if (!(r_lo > 0.0) || !(r_hi > r_lo))
        throw std::invalid_argument("extract_A: bad fit window");
    const double K = static_cast<double>(g.n) / critical_exponent(g.n);
    CompensatedSum s;
    std::vector<double> samples;
    for (std::size_t i = 0; i < g.grid->size(); ++i) {
        double r = g.grid->node(i);
        if (r < r_lo || r > r_hi) continue;
        double a = g.values[i] + K * std::log(r);
        samples.push_back(a);
        s.add(a);
    }
    if (samples.size() < 4)
        throw std::invalid_argument("extract_A: fit window contains too few nodes");
    double A = s.value() / samples.size();
    double dev = 0.0;
    for (double a : samples) dev = std::max(dev, std::abs(a - A));
    if (max_deviation) *max_deviation = dev;
    // Remainder model c r^n |log r|^n at the outer window edge, generous c.
    double remainder_scale =
        std::pow(r_hi, g.n) * std::pow(std::abs(std::log(r_hi)), g.n);
    if (dev > 100.0 * remainder_scale && dev > 1e-8)
        throw numerical_error("extract_A: window deviation exceeds the remainder model; shrink r0");
    return A;
}

BoundReport carleson_chang_bound(int n, double A) {
    if (n < 2) throw std::invalid_argument("carleson_chang_bound: dimension must be >= 2");
    BoundReport b;
    b.A = A;
    double H = harmonic(n - 1);
    b.E = -H;
    CompensatedSum eb;
    for (int k = 0; k <= n - 2; ++k)
        eb.add(binomial(n - 1, k) * (((n - 1 - k) % 2) ? -1.0 : 1.0) / (n - k - 1));
    b.E_binomial = eb.value();
    b.cc_bound = omega(n) / n * std::exp(critical_exponent(n) * A + H);
    b.cc_ball = omega(n) / n * (1.0 + std::exp(H));
    return b;
}

CapacityCheck capacity_identity_check(const GreenFunction& g, double delta) {
    const int n = g.n;
    const double w = omega(n);
    if (delta <= g.grid->inner_radius() || delta >= g.grid->outer_radius())
        throw std::invalid_argument("capacity_identity_check: delta outside the solved range");

    // Trapezoid in log r of (|G'|^n + (1-alpha) G^n) omega r^n, starting at delta.
    CapacityCheck out;
    CompensatedSum s;
    double Gd = g.value_at(delta);
    double Gpd = g.deriv_at(delta);
    double prev_r = delta;
    double prev_f = w * (std::pow(std::abs(Gpd), n) + (1.0 - g.alpha) * ipow(std::abs(Gd), n)) *
                    ipow(delta, n);
    for (std::size_t i = 0; i < g.grid->size(); ++i) {
        double r = g.grid->node(i);
        if (r <= delta) continue;
        double f = w * (std::pow(std::abs(g.derivs[i]), n) +
                        (1.0 - g.alpha) * ipow(std::abs(g.values[i]), n)) * ipow(r, n);
        s.add(0.5 * (std::log(r) - std::log(prev_r)) * (prev_f + f));
        prev_r = r;
        prev_f = f;
    }
    out.lhs = s.value();
    out.rhs_bare = w * std::pow(std::abs(Gpd), n - 1) * ipow(delta, n - 1);
    out.rhs_weighted = Gd * out.rhs_bare;
    out.residual_bare = std::abs(out.lhs - out.rhs_bare) / std::abs(out.lhs);
    out.residual_weighted = std::abs(out.lhs - out.rhs_weighted) / std::abs(out.lhs);
    return out;
}

}  // namespace tmlab
