#include "tmlab/sequences.hpp"

#include <algorithm>
#include <cmath>

namespace tmlab {

MoserSequenceParams MoserSequenceParams::from_k(int n, double k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("moser: k must be positive and finite");
    return from_log10_k(n, std::log10(k));
}

MoserSequenceParams MoserSequenceParams::from_log10_k(int n, double log10_k) {
    if (n < 2) throw std::invalid_argument("moser: dimension must be >= 2");
    MoserSequenceParams p;
    p.n = n;
    p.log_k = log10_k * std::log(10.0);
    if (!(p.log_k > 2.0))
        throw std::invalid_argument("moser: requires k > e^2 (R_k undefined below)");
    return p;
}

double MoserSequenceParams::R_k() const {
    return std::pow(log_k, 1.0 / (2 * n)) / std::log(log_k);
}

double MoserSequenceParams::inner_radius() const { return R_k() * std::exp(-log_k); }

double MoserSequenceParams::peak() const {
    return std::pow(log_k, (n - 1.0) / n) / std::pow(omega(n), 1.0 / n);
}

double moser_function(const MoserSequenceParams& p, double r) {
    if (r < 0.0) throw std::invalid_argument("moser_function: negative radius");
    double Rk = p.R_k();
    if (r >= Rk) return 0.0;
    if (r <= p.inner_radius()) return p.peak();
    return std::pow(p.log_k, -1.0 / p.n) * std::log(Rk / r) / std::pow(omega(p.n), 1.0 / p.n);
}

double moser_function_deriv(const MoserSequenceParams& p, double r) {
    double Rk = p.R_k();
    if (r <= p.inner_radius() || r >= Rk) return 0.0;
    return -std::pow(p.log_k, -1.0 / p.n) / (r * std::pow(omega(p.n), 1.0 / p.n));
}

namespace {

// ||u_k||_n^n in closed form: the constant core plus the log branch, whose
// radial integral is an incomplete gamma.
double moser_lp_pow_n(const MoserSequenceParams& p) {
    const int n = p.n;
    const double L = p.log_k;
    double Rk = p.R_k();
    double core = std::pow(L, n - 1.0) * std::pow(Rk * std::exp(-L), n) / n;
    double branch = std::pow(Rk, n) / L * lower_gamma_int(n, n * L) /
                    ipow(static_cast<double>(n), n + 1);
    return core + branch;
}

}  // namespace

MoserNorms moser_norms(const MoserSequenceParams& p) {
    MoserNorms out;
    const int n = p.n;
    double lp_pow_n = moser_lp_pow_n(p);
    out.norms.grad_n = 1.0;  // the log branch integrates |grad u|^n dx to exactly 1
    out.norms.lp_n = std::pow(lp_pow_n, 1.0 / n);
    out.norms.sobolev = std::pow(1.0 + lp_pow_n, 1.0 / n);
    out.norms.lions_q = std::numeric_limits<double>::infinity();
    out.lp_ratio = lp_pow_n * p.log_k / std::pow(p.R_k(), n);
    return out;
}

Norms moser_norms_quadrature(const MoserSequenceParams& p, int M) {
    if (p.log_k > 690.0)
        throw std::invalid_argument("moser_norms_quadrature: k too large for grid quadrature");
    auto grid = std::make_shared<RadialGrid>(
        RadialGrid::geometric(p.n, p.R_k(), M, p.inner_radius()));
    auto u = RadialFunction::from_callable(
        grid, [&](double r) { return moser_function(p, r); },
        [&](double r) { return moser_function_deriv(p, r); });
    Norms quad = norms(u);
    // The annular grid misses the constant core; restore its L^n mass.
    double core = std::pow(p.peak(), p.n) * ball_volume(p.n, p.inner_radius());
    double lp_pow_n = std::pow(quad.lp_n, p.n) + core;
    quad.lp_n = std::pow(lp_pow_n, 1.0 / p.n);
    double sn = std::pow(quad.grad_n, p.n) + lp_pow_n;
    quad.sobolev = std::pow(sn, 1.0 / p.n);
    quad.lions_q = sn < 1.0 ? std::pow(1.0 - sn, -1.0 / (p.n - 1))
                            : std::numeric_limits<double>::infinity();
    return quad;
}

SharpnessPoint sharpness_point(int n, double alpha, double log10_k) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("sharpness: alpha must be >= 0");
    MoserSequenceParams p = MoserSequenceParams::from_log10_k(n, log10_k);
    const double L = p.log_k;
    if (!(L > M_E))
        throw std::invalid_argument("sharpness: requires log k > e for the prediction term");
    const double s = moser_lp_pow_n(p);  // ||u_k||_n^n before normalization
    const double W = 1.0 + s;            // ||u_k||_{W^{1,n}}^n

    SharpnessPoint out;
    out.log10_k = log10_k;
    // Normalized peak exponent: alpha_n |u(0)/W^{1/n}|^{n/(n-1)} = n log k / W^{1/(n-1)}.
    double t1 = n * L * std::pow((1.0 + (1.0 + alpha) * s) / (W * W), 1.0 / (n - 1));
    double tv = n * L * (1.0 + alpha * s / W) / std::pow(W, 1.0 / (n - 1));
    double log_ball = std::log(omega(n) / n) + n * (std::log(p.R_k()) - L);
    out.log_lower_bound = log_ball + log_phi(n, t1);
    out.log_lower_bound_variant = log_ball + log_phi(n, tv);
    out.prediction = 0.5 * std::log(L) - n * std::log(std::log(L));
    return out;
}

std::vector<SharpnessPoint> sharpness_scan(int n, double alpha,
                                           const std::vector<double>& log10_k_list) {
    if (log10_k_list.empty()) throw std::invalid_argument("sharpness: empty k list");
    for (std::size_t i = 0; i + 1 < log10_k_list.size(); ++i)
        if (!(log10_k_list[i] < log10_k_list[i + 1]))
            throw std::invalid_argument("sharpness: k list must be increasing");
    std::vector<SharpnessPoint> out;
    out.reserve(log10_k_list.size());
    for (double l : log10_k_list) out.push_back(sharpness_point(n, alpha, l));
    return out;
}

BubbleProfile::BubbleProfile(int dim) : n(dim) {
    if (n < 2) throw std::invalid_argument("bubble: dimension must be >= 2");
    coefficient = std::pow(omega(n) / n, 1.0 / (n - 1));
}

double BubbleProfile::psi(double r) const {
    if (r < 0.0) throw std::invalid_argument("bubble: negative radius");
    return -n * std::log1p(coefficient * std::pow(r, static_cast<double>(n) / (n - 1)));
}

double BubbleProfile::psi_prime(double r) const {
    if (r <= 0.0) return 0.0;
    double p = static_cast<double>(n) / (n - 1);
    double rp = std::pow(r, p);
    return -n * coefficient * p * rp / (r * (1.0 + coefficient * rp));
}

double bubble_integral(int n) {
    BubbleProfile b(n);
    // omega int_0^inf (1 + c_n t^{n/(n-1)})^{-n} t^{n-1} dt
    //   = omega (n-1)/(n c_n^{n-1}) int_0^inf u^{n-2} (1+u)^{-n} du.
    // Integrate u in [0, U] after u = e^v - 1, then attach the closed-form tail.
    const double U = 1e8;
    const double vmax = std::log1p(U);
    const int segments = 4000;  // composite Simpson
    auto f = [&](double v) {
        double u = std::expm1(v);
        return ipow(u, n - 2) * std::pow(1.0 + u, -static_cast<double>(n)) * (u + 1.0);
    };
    CompensatedSum s;
    double h = vmax / segments;
    for (int i = 0; i < segments; ++i) {
        double a = i * h, bb = a + h;
        s.add(h / 6.0 * (f(a) + 4.0 * f(0.5 * (a + bb)) + f(bb)));
    }
    // Tail: int_U^inf u^{n-2}(1+u)^{-n} du expanded in powers of (1+u).
    CompensatedSum tail;
    for (int k = 0; k <= n - 2; ++k)
        tail.add(binomial(n - 2, k) * (((n - 2 - k) % 2) ? -1.0 : 1.0) *
                 std::pow(1.0 + U, k - n + 1.0) / (n - 1 - k));
    double inner = s.value() + tail.value();
    return omega(n) * (n - 1.0) / (n * std::pow(b.coefficient, n - 1.0)) * inner;
}

double bubble_nlap(const BubbleProfile& b, double r, double h_rel) {
    if (!(r > 0.0)) throw std::invalid_argument("bubble_nlap: r must be positive");
    const int n = b.n;
    const double w = omega(n);
    auto flux = [&](double x) { return w * std::pow(x, n - 1) * sgn_pow(b.psi_prime(x), n - 1); };
    double h = h_rel * r;
    double d = (flux(r + h) - flux(r - h)) / (2.0 * h);
    return -d / (w * std::pow(r, n - 1));
}

double bubble_ode_residual(int n, const std::vector<double>& r_list, double h_rel) {
    if (r_list.empty()) throw std::invalid_argument("bubble_ode_residual: empty r list");
    BubbleProfile b(n);
    double coef = std::pow(n * critical_exponent(n) / (n - 1.0), n - 1.0);
    double worst = 0.0;
    for (double r : r_list) {
        if (!(r > 0.0)) throw std::invalid_argument("bubble_ode_residual: r must be positive");
        double lhs = bubble_nlap(b, r, h_rel);
        double rhs = coef * std::exp(b.psi(r));
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    return worst;
}

std::pair<RadialFunction, Section5Params> section5_family(int n, double alpha,
                                                          const GreenFunction& green,
                                                          double epsilon) {
    if (green.n != n || green.alpha != alpha)
        throw std::invalid_argument("section5_family: green function solved for other parameters");
    if (!(epsilon > 0.0) || epsilon >= 0.1)
        throw std::invalid_argument("section5_family: epsilon must lie in (0, 0.1)");

    const double an = critical_exponent(n);
    const double w = omega(n);
    const double p = static_cast<double>(n) / (n - 1);
    const BubbleProfile bubble(n);
    const double cn = bubble.coefficient;
    const double Gn = green.ln_norm_pow_n;

    Section5Params prm;
    prm.epsilon = epsilon;
    prm.E = -harmonic(n - 1);
    prm.B_eps = -(n - 1) * prm.E / an;
    prm.R = -std::log(epsilon);
    // Normalization: alpha_n C^{n/(n-1)} = (n-1)E + log(omega/n) - n log eps + alpha_n A.
    double Cp = ((n - 1) * prm.E + std::log(w / n) - n * std::log(epsilon) + an * green.A) / an;
    if (!(Cp > 0.0))
        throw std::invalid_argument("section5_family: epsilon too large, C undefined");
    prm.C = std::pow(Cp, (n - 1.0) / n);

    const double cut = prm.R * epsilon;
    if (!(cut < green.Rmax))
        throw std::invalid_argument("section5_family: R*eps beyond the green domain");

    const double K = static_cast<double>(n) / an;
    auto G_val = [&](double r) {
        // Below the solved range the log asymptotic is accurate to O(r^n log^n r).
        if (r < green.grid->inner_radius()) return -K * std::log(r) + green.A;
        return green.value_at(r);
    };
    auto G_der = [&](double r) {
        if (r < green.grid->inner_radius()) return -K / r;
        return green.deriv_at(r);
    };

    const double denom_in = std::pow(1.0 + alpha * Gn / Cp, 1.0 / n);
    const double denom_out = std::pow(Cp + alpha * Gn, 1.0 / n);
    auto inner_val = [&](double r) {
        double lg = std::log1p(cn * std::pow(r / epsilon, p));
        return (prm.C - std::pow(prm.C, -1.0 / (n - 1)) * ((n - 1) / an * lg - prm.B_eps)) /
               denom_in;
    };
    auto inner_der = [&](double r) {
        if (r <= 0.0) return 0.0;
        double rp = std::pow(r / epsilon, p);
        double dlg = cn * p * rp / (r * (1.0 + cn * rp));
        return -std::pow(prm.C, -1.0 / (n - 1)) * (n - 1) / an * dlg / denom_in;
    };
    auto outer_val = [&](double r) { return G_val(r) / denom_out; };
    auto outer_der = [&](double r) { return G_der(r) / denom_out; };

    prm.matching_mismatch = std::abs(inner_val(cut) - outer_val(cut)) / std::abs(outer_val(cut));
    double phi1 = std::pow(cut, n) * std::pow(prm.C, n);
    double phi2 = std::pow(cut, n) * std::pow(std::abs(std::log(cut)), n);
    double phi3 = std::pow(prm.R, -p);
    double phi4 = std::pow(Cp, -2.0);
    double phi5 = std::pow(prm.C, n * p) * std::pow(prm.R, n) * std::pow(epsilon, n);
    prm.phi_err = phi1 + phi2 + phi3 + phi4 + phi5;

    // Composite grid: uniform core resolving the bubble scale, green nodes outside.
    const int J = 4096;
    std::vector<double> nodes;
    nodes.reserve(J + green.grid->size());
    for (int j = 0; j <= J; ++j) nodes.push_back(cut * j / J);
    for (std::size_t i = 0; i < green.grid->size(); ++i) {
        double r = green.grid->node(i);
        if (r > cut * (1.0 + 1e-12)) nodes.push_back(r);
    }
    auto grid = std::make_shared<RadialGrid>(RadialGrid::from_nodes(n, std::move(nodes)));

    std::vector<double> vals(grid->size()), ders(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        double r = grid->node(i);
        if (r < cut) {
            vals[i] = inner_val(r);
            ders[i] = inner_der(r);
        } else {
            vals[i] = outer_val(r);
            ders[i] = outer_der(r);
        }
    }
    RadialFunction raw(grid, std::move(vals), std::move(ders));
    Norms nm = norms(raw);
    prm.sobolev_pre_rescale = nm.sobolev;

    std::vector<double> sv(raw.values()), sd(raw.derivs());
    for (auto& v : sv) v /= nm.sobolev;
    for (auto& v : sd) v /= nm.sobolev;
    return {RadialFunction(grid, std::move(sv), std::move(sd)), prm};
}

GapScan existence_gap(int n, double alpha, const GreenFunction& green,
                      const std::vector<double>& eps_list) {
    if (eps_list.empty()) throw std::invalid_argument("existence_gap: empty epsilon list");
    TMParams params = TMParams::critical(n, alpha);
    double bound = carleson_chang_bound(n, green.A).cc_bound;
    GapScan scan;
    scan.best_gap = -std::numeric_limits<double>::infinity();
    for (double eps : eps_list) {
        auto [u, prm] = section5_family(n, alpha, green, eps);
        FunctionalValue fv = tm_functional(u, params);
        GapPoint pt;
        pt.epsilon = eps;
        pt.functional = fv.value;
        pt.bound = bound;
        pt.gap = fv.value - bound;
        scan.rows.push_back(pt);
        if (pt.gap > scan.best_gap) {
            scan.best_gap = pt.gap;
            scan.best_epsilon = eps;
        }
    }
    return scan;
}

}  // namespace tmlab
