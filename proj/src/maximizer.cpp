#include "tmlab/maximizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tmlab {

namespace {

// Interface n-flux between nodes i-1 and i of the piecewise-linear profile:
// omega (r_i^n - r_{i-1}^n)/(n dr) |du/dr|^{n-2} (du/dr).
struct CellOps {
    const RadialGrid* g;
    int n;
    double w;

    explicit CellOps(const RadialGrid& grid) : g(&grid), n(grid.dim()), w(grid.surface_measure()) {}

    double flux(const std::vector<double>& u, std::size_t i) const {
        double dr = g->node(i) - g->node(i - 1);
        double slope = (u[i] - u[i - 1]) / dr;
        double shell = w * (std::pow(g->node(i), n) - std::pow(g->node(i - 1), n)) / (n * dr);
        return shell * sgn_pow(slope, n - 1);
    }

    double grad_energy(const std::vector<double>& u) const {
        CompensatedSum s;
        for (std::size_t i = 1; i < u.size(); ++i) {
            double dr = g->node(i) - g->node(i - 1);
            double vol = w * (std::pow(g->node(i), n) - std::pow(g->node(i - 1), n)) / n;
            s.add(vol * std::pow(std::abs((u[i] - u[i - 1]) / dr), n));
        }
        return s.value();
    }

    double lp_energy(const std::vector<double>& u) const {
        CompensatedSum s;
        for (std::size_t i = 0; i < u.size(); ++i)
            s.add(g->weight(i) * std::pow(std::abs(u[i]), n));
        return s.value();
    }

    // (-Delta_n u + u^{n-1}) nodal density, the first variation of the
    // discrete Sobolev energy over n.
    void constraint_density(const std::vector<double>& u, std::vector<double>& h) const {
        const std::size_t M = u.size();
        h.assign(M, 0.0);
        for (std::size_t i = 0; i < M; ++i) {
            double left = i > 0 ? flux(u, i) : 0.0;
            double right = i + 1 < M ? flux(u, i + 1) : 0.0;
            h[i] = (left - right) / g->weight(i) + sgn_pow(u[i], n - 1);
        }
    }
};

struct Evaluation {
    double value = -std::numeric_limits<double>::infinity();
    double N = 0.0;         // ||u||_n^n
    double coupling = 0.0;  // (1 + alpha N)^{1/(n-1)}
    bool usable = false;
};

Evaluation evaluate(const CellOps& ops, const TMParams& prm, const std::vector<double>& u) {
    Evaluation ev;
    ev.N = ops.lp_energy(u);
    ev.coupling = std::pow(1.0 + prm.alpha * ev.N, 1.0 / (prm.n - 1));
    const double p = static_cast<double>(prm.n) / (prm.n - 1);
    CompensatedSum s;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double t = prm.beta * ev.coupling * std::pow(u[i], p);
        if (t > 690.0) return ev;  // reject: let the line search shrink the step
        s.add(ops.g->weight(i) * phi(prm.n, t));
    }
    ev.value = s.value();
    ev.usable = true;
    return ev;
}

// Pointwise density of the functional gradient, coupling term included.
void ascent_density(const CellOps& ops, const TMParams& prm, const std::vector<double>& u,
                    const Evaluation& ev, std::vector<double>& gdir) {
    const int n = prm.n;
    const double p = static_cast<double>(n) / (n - 1);
    const double ak = prm.beta * ev.coupling;
    gdir.assign(u.size(), 0.0);
    CompensatedSum lam;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double up = std::pow(u[i], p);
        double dphi = phi_prime(n, ak * up);
        lam.add(ops.g->weight(i) * up * dphi);
        gdir[i] = ak * p * std::pow(u[i], 1.0 / (n - 1)) * dphi;
    }
    double lambda = lam.value();
    // Chain rule through ||u||_n^n in the coupling factor.
    double cfac = prm.beta * prm.alpha * p *
                  std::pow(1.0 + prm.alpha * ev.N, (2.0 - n) / (n - 1.0)) / (n - 1.0) * lambda *
                  static_cast<double>(n - 1);
    // d coupling/dN = (1/(n-1)) (1+alpha N)^{(2-n)/(n-1)} alpha; dN/du_i = n u^{n-1} w_i.
    cfac = prm.beta * prm.alpha * lambda * n / (n - 1.0) *
           std::pow(1.0 + prm.alpha * ev.N, (2.0 - n) / (n - 1.0));
    for (std::size_t i = 0; i < u.size(); ++i)
        gdir[i] += cfac * sgn_pow(u[i], n - 1);
}

void repair(const RadialGrid& g, std::vector<double>& u, GridPtr grid) {
    for (auto& v : u) v = std::max(v, 0.0);
    u.back() = 0.0;
    if (!std::is_sorted(u.rbegin(), u.rend())) {
        RadialFunction wrapped(grid, u);
        u = decreasing_rearrangement(wrapped).values();
        for (auto& v : u) v = std::max(v, 0.0);
        u.back() = 0.0;
    }
    (void)g;
}

void normalize(const CellOps& ops, std::vector<double>& u) {
    double sn = ops.grad_energy(u) + ops.lp_energy(u);
    if (!(sn > 0.0)) throw numerical_error("maximize_subcritical: degenerate iterate");
    double s = std::pow(sn, -1.0 / ops.n);
    for (auto& v : u) v *= s;
}

std::vector<double> tent_profile(const RadialGrid& g, double support) {
    std::vector<double> u(g.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = std::max(0.0, 1.0 - g.node(i) / support);
    return u;
}

struct AscentResult {
    std::vector<double> u;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    double residual = 1.0;
};

AscentResult ascend(const CellOps& ops, const TMParams& prm, GridPtr grid,
                    std::vector<double> u, const OptimizerOptions& opts) {
    normalize(ops, u);
    Evaluation ev = evaluate(ops, prm, u);
    if (!ev.usable) throw numerical_error("maximize_subcritical: initializer overflows");

    AscentResult out;
    double step = opts.step0;
    int stall = 0;
    std::vector<double> gdir, hdir, trial;
    auto wdot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        CompensatedSum s;
        for (std::size_t i = 0; i < a.size(); ++i) s.add(ops.g->weight(i) * a[i] * b[i]);
        return s.value();
    };

    int iter = 0;
    bool residual_ok = opts.res_target <= 0.0;
    for (; iter < opts.max_iters; ++iter) {
        ascent_density(ops, prm, u, ev, gdir);
        ops.constraint_density(u, hdir);
        double hh = wdot(hdir, hdir);
        double gh = wdot(gdir, hdir);
        double c = hh > 0.0 ? gh / hh : 0.0;
        for (std::size_t i = 0; i < gdir.size(); ++i) gdir[i] -= c * hdir[i];
        gdir.back() = 0.0;
        double gnorm = std::sqrt(wdot(gdir, gdir));
        if (!(gnorm > 0.0)) break;

        bool accepted = false;
        while (step > 1e-18) {
            trial = u;
            for (std::size_t i = 0; i < trial.size(); ++i)
                trial[i] += step / gnorm * gdir[i];
            repair(*ops.g, trial, grid);
            normalize(ops, trial);
            Evaluation trial_ev = evaluate(ops, prm, trial);
            if (trial_ev.usable && trial_ev.value >= ev.value) {
                double gain = trial_ev.value - ev.value;
                u.swap(trial);
                ev = trial_ev;
                accepted = true;
                stall = (gain <= opts.tol * std::max(ev.value, 1e-300)) ? stall + 1 : 0;
                step = std::min(step * 1.6, 1e3 * opts.step0);
                break;
            }
            step *= opts.backtrack;
        }
        if (!accepted) ++stall;

        if (stall >= opts.patience || !accepted) {
            if (!residual_ok) {
                RadialFunction uf(grid, u);
                out.residual = el_residual(uf, prm);
                residual_ok = out.residual <= opts.res_target;
            }
            if (residual_ok || !accepted) {
                out.converged = residual_ok || stall >= opts.patience;
                break;
            }
            stall = 0;  // keep polishing toward the residual target
        }
    }
    out.u = std::move(u);
    out.value = ev.value;
    out.iterations = iter;
    if (out.residual == 1.0) {
        RadialFunction uf(grid, out.u);
        out.residual = el_residual(uf, prm);
        if (opts.res_target > 0.0)
            out.converged = out.converged && out.residual <= opts.res_target;
        else
            out.converged = true;
    }
    return out;
}

}  // namespace

double discrete_sobolev_pow_n(const RadialFunction& u) {
    CellOps ops(u.grid());
    return ops.grad_energy(u.values()) + ops.lp_energy(u.values());
}

MaximizerState maximize_subcritical(const TMParams& params, GridPtr grid,
                                    const OptimizerOptions& opts,
                                    const RadialFunction* warm_start) {
    params.validate();
    if (params.beta >= params.alpha_n * (1.0 - 1e-12))
        throw std::invalid_argument(
            "maximize_subcritical: beta must be strictly subcritical; use continuation for the "
            "critical limit");
    if (grid->dim() != params.n)
        throw std::invalid_argument("maximize_subcritical: grid dimension mismatch");

    CellOps ops(*grid);
    std::vector<double> init;
    if (warm_start) {
        if (warm_start->size() != grid->size())
            throw std::invalid_argument("maximize_subcritical: warm start on a different grid");
        init = warm_start->values();
    } else {
        init = tent_profile(*grid, grid->outer_radius());
        if (opts.seed != 0) {
            std::mt19937 rng(opts.seed);
            std::normal_distribution<double> noise(0.0, 0.05);
            for (auto& v : init) v = std::max(0.0, v * (1.0 + noise(rng)));
        }
    }
    repair(*grid, init, grid);

    AscentResult best = ascend(ops, params, grid, init, opts);
    int restarts = 0;
    if (!warm_start && best.value < 1e-10) {
        // Phi is flat at 0; a concentrated tent escapes the degenerate basin.
        AscentResult tall =
            ascend(ops, params, grid, tent_profile(*grid, grid->outer_radius() / 8.0), opts);
        ++restarts;
        if (tall.value > best.value) best = std::move(tall);
    }

    MaximizerState st{RadialFunction(grid, best.u)};
    st.c_k = st.u.value(0);
    st.functional = tm_functional(st.u, params);
    st.mult = multipliers(st.u, params);
    st.sobolev = std::pow(discrete_sobolev_pow_n(st.u), 1.0 / params.n);
    st.el_residual = best.residual;
    st.iterations = best.iterations;
    st.restarts = restarts;
    st.converged = best.converged;

    const double p = static_cast<double>(params.n) / (params.n - 1);
    st.log_r_k_pow_n = std::log(st.mult.lambda_k) - std::log(st.mult.mu_k) -
                       p * std::log(st.c_k) - st.mult.alpha_k * std::pow(st.c_k, p);
    st.r_k = std::exp(st.log_r_k_pow_n / params.n);
    return st;
}

double el_residual(const RadialFunction& u, const TMParams& params) {
    params.validate();
    double peak = u.max_value();
    if (!(peak > 0.0)) throw std::invalid_argument("el_residual: undefined for u == 0");

    const RadialGrid& g = u.grid();
    const int n = g.dim();
    const double p = static_cast<double>(n) / (n - 1);
    CellOps ops(g);
    Multipliers m = multipliers(u, params);
    if (!(m.lambda_k > 0.0)) throw numerical_error("el_residual: lambda_k vanished");

    const auto& uv = u.values();
    CompensatedSum res2, rhs2;
    for (std::size_t i = 0; i + 1 < uv.size(); ++i) {
        double left = i > 0 ? ops.flux(uv, i) : 0.0;
        double right = ops.flux(uv, i + 1);
        double nlap = (left - right) / g.weight(i);  // -Delta_n u
        double source = m.mu_k / m.lambda_k * std::pow(std::abs(uv[i]), 1.0 / (n - 1)) *
                        phi_prime(n, m.alpha_k * std::pow(std::abs(uv[i]), p));
        double rhs = source + m.gamma_k * sgn_pow(uv[i], n - 1);
        double res = nlap + sgn_pow(uv[i], n - 1) - rhs;
        res2.add(g.weight(i) * res * res);
        rhs2.add(g.weight(i) * rhs * rhs);
    }
    double denom = std::sqrt(std::max(rhs2.value(), 0.0));
    if (!(denom > 0.0)) throw numerical_error("el_residual: vanishing right-hand side");
    return std::sqrt(std::max(res2.value(), 0.0)) / denom;
}

BlowupRescaling blowup_rescale(const MaximizerState& state, const std::vector<double>& x_grid) {
    if (!(state.c_k > 0.0)) throw std::invalid_argument("blowup_rescale: vanishing peak");
    const int n = state.u.grid().dim();
    const double p = static_cast<double>(n) / (n - 1);
    BlowupRescaling out;
    out.r_k = state.r_k;
    out.x = x_grid;
    double R = state.u.grid().outer_radius();
    double scale = p * state.mult.alpha_k * std::pow(state.c_k, 1.0 / (n - 1));
    for (double x : x_grid) {
        double r = state.r_k * x;
        if (r > R) out.truncated = true;
        double m = state.u(std::min(r, R));
        out.m.push_back(m);
        out.phi.push_back(m / state.c_k);
        out.psi.push_back(scale * (m - state.c_k));
    }
    return out;
}

double bubble_sup_distance(const BlowupRescaling& rescaling, int n) {
    BubbleProfile b(n);
    double worst = 0.0;
    for (std::size_t i = 0; i < rescaling.x.size(); ++i)
        worst = std::max(worst, std::abs(rescaling.psi[i] - b.psi(rescaling.x[i])));
    return worst;
}

ConcentrationReport concentration_report(const MaximizerState& state,
                                         const std::vector<double>& delta_list) {
    const RadialGrid& g = state.u.grid();
    const int n = g.dim();
    ConcentrationReport rep;
    const double p = static_cast<double>(n) / (n - 1);
    rep.lambda_over_c = state.mult.lambda_k / state.c_k;
    rep.c_pow_over_lambda = std::pow(state.c_k, p) / state.mult.lambda_k;
    for (double delta : delta_list) {
        ConcentrationRow row;
        row.delta = delta;
        CompensatedSum s;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.node(i) <= delta) continue;
            s.add(g.weight(i) * (std::pow(std::abs(state.u.deriv(i)), n) +
                                 std::pow(std::abs(state.u.value(i)), n)));
        }
        row.energy_outside = std::max(s.value(), 0.0);
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace tmlab
