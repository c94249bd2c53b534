#ifndef TMLAB_MAXIMIZER_HPP
#define TMLAB_MAXIMIZER_HPP

#include <optional>

#include "tmlab/functional.hpp"
#include "tmlab/sequences.hpp"

namespace tmlab {

struct OptimizerOptions {
    int max_iters = 200000;
    double tol = 1e-12;        // relative functional gain treated as a stall
    int patience = 300;        // stalled accepted steps before stopping
    double step0 = 0.25;
    double backtrack = 0.5;
    double res_target = 5e-4;  // keep polishing until the E-L residual drops below this
    unsigned seed = 0;         // nonzero: perturb the tent initializer
};

struct MaximizerState {
    RadialFunction u;            // non-negative, decreasing, u(R) = 0, unit Sobolev norm
    double c_k = 0.0;            // peak u(0)
    Multipliers mult;
    double r_k = 0.0;            // blow-up scale from the defining identity
    double log_r_k_pow_n = 0.0;  // log r_k^n, safe for large exponents
    FunctionalValue functional;
    double el_residual = 0.0;
    double sobolev = 0.0;        // the optimizer's discrete Sobolev norm
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
};

// Discrete W^{1,n} norm used by the optimizer: piecewise-linear (cell) gradient
// energy plus nodal L^n quadrature. Its first variation is the flux-difference
// n-Laplacian appearing in el_residual.
double discrete_sobolev_pow_n(const RadialFunction& u);

// Projected gradient ascent of I on the unit sphere of the discrete W^{1,n}
// norm over non-negative decreasing profiles with u(R) = 0: tangential ascent
// direction, backtracking line search, rescaling projection, rearrangement
// feasibility repair. Requires beta < alpha_n strictly.
MaximizerState maximize_subcritical(const TMParams& params, GridPtr grid,
                                    const OptimizerOptions& opts = {},
                                    const RadialFunction* warm_start = nullptr);

// Relative discrete weak-form defect of
//   -Delta_n u + u^{n-1} = mu/lambda u^{1/(n-1)} Phi'(alpha_k u^{n/(n-1)}) + gamma u^{n-1}
// in the quadrature dual norm.
double el_residual(const RadialFunction& u, const TMParams& params);

struct BlowupRescaling {
    double r_k = 0.0;
    std::vector<double> x;    // requested sample points
    std::vector<double> m;    // m_k(x) = u(r_k x)
    std::vector<double> phi;  // m_k / c_k
    std::vector<double> psi;  // (n/(n-1)) alpha_k c_k^{1/(n-1)} (m_k - c_k)
    bool truncated = false;   // r_k * max(x) exceeded the grid support
};

BlowupRescaling blowup_rescale(const MaximizerState& state, const std::vector<double>& x_grid);

// sup over the sample points of |psi_k - psi| against the closed-form bubble.
double bubble_sup_distance(const BlowupRescaling& rescaling, int n);

struct ConcentrationRow {
    double delta = 0.0;
    double energy_outside = 0.0;  // int_{r > delta} (|u'|^n + u^n)
};

struct ConcentrationReport {
    std::vector<ConcentrationRow> rows;
    double lambda_over_c = 0.0;      // lambda_k / c_k
    double c_pow_over_lambda = 0.0;  // c_k^{n/(n-1)} / lambda_k
};

ConcentrationReport concentration_report(const MaximizerState& state,
                                         const std::vector<double>& delta_list);

}  // namespace tmlab

#endif
