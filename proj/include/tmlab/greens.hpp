#ifndef TMLAB_GREENS_HPP
#define TMLAB_GREENS_HPP

#include "tmlab/radial.hpp"

namespace tmlab {

// Radial solution of -Delta_n G = delta_0 + (alpha - 1) G^{n-1} on (0, Rmax],
// solved by shooting on the asymptotic constant A of
//   G(r) = -(n/alpha_n) log r + A + O(r^n log^n r)  near 0.
struct GreenFunction {
    int n = 2;
    double alpha = 0.0;
    GridPtr grid;                 // geometric nodes of the integration
    std::vector<double> values;   // G at the nodes
    std::vector<double> derivs;   // G' at the nodes
    std::vector<double> fluxes;   // signed n-flux omega r^{n-1}|G'|^{n-2}G'
    double A = 0.0;               // fitted asymptotic constant
    double flux_residual = 0.0;   // max defect of the integrated flux law
    double Rmax = 0.0;
    double G_at_Rmax = 0.0;
    double ln_norm = 0.0;         // ||G||_n on the truncated domain
    double ln_norm_pow_n = 0.0;   // ||G||_n^n

    double value_at(double r) const { return lerp_at(grid->nodes(), values, r); }
    double deriv_at(double r) const { return lerp_at(grid->nodes(), derivs, r); }
};

struct GreenOptions {
    int steps = 20000;          // RK4 steps in log r
    int max_bisect = 200;
    double decay_target = 1e-6; // accept when G(Rmax) lands in [0, decay_target]
    double bracket_lo = -4.0;
    double bracket_hi = 4.0;
    bool source_enabled = true; // false: drop (alpha-1)G^{n-1}, pure log test hook
    double hook_constant = 0.0; // A used when the source is disabled
};

// Outward integration of the flux form from r0 with unit Dirac flux; bisection
// on the additive constant until G decays at Rmax. Requires 0 <= alpha < 1.
GreenFunction solve_green(int n, double alpha, double r0, double Rmax, double tol,
                          GreenOptions opts = {});

// A = mean over the window of G(r) + (n/alpha_n) log r. Throws when the window
// deviation is incompatible with the O(r^n log^n r) remainder.
double extract_A(const GreenFunction& g, double r_lo, double r_hi,
                 double* max_deviation = nullptr);

struct BoundReport {
    double A = 0.0;
    double cc_bound = 0.0;   // (omega/n) exp(alpha_n A + 1 + 1/2 + ... + 1/(n-1))
    double cc_ball = 0.0;    // |B| (1 + e^{1 + 1/2 + ... + 1/(n-1)})
    double E = 0.0;          // -(1 + 1/2 + ... + 1/(n-1))
    double E_binomial = 0.0; // sum_k C(n-1,k) (-1)^{n-1-k} / (n-k-1), equals E
};

BoundReport carleson_chang_bound(int n, double A);

struct CapacityCheck {
    double lhs = 0.0;        // int_{r>delta} |grad G|^n + (1-alpha) int_{r>delta} G^n
    double rhs_bare = 0.0;   // omega |G'(delta)|^{n-1} delta^{n-1}
    double rhs_weighted = 0.0;  // G(delta) * rhs_bare
    double residual_bare = 0.0;
    double residual_weighted = 0.0;
};

// Exterior energy against both candidate boundary terms of the capacity
// identity (with and without the G(delta) factor).
CapacityCheck capacity_identity_check(const GreenFunction& g, double delta);

}  // namespace tmlab

#endif
