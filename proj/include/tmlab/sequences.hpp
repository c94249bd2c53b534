#ifndef TMLAB_SEQUENCES_HPP
#define TMLAB_SEQUENCES_HPP

#include <utility>

#include "tmlab/functional.hpp"
#include "tmlab/greens.hpp"
#include "tmlab/radial.hpp"

namespace tmlab {

// Truncated-log test family: constant (log k)^{(n-1)/n} / omega^{1/n} on
// [0, R_k/k], logarithmic on (R_k/k, R_k], zero beyond, R_k = (log k)^{1/2n} / log log k.
// k is carried as log k so scans can reach k = 10^512.
struct MoserSequenceParams {
    int n = 2;
    double log_k = 0.0;

    static MoserSequenceParams from_k(int n, double k);
    static MoserSequenceParams from_log10_k(int n, double log10_k);

    double R_k() const;
    double inner_radius() const;  // R_k / k
    double peak() const;          // (log k)^{(n-1)/n} / omega^{1/n}
};

double moser_function(const MoserSequenceParams& p, double r);
double moser_function_deriv(const MoserSequenceParams& p, double r);

struct MoserNorms {
    Norms norms;          // grad_n = 1 in closed form; lp_n from the exact branch integrals
    double lp_ratio;      // ||u_k||_n^n log k / R_k^n
};

MoserNorms moser_norms(const MoserSequenceParams& p);

// Gradient norm recomputed by grid quadrature (geometric grid aligned to the
// support annulus); should reproduce 1.
Norms moser_norms_quadrature(const MoserSequenceParams& p, int M = 500000);

struct SharpnessPoint {
    double log10_k = 0.0;
    double log_lower_bound = 0.0;   // inner-ball contribution, Theorem-1 exponent
    double prediction = 0.0;        // (1/2) log log k - n log log log k
    double log_lower_bound_variant = 0.0;  // first-power coupling variant
};

// Closed-form log-space lower bound for the critical functional at the Moser
// profile of index k: |B_{R_k/k}| Phi(exponent at the peak).
SharpnessPoint sharpness_point(int n, double alpha, double log10_k);

std::vector<SharpnessPoint> sharpness_scan(int n, double alpha,
                                           const std::vector<double>& log10_k_list);

// Blow-up limit profile psi(x) = -n log(1 + c_n |x|^{n/(n-1)}), c_n = (omega/n)^{1/(n-1)}.
struct BubbleProfile {
    int n;
    double coefficient;

    explicit BubbleProfile(int dim);
    double psi(double r) const;
    double psi_prime(double r) const;
};

inline double bubble_psi(const BubbleProfile& b, double r) { return b.psi(r); }

// Quadrature of int_{R^n} e^psi dx with analytic tail; equals 1.
double bubble_integral(int n);

// -Delta_n psi at r, by centered differencing of the analytic radial n-flux.
double bubble_nlap(const BubbleProfile& b, double r, double h_rel = 1e-4);

// max over r_list of the relative defect of -Delta_n psi = (n alpha_n/(n-1))^{n-1} e^psi.
double bubble_ode_residual(int n, const std::vector<double>& r_list, double h_rel = 1e-4);

// Section-5 competitor family: truncated bubble core matched to the Green tail.
struct Section5Params {
    double epsilon = 0.0;
    double R = 0.0;           // cut radius parameter, R = -log epsilon
    double C = 0.0;           // peak normalization constant
    double B_eps = 0.0;
    double E = 0.0;
    double phi_err = 0.0;     // aggregate O(phi) error scale
    double matching_mismatch = 0.0;   // relative branch mismatch at R*epsilon
    double sobolev_pre_rescale = 0.0; // before the exact unit-norm rescale
};

std::pair<RadialFunction, Section5Params> section5_family(int n, double alpha,
                                                          const GreenFunction& green,
                                                          double epsilon);

struct GapPoint {
    double epsilon = 0.0;
    double functional = 0.0;
    double bound = 0.0;
    double gap = 0.0;
};

struct GapScan {
    std::vector<GapPoint> rows;
    double best_gap = 0.0;
    double best_epsilon = 0.0;
};

// max over the epsilon scan of functional(u_eps) - carleson_chang_bound; a
// positive gap certifies that concentrating sequences cannot reach the
// supremum. Negative gaps are reported, not errors.
GapScan existence_gap(int n, double alpha, const GreenFunction& green,
                      const std::vector<double>& eps_list);

}  // namespace tmlab

#endif
