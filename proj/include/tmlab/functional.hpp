#ifndef TMLAB_FUNCTIONAL_HPP
#define TMLAB_FUNCTIONAL_HPP

#include "tmlab/radial.hpp"

namespace tmlab {

// Phi(t) = e^t - sum_{j=0}^{n-2} t^j/j!, evaluated by the convergent tail
// series below t = n to avoid cancellation.
double phi(int n, double t);

// Phi'(t) = sum_{j>=n-2} t^j/j! = e^t - sum_{j=0}^{n-3} t^j/j!.
double phi_prime(int n, double t);

// log Phi(t), stable for large t (log_phi -> t as t -> inf).
double log_phi(int n, double t);

struct TMParams {
    int n = 2;
    double alpha = 0.0;    // coupling on ||u||_n^n
    double beta = 0.0;     // exponent, 0 < beta <= alpha_n; alpha_n when critical
    double alpha_n = 0.0;  // n * omega_{n-1}^{1/(n-1)}

    static TMParams critical(int n, double alpha);
    static TMParams subcritical(int n, double alpha, double beta_fraction);
    void validate() const;
};

struct FunctionalValue {
    double value = 0.0;          // integral of Phi(...) over the grid
    double log_value = 0.0;      // log of the same; authoritative when overflowed
    bool overflowed = false;     // true when the sum was formed in log space
    double exponent_used = 0.0;  // beta (1 + alpha ||u||_n^n)^{1/(n-1)}
    double tail_estimate = 0.0;  // envelope rate beyond the grid, reported, never added
    Norms norms;
};

// I(u) = integral of Phi(beta |u|^{n/(n-1)} (1 + alpha ||u||_n^n)^{1/(n-1)})
// over the grid ball. Per-node exponents above ~700 switch the accumulation to
// log-sum-exp; the linear `value` then saturates and `log_value` is the result.
// The tail beyond the outer radius is estimated from the decreasing-radial
// pointwise bound (one e-fold of the envelope) and reported separately.
FunctionalValue tm_functional(const RadialFunction& u, const TMParams& params);

struct Multipliers {
    double alpha_k = 0.0;  // beta (1 + alpha N)^{1/(n-1)}, N = ||u||_n^n
    double mu_k = 0.0;     // (1 + alpha N) / (1 + 2 alpha N)
    double gamma_k = 0.0;  // alpha / (1 + 2 alpha N)
    double lambda_k = 0.0; // integral of u^{n/(n-1)} Phi'(alpha_k u^{n/(n-1)})
};

Multipliers multipliers(const RadialFunction& u, const TMParams& params);

}  // namespace tmlab

#endif
