#ifndef TMLAB_NUMERICS_HPP
#define TMLAB_NUMERICS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tmlab {

// Surface measure of the unit sphere S^{n-1} in R^n (omega_1 = 2*pi, omega_2 = 4*pi).
inline double omega(int n) {
    if (n < 2) throw std::invalid_argument("omega: dimension must be >= 2");
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

// Critical Moser exponent alpha_n = n * omega_{n-1}^{1/(n-1)}.
inline double critical_exponent(int n) {
    return n * std::pow(omega(n), 1.0 / (n - 1));
}

// Volume of the ball of radius R in R^n.
inline double ball_volume(int n, double R) {
    return omega(n) / n * std::pow(R, n);
}

// H_{m} = 1 + 1/2 + ... + 1/m (H_0 = 0).
inline double harmonic(int m) {
    double s = 0.0;
    for (int j = 1; j <= m; ++j) s += 1.0 / j;
    return s;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
    return b;
}

// x^k for small non-negative integer k.
inline double ipow(double x, int k) {
    double p = 1.0;
    for (int j = 0; j < k; ++j) p *= x;
    return p;
}

// Odd power map |x|^{p-1} x, continuously extended by 0 at x = 0.
inline double sgn_pow(double x, double p) {
    if (x == 0.0) return 0.0;
    return x > 0 ? std::pow(x, p) : -std::pow(-x, p);
}

// e_m(x) = sum_{j=0}^{m} x^j / j!
inline double exp_partial_sum(int m, double x) {
    double term = 1.0, s = 1.0;
    for (int j = 1; j <= m; ++j) {
        term *= x / j;
        s += term;
    }
    return s;
}

// Lower incomplete gamma for integer shape: gamma(m+1, x) = m! (1 - e^{-x} e_m(x)).
inline double lower_gamma_int(int m, double x) {
    if (x <= 0.0) return 0.0;
    double fact = std::tgamma(m + 1.0);
    double ex = std::exp(-x);
    return fact * (1.0 - ex * exp_partial_sum(m, x));
}

// Upper incomplete gamma for integer shape: Gamma(m+1, x) = m! e^{-x} e_m(x).
inline double upper_gamma_int(int m, double x) {
    double fact = std::tgamma(m + 1.0);
    if (x <= 0.0) return fact;
    return fact * std::exp(-x) * exp_partial_sum(m, x);
}

// Neumaier compensated accumulator.
class CompensatedSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            c_ += (sum_ - t) + x;
        else
            c_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

  private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

// log(exp(a) + exp(b)) without overflow; -inf operands are absorbing.
inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double hi = a > b ? a : b;
    double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

// Piecewise-linear interpolation of (x, y) samples; clamps outside the range.
inline double lerp_at(const std::vector<double>& x, const std::vector<double>& y, double xq) {
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    std::size_t lo = 0, hi = x.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (x[mid] <= xq)
            lo = mid;
        else
            hi = mid;
    }
    double t = (xq - x[lo]) / (x[hi] - x[lo]);
    return y[lo] + t * (y[hi] - y[lo]);
}

// Numerical failure distinct from invalid input (non-convergence, bracket failure, ...).
class numerical_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace tmlab

#endif
