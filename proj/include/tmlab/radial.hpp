#ifndef TMLAB_RADIAL_HPP
#define TMLAB_RADIAL_HPP

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "tmlab/numerics.hpp"

namespace tmlab {

enum class SpacingKind { uniform, geometric, uniform_volume, custom };

std::string to_string(SpacingKind k);

// 1-D radial mesh on [r_0, R] carrying n-dimensional volume quadrature weights:
//   sum_i w_i f(r_i)  ~  integral over B_R of f(|x|) dx.
// Weights are exact cell volumes with cell boundaries at radial midpoints, so
// sum_i w_i = omega_{n-1} (R^n - r_0^n) / n holds to rounding on every grid.
class RadialGrid {
  public:
    static RadialGrid uniform(int n, double R, int M);
    // Nodes r0 * g^i with g = (R/r0)^{1/M}; clusters near 0 for log singularities.
    static RadialGrid geometric(int n, double R, int M, double r0);
    // M equal-volume cells with nodes at cell volume centers, plus a zero-weight
    // node at R. Rearrangement is an exact sort on these grids.
    static RadialGrid uniform_volume(int n, double R, int M);
    static RadialGrid from_nodes(int n, std::vector<double> nodes,
                                 SpacingKind kind = SpacingKind::custom);

    int dim() const { return n_; }
    SpacingKind kind() const { return kind_; }
    std::size_t size() const { return r_.size(); }
    double node(std::size_t i) const { return r_[i]; }
    double weight(std::size_t i) const { return w_[i]; }
    const std::vector<double>& nodes() const { return r_; }
    const std::vector<double>& weights() const { return w_; }
    double inner_radius() const { return r_.front(); }
    double outer_radius() const { return r_.back(); }
    double surface_measure() const { return omega_; }

    // Compensated sum of w_i * v_i.
    double integrate(const std::vector<double>& v) const;
    double integrate(const std::function<double(double)>& f) const;

  private:
    RadialGrid(int n, SpacingKind kind, std::vector<double> nodes);

    int n_;
    SpacingKind kind_;
    double omega_;
    std::vector<double> r_, w_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// make_grid(kind = "uniform" | "geometric" | "uniform_volume"); geometric grids
// need r0 > 0.
RadialGrid make_grid(int n, double R, int M, SpacingKind kind, double r0 = 0.0);

// Sampled radial profile bound to a grid. Derivative samples default to
// second-order centered differences (one-sided at the endpoints); callers with
// analytic derivatives may inject them.
class RadialFunction {
  public:
    RadialFunction(GridPtr grid, std::vector<double> values);
    RadialFunction(GridPtr grid, std::vector<double> values, std::vector<double> derivatives);

    static RadialFunction from_callable(GridPtr grid, const std::function<double(double)>& f);
    static RadialFunction from_callable(GridPtr grid, const std::function<double(double)>& f,
                                        const std::function<double(double)>& fprime);

    const RadialGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    std::size_t size() const { return u_.size(); }
    double value(std::size_t i) const { return u_[i]; }
    double deriv(std::size_t i) const { return du_[i]; }
    const std::vector<double>& values() const { return u_; }
    const std::vector<double>& derivs() const { return du_; }
    double max_value() const;

    // Piecewise-linear evaluation; clamps to the first/last sample.
    double operator()(double r) const { return lerp_at(grid_->nodes(), u_, r); }

  private:
    GridPtr grid_;
    std::vector<double> u_, du_;
};

struct Norms {
    double lp_n = 0.0;     // ||u||_n
    double grad_n = 0.0;   // ||grad u||_n
    double sobolev = 0.0;  // (grad_n^n + lp_n^n)^{1/n}
    double lions_q = 1.0;  // (1 - sobolev^n)^{-1/(n-1)}, +inf when sobolev >= 1
};

Norms norms(const RadialFunction& u);

// Grid-level decreasing rearrangement on equal-volume shells. On grids whose
// weights are already uniform (uniform_volume kind) this is a direct sort;
// otherwise the profile is resampled to an auxiliary uniform-volume grid,
// sorted, and resampled back (piecewise linear). Requires u >= 0.
RadialFunction decreasing_rearrangement(const RadialFunction& u);

// Pointwise bound u(L) <= (n ||u||_n^n / (omega_{n-1} L^n))^{1/n} for radially
// decreasing u.
double decay_bound(double norm_ln, int n, double L);

// Signed radial n-flux omega_{n-1} r_i^{n-1} |u'_i|^{n-2} u'_i.
double nlap_flux(const RadialFunction& u, std::size_t i);

// min(u, t) pointwise.
RadialFunction truncate_level(const RadialFunction& u, double t);

}  // namespace tmlab

#endif
