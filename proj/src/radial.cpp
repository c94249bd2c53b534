#include "tmlab/radial.hpp"

#include <algorithm>
#include <cmath>

namespace tmlab {

std::string to_string(SpacingKind k) {
    switch (k) {
        case SpacingKind::uniform: return "uniform";
        case SpacingKind::geometric: return "geometric";
        case SpacingKind::uniform_volume: return "uniform_volume";
        case SpacingKind::custom: return "custom";
    }
    return "?";
}

RadialGrid::RadialGrid(int n, SpacingKind kind, std::vector<double> nodes)
    : n_(n), kind_(kind), omega_(omega(n)), r_(std::move(nodes)) {
    if (n_ < 2) throw std::invalid_argument("RadialGrid: dimension must be >= 2");
    if (r_.size() < 2) throw std::invalid_argument("RadialGrid: need at least two nodes");
    if (r_.front() < 0.0) throw std::invalid_argument("RadialGrid: negative radius");
    for (std::size_t i = 0; i + 1 < r_.size(); ++i) {
        if (!(r_[i] < r_[i + 1]))
            throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
        if (!std::isfinite(r_[i + 1]))
            throw std::invalid_argument("RadialGrid: non-finite node");
    }
    // Cell of node i spans [b_{i-1}, b_i] with b at radial midpoints; w_i is the
    // exact shell volume so that the weights telescope to the annulus volume.
    const std::size_t M = r_.size();
    w_.resize(M);
    double lo = r_.front();
    for (std::size_t i = 0; i < M; ++i) {
        double hi = (i + 1 < M) ? 0.5 * (r_[i] + r_[i + 1]) : r_.back();
        w_[i] = omega_ / n_ * (std::pow(hi, n_) - std::pow(lo, n_));
        lo = hi;
    }
}

RadialGrid RadialGrid::uniform(int n, double R, int M) {
    if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("make_grid: bad radius");
    if (M < 16) throw std::invalid_argument("make_grid: node count too small");
    std::vector<double> r(M + 1);
    for (int i = 0; i <= M; ++i) r[i] = R * i / M;
    return RadialGrid(n, SpacingKind::uniform, std::move(r));
}

RadialGrid RadialGrid::geometric(int n, double R, int M, double r0) {
    if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("make_grid: bad radius");
    if (M < 16) throw std::invalid_argument("make_grid: node count too small");
    if (!(r0 > 0.0) || r0 >= R) throw std::invalid_argument("make_grid: geometric grid needs 0 < r0 < R");
    std::vector<double> r(M + 1);
    double lg0 = std::log(r0), lg1 = std::log(R);
    for (int i = 0; i <= M; ++i) r[i] = std::exp(lg0 + (lg1 - lg0) * i / M);
    r.front() = r0;
    r.back() = R;
    return RadialGrid(n, SpacingKind::geometric, std::move(r));
}

RadialGrid RadialGrid::uniform_volume(int n, double R, int M) {
    if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("make_grid: bad radius");
    if (M < 16) throw std::invalid_argument("make_grid: node count too small");
    std::vector<double> r(M + 1);
    for (int i = 0; i < M; ++i) r[i] = R * std::pow((i + 0.5) / M, 1.0 / n);
    r[M] = R;
    RadialGrid g(n, SpacingKind::uniform_volume, std::move(r));
    // Override the midpoint cells: M equal-volume slots plus a zero-weight
    // boundary node, so sorting node values is an exact rearrangement.
    double V = g.omega_ / n * std::pow(R, n) / M;
    for (int i = 0; i < M; ++i) g.w_[i] = V;
    g.w_[M] = 0.0;
    return g;
}

RadialGrid RadialGrid::from_nodes(int n, std::vector<double> nodes, SpacingKind kind) {
    return RadialGrid(n, kind, std::move(nodes));
}

double RadialGrid::integrate(const std::vector<double>& v) const {
    if (v.size() != r_.size()) throw std::invalid_argument("integrate: size mismatch");
    CompensatedSum s;
    for (std::size_t i = 0; i < v.size(); ++i) s.add(w_[i] * v[i]);
    return s.value();
}

double RadialGrid::integrate(const std::function<double(double)>& f) const {
    CompensatedSum s;
    for (std::size_t i = 0; i < r_.size(); ++i) s.add(w_[i] * f(r_[i]));
    return s.value();
}

RadialGrid make_grid(int n, double R, int M, SpacingKind kind, double r0) {
    switch (kind) {
        case SpacingKind::uniform: return RadialGrid::uniform(n, R, M);
        case SpacingKind::geometric: return RadialGrid::geometric(n, R, M, r0);
        case SpacingKind::uniform_volume: return RadialGrid::uniform_volume(n, R, M);
        default: throw std::invalid_argument("make_grid: custom grids go through from_nodes");
    }
}

namespace {

std::vector<double> centered_derivatives(const RadialGrid& g, const std::vector<double>& u) {
    const std::size_t M = u.size();
    std::vector<double> du(M);
    auto& r = g.nodes();
    auto three_point = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t at) {
        // Derivative of the quadratic through (r_a,u_a),(r_b,u_b),(r_c,u_c) at r_at.
        double x = r[at];
        double d = 0.0;
        double xa = r[a], xb = r[b], xc = r[c];
        d += u[a] * (2 * x - xb - xc) / ((xa - xb) * (xa - xc));
        d += u[b] * (2 * x - xa - xc) / ((xb - xa) * (xb - xc));
        d += u[c] * (2 * x - xa - xb) / ((xc - xa) * (xc - xb));
        return d;
    };
    if (M == 2) {
        du[0] = du[1] = (u[1] - u[0]) / (r[1] - r[0]);
        return du;
    }
    du[0] = three_point(0, 1, 2, 0);
    du[M - 1] = three_point(M - 3, M - 2, M - 1, M - 1);
    for (std::size_t i = 1; i + 1 < M; ++i) du[i] = three_point(i - 1, i, i + 1, i);
    return du;
}

void check_values(const std::vector<double>& u) {
    for (double v : u)
        if (!std::isfinite(v)) throw std::invalid_argument("RadialFunction: non-finite sample");
}

}  // namespace

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), u_(std::move(values)) {
    if (u_.size() != grid_->size()) throw std::invalid_argument("RadialFunction: size mismatch");
    check_values(u_);
    du_ = centered_derivatives(*grid_, u_);
}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values,
                               std::vector<double> derivatives)
    : grid_(std::move(grid)), u_(std::move(values)), du_(std::move(derivatives)) {
    if (u_.size() != grid_->size() || du_.size() != u_.size())
        throw std::invalid_argument("RadialFunction: size mismatch");
    check_values(u_);
    check_values(du_);
}

RadialFunction RadialFunction::from_callable(GridPtr grid,
                                             const std::function<double(double)>& f) {
    std::vector<double> u(grid->size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = f(grid->node(i));
    return RadialFunction(std::move(grid), std::move(u));
}

RadialFunction RadialFunction::from_callable(GridPtr grid, const std::function<double(double)>& f,
                                             const std::function<double(double)>& fprime) {
    std::vector<double> u(grid->size()), du(grid->size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = f(grid->node(i));
        du[i] = fprime(grid->node(i));
    }
    return RadialFunction(std::move(grid), std::move(u), std::move(du));
}

double RadialFunction::max_value() const {
    return *std::max_element(u_.begin(), u_.end());
}

Norms norms(const RadialFunction& u) {
    const RadialGrid& g = u.grid();
    const int n = g.dim();
    CompensatedSum lp, gr;
    for (std::size_t i = 0; i < u.size(); ++i) {
        lp.add(g.weight(i) * std::pow(std::abs(u.value(i)), n));
        gr.add(g.weight(i) * std::pow(std::abs(u.deriv(i)), n));
    }
    Norms out;
    double lpn = std::max(lp.value(), 0.0);
    double grn = std::max(gr.value(), 0.0);
    out.lp_n = std::pow(lpn, 1.0 / n);
    out.grad_n = std::pow(grn, 1.0 / n);
    double sn = lpn + grn;
    out.sobolev = std::pow(sn, 1.0 / n);
    out.lions_q = sn < 1.0 ? std::pow(1.0 - sn, -1.0 / (n - 1))
                           : std::numeric_limits<double>::infinity();
    return out;
}

RadialFunction decreasing_rearrangement(const RadialFunction& u) {
    for (double v : u.values())
        if (v < 0.0) throw std::invalid_argument("decreasing_rearrangement: negative sample");

    const RadialGrid& g = u.grid();
    const std::size_t M = u.size();

    if (std::is_sorted(u.values().rbegin(), u.values().rend()))
        return u;  // already decreasing

    if (g.kind() == SpacingKind::uniform_volume) {
        // Equal-volume slots: sort is exact. The trailing node carries zero
        // weight and only extends the profile monotonically.
        std::vector<double> v(u.values().begin(), u.values().end() - 1);
        std::sort(v.begin(), v.end(), std::greater<double>());
        v.push_back(std::min(u.values().back(), v.back()));
        return RadialFunction(u.grid_ptr(), std::move(v));
    }

    // Resample to an auxiliary uniform-volume grid, sort, resample back.
    const int n = g.dim();
    const std::size_t J = std::max<std::size_t>(4 * M, 4096);
    std::vector<double> s(J), v(J);
    const double R = g.outer_radius();
    for (std::size_t j = 0; j < J; ++j) {
        s[j] = R * std::pow((j + 0.5) / J, 1.0 / n);
        v[j] = u(s[j]);
    }
    std::sort(v.begin(), v.end(), std::greater<double>());
    std::vector<double> out(M);
    for (std::size_t i = 0; i < M; ++i) out[i] = lerp_at(s, v, g.node(i));
    // Piecewise-linear resampling preserves order.
    return RadialFunction(u.grid_ptr(), std::move(out));
}

double decay_bound(double norm_ln, int n, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("decay_bound: radius must be positive");
    if (n < 2) throw std::invalid_argument("decay_bound: dimension must be >= 2");
    if (norm_ln < 0.0) throw std::invalid_argument("decay_bound: negative norm");
    return std::pow(n * std::pow(norm_ln, n) / (omega(n) * std::pow(L, n)), 1.0 / n);
}

double nlap_flux(const RadialFunction& u, std::size_t i) {
    const RadialGrid& g = u.grid();
    if (i >= u.size()) throw std::invalid_argument("nlap_flux: node index out of range");
    const int n = g.dim();
    double r = g.node(i);
    return g.surface_measure() * std::pow(r, n - 1) * sgn_pow(u.deriv(i), n - 1);
}

RadialFunction truncate_level(const RadialFunction& u, double t) {
    if (t < 0.0) throw std::invalid_argument("truncate_level: negative level");
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(u.value(i), t);
    return RadialFunction(u.grid_ptr(), std::move(v));
}

}  // namespace tmlab
