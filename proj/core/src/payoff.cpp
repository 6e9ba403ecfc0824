#include "platmatch/payoff.hpp"

#include "platmatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace platmatch {

namespace {

std::size_t bracket(const std::vector<double>& knots, double x, double& t) {
    if (knots.size() == 1 || x <= knots.front()) {
        t = 0.0;
        return 0;
    }
    if (x >= knots.back()) {
        t = 1.0;
        return knots.size() - 2;
    }
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
    t = (x - knots[i]) / (knots[i + 1] - knots[i]);
    return i;
}

}  // namespace

double payoff_table::operator()(double v, double x) const {
    const std::size_t nx = x_knots.size();
    double tv = 0.0, tx = 0.0;
    std::size_t iv = bracket(v_knots, v, tv);
    std::size_t ix = bracket(x_knots, x, tx);
    auto at = [&](std::size_t r, std::size_t c) {
        r = std::min(r, v_knots.size() - 1);
        c = std::min(c, nx - 1);
        return values[r * nx + c];
    };
    double lo = at(iv, ix) * (1 - tx) + at(iv, ix + 1) * tx;
    double hi = at(iv + 1, ix) * (1 - tx) + at(iv + 1, ix + 1) * tx;
    return lo * (1 - tv) + hi * tv;
}

payoff_family payoff_family::affine(type_function a, type_function b) {
    payoff_family u;
    u.kind_ = kind::affine;
    u.a_ = std::move(a);
    u.b_ = std::move(b);
    return u;
}

payoff_family payoff_family::multiplicative(type_function m, size_function g) {
    payoff_family u;
    u.kind_ = kind::multiplicative;
    u.m_ = std::move(m);
    u.g_ = std::move(g);
    return u;
}

payoff_family payoff_family::tabulated(payoff_table table) {
    if (table.v_knots.empty() || table.x_knots.empty() ||
        table.values.size() != table.v_knots.size() * table.x_knots.size())
        fail(errc::validation, "payoff table dimensions do not match its knots");
    for (std::size_t i = 1; i < table.v_knots.size(); ++i)
        if (!(table.v_knots[i] > table.v_knots[i - 1])) fail(errc::validation, "payoff table v knots must increase");
    for (std::size_t i = 1; i < table.x_knots.size(); ++i)
        if (!(table.x_knots[i] > table.x_knots[i - 1])) fail(errc::validation, "payoff table x knots must increase");
    payoff_family u;
    u.kind_ = kind::tabulated;
    u.table_ = std::move(table);
    return u;
}

payoff_family payoff_family::zero() {
    return affine(type_function::constant(0.0), type_function::constant(0.0));
}

double payoff_family::value(double v, double x) const {
    double base = 0.0;
    switch (kind_) {
    case kind::affine: base = a_(v) + b_(v) * x; break;
    case kind::multiplicative: base = m_(v) * g_(x); break;
    case kind::tabulated: base = table_(v, x); break;
    }
    return scale_ * base + slope_shift_ * x;
}

double payoff_family::d_type(double v, double x) const {
    switch (kind_) {
    case kind::affine: return scale_ * (a_.derivative(v) + b_.derivative(v) * x);
    case kind::multiplicative: return scale_ * m_.derivative(v) * g_(x);
    case kind::tabulated: {
        double h = 1e-6 * std::max(1.0, std::fabs(v));
        return scale_ * (table_(v + h, x) - table_(v - h, x)) / (2 * h);
    }
    }
    return 0.0;
}

double payoff_family::d_size(double v, double x) const {
    switch (kind_) {
    case kind::affine: return scale_ * b_(v) + slope_shift_;
    case kind::multiplicative: return scale_ * m_(v) * g_.derivative(x) + slope_shift_;
    case kind::tabulated: return marginal_in_size_fd(*this, v, x);
    }
    return 0.0;
}

std::optional<affine_coefficients> payoff_family::affine_at(double v) const {
    switch (kind_) {
    case kind::affine: return affine_coefficients{scale_ * a_(v), scale_ * b_(v) + slope_shift_};
    case kind::multiplicative: {
        if (!g_.is_affine()) return std::nullopt;
        double mv = m_(v);
        double slope = 0.0, intercept = 0.0;
        switch (g_.tag()) {
        case size_function::kind::affine: slope = g_.coef(); intercept = g_.intercept(); break;
        case size_function::kind::power: slope = g_.coef(); break;
        default: break;
        }
        return affine_coefficients{scale_ * mv * intercept, scale_ * mv * slope + slope_shift_};
    }
    case kind::tabulated: return std::nullopt;
    }
    return std::nullopt;
}

bool payoff_family::is_affine_in_size() const {
    if (kind_ == kind::affine) return true;
    if (kind_ == kind::multiplicative) return g_.is_affine();
    return false;
}

payoff_family payoff_family::scaled(double factor) const {
    payoff_family u = *this;
    u.scale_ *= factor;
    u.slope_shift_ *= factor;
    return u;
}

payoff_family payoff_family::with_slope_shift(double extra) const {
    payoff_family u = *this;
    u.slope_shift_ += extra;
    return u;
}

double marginal_in_size_fd(const payoff_family& u, double v, double x) {
    const double h = 1e-6 * std::max(1.0, std::fabs(x));
    if (x - h < 0.0) return (u.value(v, x + h) - u.value(v, x)) / h;
    return (u.value(v, x + h) - u.value(v, x - h)) / (2 * h);
}

bool concave_in_size(const payoff_family& u, double v, const std::vector<double>& x_grid, double tol) {
    for (std::size_t i = 1; i + 1 < x_grid.size(); ++i) {
        double s0 = (u.value(v, x_grid[i]) - u.value(v, x_grid[i - 1])) / (x_grid[i] - x_grid[i - 1]);
        double s1 = (u.value(v, x_grid[i + 1]) - u.value(v, x_grid[i])) / (x_grid[i + 1] - x_grid[i]);
        if (s1 > s0 + tol * std::max(1.0, std::fabs(s0))) return false;
    }
    return true;
}

bool increasing_in_size(const payoff_family& u, double v, const std::vector<double>& x_grid, double tol) {
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        if (u.value(v, x_grid[i]) < u.value(v, x_grid[i - 1]) - tol) return false;
    return true;
}

std::string describe(const payoff_family& u) {
    std::ostringstream os;
    switch (u.tag()) {
    case payoff_family::kind::affine: os << "affine"; break;
    case payoff_family::kind::multiplicative: os << "m(v)*" << describe(u.g()); break;
    case payoff_family::kind::tabulated: os << "tabulated"; break;
    }
    if (u.scale() != 1.0) os << "*" << u.scale();
    if (u.slope_shift() != 0.0) os << "+" << u.slope_shift() << "*x";
    return os.str();
}

}  // namespace platmatch
