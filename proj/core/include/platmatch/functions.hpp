#pragma once

#include <string>
#include <vector>

namespace platmatch {

/// Piecewise-linear interpolant through (x, y) knots, flat beyond the ends.
class piecewise_linear {
public:
    piecewise_linear() = default;
    piecewise_linear(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;
    double slope(double x) const;
    bool empty() const { return xs_.empty(); }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

private:
    std::size_t segment(double x) const;

    std::vector<double> xs_;
    std::vector<double> ys_;
};

/// Linear between knots, with a jump wherever two knots share an abscissa. At a jump the right
/// limit applies, so upper sets are closed.
class knot_function {
public:
    knot_function() = default;

    /// Linear interpolation through (v_k, x_k); repeated v_k mark jumps.
    static knot_function piecewise(std::vector<double> vs, std::vector<double> xs);
    /// x_k on [v_k, v_{k+1}), extended to `top` after the last knot.
    static knot_function step(const std::vector<double>& vs, const std::vector<double>& xs, double top);
    static knot_function constant(double x, double lo, double hi) { return piecewise({lo, hi}, {x, x}); }

    double operator()(double v) const;
    /// Left limit, equal to the value except at jumps.
    double left(double v) const;
    /// Distinct knot abscissas: the function is linear between consecutive ones.
    std::vector<double> breaks() const;
    bool nondecreasing(double tol = 1e-12) const;
    double lo() const { return vs_.front(); }
    double hi() const { return vs_.back(); }

    const std::vector<double>& knots_v() const { return vs_; }
    const std::vector<double>& knots_x() const { return xs_; }

private:
    std::vector<double> vs_;
    std::vector<double> xs_;
};

/// A function of an agent's vertical type: a(v), b(v), m(v), alpha(v).
class type_function {
public:
    enum class kind { linear, table };

    type_function() = default;

    static type_function constant(double c) { return linear(c, 0.0); }
    static type_function identity() { return linear(0.0, 1.0); }
    static type_function linear(double intercept, double slope);
    static type_function table(std::vector<double> vs, std::vector<double> values);

    double operator()(double v) const;
    double derivative(double v) const;

    kind tag() const { return kind_; }
    double intercept() const { return c0_; }
    double slope() const { return c1_; }
    const piecewise_linear& knots() const { return table_; }

private:
    kind kind_ = kind::linear;
    double c0_ = 0.0;
    double c1_ = 0.0;
    piecewise_linear table_;
};

/// A function of a match size or quality: g(x).
class size_function {
public:
    enum class kind { power, log1p, affine, table };

    size_function() = default;

    static size_function power(double coef, double exponent);
    static size_function identity() { return affine(1.0, 0.0); }
    static size_function log1p(double coef = 1.0);
    static size_function affine(double slope, double intercept);
    static size_function table(std::vector<double> xs, std::vector<double> values);

    double operator()(double x) const;
    double derivative(double x) const;

    kind tag() const { return kind_; }
    double coef() const { return coef_; }
    double exponent() const { return exponent_; }
    double intercept() const { return intercept_; }
    const piecewise_linear& knots() const { return table_; }

    /// True when g is exactly affine in x.
    bool is_affine() const;

private:
    kind kind_ = kind::affine;
    double coef_ = 1.0;
    double exponent_ = 1.0;
    double intercept_ = 0.0;
    piecewise_linear table_;
};

std::string describe(const size_function& g);

}  // namespace platmatch
