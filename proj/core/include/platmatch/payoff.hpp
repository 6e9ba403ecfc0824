#pragma once

#include "platmatch/functions.hpp"

#include <optional>
#include <string>
#include <vector>

namespace platmatch {

/// Bilinear table over (v, x); flat beyond the grid edges.
struct payoff_table {
    std::vector<double> v_knots;
    std::vector<double> x_knots;
    std::vector<double> values;  // row-major, v_knots.size() rows

    double operator()(double v, double x) const;
};

struct affine_coefficients {
    double intercept;  // a(v)
    double slope;      // b(v), the beta weight of match quality
};

/// Parametric payoff U(v, x) of an agent with vertical type v and match size or quality x.
///
/// Three families are supported:
///   affine          a(v) + b(v) * x
///   multiplicative  m(v) * g(x)
///   tabulated       bilinear interpolation of a (v, x) table
///
/// `slope_shift` adds an increasing-differences term shift * x on top of any family; this is
/// how per-firm payoff shifts are expressed without rebuilding the family. `scale` multiplies
/// the whole payoff, shift included.
class payoff_family {
public:
    enum class kind { affine, multiplicative, tabulated };

    payoff_family() = default;

    static payoff_family affine(type_function a, type_function b);
    static payoff_family multiplicative(type_function m, size_function g);
    static payoff_family tabulated(payoff_table table);

    /// U == 0.
    static payoff_family zero();
    /// U(v, x) = v * g(x).
    static payoff_family product(size_function g) { return multiplicative(type_function::identity(), g); }

    double value(double v, double x) const;
    /// Partial derivative in the type argument.
    double d_type(double v, double x) const;
    /// Partial derivative in the size argument (analytic where the family allows).
    double d_size(double v, double x) const;

    /// Coefficients at type v when U(v, .) is affine in x; nullopt otherwise.
    std::optional<affine_coefficients> affine_at(double v) const;
    bool is_affine_in_size() const;

    double slope_shift() const { return slope_shift_; }
    payoff_family with_slope_shift(double extra) const;

    double scale() const { return scale_; }
    payoff_family scaled(double factor) const;

    kind tag() const { return kind_; }
    const type_function& a() const { return a_; }
    const type_function& b() const { return b_; }
    const type_function& m() const { return m_; }
    const size_function& g() const { return g_; }
    const payoff_table& table() const { return table_; }

private:
    kind kind_ = kind::affine;
    type_function a_, b_, m_;
    size_function g_;
    payoff_table table_;
    double slope_shift_ = 0.0;
    double scale_ = 1.0;
};

/// Central finite difference in the size argument, step 1e-6 * max(1, |x|); one-sided near x = 0.
double marginal_in_size_fd(const payoff_family& u, double v, double x);

/// Second-difference concavity check of U(v, .) on an ascending x grid.
bool concave_in_size(const payoff_family& u, double v, const std::vector<double>& x_grid, double tol = 1e-12);
/// Weak monotonicity of U(v, .) on an ascending x grid.
bool increasing_in_size(const payoff_family& u, double v, const std::vector<double>& x_grid, double tol = 1e-12);

std::string describe(const payoff_family& u);

}  // namespace platmatch
