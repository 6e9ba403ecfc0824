#pragma once

#include <functional>
#include <vector>

namespace platmatch {

/// Gauss-Legendre rule on [-1, 1].
struct gauss_rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point rule, nodes by Newton iteration on the Legendre recurrence; cached for n <= 32.
const gauss_rule& gauss_legendre(int n);

/// Integral of f over [a, b] with the n-point rule (exact for polynomials of degree 2n - 1).
double integrate(const std::function<double(double)>& f, double a, double b, int n = 8);

/// Composite rule: one n-point panel per consecutive pair of `breaks` (ascending).
double integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& breaks, int n = 8);

/// Trapezoid rule on tabulated values.
double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace platmatch
