#include "platmatch/quadrature.hpp"

#include "platmatch/errors.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace platmatch {

namespace {

gauss_rule build_rule(int n) {
    gauss_rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int d = 2; d <= n; ++d) {
                double p2 = ((2.0 * d - 1.0) * x * p1 - (d - 1.0) * p0) / d;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double step = p1 / dp;
            x -= step;
            if (std::fabs(step) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[k] = -x;
        r.nodes[n - 1 - k] = x;
        r.weights[k] = r.weights[n - 1 - k] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

}  // namespace

const gauss_rule& gauss_legendre(int n) {
    if (n < 1 || n > 32) fail(errc::input, "Gauss-Legendre order must be in [1, 32]");
    static std::array<gauss_rule, 33> cache;
    static std::array<std::once_flag, 33> built;
    std::call_once(built[n], [n] { cache[n] = build_rule(n); });
    return cache[n];
}

double integrate(const std::function<double(double)>& f, double a, double b, int n) {
    if (a == b) return 0.0;
    const gauss_rule& r = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += r.weights[k] * f(mid + half * r.nodes[k]);
    return half * s;
}

double integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& breaks, int n) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) s += integrate(f, breaks[k], breaks[k + 1], n);
    return s;
}

double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) fail(errc::input, "trapezoid rule needs matching abscissas and values");
    double s = 0.0;
    for (std::size_t k = 1; k < xs.size(); ++k) s += 0.5 * (xs[k] - xs[k - 1]) * (ys[k] + ys[k - 1]);
    return s;
}

}  // namespace platmatch
