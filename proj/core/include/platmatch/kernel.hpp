#pragma once

#include "platmatch/functions.hpp"

#include <string>

namespace platmatch {

/// Competition kernel h(match_size, sigma_i, sigma_f) >= 0.
///
/// The size-dependence comes from one of the families below; two optional factors add the
/// salience arguments: h is divided by (1 + sigma_f_decay * sigma_f) and, when
/// `scale_by_sigma_i` is set, multiplied by sigma_i.
class competition_kernel {
public:
    enum class kind {
        constant,          // c
        affine_truncated,  // max(0, c0 - c1 * x)
        power,             // scale * (x + eps)^exponent
        ces,               // scale * x^exponent, x > 0 (psi * V^kappa)
        table,             // piecewise linear in x
    };

    competition_kernel() = default;

    static competition_kernel constant(double c);
    static competition_kernel affine_truncated(double c0, double c1);
    static competition_kernel power(double scale, double eps, double exponent);
    static competition_kernel ces(double psi, double kappa);
    static competition_kernel table(std::vector<double> sizes, std::vector<double> values);

    competition_kernel with_sigma_f_decay(double decay) const;
    competition_kernel with_sigma_i_scaling(bool on = true) const;

    double operator()(double size, double sigma_i = 1.0, double sigma_f = 1.0) const;
    /// d h / d size by central finite difference (one-sided at the domain edge).
    double d_size(double size, double sigma_i = 1.0, double sigma_f = 1.0) const;

    kind tag() const { return kind_; }
    double c0() const { return c0_; }
    double c1() const { return c1_; }
    double scale() const { return scale_; }
    double eps() const { return eps_; }
    double exponent() const { return exponent_; }
    double sigma_f_decay() const { return sigma_f_decay_; }
    bool scales_by_sigma_i() const { return scale_by_sigma_i_; }
    const piecewise_linear& knots() const { return table_; }

private:
    double size_part(double size) const;

    kind kind_ = kind::constant;
    double c0_ = 1.0;
    double c1_ = 0.0;
    double scale_ = 1.0;
    double eps_ = 0.0;
    double exponent_ = 0.0;
    double sigma_f_decay_ = 0.0;
    bool scale_by_sigma_i_ = false;
    piecewise_linear table_;
};

/// Smallest kernel value over [0, max_size] sampled on `samples` points plus the integers.
double kernel_minimum(const competition_kernel& h, double max_size, double sigma_i, double sigma_f, int samples = 257);

/// Weakly decreasing in size over [lo, hi] on a uniform sample.
bool kernel_decreasing(const competition_kernel& h, double lo, double hi, double sigma_i = 1.0, double sigma_f = 1.0,
                       int samples = 257);

std::string describe(const competition_kernel& h);

}  // namespace platmatch
