#include "platmatch/kernel.hpp"

#include "platmatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace platmatch {

competition_kernel competition_kernel::constant(double c) {
    competition_kernel h;
    h.kind_ = kind::constant;
    h.c0_ = c;
    return h;
}

competition_kernel competition_kernel::affine_truncated(double c0, double c1) {
    competition_kernel h;
    h.kind_ = kind::affine_truncated;
    h.c0_ = c0;
    h.c1_ = c1;
    return h;
}

competition_kernel competition_kernel::power(double scale, double eps, double exponent) {
    competition_kernel h;
    h.kind_ = kind::power;
    h.scale_ = scale;
    h.eps_ = eps;
    h.exponent_ = exponent;
    return h;
}

competition_kernel competition_kernel::ces(double psi, double kappa) {
    competition_kernel h;
    h.kind_ = kind::ces;
    h.scale_ = psi;
    h.exponent_ = kappa;
    return h;
}

competition_kernel competition_kernel::table(std::vector<double> sizes, std::vector<double> values) {
    competition_kernel h;
    h.kind_ = kind::table;
    h.table_ = piecewise_linear(std::move(sizes), std::move(values));
    return h;
}

competition_kernel competition_kernel::with_sigma_f_decay(double decay) const {
    if (decay < 0.0) fail(errc::validation, "sigma_f decay must be nonnegative");
    competition_kernel h = *this;
    h.sigma_f_decay_ = decay;
    return h;
}

competition_kernel competition_kernel::with_sigma_i_scaling(bool on) const {
    competition_kernel h = *this;
    h.scale_by_sigma_i_ = on;
    return h;
}

double competition_kernel::size_part(double x) const {
    switch (kind_) {
    case kind::constant: return c0_;
    case kind::affine_truncated: return std::max(0.0, c0_ - c1_ * x);
    case kind::power: return scale_ * std::pow(x + eps_, exponent_);
    case kind::ces:
        if (!(x > 0.0)) return std::numeric_limits<double>::infinity();
        return scale_ * std::pow(x, exponent_);
    case kind::table: return table_(x);
    }
    return 0.0;
}

double competition_kernel::operator()(double size, double sigma_i, double sigma_f) const {
    double h = size_part(size);
    if (sigma_f_decay_ != 0.0) h /= 1.0 + sigma_f_decay_ * sigma_f;
    if (scale_by_sigma_i_) h *= sigma_i;
    return h;
}

double competition_kernel::d_size(double size, double sigma_i, double sigma_f) const {
    const double step = 1e-6 * std::max(1.0, std::fabs(size));
    const double lo_edge = kind_ == kind::ces ? 0.0 : (kind_ == kind::power ? -eps_ : -HUGE_VAL);
    if (size - step <= lo_edge)
        return ((*this)(size + step, sigma_i, sigma_f) - (*this)(size, sigma_i, sigma_f)) / step;
    return ((*this)(size + step, sigma_i, sigma_f) - (*this)(size - step, sigma_i, sigma_f)) / (2 * step);
}

double kernel_minimum(const competition_kernel& h, double max_size, double sigma_i, double sigma_f, int samples) {
    double lo = std::numeric_limits<double>::infinity();
    auto probe = [&](double x) {
        if (h.tag() == competition_kernel::kind::ces && !(x > 0.0)) return;
        lo = std::min(lo, h(x, sigma_i, sigma_f));
    };
    for (int k = 0; k < samples; ++k) probe(max_size * k / std::max(1, samples - 1));
    for (double x = 0.0; x <= max_size; x += 1.0) probe(x);
    return lo;
}

bool kernel_decreasing(const competition_kernel& h, double lo, double hi, double sigma_i, double sigma_f, int samples) {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        double x = lo + (hi - lo) * k / std::max(1, samples - 1);
        if (h.tag() == competition_kernel::kind::ces && !(x > 0.0)) continue;
        double cur = h(x, sigma_i, sigma_f);
        if (cur > prev + 1e-12 * std::max(1.0, std::fabs(prev))) return false;
        prev = cur;
    }
    return true;
}

std::string describe(const competition_kernel& h) {
    std::ostringstream os;
    switch (h.tag()) {
    case competition_kernel::kind::constant: os << "constant(" << h.c0() << ")"; break;
    case competition_kernel::kind::affine_truncated: os << "max(0," << h.c0() << "-" << h.c1() << "x)"; break;
    case competition_kernel::kind::power: os << h.scale() << "*(x+" << h.eps() << ")^" << h.exponent(); break;
    case competition_kernel::kind::ces: os << h.scale() << "*x^" << h.exponent(); break;
    case competition_kernel::kind::table: os << "table(" << h.knots().xs().size() << ")"; break;
    }
    return os.str();
}

}  // namespace platmatch
