#include "platmatch/distribution.hpp"

#include "platmatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace platmatch {

distribution distribution::uniform(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b) && b > a)) fail(errc::validation, "uniform support needs a < b");
    distribution d;
    d.kind_ = kind::uniform;
    d.lo_ = a;
    d.hi_ = b;
    return d;
}

distribution distribution::truncated_normal(double mu, double s, double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b) && b > a)) fail(errc::validation, "truncated normal support needs a < b");
    if (!(s > 0.0) || !std::isfinite(mu)) fail(errc::validation, "truncated normal needs finite mean and positive scale");
    distribution d;
    d.kind_ = kind::truncated_normal;
    d.lo_ = a;
    d.hi_ = b;
    d.mu_ = mu;
    d.s_ = s;
    d.z_lo_ = d.phi_cdf((a - mu) / s);
    d.z_mass_ = d.phi_cdf((b - mu) / s) - d.z_lo_;
    if (!(d.z_mass_ > 0.0)) fail(errc::numeric, "truncated normal has no mass on its support");
    return d;
}

distribution distribution::tabulated(std::vector<double> grid, std::vector<double> cdf, std::vector<double> density) {
    if (grid.size() < 2 || cdf.size() != grid.size() || density.size() != grid.size())
        fail(errc::validation, "tabulated distribution needs at least two knots and matching columns");
    std::vector<std::string> errs;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (k > 0 && !(grid[k] > grid[k - 1])) errs.push_back("grid must be strictly increasing");
        if (!(density[k] > 0.0)) errs.push_back("density must be positive at v=" + std::to_string(grid[k]));
        if (k > 0 && cdf[k] < cdf[k - 1]) errs.push_back("cdf must be nondecreasing");
    }
    if (std::fabs(cdf.front()) > 1e-6) errs.push_back("cdf must start at 0");
    if (std::fabs(cdf.back() - 1.0) > 1e-6) errs.push_back("cdf must end at 1");
    if (errs.empty()) {
        double acc = 0.0;
        for (std::size_t k = 1; k < grid.size(); ++k) {
            acc += 0.5 * (grid[k] - grid[k - 1]) * (density[k] + density[k - 1]);
            if (std::fabs(acc - cdf[k]) > 1e-6) {
                errs.push_back("cdf disagrees with the integrated density at v=" + std::to_string(grid[k]));
                break;
            }
        }
    }
    if (!errs.empty()) {
        std::string msg;
        for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + e;
        fail(errc::validation, msg);
    }
    distribution d;
    d.kind_ = kind::tabulated;
    d.lo_ = grid.front();
    d.hi_ = grid.back();
    d.cdf_ = cdf;
    d.density_ = piecewise_linear(std::move(grid), std::move(density));
    return d;
}

double distribution::phi_cdf(double z) const { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double distribution::cdf(double v) const {
    if (v <= lo_) return 0.0;
    if (v >= hi_) return 1.0;
    switch (kind_) {
        case kind::uniform: return (v - lo_) / (hi_ - lo_);
        case kind::truncated_normal: return (phi_cdf((v - mu_) / s_) - z_lo_) / z_mass_;
        case kind::tabulated: {
            const auto& xs = density_.xs();
            std::size_t k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), v) - xs.begin()) - 1;
            double dx = v - xs[k];
            return cdf_[k] + dx * 0.5 * (density_(xs[k]) + density_(v));
        }
    }
    return 0.0;
}

double distribution::density(double v) const {
    if (v < lo_ || v > hi_) return 0.0;
    switch (kind_) {
        case kind::uniform: return 1.0 / (hi_ - lo_);
        case kind::truncated_normal: {
            double z = (v - mu_) / s_;
            return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * s_ * z_mass_);
        }
        case kind::tabulated: return density_(v);
    }
    return 0.0;
}

double virtual_value(const distribution& d, double v) {
    if (!d.contains(v)) fail(errc::input, "type " + std::to_string(v) + " is outside the support");
    return v - (1.0 - d.cdf(v)) / d.density(v);
}

bool regular(const distribution& d, const std::vector<double>& grid, double tol) {
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (virtual_value(d, grid[k]) < virtual_value(d, grid[k - 1]) - tol) return false;
    return true;
}

std::size_t partition::cell_of(double v) const {
    if (bounds.size() < 2 || v < bounds.front() || v > bounds.back()) fail(errc::input, "type is outside the partition");
    auto it = std::upper_bound(bounds.begin(), bounds.end(), v);
    std::size_t k = static_cast<std::size_t>(it - bounds.begin());
    return std::min(k, bounds.size() - 1) - 1;
}

bool partition::refines(const partition& coarse) const {
    for (double b : coarse.bounds)
        if (std::find(bounds.begin(), bounds.end(), b) == bounds.end()) return false;
    return bounds.front() == coarse.bounds.front() && bounds.back() == coarse.bounds.back();
}

void check_partition(const partition& p, const distribution& d) {
    if (p.bounds.size() < 2) fail(errc::validation, "partition needs at least one cell");
    for (std::size_t k = 1; k < p.bounds.size(); ++k)
        if (!(p.bounds[k] > p.bounds[k - 1])) fail(errc::validation, "partition bounds must be strictly increasing");
    if (p.bounds.front() != d.lo() || p.bounds.back() != d.hi())
        fail(errc::validation, "partition must cover the support exactly");
}

double cell_virtual_value(const distribution& d, const partition& p, double v) {
    if (!d.contains(v)) fail(errc::input, "type " + std::to_string(v) + " is outside the support");
    const double top = p.cell_top(v);
    return v - (d.cdf(top) - d.cdf(v)) / d.density(v);
}

std::string describe(const distribution& d) {
    std::ostringstream os;
    os.precision(17);
    switch (d.tag()) {
        case distribution::kind::uniform: os << "uniform(" << d.lo() << "," << d.hi() << ")"; break;
        case distribution::kind::truncated_normal:
            os << "truncated_normal(" << d.mu() << "," << d.s() << "," << d.lo() << "," << d.hi() << ")";
            break;
        case distribution::kind::tabulated: os << "tabulated(" << d.density_knots().xs().size() << " knots)"; break;
    }
    return os.str();
}

}  // namespace platmatch
