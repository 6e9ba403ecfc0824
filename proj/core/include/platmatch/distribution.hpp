#pragma once

#include "platmatch/functions.hpp"

#include <string>
#include <vector>

namespace platmatch {

/// Type distribution on a bounded support [lo, hi] with CDF Q and density q.
class distribution {
public:
    enum class kind { uniform, truncated_normal, tabulated };

    distribution() = default;

    static distribution uniform(double a, double b);
    static distribution truncated_normal(double mu, double s, double a, double b);
    /// Knots with CDF and density values; the CDF between knots integrates the linear density.
    static distribution tabulated(std::vector<double> grid, std::vector<double> cdf, std::vector<double> density);

    double cdf(double v) const;
    double density(double v) const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool contains(double v) const { return v >= lo_ && v <= hi_; }

    kind tag() const { return kind_; }
    double mu() const { return mu_; }
    double s() const { return s_; }
    const piecewise_linear& density_knots() const { return density_; }
    const std::vector<double>& cdf_knots() const { return cdf_; }

private:
    double phi_cdf(double z) const;

    kind kind_ = kind::uniform;
    double lo_ = 0.0, hi_ = 1.0;
    double mu_ = 0.0, s_ = 1.0, z_mass_ = 1.0, z_lo_ = 0.0;
    piecewise_linear density_;
    std::vector<double> cdf_;
};

/// v - (1 - Q(v)) / q(v).
double virtual_value(const distribution& d, double v);

/// Virtual value nondecreasing on the grid.
bool regular(const distribution& d, const std::vector<double>& grid, double tol = 1e-12);

/// Ordered cells [bounds[k], bounds[k+1]) covering the support; the last cell is closed.
struct partition {
    std::vector<double> bounds;

    static partition trivial(const distribution& d) { return partition{{d.lo(), d.hi()}}; }
    std::size_t cells() const { return bounds.empty() ? 0 : bounds.size() - 1; }
    std::size_t cell_of(double v) const;
    double cell_top(double v) const { return bounds[cell_of(v) + 1]; }
    /// Every cell of `coarse` is a union of cells of this partition.
    bool refines(const partition& coarse) const;
};

/// Throws unless the partition covers the distribution's support without gaps or overlaps.
void check_partition(const partition& p, const distribution& d);

/// v - (Q(top) - Q(v)) / q(v), with top the upper bound of v's cell.
double cell_virtual_value(const distribution& d, const partition& p, double v);

std::string describe(const distribution& d);

}  // namespace platmatch
