#include "platmatch/functions.hpp"

#include "platmatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace platmatch {

const char* to_string(errc kind) {
    switch (kind) {
    case errc::input: return "input";
    case errc::validation: return "validation";
    case errc::structure: return "structure";
    case errc::size: return "size";
    case errc::incentive: return "incentive";
    case errc::numeric: return "numeric";
    case errc::consistency: return "consistency";
    }
    return "unknown";
}

piecewise_linear::piecewise_linear(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size() || xs_.empty())
        fail(errc::validation, "table needs matching, nonempty knot and value lists");
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (!(xs_[i] > xs_[i - 1])) fail(errc::validation, "table knots must be strictly increasing");
}

std::size_t piecewise_linear::segment(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
    if (hi == 0) hi = 1;
    if (hi >= xs_.size()) hi = xs_.size() - 1;
    return hi - 1;
}

double piecewise_linear::operator()(double x) const {
    if (xs_.size() == 1 || x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    std::size_t i = segment(x);
    double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
    return ys_[i] + t * (ys_[i + 1] - ys_[i]);
}

double piecewise_linear::slope(double x) const {
    if (xs_.size() == 1 || x < xs_.front() || x > xs_.back()) return 0.0;
    std::size_t i = segment(x);
    return (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
}

type_function type_function::linear(double intercept, double slope) {
    type_function f;
    f.kind_ = kind::linear;
    f.c0_ = intercept;
    f.c1_ = slope;
    return f;
}

type_function type_function::table(std::vector<double> vs, std::vector<double> values) {
    type_function f;
    f.kind_ = kind::table;
    f.table_ = piecewise_linear(std::move(vs), std::move(values));
    return f;
}

double type_function::operator()(double v) const {
    return kind_ == kind::linear ? c0_ + c1_ * v : table_(v);
}

double type_function::derivative(double v) const {
    return kind_ == kind::linear ? c1_ : table_.slope(v);
}

size_function size_function::power(double coef, double exponent) {
    if (!(exponent > 0.0)) fail(errc::validation, "power exponent must be positive");
    size_function g;
    g.kind_ = kind::power;
    g.coef_ = coef;
    g.exponent_ = exponent;
    return g;
}

size_function size_function::log1p(double coef) {
    size_function g;
    g.kind_ = kind::log1p;
    g.coef_ = coef;
    return g;
}

size_function size_function::affine(double slope, double intercept) {
    size_function g;
    g.kind_ = kind::affine;
    g.coef_ = slope;
    g.intercept_ = intercept;
    return g;
}

size_function size_function::table(std::vector<double> xs, std::vector<double> values) {
    size_function g;
    g.kind_ = kind::table;
    g.table_ = piecewise_linear(std::move(xs), std::move(values));
    return g;
}

double size_function::operator()(double x) const {
    switch (kind_) {
    case kind::power: return x <= 0.0 ? 0.0 : coef_ * std::pow(x, exponent_);
    case kind::log1p: return coef_ * std::log1p(x);
    case kind::affine: return coef_ * x + intercept_;
    case kind::table: return table_(x);
    }
    return 0.0;
}

double size_function::derivative(double x) const {
    switch (kind_) {
    case kind::power:
        if (x <= 0.0) return exponent_ == 1.0 ? coef_ : (exponent_ > 1.0 ? 0.0 : HUGE_VAL);
        return coef_ * exponent_ * std::pow(x, exponent_ - 1.0);
    case kind::log1p: return coef_ / (1.0 + x);
    case kind::affine: return coef_;
    case kind::table: return table_.slope(x);
    }
    return 0.0;
}

bool size_function::is_affine() const {
    if (kind_ == kind::affine) return true;
    if (kind_ == kind::power) return exponent_ == 1.0 || coef_ == 0.0;
    if (kind_ == kind::log1p) return coef_ == 0.0;
    return false;
}

std::string describe(const size_function& g) {
    std::ostringstream os;
    switch (g.tag()) {
    case size_function::kind::power: os << g.coef() << "*x^" << g.exponent(); break;
    case size_function::kind::log1p: os << g.coef() << "*log(1+x)"; break;
    case size_function::kind::affine: os << g.coef() << "*x+" << g.intercept(); break;
    case size_function::kind::table: os << "table(" << g.knots().xs().size() << ")"; break;
    }
    return os.str();
}

knot_function knot_function::piecewise(std::vector<double> vs, std::vector<double> xs) {
    if (vs.size() < 2 || vs.size() != xs.size()) fail(errc::input, "knot function needs at least two matching knots");
    for (std::size_t k = 0; k < vs.size(); ++k) {
        if (!std::isfinite(vs[k]) || !std::isfinite(xs[k])) fail(errc::input, "knot function knots must be finite");
        if (k > 0 && vs[k] < vs[k - 1]) fail(errc::input, "knot function knots must be ascending");
    }
    if (!(vs.back() > vs.front())) fail(errc::input, "knot function must span a nondegenerate interval");
    knot_function a;
    a.vs_ = std::move(vs);
    a.xs_ = std::move(xs);
    return a;
}

knot_function knot_function::step(const std::vector<double>& vs, const std::vector<double>& xs, double top) {
    if (vs.empty() || vs.size() != xs.size()) fail(errc::input, "step function needs matching knots");
    std::vector<double> kv{vs[0]}, kx{xs[0]};
    for (std::size_t k = 1; k < vs.size(); ++k) {
        kv.push_back(vs[k]);
        kx.push_back(xs[k - 1]);
        kv.push_back(vs[k]);
        kx.push_back(xs[k]);
    }
    if (top > vs.back()) {
        kv.push_back(top);
        kx.push_back(xs.back());
    }
    return piecewise(std::move(kv), std::move(kx));
}

double knot_function::operator()(double v) const {
    if (v < vs_.front()) return xs_.front();
    if (v >= vs_.back()) return xs_.back();
    std::size_t k = static_cast<std::size_t>(std::upper_bound(vs_.begin(), vs_.end(), v) - vs_.begin()) - 1;
    double w = (v - vs_[k]) / (vs_[k + 1] - vs_[k]);
    return xs_[k] + w * (xs_[k + 1] - xs_[k]);
}

double knot_function::left(double v) const {
    if (v <= vs_.front()) return xs_.front();
    if (v > vs_.back()) return xs_.back();
    std::size_t k = static_cast<std::size_t>(std::lower_bound(vs_.begin(), vs_.end(), v) - vs_.begin());
    if (vs_[k] == v) return xs_[k];
    double w = (v - vs_[k - 1]) / (vs_[k] - vs_[k - 1]);
    return xs_[k - 1] + w * (xs_[k] - xs_[k - 1]);
}

std::vector<double> knot_function::breaks() const {
    std::vector<double> b = vs_;
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

bool knot_function::nondecreasing(double tol) const {
    for (std::size_t k = 1; k < xs_.size(); ++k)
        if (xs_[k] < xs_[k - 1] - tol) return false;
    return true;
}

}  // namespace platmatch
