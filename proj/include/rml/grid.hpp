#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rml {

/// Real values sampled on a uniform 1-D grid with explicit domain bounds.
class GridFunction {
public:
    GridFunction(double x_lo, double x_hi, std::vector<double> values)
        : x_lo_(x_lo), x_hi_(x_hi), values_(std::move(values)) {
        if (!(x_lo_ < x_hi_))
            throw std::invalid_argument("GridFunction: requires x_lo < x_hi");
        if (values_.size() < 2)
            throw std::invalid_argument("GridFunction: requires at least 2 points");
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("GridFunction: all values must be finite");
    }

    static GridFunction zeros(double x_lo, double x_hi, std::size_t n) {
        return GridFunction(x_lo, x_hi, std::vector<double>(n, 0.0));
    }

    template <typename F>
    static GridFunction sample(double x_lo, double x_hi, std::size_t n, F&& f) {
        if (n < 2)
            throw std::invalid_argument("GridFunction: requires at least 2 points");
        std::vector<double> v(n);
        const double h = (x_hi - x_lo) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = f(x_lo + h * static_cast<double>(i));
        return GridFunction(x_lo, x_hi, std::move(v));
    }

    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    std::size_t size() const { return values_.size(); }
    double dx() const { return (x_hi_ - x_lo_) / static_cast<double>(values_.size() - 1); }
    double x(std::size_t i) const { return x_lo_ + dx() * static_cast<double>(i); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Trapezoid rule over the whole grid (fixed summation order).
    double integral() const {
        double s = 0.5 * (values_.front() + values_.back());
        for (std::size_t i = 1; i + 1 < values_.size(); ++i)
            s += values_[i];
        return s * dx();
    }

    /// Trapezoid rule of x^k * v(x).
    double moment(int k) const {
        auto xk = [k](double x) {
            double r = 1.0;
            for (int j = 0; j < k; ++j) r *= x;
            return r;
        };
        double s = 0.5 * (xk(x_lo_) * values_.front() + xk(x_hi_) * values_.back());
        for (std::size_t i = 1; i + 1 < values_.size(); ++i)
            s += xk(x(i)) * values_[i];
        return s * dx();
    }

    double max_value() const { return *std::max_element(values_.begin(), values_.end()); }
    double min_value() const { return *std::min_element(values_.begin(), values_.end()); }

    /// Linear interpolation; 0 outside the domain.
    double interpolate(double xq) const {
        if (xq < x_lo_ || xq > x_hi_) return 0.0;
        const double s = (xq - x_lo_) / dx();
        const auto i = static_cast<std::size_t>(std::min(s, static_cast<double>(values_.size() - 2)));
        const double w = s - static_cast<double>(i);
        return (1.0 - w) * values_[i] + w * values_[i + 1];
    }

private:
    double x_lo_;
    double x_hi_;
    std::vector<double> values_;
};

} // namespace rml
