/**
 * @file interp.hpp
 * @brief Piecewise cubic Hermite tables with a Fritsch-Carlson monotonicity limiter.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "error.hpp"

namespace casimir {

class HermiteTable {
public:
    HermiteTable() = default;

    // Derivatives supplied by the caller; limited only where they would break monotonicity.
    HermiteTable(std::vector<double> x, std::vector<double> y, std::vector<double> d, bool limit = true)
        : x_(std::move(x)), y_(std::move(y)), d_(std::move(d)) {
        check();
        if (limit) fritsch_carlson();
    }

    // Derivatives estimated from the data (Fritsch-Butland harmonic mean).
    static HermiteTable monotone(std::vector<double> x, std::vector<double> y) {
        const size_t n = x.size();
        if (n < 2 || y.size() != n) throw error(errc::DimensionMismatch, "need at least two matching samples");
        std::vector<double> d(n, 0.0), s(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) s[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        for (size_t i = 1; i + 1 < n; ++i) {
            if (s[i - 1] * s[i] > 0.0) {
                const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
                const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
                d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
            }
        }
        d[0] = end_slope(x[1] - x[0], n > 2 ? x[2] - x[1] : x[1] - x[0], s[0], n > 2 ? s[1] : s[0]);
        d[n - 1] = end_slope(x[n - 1] - x[n - 2], n > 2 ? x[n - 2] - x[n - 3] : x[n - 1] - x[n - 2],
                             s[n - 2], n > 2 ? s[n - 3] : s[n - 2]);
        return HermiteTable(std::move(x), std::move(y), std::move(d), true);
    }

    bool empty() const { return x_.empty(); }
    size_t size() const { return x_.size(); }
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& d() const { return d_; }

    bool contains(double t, double slack = 1e-12) const {
        const double s = slack * std::max(1.0, std::abs(x_.back() - x_.front()));
        return t >= x_.front() - s && t <= x_.back() + s;
    }

    size_t locate(double t) const {
        if (t <= x_.front()) return 0;
        if (t >= x_.back()) return x_.size() - 2;
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        return static_cast<size_t>(it - x_.begin()) - 1;
    }

    double eval(double t) const { return eval_at(locate(t), t); }
    double deriv(double t) const { return deriv_at(locate(t), t); }

    double eval_at(size_t i, double t) const {
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * d_[i] + (-2 * s3 + 3 * s2) * y_[i + 1] +
               (s3 - s2) * h * d_[i + 1];
    }

    double deriv_at(size_t i, double t) const {
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        const double s2 = s * s;
        return (6 * s2 - 6 * s) / h * (y_[i] - y_[i + 1]) + (3 * s2 - 4 * s + 1) * d_[i] + (3 * s2 - 2 * s) * d_[i + 1];
    }

private:
    static double end_slope(double h0, double h1, double s0, double s1) {
        double d = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (d * s0 <= 0.0) return 0.0;
        if (s0 * s1 <= 0.0 && std::abs(d) > std::abs(3 * s0)) return 3 * s0;
        return d;
    }

    void check() const {
        if (x_.size() < 2 || y_.size() != x_.size() || d_.size() != x_.size())
            throw error(errc::DimensionMismatch, "hermite table needs matching x, y, d with at least two points");
        for (size_t i = 0; i + 1 < x_.size(); ++i)
            if (!(x_[i + 1] > x_[i])) throw error(errc::OutOfRange, "abscissae must be strictly increasing");
    }

    void fritsch_carlson() {
        for (size_t i = 0; i + 1 < x_.size(); ++i) {
            const double s = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
            if (s == 0.0) {
                d_[i] = d_[i + 1] = 0.0;
                continue;
            }
            double a = d_[i] / s, b = d_[i + 1] / s;
            if (a < 0.0) d_[i] = a = 0.0;
            if (b < 0.0) d_[i + 1] = b = 0.0;
            const double r = a * a + b * b;
            if (r > 9.0) {
                const double tau = 3.0 / std::sqrt(r);
                d_[i] = tau * a * s;
                d_[i + 1] = tau * b * s;
            }
        }
    }

    std::vector<double> x_, y_, d_;
};

} // namespace casimir
