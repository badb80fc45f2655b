/**
 * @file quadrature.hpp
 * @brief Gauss-Legendre rules and composite panel assembly.
 */
#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

namespace casimir {

struct GaussRule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w;
};

// Newton iteration on P_n with the Tricomi initial guess.
inline GaussRule make_gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

inline const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

// Flattened nodes and weights of a composite rule.
struct QuadNodes {
    std::vector<double> x;
    std::vector<double> w;

    void add_panel(double a, double b, const GaussRule& g) {
        const double h = 0.5 * (b - a), c = 0.5 * (b + a);
        for (size_t i = 0; i < g.x.size(); ++i) {
            x.push_back(c + h * g.x[i]);
            w.push_back(h * g.w[i]);
        }
    }
    size_t size() const { return x.size(); }
};

// Uniform composite Gauss-Legendre rule on [a, b].
inline QuadNodes composite_rule(double a, double b, int panels, int order = 8) {
    QuadNodes q;
    const auto& g = gauss_legendre(order);
    q.x.reserve(static_cast<size_t>(panels) * order);
    q.w.reserve(static_cast<size_t>(panels) * order);
    for (int p = 0; p < panels; ++p) {
        double lo = a + (b - a) * p / panels;
        double hi = a + (b - a) * (p + 1) / panels;
        q.add_panel(lo, hi, g);
    }
    return q;
}

template <class F>
auto integrate(F&& f, double a, double b, int panels, int order = 8) {
    const auto q = composite_rule(a, b, panels, order);
    decltype(f(a)) s{};
    for (size_t i = 0; i < q.size(); ++i) s += q.w[i] * f(q.x[i]);
    return s;
}

} // namespace casimir
