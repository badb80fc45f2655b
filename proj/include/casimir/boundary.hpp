/**
 * @file boundary.hpp
 * @brief Wall trajectories L(t): closed-form cosine drives and sampled tables.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "error.hpp"
#include "interp.hpp"

namespace casimir {

struct Units {
    double v_s = 1.0;
    double L0 = 1.0;
    double rho0 = 1.0;
    double xi_h = 0.01;
    double hbar_scale = 1.0;

    void validate() const {
        if (!(v_s > 0.0)) throw error(errc::InvalidConfig, "v_s must be positive");
        if (!(L0 > 0.0)) throw error(errc::NonPositiveLength, "L0 must be positive");
        if (!(rho0 > 0.0)) throw error(errc::InvalidConfig, "rho0 must be positive");
        if (!(xi_h > 0.0 && xi_h < L0)) throw error(errc::InvalidConfig, "xi_h must lie in (0, L0)");
    }
};

enum class DriveKind { CosineRaise, CosineLower, Sampled };

inline const char* to_string(DriveKind k) {
    switch (k) {
    case DriveKind::CosineRaise: return "CosineRaise";
    case DriveKind::CosineLower: return "CosineLower";
    case DriveKind::Sampled: return "Sampled";
    }
    return "?";
}

class Trajectory {
public:
    DriveKind kind = DriveKind::CosineRaise;
    double L0 = 1.0;
    double epsilon = 0.0;
    double omega = 0.0;
    double t_start = 0.0;
    // Past t_stop the wall is frozen at L(t_stop) and the source vanishes.
    double t_stop = std::numeric_limits<double>::infinity();
    HermiteTable samples;

    bool is_cosine() const { return kind != DriveKind::Sampled; }
    double sign() const { return kind == DriveKind::CosineLower ? -1.0 : 1.0; }
    double period() const { return omega > 0.0 ? 2.0 * std::numbers::pi / omega : std::numeric_limits<double>::infinity(); }
    bool driven() const { return is_cosine() ? epsilon != 0.0 : true; }

    // Latest time with a defined wall position.
    double t_end() const {
        if (is_cosine() || std::isfinite(t_stop)) return std::numeric_limits<double>::infinity();
        return samples.back();
    }

    double L(double t) const { return derivs(t)[0]; }
    double Ldot(double t) const { return derivs(t)[1]; }
    double Lddot(double t) const { return derivs(t)[2]; }

    std::pair<double, double> evaluate(double t) const {
        auto d = derivs(t);
        return {d[0], d[1]};
    }

    // L, L', L'', L''' at t. Sampled tables only carry the first two.
    std::array<double, 4> derivs(double t) const {
        if (t < t_start) return {L0, 0.0, 0.0, 0.0};
        if (t > t_stop) return {derivs(t_stop)[0], 0.0, 0.0, 0.0};
        if (is_cosine()) {
            const double s = sign() * L0 * epsilon;
            const double ph = omega * (t - t_start);
            const double c = std::cos(ph), sn = std::sin(ph);
            return {L0 + s * (1.0 - c), s * omega * sn, s * omega * omega * c, -s * omega * omega * omega * sn};
        }
        if (t > samples.back() * (1.0 + 1e-14) + 1e-14)
            throw error(errc::OutOfRange, "time beyond the sampled trajectory");
        const size_t i = samples.locate(t);
        return {samples.eval_at(i, t), samples.deriv_at(i, t), 0.0, 0.0};
    }

    // Third derivative of the fractional modulation as substituted in the source term:
    // +eps w^3 sin(w t) for CosineRaise, sign flipped for CosineLower.
    double source_third_derivative(double t) const {
        if (!is_cosine()) throw error(errc::InsufficientSmoothness, "sampled trajectories carry no third derivative");
        if (t < t_start || t > t_stop) return 0.0;
        return sign() * epsilon * omega * omega * omega * std::sin(omega * (t - t_start));
    }

    // Fractional modulation e(t) with L = L0 (1 + e(t)).
    double fractional(double t) const { return L(t) / L0 - 1.0; }
    double fractional_dot(double t) const { return Ldot(t) / L0; }

    Trajectory stopped_at(double ts) const {
        Trajectory c = *this;
        c.t_stop = ts;
        return c;
    }

    double max_speed(double t0, double t1) const {
        if (t1 < t0) std::swap(t0, t1);
        const double a = std::max(t0, t_start), b = std::min(t1, t_stop);
        if (b <= a) return 0.0;
        if (is_cosine()) {
            if (epsilon == 0.0 || omega == 0.0) return 0.0;
            const double peak = std::abs(L0 * epsilon * omega);
            // first point with |sin| = 1 at or after a
            const double k = std::ceil((omega * (a - t_start) - std::numbers::pi / 2) / std::numbers::pi);
            const double tp = t_start + (std::numbers::pi / 2 + k * std::numbers::pi) / omega;
            if (tp <= b) return peak;
            return std::max(std::abs(Ldot(a)), std::abs(Ldot(b)));
        }
        double m = std::max(std::abs(Ldot(a)), std::abs(Ldot(b)));
        const auto& xs = samples.x();
        for (size_t i = 0; i + 1 < xs.size(); ++i) {
            if (xs[i + 1] < a || xs[i] > b) continue;
            const double lo = std::max(a, xs[i]), hi = std::min(b, xs[i + 1]);
            m = std::max({m, std::abs(samples.deriv_at(i, lo)), std::abs(samples.deriv_at(i, hi))});
            // vertex of the quadratic derivative
            const double h = xs[i + 1] - xs[i];
            const double y0 = samples.y()[i], y1 = samples.y()[i + 1], d0 = samples.d()[i], d1 = samples.d()[i + 1];
            const double c2 = 6.0 * (y0 - y1) / h + 3.0 * (d0 + d1);
            const double c1 = -6.0 * (y0 - y1) / h - 4.0 * d0 - 2.0 * d1;
            if (c2 != 0.0) {
                const double s = -c1 / (2.0 * c2);
                const double tv = xs[i] + s * h;
                if (s > 0.0 && s < 1.0 && tv >= lo && tv <= hi) m = std::max(m, std::abs(samples.deriv_at(i, tv)));
            }
        }
        return m;
    }

    double min_length(double t0, double t1) const {
        if (is_cosine()) {
            if (t1 < t_start) return L0;
            const double s = sign() * epsilon;
            return s >= 0.0 ? L0 : L0 * (1.0 + 2.0 * s);
        }
        double m = L0;
        for (double y : samples.y()) m = std::min(m, y);
        (void)t0;
        (void)t1;
        return m;
    }

    double max_length() const {
        if (is_cosine()) {
            const double s = sign() * epsilon;
            return s >= 0.0 ? L0 * (1.0 + 2.0 * s) : L0;
        }
        double m = L0;
        for (double y : samples.y()) m = std::max(m, y);
        return m;
    }
};

inline Trajectory make_cosine_drive(double L0, double epsilon, double omega, DriveKind kind) {
    if (!(L0 > 0.0)) throw error(errc::NonPositiveLength, "L0 must be positive");
    if (!(epsilon >= 0.0 && epsilon < 0.5)) throw error(errc::AmplitudeTooLarge, "epsilon must lie in [0, 1/2)");
    if (!(omega > 0.0)) throw error(errc::OutOfRange, "omega must be positive");
    if (kind == DriveKind::Sampled) throw error(errc::InvalidConfig, "cosine drive needs a cosine kind");
    Trajectory tr;
    tr.kind = kind;
    tr.L0 = L0;
    tr.epsilon = epsilon;
    tr.omega = omega;
    tr.t_start = 0.0;
    return tr;
}

inline Trajectory make_static_box(double L0) {
    if (!(L0 > 0.0)) throw error(errc::NonPositiveLength, "L0 must be positive");
    Trajectory tr;
    tr.kind = DriveKind::CosineRaise;
    tr.L0 = L0;
    tr.epsilon = 0.0;
    tr.omega = 1.0;
    return tr;
}

inline Trajectory make_sampled(std::vector<double> t, std::vector<double> L) {
    if (t.size() < 2 || t.size() != L.size()) throw error(errc::DimensionMismatch, "need matching (t, L) samples");
    for (size_t i = 0; i + 1 < t.size(); ++i)
        if (!(t[i + 1] > t[i])) throw error(errc::OutOfRange, "sample times must be strictly increasing");
    for (double v : L)
        if (!(v > 0.0)) throw error(errc::NonPositiveLength, "sampled length must stay positive");
    Trajectory tr;
    tr.kind = DriveKind::Sampled;
    tr.t_start = t.front();
    tr.L0 = L.front();
    tr.samples = HermiteTable::monotone(std::move(t), std::move(L));
    return tr;
}

inline std::pair<double, double> evaluate(const Trajectory& tr, double t) { return tr.evaluate(t); }

inline double check_subsonic(const Trajectory& tr, const Units& u, double t0, double t1) {
    if (!(t0 < t1)) throw error(errc::OutOfRange, "check_subsonic needs t0 < t1");
    return tr.max_speed(t0, t1) / u.v_s;
}

// L(t) = L0 A(t)^(-1/(2N)) sampled on the given grid.
inline Trajectory effective_length_from_intensity(const std::function<double(double)>& A, double L0, int N,
                                                  const std::vector<double>& t_grid) {
    if (!(L0 > 0.0)) throw error(errc::NonPositiveLength, "L0 must be positive");
    if (N < 1) throw error(errc::InvalidConfig, "N must be at least 1");
    std::vector<double> L;
    L.reserve(t_grid.size());
    for (double t : t_grid) {
        const double a = A(t);
        if (!(a > 0.0)) throw error(errc::NonPositiveIntensity, "intensity must stay positive");
        L.push_back(L0 * std::pow(a, -1.0 / (2.0 * N)));
    }
    return make_sampled(t_grid, std::move(L));
}

} // namespace casimir
