/**
 * @file classical.hpp
 * @brief Classical current response of the shaken box: effective drive, single-mode solutions and the
 * full moving-boundary response through the retarded kernel.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "boundary.hpp"
#include "conformal.hpp"
#include "modes.hpp"
#include "quadrature.hpp"

namespace casimir {

struct EffectiveDrive {
    double alpha = 1.0;
    Trajectory traj;
    double rho0 = 1.0;

    double third_derivative(double t) const { return traj.source_third_derivative(t); }

    // M(x, t) = alpha rho0 eps'''(t) x
    double source(double x, double t) const { return alpha * rho0 * third_derivative(t) * x; }

    // Mode amplitude with F.T.[x] = (-1)^{1+n} L0/(n pi), as used by the closed-form single-mode solution.
    double mode_source(int n, double t) const {
        const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
        return alpha * rho0 * third_derivative(t) * sgn * traj.L0 / (n * std::numbers::pi);
    }

    // Exact (2/L0) sine projection of x, twice mode_source.
    double mode_source_projected(int n, double t) const { return 2.0 * mode_source(n, t); }
};

inline EffectiveDrive boundary_transform_drive(const Trajectory& traj, double alpha, double rho0) {
    if (!traj.is_cosine()) throw error(errc::InsufficientSmoothness, "sampled trajectories must be smoothed to C3 first");
    return {alpha, traj, rho0};
}

struct DampingModel {
    enum class Kind { None, Constant, Table };
    Kind kind = Kind::None;
    double rate = 0.0;
    std::vector<double> table; // per mode, index n - 1

    static DampingModel none() { return {}; }
    static DampingModel constant(double g) {
        if (g < 0.0) throw error(errc::InvalidConfig, "damping rate must be nonnegative");
        return {Kind::Constant, g, {}};
    }
    static DampingModel per_mode(std::vector<double> g) {
        for (double v : g)
            if (v < 0.0) throw error(errc::InvalidConfig, "damping rate must be nonnegative");
        return {Kind::Table, 0.0, std::move(g)};
    }

    double gamma(int n, double /*omega*/) const {
        switch (kind) {
        case Kind::None: return 0.0;
        case Kind::Constant: return rate;
        case Kind::Table:
            if (n < 1 || n > static_cast<int>(table.size())) throw error(errc::OutOfRange, "no damping entry for mode");
            return table[n - 1];
        }
        return 0.0;
    }
};

inline double mode_frequency(int n, double L0, double v_s = 1.0) { return n * std::numbers::pi * v_s / L0; }

struct ChiValue {
    cplx value;
    bool pole = false; // undamped and exactly on resonance
};

// 1/(w^2 + i gamma w - w_n^2)
inline ChiValue chi(double omega, int n, const DampingModel& damping, double L0 = 1.0, double v_s = 1.0) {
    const double wn = mode_frequency(n, L0, v_s);
    const double g = damping.gamma(n, omega);
    const cplx den(omega * omega - wn * wn, g * omega);
    if (den == cplx(0.0, 0.0)) return {cplx(std::numeric_limits<double>::infinity(), 0.0), true};
    return {1.0 / den, false};
}

// Damped resonance frequency sqrt(w_n^2 - gamma^2).
inline double resonance_frequency(int n, double gamma, double L0 = 1.0, double v_s = 1.0) {
    const double wn = mode_frequency(n, L0, v_s);
    return std::sqrt(std::max(0.0, wn * wn - gamma * gamma));
}

// Closed-form two-term solution with transients, quiescent at the drive start.
inline std::vector<double> single_mode_response(int n, const EffectiveDrive& drive, const DampingModel& damping,
                                                const std::vector<double>& t_grid, double v_s = 1.0) {
    const auto& tr = drive.traj;
    if (!tr.is_cosine()) throw error(errc::InsufficientSmoothness, "closed form needs a cosine drive");
    const double w = tr.omega;
    const double wn = mode_frequency(n, tr.L0, v_s);
    const double g = damping.gamma(n, wn);
    const double wr = resonance_frequency(n, g, tr.L0, v_s);
    const ChiValue c = chi(w, n, damping, tr.L0, v_s);
    const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
    const double K = sgn * tr.sign() * drive.alpha * tr.epsilon * drive.rho0 * tr.L0 * w * w * w / (n * std::numbers::pi);
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t0 : t_grid) {
        const double t = t0 - tr.t_start;
        if (t <= 0.0) {
            out.push_back(0.0);
            continue;
        }
        if (c.pole) {
            // gamma -> 0 limit of the same expression on resonance
            out.push_back(-K * t * std::cos(w * t) / w);
            continue;
        }
        const double e = std::exp(-g * t);
        out.push_back(K * (c.value.imag() * (std::cos(w * t) - e * std::cos(wr * t)) +
                           c.value.real() * (std::sin(w * t) - w / wr * e * std::sin(wr * t))));
    }
    return out;
}

/**
 * Exact solution of j'' + 2 gamma j' + w_n^2 j = -F sin(w (t - t_start)) with j = j' = 0 at t_start,
 * where F is the exact sine projection of the source on the rest box.
 */
inline std::vector<double> single_mode_exact(int n, const EffectiveDrive& drive, const DampingModel& damping,
                                             const std::vector<double>& t_grid, double v_s = 1.0) {
    const auto& tr = drive.traj;
    if (!tr.is_cosine()) throw error(errc::InsufficientSmoothness, "closed form needs a cosine drive");
    const double w = tr.omega;
    const double wn = mode_frequency(n, tr.L0, v_s);
    const double g = damping.gamma(n, w);
    const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
    const double F = 2.0 * sgn * tr.sign() * drive.alpha * tr.epsilon * drive.rho0 * tr.L0 * w * w * w / (n * std::numbers::pi);
    // particular solution Im[P e^{i w t}] with P = -F / (w_n^2 - w^2 + 2 i gamma w)
    const cplx P = -F / cplx(wn * wn - w * w, 2.0 * g * w);
    const bool resonant = (g == 0.0 && w == wn);
    const double wd = std::sqrt(std::max(0.0, wn * wn - g * g));
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t0 : t_grid) {
        const double t = t0 - tr.t_start;
        if (t <= 0.0) {
            out.push_back(0.0);
            continue;
        }
        if (resonant) {
            out.push_back(F * (t * std::cos(w * t) / (2.0 * w) - std::sin(w * t) / (2.0 * w * w)));
            continue;
        }
        const double jp0 = P.imag();
        const double dp0 = (P * cplx(0.0, w)).imag();
        const cplx part = P * std::exp(cplx(0.0, w * t));
        // homogeneous part cancels the particular values at t = 0
        const double a = -jp0;
        const double b = -dp0 + g * a; // hom'(0) = b - gamma a
        double hom;
        if (wd > 0.0) hom = std::exp(-g * t) * (a * std::cos(wd * t) + b / wd * std::sin(wd * t));
        else hom = std::exp(-g * t) * (a + b * t);
        out.push_back(part.imag() + hom);
    }
    return out;
}

struct ClassicalResponse {
    std::vector<double> t_grid;
    std::vector<std::vector<double>> j_modes;   // [mode - 1][time index]
    std::vector<std::vector<double>> rho_modes; // filled by density_from_current
    double alpha = 1.0, epsilon = 0.0, omega = 0.0;
    int Lambda = 0;
    std::string method;
    double t_stop = std::numeric_limits<double>::infinity();
    double L_stop = 1.0;
};

struct FullResponseOptions {
    double max_step = 0.0;   // default T_drive / 64
    int time_order = 8;      // Gauss-Legendre points per step in t'
    double phi_max = std::numbers::pi; // phase per panel
};

/**
 * Moving-boundary response j(m, t) for m = 1..Lambda.
 *
 * Source integrals I_n(t) = -i alpha rho0 / (2 sqrt(n pi)) int dz e^{i n pi R(z)} G(z, t) with
 * G(z, t) = int eps'''(t') (z - t') dt' over the t' in [0, t] whose light cone covers z. The geometry
 * (light cones and R) comes from map0; the source comes from the drive.
 */
inline ClassicalResponse full_response(const ConformalMap& map0, const EffectiveDrive& drive, const std::vector<double>& t_grid,
                                       int Lambda, const FullResponseOptions& opt = {}) {
    const Trajectory& geo = map0.traj;
    if (Lambda < 1) throw error(errc::OutOfRange, "Lambda must be at least 1");
    if (t_grid.empty()) throw error(errc::OutOfRange, "empty time grid");
    if (!std::is_sorted(t_grid.begin(), t_grid.end()) || t_grid.front() < 0.0)
        throw error(errc::OutOfRange, "time grid must be sorted and nonnegative");
    const double t_end = t_grid.back();
    if (geo.max_speed(0.0, t_end) >= 1.0) throw error(errc::SupersonicWall, "wall is supersonic");
    const double pi = std::numbers::pi;
    double h = opt.max_step;
    if (!(h > 0.0)) h = drive.traj.is_cosine() && drive.traj.omega > 0.0 ? drive.traj.period() / 64.0 : geo.L0 / 64.0;

    ClassicalResponse out;
    out.t_grid = t_grid;
    out.j_modes.assign(static_cast<size_t>(Lambda), std::vector<double>(t_grid.size(), 0.0));
    out.alpha = drive.alpha;
    out.epsilon = drive.traj.epsilon;
    out.omega = drive.traj.omega;
    out.Lambda = Lambda;
    out.method = "full";
    out.t_stop = drive.traj.t_stop;
    out.L_stop = std::isfinite(drive.traj.t_stop) ? geo.L(drive.traj.t_stop) : geo.L0;

    Eigen::VectorXcd In = Eigen::VectorXcd::Zero(Lambda);
    Eigen::VectorXd cn(Lambda);
    for (int n = 1; n <= Lambda; ++n) cn(n - 1) = 1.0 / (2.0 * std::sqrt(n * pi));
    const auto& gt = gauss_legendre(opt.time_order);
    const double ar = drive.alpha * drive.rho0;

    auto tau_plus = [&](double z) { return detail::solve_light_cone(geo, z, +1.0); };
    auto tau_minus = [&](double z) { return detail::solve_light_cone(geo, z, -1.0); };

    // Nodes on [a, b] split at the given breakpoints.
    auto strip_nodes = [&](double a, double b, std::vector<double> cuts) {
        cuts.push_back(a);
        cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        QuadNodes q;
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
            if (hi - lo <= 1e-14) continue;
            QuadNodes p = phase_nodes(map0, lo, hi, 0.0, Lambda, opt.phi_max);
            q.x.insert(q.x.end(), p.x.begin(), p.x.end());
            q.w.insert(q.w.end(), p.w.begin(), p.w.end());
        }
        return q;
    };

    auto step = [&](double t0, double t1) {
        if (t1 <= t0) return;
        const double Lf0 = geo.L(t0), Lf1 = geo.L(t1);
        const double za = t0 - Lf0, zb = t1 + Lf1;
        const QuadNodes q = strip_nodes(za, zb, {t0 + Lf0, t1 - Lf1});
        std::vector<double> phase(q.size());
        Eigen::VectorXd dG(static_cast<Eigen::Index>(q.size()));
        for (size_t i = 0; i < q.size(); ++i) {
            const double z = q.x[i];
            double lo = t0, hi = t1;
            if (z > t0 + Lf0) lo = std::max(lo, tau_plus(z));
            if (z < t1 - Lf1) hi = std::min(hi, tau_minus(z));
            double s = 0.0;
            if (hi > lo) {
                const double c = 0.5 * (hi + lo), r = 0.5 * (hi - lo);
                for (size_t k = 0; k < gt.x.size(); ++k) {
                    const double tp = c + r * gt.x[k];
                    s += gt.w[k] * drive.third_derivative(tp) * (z - tp);
                }
                s *= r;
            }
            dG(static_cast<Eigen::Index>(i)) = s * q.w[i];
            phase[i] = map0.R(z);
        }
        const Matrix B = detail::phase_powers(phase, Lambda, +1.0);
        const Eigen::VectorXcd acc = B * dG.cast<cplx>();
        for (int n = 0; n < Lambda; ++n) In(n) += -I_unit * (ar * cn(n)) * acc(n);
    };

    auto project = [&](double t, size_t ti) {
        const double L = geo.L(t);
        const QuadNodes q = phase_nodes(map0, t - L, t + L, Lambda / L, Lambda, opt.phi_max);
        std::vector<double> phase(q.size());
        for (size_t i = 0; i < q.size(); ++i) phase[i] = map0.R(q.x[i]);
        const Matrix B = detail::phase_powers(phase, Lambda, -1.0);
        const Eigen::VectorXcd coef = (I_unit * (cn.cast<cplx>().array() * In.array())).matrix();
        Eigen::VectorXcd hz = B.transpose() * coef; // h(z) at the nodes
        Eigen::MatrixXd S(Lambda, static_cast<Eigen::Index>(q.size()));
        for (size_t i = 0; i < q.size(); ++i) {
            const double x = q.x[i] - t;
            hz(static_cast<Eigen::Index>(i)) *= q.w[i];
            const cplx base = std::exp(I_unit * (pi * x / L));
            cplx p = base;
            for (int m = 0; m < Lambda; ++m, p *= base) S(m, static_cast<Eigen::Index>(i)) = p.imag();
        }
        const Eigen::VectorXcd jm = S.cast<cplx>() * hz;
        for (int m = 0; m < Lambda; ++m) out.j_modes[static_cast<size_t>(m)][ti] = 4.0 / L * jm(m).imag();
    };

    double t = 0.0;
    for (size_t ti = 0; ti < t_grid.size(); ++ti) {
        const double target = t_grid[ti];
        const int nsub = std::max(1, static_cast<int>(std::ceil((target - t) / h - 1e-9)));
        const double t_from = t;
        for (int k = 1; k <= nsub && target > t_from; ++k) {
            const double t1 = t_from + (target - t_from) * k / nsub;
            step(t, t1);
            t = t1;
        }
        if (target > 0.0) project(target, ti);
    }
    return out;
}

// Peak |y| per window of length `period`, reported at the time of the peak.
struct Envelope {
    std::vector<double> t;
    std::vector<double> amp;
};

inline Envelope envelope(const std::vector<double>& t, const std::vector<double>& y, double period) {
    Envelope e;
    if (t.empty()) return e;
    double w0 = t.front();
    size_t best = 0;
    bool have = false;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= w0 + period) {
            if (have) {
                e.t.push_back(t[best]);
                e.amp.push_back(std::abs(y[best]));
            }
            w0 += period * std::floor((t[i] - w0) / period);
            have = false;
        }
        if (!have || std::abs(y[i]) > std::abs(y[best])) {
            best = i;
            have = true;
        }
    }
    return e;
}

// Amplitude of the e^{i f t} component of y over [tc - window/2, tc + window/2] (trapezoid rule).
inline double band_amplitude(const std::vector<double>& t, const std::vector<double>& y, double f, double tc, double window) {
    const double a = tc - 0.5 * window, b = tc + 0.5 * window;
    cplx s = 0.0;
    for (size_t i = 0; i + 1 < t.size(); ++i) {
        const double lo = std::max(a, t[i]), hi = std::min(b, t[i + 1]);
        if (hi <= lo) continue;
        auto g = [&](double x) {
            const double u = (x - t[i]) / (t[i + 1] - t[i]);
            return ((1.0 - u) * y[i] + u * y[i + 1]) * std::exp(cplx(0.0, -f * x));
        };
        s += 0.5 * (hi - lo) * (g(lo) + g(hi));
    }
    return 2.0 * std::abs(s) / window;
}

// Least-squares y = (a + b t) cos(w t) + (c + d t) sin(w t) on [t0, t1]; returns sqrt(b^2 + d^2).
inline double amplitude_growth_rate(const std::vector<double>& t, const std::vector<double>& y, double w, double t0, double t1) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t0 && t[i] <= t1) idx.push_back(i);
    if (idx.size() < 4) throw error(errc::DimensionMismatch, "too few samples in the fit window");
    Eigen::MatrixXd A(static_cast<Eigen::Index>(idx.size()), 4);
    Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) {
        const double x = t[idx[k]];
        const auto r = static_cast<Eigen::Index>(k);
        A(r, 0) = std::cos(w * x);
        A(r, 1) = x * std::cos(w * x);
        A(r, 2) = std::sin(w * x);
        A(r, 3) = x * std::sin(w * x);
        b(r) = y[idx[k]];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    return std::hypot(c(1), c(3));
}

// Least-squares y = A cos(w t) + B sin(w t) on [t0, t1]; returns sqrt(A^2 + B^2).
inline double steady_amplitude(const std::vector<double>& t, const std::vector<double>& y, double w, double t0, double t1) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t0 && t[i] <= t1) idx.push_back(i);
    if (idx.size() < 2) throw error(errc::DimensionMismatch, "too few samples in the fit window");
    Eigen::MatrixXd A(static_cast<Eigen::Index>(idx.size()), 2);
    Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        A(r, 0) = std::cos(w * t[idx[k]]);
        A(r, 1) = std::sin(w * t[idx[k]]);
        b(r) = y[idx[k]];
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    return c.norm();
}

// Free-evolution density amplitudes rho(n) = j_ampl(n) / v_s, fitted after the drive stops.
inline std::vector<double> density_from_current(ClassicalResponse& resp, double v_s) {
    if (!(v_s > 0.0)) throw error(errc::InvalidConfig, "v_s must be positive");
    if (!std::isfinite(resp.t_stop)) throw error(errc::DriveStillOn, "response has no drive switch-off");
    std::vector<size_t> idx;
    for (size_t i = 0; i < resp.t_grid.size(); ++i)
        if (resp.t_grid[i] > resp.t_stop) idx.push_back(i);
    if (idx.size() < 3) throw error(errc::DriveStillOn, "too few samples after the drive switched off");
    std::vector<double> rho(resp.j_modes.size(), 0.0);
    resp.rho_modes.assign(resp.j_modes.size(), {});
    for (size_t m = 0; m < resp.j_modes.size(); ++m) {
        const double w = mode_frequency(static_cast<int>(m) + 1, resp.L_stop, v_s);
        Eigen::MatrixXd A(static_cast<Eigen::Index>(idx.size()), 2);
        Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
        for (size_t k = 0; k < idx.size(); ++k) {
            const double t = resp.t_grid[idx[k]];
            A(static_cast<Eigen::Index>(k), 0) = std::cos(w * t);
            A(static_cast<Eigen::Index>(k), 1) = std::sin(w * t);
            b(static_cast<Eigen::Index>(k)) = resp.j_modes[m][idx[k]];
        }
        const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
        rho[m] = c.norm() / v_s;
        resp.rho_modes[m] = {rho[m]};
    }
    return rho;
}

struct DilationSeries {
    std::vector<double> t, mass, a, g;
};

// m(t) = m L^2/L0^2, a(t) = m (L/L0^3) L'', g(t) = g L0^D / L^D
inline DilationSeries dilation_parameters(const Trajectory& tr, double m, double g, int D, const std::vector<double>& t_grid) {
    if (!tr.is_cosine()) throw error(errc::InsufficientSmoothness, "second derivative unavailable for sampled walls");
    DilationSeries s;
    const double L0 = tr.L0;
    for (double t : t_grid) {
        const auto d = tr.derivs(t);
        s.t.push_back(t);
        s.mass.push_back(m * d[0] * d[0] / (L0 * L0));
        s.a.push_back(m * d[0] / (L0 * L0 * L0) * d[2]);
        s.g.push_back(g * std::pow(L0 / d[0], D));
    }
    return s;
}

} // namespace casimir
