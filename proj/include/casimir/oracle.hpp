/**
 * @file oracle.hpp
 * @brief Reference solvers: finite differences on the mapped box y = x / L(t) and the
 * d'Alembert form of a homogeneous solution through the conformal map.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "boundary.hpp"
#include "conformal.hpp"
#include "modes.hpp"

namespace casimir {

struct FDOptions {
    int Ny = 2000;
    double cfl = 0.4;
    int modes = 8;              // sine projections to record
    double output_every = 0.0;  // 0: every step
    double v_s = 1.0;
    bool keep_snapshots = false;
};

struct FDResult {
    std::vector<double> t;
    std::vector<std::vector<double>> proj; // [mode - 1][sample]
    std::vector<double> energy;
    std::vector<std::vector<double>> snapshots; // U(y) per sample when requested
    double dt = 0.0;
};

using SourceField = std::function<double(double x, double t)>;

/**
 * Solves j_tt - v^2 j_xx = -M(x, t) on [0, L(t)] with j = 0 on both walls. With U(y, t) = j(y L, t),
 * q = U_t and a = y L'/L:
 *   q_t = 2 a q_y - (a^2 - v^2/L^2) U_yy + y (L''/L - 2 L'^2/L^2) U_y - M,
 * advanced with classical RK4 and centered differences.
 */
inline FDResult fd_solve(const Trajectory& tr, const SourceField& M, double t_end, const FDOptions& opt,
                         const std::function<double(double)>& j0 = {}, const std::function<double(double)>& jt0 = {}) {
    if (opt.cfl > 0.5 || !(opt.cfl > 0.0)) throw error(errc::CFLViolation, "Courant number must lie in (0, 0.5]");
    if (opt.Ny < 4) throw error(errc::GridTooCoarse, "need at least 4 intervals");
    if (tr.max_speed(0.0, t_end) >= opt.v_s) throw error(errc::SupersonicWall, "wall is supersonic");
    const int N = opt.Ny;
    const double dy = 1.0 / N;
    const double Lmin = tr.min_length(0.0, t_end);
    const double vmax = opt.v_s + tr.max_speed(0.0, t_end);
    int nsteps = std::max(1, static_cast<int>(std::ceil(t_end / (opt.cfl * dy * Lmin / vmax))));
    const double dt = t_end / nsteps;

    std::vector<double> y(N + 1);
    for (int i = 0; i <= N; ++i) y[i] = i * dy;
    std::vector<double> U(N + 1, 0.0), Q(N + 1, 0.0);
    {
        const auto d = tr.derivs(0.0);
        for (int i = 1; i < N; ++i) U[i] = j0 ? j0(y[i] * d[0]) : 0.0;
        for (int i = 1; i < N; ++i) {
            const double Uy = (U[i + 1] - U[i - 1]) / (2.0 * dy);
            Q[i] = (jt0 ? jt0(y[i] * d[0]) : 0.0) + y[i] * d[1] / d[0] * Uy;
        }
    }

    auto rhs = [&](double t, const std::vector<double>& u, const std::vector<double>& q, std::vector<double>& du,
                   std::vector<double>& dq) {
        const auto d = tr.derivs(t);
        const double L = d[0], Ld = d[1], Ldd = d[2];
        const double c2 = opt.v_s * opt.v_s / (L * L);
        const double b = Ldd / L - 2.0 * Ld * Ld / (L * L);
        du[0] = du[N] = dq[0] = dq[N] = 0.0;
        for (int i = 1; i < N; ++i) {
            const double a = y[i] * Ld / L;
            const double uy = (u[i + 1] - u[i - 1]) / (2.0 * dy);
            const double uyy = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dy * dy);
            const double qy = (q[i + 1] - q[i - 1]) / (2.0 * dy);
            du[i] = q[i];
            dq[i] = 2.0 * a * qy - (a * a - c2) * uyy + y[i] * b * uy - (M ? M(y[i] * L, t) : 0.0);
        }
    };

    FDResult res;
    res.dt = dt;
    res.proj.assign(static_cast<size_t>(opt.modes), {});
    auto record = [&](double t) {
        const auto d = tr.derivs(t);
        const double L = d[0];
        res.t.push_back(t);
        for (int m = 1; m <= opt.modes; ++m) {
            double s = 0.0;
            for (int i = 1; i < N; ++i) s += U[i] * std::sin(m * std::numbers::pi * y[i]);
            res.proj[m - 1].push_back(2.0 * s * dy);
        }
        double e = 0.0;
        for (int i = 0; i < N; ++i) {
            const double ym = 0.5 * (y[i] + y[i + 1]);
            const double uy = (U[i + 1] - U[i]) / dy;
            const double jt = 0.5 * (Q[i] + Q[i + 1]) - ym * d[1] / L * uy;
            e += 0.5 * (jt * jt + opt.v_s * opt.v_s * uy * uy / (L * L)) * L * dy;
        }
        res.energy.push_back(e);
        if (opt.keep_snapshots) res.snapshots.push_back(U);
    };

    std::vector<double> k1u(N + 1), k1q(N + 1), k2u(N + 1), k2q(N + 1), k3u(N + 1), k3q(N + 1), k4u(N + 1), k4q(N + 1);
    std::vector<double> tu(N + 1), tq(N + 1);
    record(0.0);
    double next_out = opt.output_every;
    for (int s = 0; s < nsteps; ++s) {
        const double t = s * dt;
        rhs(t, U, Q, k1u, k1q);
        for (int i = 0; i <= N; ++i) {
            tu[i] = U[i] + 0.5 * dt * k1u[i];
            tq[i] = Q[i] + 0.5 * dt * k1q[i];
        }
        rhs(t + 0.5 * dt, tu, tq, k2u, k2q);
        for (int i = 0; i <= N; ++i) {
            tu[i] = U[i] + 0.5 * dt * k2u[i];
            tq[i] = Q[i] + 0.5 * dt * k2q[i];
        }
        rhs(t + 0.5 * dt, tu, tq, k3u, k3q);
        for (int i = 0; i <= N; ++i) {
            tu[i] = U[i] + dt * k3u[i];
            tq[i] = Q[i] + dt * k3q[i];
        }
        rhs(t + dt, tu, tq, k4u, k4q);
        for (int i = 1; i < N; ++i) {
            U[i] += dt / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
            Q[i] += dt / 6.0 * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]);
        }
        const double tn = (s + 1) * dt;
        if (opt.output_every <= 0.0 || tn >= next_out - 1e-12 * dt || s + 1 == nsteps) {
            record(tn);
            while (next_out <= tn + 1e-12 * dt) next_out += opt.output_every;
        }
    }
    return res;
}

// Fourier data of j(x, 0) = sum a_n sin(n pi x / L0) and j_t(x, 0) = sum b_n sin(n pi x / L0).
struct ModeData {
    std::vector<double> a, b;
};

// A(x, t) = 2 Re sum_n c_n f_n(x, t) with c_n = (sqrt(n pi)/2)(a_n + i b_n L0/(n pi)).
inline double characteristics_solve(const ConformalMap& map, const ModeData& data, double x, double t) {
    detail::require_inside(map, t, x);
    const double L0 = map.traj.L0;
    const double pi = std::numbers::pi;
    const double rp = map.R(t + x), rm = map.R(t - x);
    const size_t K = std::max(data.a.size(), data.b.size());
    cplx s = 0.0;
    for (size_t k = 0; k < K; ++k) {
        const int n = static_cast<int>(k) + 1;
        const double an = k < data.a.size() ? data.a[k] : 0.0;
        const double bn = k < data.b.size() ? data.b[k] : 0.0;
        const cplx c = 0.5 * std::sqrt(n * pi) * cplx(an, bn * L0 / (n * pi));
        const cplx f = I_unit / (2.0 * std::sqrt(n * pi)) * (std::exp(-I_unit * (n * pi * rp)) - std::exp(-I_unit * (n * pi * rm)));
        s += c * f;
    }
    return 2.0 * s.real();
}

} // namespace casimir
