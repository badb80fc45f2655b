/**
 * @file quantum.hpp
 * @brief Equal-time covariance of the Fourier field components, Green's functions and occupation series.
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "modes.hpp"

namespace casimir {

enum class Normalization { Raw, VacuumRatio };

inline const char* to_string(Normalization n) { return n == Normalization::Raw ? "raw" : "vacuum-ratio"; }

struct CovarianceMatrix {
    Matrix M;
    double t = 0.0;
    double temperature = 0.0;
    Normalization normalization = Normalization::Raw;
    bool difference = false;
};

// Bose factor at energy e (k_B = hbar = 1); zero at T = 0.
inline double bose(double e, double T) {
    if (T <= 0.0) return 0.0;
    return 1.0 / std::expm1(e / T);
}

inline std::vector<double> thermal_weights(int Lambda, double L0, double T, double v_s = 1.0) {
    std::vector<double> w(static_cast<size_t>(Lambda));
    for (int l = 1; l <= Lambda; ++l) w[l - 1] = 1.0 + 2.0 * bose(l * std::numbers::pi * v_s / L0, T);
    return w;
}

/**
 * M(n,m) = <phi(n,t) phi(m,t)> with phi(n,t) the sine component of the field on [0, L(t)].
 * With A = diag(e^{-i theta}) U + diag(e^{i theta}) conj(V), theta_n = n pi t / L(t), and
 * S = diag(1/sqrt(n pi)), M = S A W A^dag S where W holds the thermal weights of the anchor modes.
 * `difference` subtracts the same quantity for the unevolved thermal state.
 */
inline CovarianceMatrix covariance(const BogoliubovPair& p, double t, double L_t, double temperature,
                                   Normalization norm = Normalization::Raw, bool difference = false, double L0 = 1.0,
                                   double v_s = 1.0) {
    if (p.U.rows() != p.U.cols() || p.V.rows() != p.U.rows() || p.V.cols() != p.U.cols())
        throw error(errc::DimensionMismatch, "U and V must be square and of equal size");
    if (!(L_t > 0.0)) throw error(errc::NonPositiveLength, "L(t) must be positive");
    const Eigen::Index K = p.U.rows();
    const double pi = std::numbers::pi;
    Eigen::VectorXcd ph(K);
    Eigen::VectorXd s(K), w(K);
    const auto tw = thermal_weights(static_cast<int>(K), L0, temperature, v_s);
    for (Eigen::Index n = 0; n < K; ++n) {
        ph(n) = std::exp(-I_unit * ((n + 1) * pi * t / L_t));
        s(n) = 1.0 / std::sqrt((n + 1) * pi);
        w(n) = tw[static_cast<size_t>(n)];
    }
    const Matrix A = ph.asDiagonal() * p.U + ph.conjugate().asDiagonal() * p.V.conjugate();
    Matrix M = s.asDiagonal() * (A * w.asDiagonal() * A.adjoint()) * s.asDiagonal();
    if (difference) {
        for (Eigen::Index n = 0; n < K; ++n) M(n, n) -= s(n) * s(n) * w(n);
    }
    if (norm == Normalization::VacuumRatio) {
        // vacuum diagonal is 1/(n pi) = s_n^2
        M = s.cwiseInverse().asDiagonal() * M * s.cwiseInverse().asDiagonal();
    }
    return {std::move(M), t, temperature, norm, difference};
}

struct GreensSampler {
    enum class Kind { Retarded, Keldysh };
    ModeBasis basis;
    Kind kind = Kind::Retarded;
    double temperature = 0.0;
    // Sum the retarded mode series in closed form instead of truncating at Lambda.
    bool resummed = false;
};

namespace detail {
// sum_{n>=1} sin(n pi u) / (n pi)
inline double sawtooth(double u) {
    const double r = u - 2.0 * std::floor(u / 2.0);
    if (r == 0.0) return 0.0;
    return 0.5 * (1.0 - r);
}
} // namespace detail

// 2 theta(t - t') Im sum_n f_n(x,t) f_n^*(x',t'), truncated at the basis cutoff.
inline double retarded_kernel(const GreensSampler& g, double x, double t, double xp, double tp) {
    detail::require_inside(*g.basis.map, t, x);
    detail::require_inside(*g.basis.map, tp, xp);
    if (t < tp) return 0.0;
    if (g.resummed) {
        const auto& m = *g.basis.map;
        const double a1 = m.R(t + x), a2 = m.R(t - x), b1 = m.R(tp + xp), b2 = m.R(tp - xp);
        using detail::sawtooth;
        return 0.5 * (sawtooth(b1 - a1) - sawtooth(b2 - a1) - sawtooth(b1 - a2) + sawtooth(b2 - a2));
    }
    cplx s = 0.0;
    for (int n = 1; n <= g.basis.Lambda; ++n) s += eval_mode(g.basis, n, x, t) * std::conj(eval_mode(g.basis, n, xp, tp));
    return 2.0 * s.imag();
}

// -2i sum_n Re[f_n(x,t) f_n^*(x',t')] (1 + 2 n_b(n pi / L0)).
inline cplx keldysh(const GreensSampler& g, double x, double t, double xp, double tp) {
    detail::require_inside(*g.basis.map, t, x);
    detail::require_inside(*g.basis.map, tp, xp);
    const double L0 = g.basis.traj().L0;
    double s = 0.0;
    for (int n = 1; n <= g.basis.Lambda; ++n) {
        const double wgt = 1.0 + 2.0 * bose(n * std::numbers::pi / L0, g.temperature);
        s += wgt * (eval_mode(g.basis, n, x, t) * std::conj(eval_mode(g.basis, n, xp, tp))).real();
    }
    return -2.0 * I_unit * s;
}

// Late-time V_{m,n} for driving at 2 r pi / L0, with delta = e^{-r pi eps t}/(pi r).
inline cplx dodonov_V(int m, int n, double delta, int r) {
    const double pi = std::numbers::pi;
    const int s = n + m;
    double ratio = 0.0;
    if (s % (2 * r) == 0) ratio = 2.0 * r * ((s / (2 * r)) % 2 == 0 ? 1.0 : -1.0); // limit of sin(pi s)/sin(pi s/2r)
    if (ratio == 0.0) return 0.0;
    const double x = 2.0 * r * n * delta + m;
    return std::sqrt(double(m) / n) * std::sin(pi * x / (2.0 * r)) / (pi * x) * ratio *
           std::exp(I_unit * (pi * s * (1.0 - 1.0 / (2.0 * r))));
}

struct OccupationSeries {
    std::vector<double> t;
    std::vector<std::vector<double>> analytic; // [time][mode - 1]
    std::vector<std::vector<double>> numeric;  // empty unless a map was supplied
};

inline OccupationSeries occupation_series(double epsilon, int r, const std::vector<double>& t_grid, int Lambda,
                                          int modes = 1, const ConformalMap* map0 = nullptr) {
    if (r < 1 || !(epsilon > 0.0)) throw error(errc::OutOfRange, "occupation series needs r >= 1 and eps > 0");
    OccupationSeries out;
    out.t = t_grid;
    const double pi = std::numbers::pi;
    for (double t : t_grid) {
        const double delta = std::exp(-r * pi * epsilon * t) / (pi * r);
        std::vector<double> P(static_cast<size_t>(modes), 0.0);
        for (int m = 1; m <= modes; ++m)
            for (int n = 1; n <= Lambda; ++n) P[m - 1] += std::norm(dodonov_V(m, n, delta, r));
        out.analytic.push_back(std::move(P));
        if (map0) {
            auto occ = occupation(bogoliubov_numeric(*map0, t, Lambda));
            occ.resize(static_cast<size_t>(modes));
            out.numeric.push_back(std::move(occ));
        }
    }
    return out;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    if (n < 2 || y.size() != x.size()) throw error(errc::DimensionMismatch, "line fit needs at least two paired points");
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = x[i];
        A(i, 1) = 1.0;
        b(i) = y[i];
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    return {c(0), c(1)};
}

// Exponent of y ~ x^k over points with x in [x0, x1].
inline double fit_exponent(const std::vector<double>& x, const std::vector<double>& y, double x0, double x1) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] >= x0 && x[i] <= x1 && x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    return fit_line(lx, ly).slope;
}

inline LineFit fit_window(const std::vector<double>& x, const std::vector<double>& y, double x0, double x1) {
    std::vector<double> wx, wy;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] >= x0 && x[i] <= x1) {
            wx.push_back(x[i]);
            wy.push_back(y[i]);
        }
    return fit_line(wx, wy);
}

// Time at which the linear-growth fit over [x0, x1] reaches the series maximum.
inline double saturation_time(const std::vector<double>& t, const std::vector<double>& P, double x0, double x1) {
    const LineFit f = fit_window(t, P, x0, x1);
    double pmax = -std::numeric_limits<double>::infinity();
    for (double p : P) pmax = std::max(pmax, p);
    return (pmax - f.intercept) / f.slope;
}

} // namespace casimir
