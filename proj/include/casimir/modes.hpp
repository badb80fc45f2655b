/**
 * @file modes.hpp
 * @brief Mode functions, the Klein-Gordon inner product and Bogoliubov matrices between instantaneous bases.
 *
 * Index convention: row = mode of the basis at rest at time t, column = mode of the anchor-0 basis,
 * so c(t) = U c(0) + V c^dag(0).
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <utility>
#include <vector>

#include "conformal.hpp"
#include "error.hpp"
#include "quadrature.hpp"

namespace casimir {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
inline constexpr cplx I_unit{0.0, 1.0};

struct ModeBasis {
    std::shared_ptr<const ConformalMap> map;
    double anchor = 0.0;
    int Lambda = 100;

    ModeBasis() = default;
    ModeBasis(ConformalMap m, int lambda) : map(std::make_shared<const ConformalMap>(std::move(m))), Lambda(lambda) {
        if (lambda < 1) throw error(errc::OutOfRange, "Lambda must be at least 1");
        anchor = map->anchor;
    }
    const Trajectory& traj() const { return map->traj; }
};

namespace detail {
inline void require_inside(const ConformalMap& m, double t, double x) {
    const double L = m.traj.L(t);
    const double tol = 1e-12 * std::max(1.0, L);
    if (x < -tol || x > L + tol) throw error(errc::OutOfRange, "x outside the box at this time");
    if (!m.covers(t - x, t + x)) throw error(errc::OutOfRange, "map does not cover t +- x");
}
} // namespace detail

inline cplx eval_mode(const ModeBasis& b, int n, double x, double t) {
    detail::require_inside(*b.map, t, x);
    const double k = n * std::numbers::pi;
    const cplx ep = std::exp(-I_unit * (k * b.map->R(t + x)));
    const cplx em = std::exp(-I_unit * (k * b.map->R(t - x)));
    return I_unit / std::sqrt(k) * (ep - em) * 0.5;
}

// Time derivative through the chain rule on R.
inline cplx eval_mode_dt(const ModeBasis& b, int n, double x, double t) {
    detail::require_inside(*b.map, t, x);
    const double k = n * std::numbers::pi;
    const cplx ep = std::exp(-I_unit * (k * b.map->R(t + x))) * b.map->Rp(t + x);
    const cplx em = std::exp(-I_unit * (k * b.map->R(t - x))) * b.map->Rp(t - x);
    return k / std::sqrt(k) * (ep - em) * 0.5;
}

// A field and its time derivative at fixed time, as seen by the inner product.
struct FieldSlice {
    std::function<cplx(double)> value;
    std::function<cplx(double)> dt;

    FieldSlice conj() const {
        auto v = value;
        auto d = dt;
        return {[v](double x) { return std::conj(v(x)); }, [d](double x) { return std::conj(d(x)); }};
    }
};

inline FieldSlice mode_slice(const ModeBasis& b, int n, double t) {
    return {[b, n, t](double x) { return eval_mode(b, n, x, t); }, [b, n, t](double x) { return eval_mode_dt(b, n, x, t); }};
}

// {f|g} = -i int_0^L (f dg/dt - g df/dt) dx, panels doubled until two passes agree to tol.
inline cplx kg_inner(const FieldSlice& f, const FieldSlice& g, double L, int panels = 64, double tol = 1e-8,
                     int max_doublings = 10) {
    auto once = [&](int p) {
        return integrate([&](double x) { return f.value(x) * g.dt(x) - g.value(x) * f.dt(x); }, 0.0, L, p) * (-I_unit);
    };
    cplx prev = once(panels);
    for (int k = 0; k < max_doublings; ++k) {
        panels *= 2;
        cplx cur = once(panels);
        if (std::abs(cur - prev) <= tol) return cur;
        prev = cur;
    }
    throw error(errc::QuadratureNotConverged, "kg_inner did not settle after panel doubling");
}

// Panels on z in [za, zb] so that the phase pi (klin + kR |R'|) advances at most phi_max per panel.
inline QuadNodes phase_nodes(const ConformalMap& map, double za, double zb, double klin, double kR, double phi_max,
                             int order = 8) {
    QuadNodes q;
    const auto& g = gauss_legendre(order);
    const auto& g_low = gauss_legendre(std::min(order, 4));
    auto emit = [&](double a, double b, double rate) {
        const int p = std::max(1, static_cast<int>(std::ceil((b - a) * std::numbers::pi * rate / phi_max)));
        // short panels: the 4-point rule error is below phase^8 / 8!
        const bool short_panel = (b - a) * std::numbers::pi * rate / p <= 0.1;
        for (int i = 0; i < p; ++i) q.add_panel(a + (b - a) * i / p, a + (b - a) * (i + 1) / p, short_panel ? g_low : g);
    };
    if (map.method != MapMethod::Numeric) {
        emit(za, zb, klin + kR * map.max_Rp(za, zb));
        return q;
    }
    // Panels never straddle a knot: the interpolant is only C1 across knots and Gauss-Legendre would stall there.
    const auto& xs = map.table.x();
    const auto& ds = map.table.d();
    size_t i = map.table.locate(za);
    double cur = za;
    while (cur < zb) {
        const double nxt = i + 1 < xs.size() ? std::min(zb, xs[i + 1]) : zb;
        const double r = klin + kR * 1.5 * std::max(std::abs(ds[i]), std::abs(ds[std::min(i + 1, xs.size() - 1)]));
        if (nxt > cur) emit(cur, nxt, r);
        cur = nxt;
        ++i;
    }
    return q;
}

struct BogoliubovPair {
    Matrix U, V;
    double from_anchor = 0.0;
    double to_anchor = 0.0;
    Validity validity;

    int Lambda() const { return static_cast<int>(U.rows()); }
};

namespace detail {

// Rows e^{i sgn k pi phase_q} for k = 1..K, built by repeated multiplication.
inline Matrix phase_powers(const std::vector<double>& phase, int K, double sgn) {
    Matrix M(K, static_cast<Eigen::Index>(phase.size()));
    for (size_t q = 0; q < phase.size(); ++q) {
        const cplx base = std::exp(I_unit * (sgn * std::numbers::pi * phase[q]));
        cplx p = base;
        for (int k = 0; k < K; ++k) {
            M(k, static_cast<Eigen::Index>(q)) = p;
            p *= base;
        }
    }
    return M;
}

inline std::pair<Matrix, Matrix> overlaps(const ConformalMap& map0, double t, int Lambda, double phi_max) {
    const double L = map0.traj.L(t);
    const QuadNodes q = phase_nodes(map0, t - L, t + L, Lambda / L, Lambda, phi_max);
    std::vector<double> lin(q.size()), r0(q.size());
    for (size_t i = 0; i < q.size(); ++i) {
        lin[i] = q.x[i] / L; // (t + x) / L(t)
        r0[i] = map0.R(q.x[i]);
    }
    Matrix A = phase_powers(lin, Lambda, +1.0);
    for (size_t i = 0; i < q.size(); ++i) A.col(static_cast<Eigen::Index>(i)) *= q.w[i];
    const Matrix B = phase_powers(r0, Lambda, -1.0);
    Matrix U = A * B.transpose();
    Matrix V = -(A * B.conjugate().transpose());
    for (int n = 0; n < Lambda; ++n)
        for (int m = 0; m < Lambda; ++m) {
            const double s = std::sqrt(double(n + 1) / double(m + 1)) / (2.0 * L);
            U(n, m) *= s;
            V(n, m) *= s;
        }
    return {std::move(U), std::move(V)};
}

} // namespace detail

inline BogoliubovPair bogoliubov_numeric(const ConformalMap& map0, double t, int Lambda, double tol = 1e-8) {
    if (Lambda < 1) throw error(errc::OutOfRange, "Lambda must be at least 1");
    const double L = map0.traj.L(t);
    if (!map0.covers(t - L, t + L)) throw error(errc::OutOfRange, "map does not cover [t - L(t), t + L(t)]");
    if (map0.traj.max_speed(0.0, t + 1e-12) >= 1.0) throw error(errc::SupersonicWall, "wall is supersonic before t");
    auto [U1, V1] = detail::overlaps(map0, t, Lambda, std::numbers::pi);
    auto [U2, V2] = detail::overlaps(map0, t, Lambda, std::numbers::pi / 2);
    const double diff = std::max((U1 - U2).cwiseAbs().maxCoeff(), (V1 - V2).cwiseAbs().maxCoeff());
    if (diff > tol) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "overlap change %.3e on panel halving", diff);
        throw error(errc::QuadratureNotConverged, buf);
    }
    BogoliubovPair p;
    p.U = std::move(U2);
    p.V = std::move(V2);
    p.from_anchor = map0.anchor;
    p.to_anchor = t;
    return p;
}

// Unitarity residuals on the leading block x block corner.
inline std::pair<double, double> unitarity_residuals(const BogoliubovPair& p, int block) {
    const Matrix I = Matrix::Identity(p.U.rows(), p.U.rows());
    const Matrix r1 = p.U * p.U.adjoint() - p.V * p.V.adjoint() - I;
    const Matrix w = p.U * p.V.transpose();
    const Matrix r2 = w - w.transpose();
    return {r1.topLeftCorner(block, block).cwiseAbs().maxCoeff(), r2.topLeftCorner(block, block).cwiseAbs().maxCoeff()};
}

// Linear-order matrices at t = 2 n L0 for drive index d (omega = d pi v_s / L0), as printed.
inline BogoliubovPair bogoliubov_perturbative(double epsilon, int d, int n_windows, int Lambda) {
    BogoliubovPair p;
    p.U = Matrix::Zero(Lambda, Lambda);
    p.V = Matrix::Zero(Lambda, Lambda);
    const double pi = std::numbers::pi;
    const double ne = n_windows * epsilon;
    for (int k = 1; k <= Lambda; ++k) {
        const cplx ph = std::exp(I_unit * (k * pi * 2.0 * ne));
        for (int l = 1; l <= Lambda; ++l) {
            cplx u = (k == l) ? 1.0 : 0.0;
            if (k - l == d || k - l == -d) u -= I_unit * (pi * std::sqrt(double(k * l)) * ne);
            p.U(k - 1, l - 1) = ph * u;
            if (k + l == d) p.V(k - 1, l - 1) = std::conj(ph) * (I_unit * (pi * std::sqrt(double(k * l)) * ne));
        }
    }
    p.to_anchor = 2.0 * n_windows;
    if (n_windows * epsilon * d * pi > 0.3) {
        p.validity.out_of_validity = true;
        p.validity.note = "n eps omega exceeds 0.3; linear order is unreliable";
    }
    return p;
}

// Late-time stroboscopic matrices for drive index n after l0 periods. Stored with the
// sin(mu pi / n) factor on the row (time-t) index.
inline BogoliubovPair bogoliubov_asymptotic(int n, int l0, int Lambda) {
    if (n < 1 || l0 < 1) throw error(errc::OutOfRange, "asymptotic form needs n >= 1 and l0 >= 1");
    BogoliubovPair p;
    p.U = Matrix::Zero(Lambda, Lambda);
    p.V = Matrix::Zero(Lambda, Lambda);
    const double pi = std::numbers::pi;
    const double ph = 2.0 * l0 / n - 1.0 + 2.0 / n;
    for (int mu = 1; mu <= Lambda; ++mu) {
        const double s = std::sin(mu * pi / n);
        for (int nu = 1; nu <= Lambda; ++nu) {
            const double base = -(n / (std::sqrt(double(mu) * nu) * pi)) * s;
            if ((mu + nu) % n == 0)
                p.V(mu - 1, nu - 1) = base * std::exp(I_unit * (-pi * mu / n + pi * (nu + mu) * ph));
            if (((nu - mu) % n + n) % n == 0)
                p.U(mu - 1, nu - 1) = base * std::exp(I_unit * (pi * mu / n + pi * (nu - mu) * ph));
        }
    }
    p.to_anchor = 2.0 * l0 / n;
    return p;
}

inline std::vector<double> occupation(const BogoliubovPair& p) {
    std::vector<double> P(static_cast<size_t>(p.V.rows()));
    for (Eigen::Index n = 0; n < p.V.rows(); ++n) P[static_cast<size_t>(n)] = p.V.row(n).squaredNorm();
    return P;
}

// Modes with the leading healing-length correction to the dispersion; valid while t < 1/(eps omega).
inline cplx dispersion_mode(const ModeBasis& b, double xi_h, int n, double x, double t, Validity* v = nullptr) {
    detail::require_inside(*b.map, t, x);
    const auto& tr = b.traj();
    const double L0 = tr.L0;
    if (v && tr.is_cosine() && tr.epsilon > 0.0 && t >= 1.0 / (tr.epsilon * tr.omega)) {
        v->out_of_validity = true;
        v->note = "t beyond 1/(eps omega)";
    }
    const double pi = std::numbers::pi;
    const double c = xi_h * xi_h / (L0 * L0);
    const double nu = n + n * double(n) * n * c / 2.0;
    const double rp = b.map->R(t + x), rm = b.map->R(t - x);
    const cplx core = std::exp(-I_unit * (pi * n * rp)) - std::exp(-I_unit * (pi * n * rm));
    const cplx extra = std::exp(-I_unit * (pi * n * double(n) * n * c / 4.0 * (rm + rp)));
    return I_unit / (2.0 * std::sqrt(nu * pi)) * core * extra;
}

inline cplx dispersion_mode_dt(const ModeBasis& b, double xi_h, int n, double x, double t) {
    detail::require_inside(*b.map, t, x);
    const double L0 = b.traj().L0;
    const double pi = std::numbers::pi;
    const double c = xi_h * xi_h / (L0 * L0);
    const double nu = n + n * double(n) * n * c / 2.0;
    const double rp = b.map->R(t + x), rm = b.map->R(t - x);
    const double dp = b.map->Rp(t + x), dm = b.map->Rp(t - x);
    const double a = pi * n * double(n) * n * c / 4.0;
    // phase of each exponential: pi n R(t +- x) + a (R(t+x) + R(t-x))
    const cplx ep = std::exp(-I_unit * (pi * n * rp + a * (rp + rm)));
    const cplx em = std::exp(-I_unit * (pi * n * rm + a * (rp + rm)));
    const cplx dep = -I_unit * (pi * n * dp + a * (dp + dm)) * ep;
    const cplx dem = -I_unit * (pi * n * dm + a * (dp + dm)) * em;
    return I_unit / (2.0 * std::sqrt(nu * pi)) * (dep - dem);
}

} // namespace casimir
