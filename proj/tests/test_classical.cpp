#include <gtest/gtest.h>

#include <casimir/classical.hpp>
#include <casimir/quantum.hpp>

#include <cmath>
#include <numbers>

using namespace casimir;
constexpr double pi = std::numbers::pi;

namespace {
Trajectory cosine(double eps, double w) { return make_cosine_drive(1.0, eps, w, DriveKind::CosineRaise); }

ConformalMap numeric_map(const Trajectory& tr, double z_max, int Lambda = 100) {
    return build_numeric(tr, 0.0, z_max, default_grid_step(tr, Lambda));
}

std::vector<double> grid(double t0, double t1, double dt) {
    std::vector<double> g;
    for (double t = t0; t <= t1 + 1e-12; t += dt) g.push_back(t);
    return g;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}
} // namespace

TEST(Drive, VanishesWithoutCouplingOrAmplitude) {
    const auto d0 = boundary_transform_drive(cosine(0.05, 2 * pi), 0.0, 1.0);
    const auto d1 = boundary_transform_drive(cosine(0.0, 2 * pi), 1.0, 1.0);
    for (double t : {0.1, 0.77, 3.2})
        for (double x : {0.2, 0.9}) {
            EXPECT_EQ(d0.source(x, t), 0.0);
            EXPECT_EQ(d1.source(x, t), 0.0);
        }
}

TEST(Drive, ModeSourceFormula) {
    const double eps = 0.05, w = 2 * pi;
    const auto d = boundary_transform_drive(cosine(eps, w), 0.7, 1.3);
    for (int n : {1, 2, 5})
        for (double t : {0.13, 0.9}) {
            const double expect = 0.7 * eps * 1.3 * w * w * w / (n * pi) * std::sin(w * t) * (n % 2 ? 1.0 : -1.0);
            EXPECT_NEAR(d.mode_source(n, t), expect, 1e-12);
        }
}

TEST(Drive, ProjectedModeSourceIsSineProjection) {
    const auto d = boundary_transform_drive(cosine(0.05, 2 * pi), 1.0, 1.0);
    const double t = 0.31;
    for (int n : {1, 2, 3}) {
        double s = 0.0;
        const int N = 20000;
        for (int i = 0; i < N; ++i) {
            const double x = (i + 0.5) / N;
            s += d.source(x, t) * std::sin(n * pi * x) / N;
        }
        EXPECT_NEAR(2.0 * s, d.mode_source_projected(n, t), 1e-6);
    }
}

TEST(Drive, SampledWallNeedsSmoothing) {
    auto s = make_sampled({0.0, 1.0, 2.0}, {1.0, 1.01, 1.0});
    try {
        boundary_transform_drive(s, 1.0, 1.0);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::InsufficientSmoothness);
    }
}

TEST(Chi, Examples) {
    EXPECT_NEAR(chi(0.0, 1, DampingModel::none(), pi).value.real(), -1.0, 1e-15);
    const double g = 0.3, wn = mode_frequency(2, 1.0);
    const auto c = chi(wn, 2, DampingModel::constant(g));
    EXPECT_NEAR(std::abs(c.value - 1.0 / cplx(0.0, g * wn)), 0.0, 1e-14);
    EXPECT_FALSE(c.pole);
    const auto p = chi(wn, 2, DampingModel::none());
    EXPECT_TRUE(p.pole);
    EXPECT_TRUE(std::isinf(p.value.real()));
    EXPECT_NEAR(chi(5.0, 1, DampingModel::none()).value.real(), 1.0 / (25.0 - pi * pi), 1e-15);
}

TEST(Chi, DampingModels) {
    EXPECT_THROW(DampingModel::constant(-1.0), error);
    EXPECT_THROW(DampingModel::per_mode({0.1, -0.2}), error);
    const auto t = DampingModel::per_mode({0.1, 0.2});
    EXPECT_EQ(t.gamma(2, 0.0), 0.2);
    EXPECT_THROW(t.gamma(3, 0.0), error);
    EXPECT_NEAR(resonance_frequency(1, 0.0), pi, 1e-15);
    EXPECT_NEAR(resonance_frequency(1, 1.0), std::sqrt(pi * pi - 1.0), 1e-15);
}

TEST(SingleMode, ResonantSlope) {
    const double eps = 0.05, w = 2 * pi;
    const auto drive = boundary_transform_drive(cosine(eps, w), 1.0, 1.0);
    const auto t = grid(0.0, 0.2 / (eps * w), 1e-4);
    const auto j = single_mode_response(2, drive, DampingModel::none(), t);
    EXPECT_EQ(j.front(), 0.0);
    EXPECT_NEAR(amplitude_growth_rate(t, j, w, 0.0, t.back()) / (eps * mode_frequency(2, 1.0)), 1.0, 0.1);
}

TEST(SingleMode, DampedPlateau) {
    const double eps = 0.05, w = 2 * pi, g = 0.05 * pi;
    const auto drive = boundary_transform_drive(cosine(eps, w), 1.0, 1.0);
    const auto t = grid(10.0 / g, 10.0 / g + 5.0, 1e-3);
    const auto j = single_mode_response(2, drive, DampingModel::constant(g), t);
    EXPECT_NEAR(steady_amplitude(t, j, w, t.front(), t.back()) / (eps * mode_frequency(2, 1.0) / g), 1.0, 0.1);
}

TEST(SingleMode, OffResonanceSteadyAmplitude) {
    const double eps = 0.05, w = 2 * pi, g = 0.5;
    const auto drive = boundary_transform_drive(cosine(eps, w), 1.0, 1.0);
    const auto t = grid(20.0 / g, 20.0 / g + 4.0, 1e-3);
    const int n = 3;
    const auto j = single_mode_response(n, drive, DampingModel::constant(g), t);
    const double wn = mode_frequency(n, 1.0);
    const double K = eps * w * w * w / (n * pi);
    EXPECT_NEAR(steady_amplitude(t, j, w, t.front(), t.back()) / (K / std::hypot(g * w, w * w - wn * wn)), 1.0, 1e-6);
}

TEST(SingleMode, ExactMatchesIndependentIntegration) {
    // tests/oracles/freeze.py, solve_ivp at rtol 1e-12
    const double eps = 0.05, w = 2 * pi;
    const auto drive = boundary_transform_drive(cosine(eps, w), 1.0, 1.0);
    EXPECT_NEAR(single_mode_exact(2, drive, DampingModel::constant(0.1), {3.0})[0], -0.8143386522165906, 1e-8);
    EXPECT_NEAR(single_mode_exact(3, drive, DampingModel::constant(0.05), {3.0})[0], 0.0012755031145710574, 1e-9);
}

TEST(SingleMode, ExactResonantLimitIsContinuous) {
    const double eps = 0.05, w = 2 * pi;
    const auto drive = boundary_transform_drive(cosine(eps, w), 1.0, 1.0);
    const std::vector<double> t{0.4, 2.3, 5.1};
    const auto a = single_mode_exact(2, drive, DampingModel::none(), t);
    const auto b = single_mode_exact(2, drive, DampingModel::constant(1e-9), t);
    for (size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6);
}

// The two-term closed form carries the opposite sign from the exact integration at late times.
TEST(SingleMode, TwoTermFormIsSignFlippedOnResonance) {
    const double eps = 0.05, w = 2 * pi;
    const auto drive = boundary_transform_drive(cosine(eps, w), 1.0, 1.0);
    const auto t = grid(40.0, 41.0, 0.01);
    const auto a = single_mode_response(2, drive, DampingModel::none(), t);
    const auto b = single_mode_exact(2, drive, DampingModel::none(), t);
    const double ra = max_abs(a), rb = max_abs(b);
    EXPECT_NEAR(ra / rb, 1.0, 0.01);
    double dot = 0.0, aa = 0.0, bb = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    EXPECT_LT(dot / std::sqrt(aa * bb), -0.99);
}

TEST(FullResponse, StaticGeometryMatchesExactSingleMode) {
    const double eps = 0.05, w = 2 * pi;
    const auto drive = boundary_transform_drive(cosine(eps, w), 1.0, 1.0);
    const auto map = numeric_map(make_static_box(1.0), 6.0, 20);
    const auto t = grid(0.05, 3.0, 0.05);
    const auto r = full_response(map, drive, t, 20);
    for (int n : {1, 2, 3}) {
        const auto e = single_mode_exact(n, drive, DampingModel::none(), t);
        double err = 0.0;
        for (size_t i = 0; i < t.size(); ++i) err = std::max(err, std::abs(r.j_modes[n - 1][i] - e[i]));
        EXPECT_LT(err, 1e-3 * max_abs(e)) << n;
    }
}

TEST(FullResponse, LinearInCoupling) {
    const auto tr = cosine(0.05, 2 * pi);
    const auto map = numeric_map(tr, 5.0, 20);
    const auto t = grid(0.1, 2.0, 0.1);
    const auto a = full_response(map, boundary_transform_drive(tr, 1.0, 1.0), t, 20);
    const auto b = full_response(map, boundary_transform_drive(tr, 2.5, 1.0), t, 20);
    for (int m = 0; m < 20; ++m)
        for (size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(b.j_modes[m][i], 2.5 * a.j_modes[m][i], 1e-8 * (1.0 + std::abs(b.j_modes[m][i])));
}

TEST(FullResponse, QuiescentStart) {
    const auto tr = cosine(0.05, 2 * pi);
    const auto map = numeric_map(tr, 4.0, 20);
    const auto r = full_response(map, boundary_transform_drive(tr, 1.0, 1.0), {0.0, 1e-3}, 20);
    for (int m = 0; m < 20; ++m) {
        EXPECT_EQ(r.j_modes[m][0], 0.0);
        EXPECT_LT(std::abs(r.j_modes[m][1]), 1e-6);
    }
}

TEST(FullResponse, RejectsBadGrids) {
    const auto tr = cosine(0.05, 2 * pi);
    const auto map = numeric_map(tr, 4.0, 20);
    const auto d = boundary_transform_drive(tr, 1.0, 1.0);
    EXPECT_THROW(full_response(map, d, {}, 20), error);
    EXPECT_THROW(full_response(map, d, {1.0, 0.5}, 20), error);
    EXPECT_THROW(full_response(map, d, {1.0}, 0), error);
}

TEST(FullResponse, EarlyGrowthMatchesLinearLaw) {
    const double eps = 0.05, w = 2 * pi;
    const auto tr = cosine(eps, w);
    const double T = 0.2 / (eps * w);
    const auto t = grid(0.01, T, 0.01);
    const auto r = full_response(numeric_map(tr, T + 2.5), boundary_transform_drive(tr, 1.0, 1.0), t, 100);
    EXPECT_NEAR(amplitude_growth_rate(t, r.j_modes[1], w, 0.0, T) / (eps * mode_frequency(2, 1.0)), 1.0, 0.1);
}

// Second-harmonic amplitude in mode 2n grows quadratically once the fixed-geometry response is removed.
TEST(FullResponse, HarmonicConversionExponents) {
    const double eps = 0.005, w = pi;
    const auto tr = cosine(eps, w);
    const double T = 12.0;
    const int Lam = 8;
    const auto drive = boundary_transform_drive(tr, 1.0, 1.0);
    const auto t = grid(0.005, T, 0.005);
    const auto full = full_response(numeric_map(tr, T + 2.5, Lam), drive, t, Lam);
    const auto fixed = full_response(numeric_map(make_static_box(1.0), T + 2.5, Lam), drive, t, Lam);
    std::vector<double> conv(t.size());
    for (size_t i = 0; i < t.size(); ++i) conv[i] = full.j_modes[1][i] - fixed.j_modes[1][i];
    std::vector<double> tc, a1, a2;
    for (double c = 3.0; c + 1.0 < T; c += 2.0) {
        tc.push_back(c);
        a1.push_back(band_amplitude(t, full.j_modes[0], w, c, 2.0));
        a2.push_back(band_amplitude(t, conv, 2 * w, c, 2.0));
    }
    EXPECT_NEAR(fit_exponent(tc, a1, 0.0, T), 1.0, 0.1);
    EXPECT_NEAR(fit_exponent(tc, a2, 0.0, T), 2.0, 0.2);
}

TEST(FullResponse, SaturatesNearSoundSpeedScale) {
    const double eps = 0.1, w = 2 * pi, T = 12.0;
    const auto tr = cosine(eps, w);
    const auto t = grid(0.05, T, 0.05);
    const auto r = full_response(numeric_map(tr, T + 2.5), boundary_transform_drive(tr, 1.0, 1.0), t, 100);
    const auto e = envelope(t, r.j_modes[1], 1.0);
    double peak = 0.0;
    for (double a : e.amp) peak = std::max(peak, a);
    EXPECT_GT(peak, 1.0 / 3.0);
    EXPECT_LT(peak, 3.0);
}

TEST(Density, FreeModeConversion) {
    ClassicalResponse r;
    r.t_stop = 1.0;
    r.L_stop = 1.0;
    r.t_grid = grid(0.0, 3.0, 0.01);
    r.j_modes.assign(2, std::vector<double>(r.t_grid.size(), 0.0));
    for (size_t i = 0; i < r.t_grid.size(); ++i) r.j_modes[0][i] = std::cos(2 * pi * r.t_grid[i] + 0.3);
    const auto rho = density_from_current(r, 2.0);
    EXPECT_NEAR(rho[0], 0.5, 1e-12);
    EXPECT_NEAR(rho[1], 0.0, 1e-15);
    EXPECT_EQ(r.rho_modes.size(), 2u);
}

TEST(Density, RequiresDriveSwitchOff) {
    ClassicalResponse r;
    r.t_grid = {0.0, 1.0, 2.0, 3.0};
    r.j_modes.assign(1, std::vector<double>(4, 0.0));
    try {
        density_from_current(r, 1.0);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::DriveStillOn);
    }
    r.t_stop = 2.5;
    EXPECT_THROW(density_from_current(r, 1.0), error);
}

// Continuity: rho_n(t) = -(n pi / L) int j_n dt, compared with the fitted conversion after switch-off.
TEST(Density, AgreesWithContinuityIntegral) {
    const double eps = 0.02, w = 2 * pi, ts = 2.0;
    const auto tr = cosine(eps, w).stopped_at(ts);
    const auto t = grid(0.005, 5.0, 0.005);
    auto r = full_response(numeric_map(tr, 7.5, 20), boundary_transform_drive(tr, 1.0, 1.0), t, 20);
    EXPECT_NEAR(r.L_stop, 1.0, 1e-12);
    const auto rho = density_from_current(r, 1.0);
    for (int n : {1, 2, 3}) {
        std::vector<double> q(t.size(), 0.0);
        for (size_t i = 1; i < t.size(); ++i)
            q[i] = q[i - 1] - n * pi * 0.5 * (t[i] - t[i - 1]) * (r.j_modes[n - 1][i] + r.j_modes[n - 1][i - 1]);
        // free oscillation plus the constant of integration
        const double wn = mode_frequency(n, 1.0);
        Eigen::MatrixXd A;
        std::vector<size_t> idx;
        for (size_t i = 0; i < t.size(); ++i)
            if (t[i] > ts) idx.push_back(i);
        A.resize(static_cast<Eigen::Index>(idx.size()), 3);
        Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
        for (size_t k = 0; k < idx.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            A(i, 0) = std::cos(wn * t[idx[k]]);
            A(i, 1) = std::sin(wn * t[idx[k]]);
            A(i, 2) = 1.0;
            b(i) = q[idx[k]];
        }
        const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
        EXPECT_NEAR(std::hypot(c(0), c(1)), rho[n - 1], 1e-3 * std::max(1.0, rho[n - 1])) << n;
    }
}

TEST(Dilation, Examples) {
    const auto st = dilation_parameters(make_cosine_drive(1.0, 0.0, 2 * pi, DriveKind::CosineRaise), 2.0, 0.5, 3, {0.0, 0.4});
    for (size_t i = 0; i < 2; ++i) {
        EXPECT_DOUBLE_EQ(st.mass[i], 2.0);
        EXPECT_DOUBLE_EQ(st.a[i], 0.0);
        EXPECT_DOUBLE_EQ(st.g[i], 0.5);
    }
    const auto tr = cosine(0.05, 2 * pi);
    const auto s = dilation_parameters(tr, 1.0, 1.0, 2, {0.5});
    EXPECT_NEAR(s.mass[0], 1.21, 1e-14);
    EXPECT_NEAR(s.g[0], 1.0 / 1.21, 1e-14);
    EXPECT_NEAR(s.a[0], 1.1 * (-0.05 * 4 * pi * pi), 1e-12);
    EXPECT_THROW(dilation_parameters(make_sampled({0.0, 1.0}, {1.0, 1.0}), 1.0, 1.0, 1, {0.5}), error);
}
