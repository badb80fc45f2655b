/**
 * @file conformal.hpp
 * @brief Moore's transformation function R(z): exact orbit construction, perturbative and staircase forms.
 *
 * Reduced units throughout: v_s = 1, so z carries units of time and length alike.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "boundary.hpp"
#include "error.hpp"
#include "interp.hpp"

namespace casimir {

enum class MapMethod { Numeric, Perturbative2, Staircase };

inline const char* to_string(MapMethod m) {
    switch (m) {
    case MapMethod::Numeric: return "Numeric";
    case MapMethod::Perturbative2: return "Perturbative2";
    case MapMethod::Staircase: return "Staircase";
    }
    return "?";
}

struct MapBuildOptions {
    double interp_tol = 1e-10;    // absolute midpoint error on R
    double deriv_rel_tol = 1e-7;  // relative midpoint error on R'
    double residual_tol = 1e-6;
    int verify_points = 10000;
    int max_depth = 30;
};

namespace detail {

// Solve t + s L(t) = z for t (s = +1 or -1); the left side is increasing for a subsonic wall.
inline double solve_light_cone(const Trajectory& tr, double z, double s) {
    const double Lmin = tr.min_length(-1e300, 1e300), Lmax = tr.max_length();
    double lo = s > 0 ? z - Lmax : z + Lmin;
    double hi = s > 0 ? z - Lmin : z + Lmax;
    double t = s > 0 ? z - tr.L0 : z + tr.L0;
    if (t < lo || t > hi) t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const auto d = tr.derivs(t);
        const double g = t + s * d[0] - z;
        if (g > 0) hi = std::min(hi, t);
        else lo = std::max(lo, t);
        const double gp = 1.0 + s * d[1];
        double tn = t - g / gp;
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) <= 1e-15 * std::max(1.0, std::abs(t)) || hi - lo < 1e-15 * std::max(1.0, std::abs(t))) {
            t = tn;
            break;
        }
        t = tn;
    }
    return t;
}

} // namespace detail

// Exact R and R' by following the light-cone orbit of z back to the seed interval.
inline std::pair<double, double> orbit_R(const Trajectory& tr, double anchor, double z) {
    const double La = tr.L(anchor);
    const double lo = anchor - La, hi = anchor + La;
    double w = z, fac = 1.0;
    long k = 0;
    while (w > hi) {
        const double t = detail::solve_light_cone(tr, w, +1.0);
        const auto d = tr.derivs(t);
        fac *= (1.0 - d[1]) / (1.0 + d[1]);
        w = t - d[0];
        ++k;
    }
    while (w < lo) {
        const double t = detail::solve_light_cone(tr, w, -1.0);
        const auto d = tr.derivs(t);
        fac *= (1.0 + d[1]) / (1.0 - d[1]);
        w = t + d[0];
        --k;
    }
    return {w / La + 2.0 * static_cast<double>(k), fac / La};
}

class ConformalMap {
public:
    MapMethod method = MapMethod::Numeric;
    double anchor = 0.0;
    double seed_lo = -1.0, seed_hi = 1.0;
    Trajectory traj;
    HermiteTable table;  // Numeric
    int order = 2;       // Perturbative2
    int stair_n = 1;     // Staircase
    double stair_L0 = 1.0;
    int phase_offset = 0;
    double max_residual = 0.0;
    Validity validity;

    double z_min() const {
        return method == MapMethod::Numeric ? table.front() : -std::numeric_limits<double>::infinity();
    }
    double z_max() const {
        return method == MapMethod::Numeric ? table.back() : std::numeric_limits<double>::infinity();
    }
    bool covers(double z0, double z1) const {
        if (method != MapMethod::Numeric) return true;
        return table.contains(z0) && table.contains(z1);
    }

    double R(double z) const {
        switch (method) {
        case MapMethod::Numeric:
            require(z);
            return table.eval(z);
        case MapMethod::Perturbative2: return pert(z).first;
        case MapMethod::Staircase: return stair(z);
        }
        return 0.0;
    }

    double Rp(double z) const {
        switch (method) {
        case MapMethod::Numeric:
            require(z);
            return table.deriv(z);
        case MapMethod::Perturbative2: return pert(z).second;
        case MapMethod::Staircase: return 0.0;
        }
        return 0.0;
    }

    // Upper bound on R' over [z0, z1] from the stored node derivatives.
    double max_Rp(double z0, double z1) const {
        if (method != MapMethod::Numeric) {
            if (method == MapMethod::Staircase) return 0.0;
            return 1.0 / traj.L0 + 4.0 * std::abs(traj.epsilon) * traj.omega * (1.0 + std::max(0.0, z1) / traj.L0);
        }
        const auto& xs = table.x();
        const auto& ds = table.d();
        size_t i = table.locate(z0), j = table.locate(z1) + 1;
        double m = 0.0;
        for (size_t k = i; k <= j && k < xs.size(); ++k) m = std::max(m, std::abs(ds[k]));
        return m;
    }

    // Plateau boundaries of a staircase map inside [z0, z1].
    std::vector<double> steps(double z0, double z1) const {
        std::vector<double> s;
        if (method != MapMethod::Staircase) return s;
        const double w = 2.0 * stair_L0 / stair_n;
        for (double l = std::floor((z0 - stair_L0) / w) - 1; stair_L0 + w * l <= z1 + w; l += 1.0) {
            const double zs = stair_L0 + w * l;
            if (zs >= z0 - w && zs <= z1 + w) s.push_back(zs);
        }
        return s;
    }

    const std::vector<double>& z_grid() const { return table.x(); }
    const std::vector<double>& R_values() const { return table.y(); }

private:
    void require(double z) const {
        if (!table.contains(z)) throw error(errc::OutOfRange, "z = " + std::to_string(z) + " outside the map range");
    }

    std::pair<double, double> pert(double z) const {
        const double L0 = traj.L0;
        const double n = std::max(0.0, std::floor((z + L0) / (2.0 * L0)));
        const double e = traj.fractional(z), ep = traj.fractional_dot(z);
        double r = z / L0 - 2.0 * n * e;
        double rp = 1.0 / L0 - 2.0 * n * ep;
        if (order >= 2) {
            const double epp = traj.Lddot(z) / L0;
            r += n * n * L0 * 2.0 * e * ep;
            rp += n * n * L0 * 2.0 * (ep * ep + e * epp);
        }
        return {r, rp};
    }

    double stair(double z) const {
        const double l = std::floor(stair_n * (z - stair_L0) / (2.0 * stair_L0));
        return 2.0 * (l + 1.0 + phase_offset) / stair_n + 1.0;
    }
};

inline double default_grid_step(const Trajectory& tr, int Lambda) {
    double h = tr.L0 / (8.0 * std::max(1, Lambda));
    if (tr.is_cosine() && tr.epsilon != 0.0) h = std::min(h, tr.period() / 64.0);
    return h;
}

namespace detail {

struct Node {
    double z, r, rp;
};

inline void refine_interval(const Trajectory& tr, double anchor, const Node& a, const Node& b, int depth,
                            const MapBuildOptions& opt, std::vector<Node>& out) {
    const double h = b.z - a.z;
    const double zm = a.z + 0.5 * h;
    bool ok = depth >= opt.max_depth;
    Node m{};
    if (!ok) {
        auto [rm, rpm] = orbit_R(tr, anchor, zm);
        m = {zm, rm, rpm};
        // Hermite cubic at the midpoint and its derivative
        const double hi = 0.5 * (a.r + b.r) + h * (a.rp - b.rp) / 8.0;
        const double hd = 1.5 * (b.r - a.r) / h - 0.25 * (a.rp + b.rp);
        const double s = (b.r - a.r) / h;
        bool monotone = true;
        if (s > 0.0) {
            const double al = a.rp / s, be = b.rp / s;
            monotone = al >= 0.0 && be >= 0.0 && al * al + be * be <= 9.0;
        }
        // cancellation floor of the difference quotient, reached near kinks of R' (anchors with L'(a) != 0)
        const double floor = 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a.r), std::abs(b.r)) / h;
        ok = std::abs(hi - rm) <= opt.interp_tol &&
             std::abs(hd - rpm) <= opt.deriv_rel_tol * std::max(1.0, std::abs(rpm)) + floor && monotone;
    }
    if (ok) {
        out.push_back(b);
        return;
    }
    refine_interval(tr, anchor, a, m, depth + 1, opt, out);
    refine_interval(tr, anchor, m, b, depth + 1, opt, out);
}

inline HermiteTable build_table(const Trajectory& tr, double anchor, double z0, double z1, double h,
                                const MapBuildOptions& opt) {
    const long n = std::max<long>(2, static_cast<long>(std::ceil((z1 - z0) / h)));
    std::vector<Node> nodes;
    auto node_at = [&](double z) {
        auto [r, rp] = orbit_R(tr, anchor, z);
        return Node{z, r, rp};
    };
    Node prev = node_at(z0);
    nodes.push_back(prev);
    for (long i = 1; i <= n; ++i) {
        const double z = i == n ? z1 : z0 + (z1 - z0) * static_cast<double>(i) / static_cast<double>(n);
        Node cur = node_at(z);
        refine_interval(tr, anchor, prev, cur, 0, opt, nodes);
        prev = cur;
    }
    std::vector<double> x, y, d;
    x.reserve(nodes.size());
    y.reserve(nodes.size());
    d.reserve(nodes.size());
    for (const auto& nd : nodes) {
        x.push_back(nd.z);
        y.push_back(nd.r);
        d.push_back(nd.rp);
    }
    return HermiteTable(std::move(x), std::move(y), std::move(d), true);
}

} // namespace detail

// Largest |R(t + L) - R(t - L) - 2| over an even grid of t whose light cone stays inside the map.
inline double recursion_residual(const ConformalMap& map, int points) {
    const auto& tr = map.traj;
    const double z0 = map.z_min(), z1 = map.z_max();
    const double t0 = detail::solve_light_cone(tr, z0, -1.0);
    const double t1 = detail::solve_light_cone(tr, z1, +1.0);
    if (!(t1 > t0)) return 0.0;
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double t = t0 + (t1 - t0) * (i + 0.5) / points;
        const double L = tr.L(t);
        worst = std::max(worst, std::abs(map.R(t + L) - map.R(t - L) - 2.0));
    }
    return worst;
}

inline ConformalMap build_numeric(const Trajectory& tr, double anchor, double z_max, double grid_step,
                                  double z_min = std::numeric_limits<double>::quiet_NaN(),
                                  const MapBuildOptions& opt = {}) {
    const double La = tr.L(anchor);
    if (std::isnan(z_min)) z_min = anchor - La;
    if (!(z_max > z_min)) throw error(errc::OutOfRange, "z_max must exceed the lower end of the map");
    if (z_max > tr.t_end()) throw error(errc::OutOfRange, "map extends past the trajectory table");
    const double mach = tr.max_speed(z_min - tr.max_length(), z_max);
    if (mach >= 1.0) throw error(errc::SupersonicWall, "wall speed reaches " + std::to_string(mach) + " v_s");
    if (!(grid_step > 0.0)) grid_step = default_grid_step(tr, 100);

    ConformalMap m;
    m.method = MapMethod::Numeric;
    m.anchor = anchor;
    m.seed_lo = anchor - La;
    m.seed_hi = anchor + La;
    m.traj = tr;
    double h = grid_step;
    for (int attempt = 0; attempt < 2; ++attempt) {
        m.table = detail::build_table(tr, anchor, z_min, z_max, h, opt);
        m.max_residual = recursion_residual(m, opt.verify_points);
        if (m.max_residual < opt.residual_tol) return m;
        h *= 0.5;
    }
    throw error(errc::GridTooCoarse, "recursion residual " + std::to_string(m.max_residual) + " after refinement");
}

inline double eval_R(const ConformalMap& map, double z) { return map.R(z); }

inline bool is_resonant_even(const Trajectory& tr, int* index = nullptr) {
    const double q = tr.omega * tr.L0 / std::numbers::pi;
    const double r = std::round(q);
    if (index) *index = static_cast<int>(r);
    return std::abs(q - r) < 1e-9 && r >= 1.0;
}

// Closed form valid for drives with e(z +- L0) = e(z), i.e. omega a multiple of 2 pi v_s / L0.
inline ConformalMap build_perturbative(const Trajectory& tr, int order) {
    if (!tr.is_cosine()) throw error(errc::NonResonantDrive, "perturbative map needs a cosine drive");
    if (order != 1 && order != 2) throw error(errc::OutOfRange, "order must be 1 or 2");
    int idx = 0;
    if (!is_resonant_even(tr, &idx)) throw error(errc::NonResonantDrive, "omega L0 / pi is not an integer");
    if (idx % 2 != 0)
        throw error(errc::NonResonantDrive, "odd drive index: e(z + L0) != e(z), the closed form does not apply");
    ConformalMap m;
    m.method = MapMethod::Perturbative2;
    m.order = order;
    m.traj = tr;
    m.anchor = 0.0;
    m.seed_lo = -tr.L0;
    m.seed_hi = tr.L0;
    return m;
}

inline ConformalMap build_staircase(int n, double L0, int phase_offset = 0) {
    if (n < 1) throw error(errc::OutOfRange, "staircase needs n >= 1");
    if (!(L0 > 0.0)) throw error(errc::NonPositiveLength, "L0 must be positive");
    ConformalMap m;
    m.method = MapMethod::Staircase;
    m.stair_n = n;
    m.stair_L0 = L0;
    m.phase_offset = phase_offset;
    m.traj = make_static_box(L0);
    return m;
}

// sup |R_a - R_b| on a dense grid; points within guard of a staircase step are skipped.
inline double map_distance(const ConformalMap& a, const ConformalMap& b, double z0, double z1, double guard = 0.0,
                           int points = 20001) {
    if (!a.covers(z0, z1) || !b.covers(z0, z1)) throw error(errc::OutOfRange, "maps do not cover the interval");
    auto st = a.steps(z0, z1);
    auto sb = b.steps(z0, z1);
    st.insert(st.end(), sb.begin(), sb.end());
    std::sort(st.begin(), st.end());
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double z = z0 + (z1 - z0) * i / (points - 1);
        if (guard > 0.0) {
            auto it = std::lower_bound(st.begin(), st.end(), z);
            bool near = false;
            if (it != st.end() && std::abs(*it - z) < guard) near = true;
            if (it != st.begin() && std::abs(*(it - 1) - z) < guard) near = true;
            if (near) continue;
        }
        worst = std::max(worst, std::abs(a.R(z) - b.R(z)));
    }
    return worst;
}

// Integer plateau offset that best aligns a staircase with a reference map.
inline int calibrate_phase_offset(const ConformalMap& ref, int n, double L0, double z0, double z1, double guard) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int p = -2 * n - 2; p <= 2 * n + 2; ++p) {
        const double d = map_distance(ref, build_staircase(n, L0, p), z0, z1, guard, 2001);
        if (d < best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

} // namespace casimir
