/**
 * @file io.hpp
 * @brief JSON/CSV output, run configuration and manifests.
 */
#pragma once

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "boundary.hpp"
#include "classical.hpp"
#include "conformal.hpp"
#include "modes.hpp"
#include "quantum.hpp"

namespace casimir {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// FNV-1a, stable across platforms.
inline std::string stable_hash(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json complex_rows(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back({M(i, j).real(), M(i, j).imag()});
        rows.push_back(std::move(r));
    }
    return rows;
}

inline Matrix complex_rows_from(const json& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = n ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    Matrix M(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != m) throw error(errc::DimensionMismatch, "ragged matrix rows");
        for (Eigen::Index j = 0; j < m; ++j) M(i, j) = cplx(rows[i][j][0].get<double>(), rows[i][j][1].get<double>());
    }
    return M;
}

inline json to_json(const BogoliubovPair& p) {
    return {{"Lambda", p.Lambda()},
            {"anchor_times", {p.from_anchor, p.to_anchor}},
            {"U", complex_rows(p.U)},
            {"V", complex_rows(p.V)},
            {"out_of_validity", p.validity.out_of_validity},
            {"note", p.validity.note}};
}

inline BogoliubovPair pair_from_json(const json& j) {
    BogoliubovPair p;
    p.U = complex_rows_from(j.at("U"));
    p.V = complex_rows_from(j.at("V"));
    if (p.U.rows() != j.at("Lambda").get<int>() || p.V.rows() != p.U.rows())
        throw error(errc::DimensionMismatch, "Lambda does not match the stored matrices");
    p.from_anchor = j.at("anchor_times")[0].get<double>();
    p.to_anchor = j.at("anchor_times")[1].get<double>();
    p.validity.out_of_validity = j.value("out_of_validity", false);
    p.validity.note = j.value("note", "");
    return p;
}

inline json to_json(const CovarianceMatrix& c) {
    return {{"Lambda", c.M.rows()},
            {"t", c.t},
            {"temperature", c.temperature},
            {"normalization", to_string(c.normalization)},
            {"difference", c.difference},
            {"M", complex_rows(c.M)}};
}

// Flat table: n, m, re, im (1-based indices).
inline std::string matrix_csv(const Matrix& M) {
    std::ostringstream os;
    os << "n,m,re,im\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            os << i + 1 << ',' << j + 1 << ',' << fmt17(M(i, j).real()) << ',' << fmt17(M(i, j).imag()) << '\n';
    return os.str();
}

inline Matrix matrix_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    struct E { long n, m; double re, im; };
    std::vector<E> es;
    long N = 0, Mx = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        E e{};
        if (std::sscanf(line.c_str(), "%ld,%ld,%lf,%lf", &e.n, &e.m, &e.re, &e.im) != 4)
            throw error(errc::InvalidConfig, "bad matrix CSV row: " + line);
        N = std::max(N, e.n);
        Mx = std::max(Mx, e.m);
        es.push_back(e);
    }
    Matrix M = Matrix::Zero(N, Mx);
    for (const auto& e : es) M(e.n - 1, e.m - 1) = cplx(e.re, e.im);
    return M;
}

inline std::string map_csv(const ConformalMap& m) {
    std::ostringstream os;
    os << "z,R,Rp\n";
    const auto& z = m.z_grid();
    const auto& r = m.R_values();
    const auto& d = m.table.d();
    for (size_t i = 0; i < z.size(); ++i) os << fmt17(z[i]) << ',' << fmt17(r[i]) << ',' << fmt17(d[i]) << '\n';
    return os.str();
}

// Rebuilds a numeric map from map_csv output. The trajectory supplies the wall for mode evaluation.
inline ConformalMap map_from_csv(const std::string& text, const Trajectory& traj, double anchor = 0.0) {
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    if (line.rfind("z,R", 0) != 0) throw error(errc::InvalidConfig, "map CSV needs a z,R[,Rp] header");
    const bool has_d = line.find("Rp") != std::string::npos;
    std::vector<double> z, r, d;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double a = 0, b = 0, c = 0;
        const int got = std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c);
        if (got < (has_d ? 3 : 2)) throw error(errc::InvalidConfig, "bad map CSV row: " + line);
        z.push_back(a);
        r.push_back(b);
        d.push_back(c);
    }
    ConformalMap m;
    m.method = MapMethod::Numeric;
    m.anchor = anchor;
    m.traj = traj;
    const double La = traj.L(anchor);
    m.seed_lo = anchor - La;
    m.seed_hi = anchor + La;
    m.table = has_d ? HermiteTable(std::move(z), std::move(r), std::move(d), false)
                    : HermiteTable::monotone(std::move(z), std::move(r));
    return m;
}

// Sampled trajectory from a CSV with header t,L.
inline Trajectory trajectory_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    if (line.rfind("t,L", 0) != 0) throw error(errc::InvalidConfig, "trajectory CSV needs a t,L header");
    std::vector<double> t, L;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double a = 0, b = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &a, &b) != 2) throw error(errc::InvalidConfig, "bad trajectory CSV row: " + line);
        t.push_back(a);
        L.push_back(b);
    }
    return make_sampled(std::move(t), std::move(L));
}

// t, mode_1, mode_2, ...
inline std::string series_csv(const std::vector<double>& t, const std::vector<std::vector<double>>& cols,
                              const std::string& prefix = "mode_") {
    std::ostringstream os;
    os << 't';
    for (size_t k = 0; k < cols.size(); ++k) os << ',' << prefix << k + 1;
    os << '\n';
    for (size_t i = 0; i < t.size(); ++i) {
        os << fmt17(t[i]);
        for (const auto& c : cols) os << ',' << fmt17(c[i]);
        os << '\n';
    }
    return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw error(errc::InvalidConfig, "cannot write " + p.string());
    f << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw error(errc::InvalidConfig, "cannot read " + p.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

enum class Experiment { Zipper, Box, Modes, Sweep, OracleCheck };

inline const char* to_string(Experiment e) {
    switch (e) {
    case Experiment::Zipper: return "zipper";
    case Experiment::Box: return "box";
    case Experiment::Modes: return "modes";
    case Experiment::Sweep: return "sweep";
    case Experiment::OracleCheck: return "oracle-check";
    }
    return "?";
}

inline Experiment experiment_from(const std::string& s) {
    for (auto e : {Experiment::Zipper, Experiment::Box, Experiment::Modes, Experiment::Sweep, Experiment::OracleCheck})
        if (s == to_string(e)) return e;
    throw error(errc::InvalidConfig, "unknown experiment '" + s + "'");
}

struct TrajectorySpec {
    std::string kind = "cosine-raise"; // cosine-raise | cosine-lower
    double L0 = 1.0;
    double epsilon = 0.0;
    double drive_index = 2.0; // omega = drive_index * pi * v_s / L0
    double t_start = 0.0;
    std::optional<double> t_stop;

    Trajectory build(double v_s) const {
        DriveKind k;
        if (kind == "cosine-raise") k = DriveKind::CosineRaise;
        else if (kind == "cosine-lower") k = DriveKind::CosineLower;
        else throw error(errc::InvalidConfig, "unknown trajectory kind '" + kind + "'");
        Trajectory tr = make_cosine_drive(L0, epsilon, drive_index * std::numbers::pi * v_s / L0, k);
        tr.t_start = t_start;
        if (t_stop) tr.t_stop = *t_stop;
        return tr;
    }
};

struct DampingSpec {
    std::string kind = "none"; // none | constant | table
    double gamma = 0.0;
    std::vector<double> table;

    DampingModel build() const {
        if (kind == "none") return DampingModel::none();
        if (kind == "constant") return DampingModel::constant(gamma);
        if (kind == "table") return DampingModel::per_mode(table);
        throw error(errc::InvalidConfig, "unknown damping kind '" + kind + "'");
    }
};

struct TimeSpec {
    std::vector<double> values; // explicit grid wins over the range
    double start = 0.0, stop = 1.0, step = 0.1;

    std::vector<double> grid() const {
        if (!values.empty()) return values;
        if (!(step > 0.0) || stop < start) throw error(errc::InvalidConfig, "time range needs step > 0 and stop >= start");
        std::vector<double> g;
        const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= n; ++i) g.push_back(start + step * static_cast<double>(i));
        return g;
    }
};

struct SweepSpec {
    std::string parameter; // epsilon | drive_index | lambda | alpha | temperature
    std::vector<double> values;
    std::string inner = "box"; // experiment run at each point
};

struct RunConfig {
    Experiment experiment = Experiment::Zipper;
    TrajectorySpec trajectory;
    Units units;
    int Lambda = 100;
    double alpha = 1.0;
    double temperature = 0.0;
    DampingSpec damping;
    TimeSpec times;
    Normalization normalization = Normalization::Raw;
    bool difference = false;
    std::vector<int> drive_indices; // zipper: one matrix set per index, empty = trajectory.drive_index
    std::vector<int> modes{1, 2};   // box: modes for single-mode outputs
    std::string response = "full";  // box: full | single | exact
    int fd_points = 2000;
    SweepSpec sweep;
};

inline json to_json(const RunConfig& c) {
    json traj = {{"kind", c.trajectory.kind},
                 {"L0", c.trajectory.L0},
                 {"epsilon", c.trajectory.epsilon},
                 {"drive_index", c.trajectory.drive_index},
                 {"t_start", c.trajectory.t_start}};
    if (c.trajectory.t_stop) traj["t_stop"] = *c.trajectory.t_stop;
    json times = c.times.values.empty() ? json{{"start", c.times.start}, {"stop", c.times.stop}, {"step", c.times.step}}
                                        : json{{"values", c.times.values}};
    return {{"experiment", to_string(c.experiment)},
            {"trajectory", traj},
            {"units", {{"v_s", c.units.v_s}, {"rho0", c.units.rho0}, {"xi_h", c.units.xi_h}}},
            {"lambda", c.Lambda},
            {"alpha", c.alpha},
            {"temperature", c.temperature},
            {"damping", {{"kind", c.damping.kind}, {"gamma", c.damping.gamma}, {"table", c.damping.table}}},
            {"times", times},
            {"normalization", to_string(c.normalization)},
            {"difference", c.difference},
            {"drive_indices", c.drive_indices},
            {"modes", c.modes},
            {"response", c.response},
            {"fd_points", c.fd_points},
            {"sweep", {{"parameter", c.sweep.parameter}, {"values", c.sweep.values}, {"inner", c.sweep.inner}}}};
}

inline Normalization normalization_from(const std::string& s) {
    if (s == "raw") return Normalization::Raw;
    if (s == "vacuum-ratio") return Normalization::VacuumRatio;
    throw error(errc::InvalidConfig, "normalization must be raw or vacuum-ratio");
}

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        c.experiment = experiment_from(j.value("experiment", "zipper"));
        if (j.contains("trajectory")) {
            const auto& t = j["trajectory"];
            c.trajectory.kind = t.value("kind", c.trajectory.kind);
            c.trajectory.L0 = t.value("L0", c.trajectory.L0);
            c.trajectory.epsilon = t.value("epsilon", c.trajectory.epsilon);
            c.trajectory.drive_index = t.value("drive_index", c.trajectory.drive_index);
            c.trajectory.t_start = t.value("t_start", c.trajectory.t_start);
            if (t.contains("t_stop") && !t["t_stop"].is_null()) c.trajectory.t_stop = t["t_stop"].get<double>();
        }
        if (j.contains("units")) {
            const auto& u = j["units"];
            c.units.v_s = u.value("v_s", c.units.v_s);
            c.units.rho0 = u.value("rho0", c.units.rho0);
            c.units.xi_h = u.value("xi_h", c.units.xi_h);
        }
        c.units.L0 = c.trajectory.L0;
        c.Lambda = j.value("lambda", c.Lambda);
        c.alpha = j.value("alpha", c.alpha);
        c.temperature = j.value("temperature", c.temperature);
        if (j.contains("damping")) {
            const auto& d = j["damping"];
            c.damping.kind = d.value("kind", c.damping.kind);
            c.damping.gamma = d.value("gamma", c.damping.gamma);
            c.damping.table = d.value("table", c.damping.table);
        }
        if (j.contains("times")) {
            const auto& t = j["times"];
            c.times.values = t.value("values", std::vector<double>{});
            c.times.start = t.value("start", c.times.start);
            c.times.stop = t.value("stop", c.times.stop);
            c.times.step = t.value("step", c.times.step);
        }
        c.normalization = normalization_from(j.value("normalization", "raw"));
        c.difference = j.value("difference", false);
        c.drive_indices = j.value("drive_indices", std::vector<int>{});
        c.modes = j.value("modes", c.modes);
        c.response = j.value("response", c.response);
        c.fd_points = j.value("fd_points", c.fd_points);
        if (j.contains("sweep")) {
            const auto& s = j["sweep"];
            c.sweep.parameter = s.value("parameter", "");
            c.sweep.values = s.value("values", std::vector<double>{});
            c.sweep.inner = s.value("inner", c.sweep.inner);
        }
    } catch (const json::exception& e) {
        throw error(errc::InvalidConfig, e.what());
    }
    return c;
}

// Checks everything that can be checked before a run starts.
inline void validate(const RunConfig& c) {
    c.units.validate();
    if (c.Lambda < 1) throw error(errc::OutOfRange, "lambda must be at least 1");
    if (c.temperature < 0.0) throw error(errc::InvalidConfig, "temperature must be nonnegative");
    if (c.response != "full" && c.response != "single" && c.response != "exact")
        throw error(errc::InvalidConfig, "response must be full, single or exact");
    const auto grid = c.times.grid();
    const Trajectory tr = c.trajectory.build(c.units.v_s);
    (void)c.damping.build();
    const double t_end = grid.empty() ? 0.0 : grid.back();
    const double mach = check_subsonic(tr, c.units, 0.0, t_end + 2.0 * tr.max_length());
    if (mach >= 1.0) throw error(errc::SupersonicWall, "maximum wall Mach number " + fmt17(mach));
}

struct Manifest {
    std::string config_hash;
    int Lambda = 0;
    std::string version = kVersion;
    json config;
};

inline Manifest make_manifest(const RunConfig& c) {
    Manifest m;
    m.config = to_json(c);
    m.config_hash = stable_hash(m.config.dump());
    m.Lambda = c.Lambda;
    return m;
}

inline json to_json(const Manifest& m) {
    return {{"config_hash", m.config_hash}, {"Lambda", m.Lambda}, {"version", m.version}, {"config", m.config}};
}

} // namespace casimir
