// Command-line driver: zipper, box, modes, sweep and oracle-check experiments.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "casimir/classical.hpp"
#include "casimir/io.hpp"
#include "casimir/oracle.hpp"
#include "casimir/quantum.hpp"

namespace fs = std::filesystem;
using namespace casimir;

namespace {

constexpr double pi = std::numbers::pi;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("casimir");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("CASIMIR_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

void write_json(const fs::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

void write_manifest(const fs::path& out, const RunConfig& c) { write_json(out / "manifest.json", to_json(make_manifest(c))); }

ConformalMap map_for(const Trajectory& tr, double t_end, int Lambda) {
    return build_numeric(tr, 0.0, t_end + 2.0 * tr.max_length() + 0.5, default_grid_step(tr, Lambda));
}

std::string tag(const char* prefix, size_t i) {
    char b[32];
    std::snprintf(b, sizeof b, "%s%04zu", prefix, i);
    return b;
}

// Scalar diagnostics collected for sweep summaries.
using Diagnostics = std::vector<std::pair<std::string, double>>;

Diagnostics run_zipper(const RunConfig& c, const fs::path& out) {
    std::vector<int> drives = c.drive_indices;
    if (drives.empty()) drives.push_back(static_cast<int>(std::lround(c.trajectory.drive_index)));
    const auto grid = c.times.grid();
    Diagnostics diag;
    for (int d : drives) {
        TrajectorySpec ts = c.trajectory;
        ts.drive_index = d;
        const Trajectory tr = ts.build(c.units.v_s);
        spdlog::info("zipper: drive index {}, eps {}, Lambda {}", d, tr.epsilon, c.Lambda);
        const auto map = map_for(tr, grid.back(), c.Lambda);
        const fs::path dir = out / ("drive_" + std::to_string(d));
        std::vector<std::vector<double>> occ(static_cast<size_t>(c.Lambda), std::vector<double>(grid.size()));
        for (size_t i = 0; i < grid.size(); ++i) {
            const double t = grid[i];
            const auto p = bogoliubov_numeric(map, t, c.Lambda);
            const auto r = unitarity_residuals(p, std::max(1, c.Lambda / 4));
            if (r.first > 1e-3) spdlog::warn("t = {}: unitarity residual {} on the leading block (Lambda = {})", t, r.first, c.Lambda);
            const auto cov = covariance(p, t, tr.L(t), c.temperature, c.normalization, c.difference, tr.L0, c.units.v_s);
            write_json(dir / (tag("cov_", i) + ".json"), to_json(cov));
            write_file(dir / (tag("cov_", i) + ".csv"), matrix_csv(cov.M));
            const auto P = occupation(p);
            for (int n = 0; n < c.Lambda; ++n) occ[static_cast<size_t>(n)][i] = P[static_cast<size_t>(n)];
        }
        write_file(dir / "occupation.csv", series_csv(grid, occ));
        diag.push_back({"P1_final_d" + std::to_string(d), occ[0].back()});
    }
    return diag;
}

Diagnostics run_box(const RunConfig& c, const fs::path& out) {
    const Trajectory tr = c.trajectory.build(c.units.v_s);
    const auto drive = boundary_transform_drive(tr, c.alpha, c.units.rho0);
    const auto grid = c.times.grid();
    ClassicalResponse resp;
    if (c.response == "full") {
        spdlog::info("box: full response, Lambda {}", c.Lambda);
        resp = full_response(map_for(tr, grid.back(), c.Lambda), drive, grid, c.Lambda);
    } else {
        const auto damping = c.damping.build();
        resp.t_grid = grid;
        resp.Lambda = c.Lambda;
        resp.method = c.response;
        for (int n = 1; n <= c.Lambda; ++n)
            resp.j_modes.push_back(c.response == "single" ? single_mode_response(n, drive, damping, grid, c.units.v_s)
                                                          : single_mode_exact(n, drive, damping, grid, c.units.v_s));
    }
    write_file(out / "response.csv", series_csv(grid, resp.j_modes));
    const double period = tr.period();
    for (int m : c.modes) {
        if (m < 1 || m > c.Lambda) throw error(errc::OutOfRange, "requested mode outside 1..lambda");
        const auto e = envelope(grid, resp.j_modes[static_cast<size_t>(m - 1)], period);
        json je = {{"mode", m}, {"t", e.t}, {"amplitude", e.amp}};
        write_json(out / ("envelope_mode_" + std::to_string(m) + ".json"), je);
    }
    Diagnostics diag;
    const int n = static_cast<int>(std::lround(c.trajectory.drive_index));
    if (n >= 1 && n <= c.Lambda && tr.epsilon > 0.0) {
        const double t1 = std::min(grid.back(), 0.2 / (tr.epsilon * tr.omega));
        try {
            diag.push_back({"growth_rate", amplitude_growth_rate(grid, resp.j_modes[static_cast<size_t>(n - 1)], tr.omega, 0.0, t1)});
        } catch (const error&) {
            spdlog::warn("too few samples before t = {} for the growth-rate fit", t1);
        }
        double mx = 0.0;
        for (double v : resp.j_modes[static_cast<size_t>(n - 1)]) mx = std::max(mx, std::abs(v));
        diag.push_back({"max_resonant_amplitude", mx});
    }
    json meta = {{"alpha", c.alpha}, {"epsilon", tr.epsilon}, {"omega", tr.omega}, {"Lambda", c.Lambda}, {"method", resp.method}};
    for (const auto& [k, v] : diag) meta[k] = v;
    write_json(out / "response.json", meta);
    return diag;
}

Diagnostics run_modes(const RunConfig& c, const fs::path& out) {
    const Trajectory tr = c.trajectory.build(c.units.v_s);
    const auto grid = c.times.grid();
    const auto map = map_for(tr, grid.back(), c.Lambda);
    write_file(out / "map.csv", map_csv(map));
    Diagnostics diag{{"map_residual", map.max_residual}};
    for (size_t i = 0; i < grid.size(); ++i) {
        const auto p = bogoliubov_numeric(map, grid[i], c.Lambda);
        write_json(out / (tag("bogoliubov_", i) + ".json"), to_json(p));
        write_file(out / (tag("U_", i) + ".csv"), matrix_csv(p.U));
        write_file(out / (tag("V_", i) + ".csv"), matrix_csv(p.V));
    }
    return diag;
}

Diagnostics run_oracle_check(const RunConfig& c, const fs::path& out) {
    const Trajectory tr = c.trajectory.build(c.units.v_s);
    const auto drive = boundary_transform_drive(tr, c.alpha, c.units.rho0);
    const auto grid = c.times.grid();
    FDOptions o;
    o.Ny = c.fd_points;
    o.modes = std::min(c.Lambda, 8);
    o.v_s = c.units.v_s;
    o.output_every = grid.size() > 1 ? grid[1] - grid[0] : grid.back();
    const auto fd = fd_solve(tr, [&](double x, double t) { return drive.source(x, t); }, grid.back(), o);
    std::vector<double> tg(fd.t.begin() + 1, fd.t.end());
    const auto fr = full_response(map_for(tr, grid.back(), c.Lambda), drive, tg, c.Lambda);
    std::vector<std::vector<double>> cols;
    double worst = 0.0;
    for (int m = 0; m < o.modes; ++m) {
        std::vector<double> a(fd.proj[static_cast<size_t>(m)].begin() + 1, fd.proj[static_cast<size_t>(m)].end());
        double err = 0.0, mx = 0.0;
        for (size_t i = 0; i < tg.size(); ++i) {
            err = std::max(err, std::abs(a[i] - fr.j_modes[static_cast<size_t>(m)][i]));
            mx = std::max(mx, std::abs(a[i]));
        }
        if (mx > 0.0) worst = std::max(worst, err / mx);
        cols.push_back(std::move(a));
        cols.push_back(fr.j_modes[static_cast<size_t>(m)]);
    }
    write_file(out / "oracle.csv", series_csv(tg, cols, "col_"));
    Diagnostics diag{{"max_relative_difference", worst}};
    write_json(out / "oracle.json", {{"max_relative_difference", worst}, {"Ny", o.Ny}, {"columns", "fd_mode_k, full_mode_k interleaved"}});
    return diag;
}

Diagnostics run_single(const RunConfig& c, const fs::path& out);

void apply_parameter(RunConfig& c, const std::string& p, double v) {
    if (p == "epsilon") c.trajectory.epsilon = v;
    else if (p == "drive_index") c.trajectory.drive_index = v;
    else if (p == "lambda") c.Lambda = static_cast<int>(std::lround(v));
    else if (p == "alpha") c.alpha = v;
    else if (p == "temperature") c.temperature = v;
    else throw error(errc::InvalidConfig, "cannot sweep parameter '" + p + "'");
}

Diagnostics run_sweep(const RunConfig& c, const fs::path& out, int jobs) {
    if (c.sweep.values.empty()) throw error(errc::InvalidConfig, "sweep needs a nonempty value list");
    const Experiment inner = experiment_from(c.sweep.inner);
    if (inner == Experiment::Sweep) throw error(errc::InvalidConfig, "nested sweeps are not supported");
    const size_t N = c.sweep.values.size();
    std::vector<Diagnostics> results(N);
    std::vector<std::string> failures(N);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next++) < N;) {
            RunConfig pc = c;
            pc.experiment = inner;
            try {
                apply_parameter(pc, c.sweep.parameter, c.sweep.values[i]);
                validate(pc);
                const fs::path dir = out / tag("point_", i);
                write_manifest(dir, pc);
                results[i] = run_single(pc, dir);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 0; k < std::max(1, jobs); ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::vector<std::string> keys;
    for (const auto& r : results)
        for (const auto& kv : r)
            if (std::find(keys.begin(), keys.end(), kv.first) == keys.end()) keys.push_back(kv.first);
    std::ostringstream os;
    os << "point," << c.sweep.parameter;
    for (const auto& k : keys) os << ',' << k;
    os << ",status\n";
    json failed = json::array();
    for (size_t i = 0; i < N; ++i) {
        os << i << ',' << fmt17(c.sweep.values[i]);
        for (const auto& k : keys) {
            auto it = std::find_if(results[i].begin(), results[i].end(), [&](const auto& kv) { return kv.first == k; });
            os << ',' << (it == results[i].end() ? std::string() : fmt17(it->second));
        }
        os << ',' << (failures[i].empty() ? "ok" : "failed") << '\n';
        if (!failures[i].empty()) failed.push_back({{"point", i}, {"value", c.sweep.values[i]}, {"error", failures[i]}});
    }
    write_file(out / "summary.csv", os.str());
    write_json(out / "failures.json", failed);
    if (!failed.empty()) spdlog::warn("{} of {} sweep points failed", failed.size(), N);
    return {{"failed_points", static_cast<double>(failed.size())}};
}

Diagnostics run_single(const RunConfig& c, const fs::path& out) {
    switch (c.experiment) {
    case Experiment::Zipper: return run_zipper(c, out);
    case Experiment::Box: return run_box(c, out);
    case Experiment::Modes: return run_modes(c, out);
    case Experiment::OracleCheck: return run_oracle_check(c, out);
    case Experiment::Sweep: break;
    }
    throw error(errc::InvalidConfig, "sweep cannot run as a single experiment");
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Moving-boundary acoustic resonator simulator"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "out", norm;
    int jobs = 1, lambda = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
        sub->add_option("--lambda", lambda, "mode cutoff override")->check(CLI::PositiveNumber);
        sub->add_option("--normalization", norm, "raw or vacuum-ratio")->check(CLI::IsMember({"raw", "vacuum-ratio"}));
    };
    std::vector<std::pair<CLI::App*, Experiment>> subs;
    for (auto e : {Experiment::Zipper, Experiment::Box, Experiment::Modes, Experiment::Sweep, Experiment::OracleCheck}) {
        auto* s = app.add_subcommand(to_string(e), std::string("run the ") + to_string(e) + " experiment");
        add_common(s);
        subs.emplace_back(s, e);
    }
    CLI11_PARSE(app, argc, argv);

    const fs::path out(out_dir);
    try {
        json j = json::object();
        if (!config_path.empty()) {
            try {
                j = json::parse(read_file(config_path));
            } catch (const json::exception& e) {
                throw error(errc::InvalidConfig, e.what());
            }
        }
        RunConfig c = config_from_json(j);
        for (const auto& [s, e] : subs)
            if (s->parsed()) c.experiment = e;
        if (lambda > 0) c.Lambda = lambda;
        if (!norm.empty()) c.normalization = normalization_from(norm);
        if (c.experiment != Experiment::Sweep) validate(c);
        write_manifest(out, c);
        const auto diag = c.experiment == Experiment::Sweep ? run_sweep(c, out, jobs) : run_single(c, out);
        json summary = json::object();
        for (const auto& [k, v] : diag) summary[k] = v;
        std::cout << json{{"status", "ok"}, {"out", out.string()}, {"diagnostics", summary}}.dump() << '\n';
        return 0;
    } catch (const error& e) {
        std::cout << json{{"status", "error"}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cout << json{{"status", "error"}, {"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
}
