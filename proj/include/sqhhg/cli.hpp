// Subcommand drivers: config in, CSV plus JSON sidecars out.
//
// Numerical work runs on the worker pool; files are written afterwards from
// the calling thread in a fixed order.
#pragma once

#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cache.hpp"
#include "config.hpp"
#include "driver.hpp"
#include "error.hpp"
#include "io.hpp"
#include "orbits.hpp"
#include "parallel.hpp"
#include "spectrum.hpp"

namespace sqhhg {

using LogSink = std::function<void(const std::string&)>;

inline LogSink stderr_log() {
    return [](const std::string& m) { std::cerr << m << '\n'; };
}

struct RunReport {
    std::vector<std::filesystem::path> files; ///< data files, in write order
    std::size_t cache_hits = 0;
    std::size_t realizations = 0;
};

namespace detail {

inline unsigned resolved_workers(const RunConfig& cfg) { return cfg.io.workers ? cfg.io.workers : default_workers(); }

inline void prepare_out(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.io.out, ec);
    if (ec || !std::filesystem::is_directory(cfg.io.out))
        throw Error(ErrorKind::Config, "io.out: cannot create output directory " + cfg.io.out.string());
}

struct SweepPoint {
    DriverConfig driver;
    std::string suffix; ///< "" for a single run, "_I<value>" in a sweep
    double intensity;
};

/// Driver variants for task.intensities, or the driver itself when no sweep is given.
inline std::vector<SweepPoint> sweep(const RunConfig& cfg) {
    if (!cfg.task.intensities) return {{cfg.driver, "", cfg.driver.perp.intensity}};
    require(cfg.driver.perp.kind != StateKind::Coherent || cfg.task.intensities->empty(), ErrorKind::Config,
            "task.intensities: a sweep needs a squeezed or thermal driver.perp");
    std::vector<SweepPoint> out;
    for (double i : *cfg.task.intensities) {
        DriverConfig d = cfg.driver;
        d.perp.intensity = i;
        out.push_back({d, "_I" + format_number(i), i});
    }
    return out;
}

inline bool warn_if_empty(const RunConfig& cfg, const LogSink& log) {
    if (cfg.task.intensities && cfg.task.intensities->empty()) {
        log("warning: task.intensities is empty, nothing to do");
        return true;
    }
    return false;
}

inline std::unique_ptr<SpectrumCache> open_cache(const RunConfig& cfg, const LogSink& log) {
    return std::make_unique<SpectrumCache>(cfg.io.cache, [log](const std::string& m) { log("warning: " + m); });
}

inline nlohmann::json cutoff_json(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

} // namespace detail

inline RunReport run_spectrum(const RunConfig& cfg, const LogSink& log = stderr_log()) {
    RunReport rep;
    if (detail::warn_if_empty(cfg, log)) return rep;
    detail::prepare_out(cfg);
    auto cache = detail::open_cache(cfg, log);
    const ComputeOptions opts{detail::resolved_workers(cfg), cache.get()};
    const GridSpec grid{cfg.task.grid_points, cfg.task.n_sigma};
    for (const auto& pt : detail::sweep(cfg)) {
        const auto set = compute_realizations(pt.driver, cfg.atom, cfg.numerics, grid, opts);
        const auto raw = assemble_spectrum(set, pt.driver.omega, cfg.atom.Ip);
        const auto norm = raw.normalized();
        CsvTable csv({"harmonic_order", "S_raw", "S_norm"});
        for (std::size_t k = 0; k < raw.S.size(); ++k) csv.row({raw.harmonic_orders[k], raw.S[k], norm.S[k]});
        const std::string name = "spectrum" + pt.suffix + ".csv";
        nlohmann::json extra;
        extra["intensity"] = pt.intensity;
        extra["grid"] = {{"n_points", grid.n_points}, {"n_sigma", grid.n_sigma}};
        extra["n_realizations"] = raw.n_realizations;
        extra["weights_sha256"] = weights_checksum(raw.weights_used);
        extra["cutoffs"] = cutoff_detect(raw, cfg.task.drop_db);
        write_artifact(cfg.io.out, name, csv.text(), "spectrum", cfg, extra);
        rep.files.push_back(cfg.io.out / name);
        rep.cache_hits += set.cache_hits;
        rep.realizations += set.powers.size();
        log("spectrum" + pt.suffix + ": " + std::to_string(set.powers.size()) + " realizations, " +
            std::to_string(set.cache_hits) + " cached");
    }
    return rep;
}

inline RunReport run_orbits(const RunConfig& cfg, const LogSink& log = stderr_log()) {
    RunReport rep;
    if (detail::warn_if_empty(cfg, log)) return rep;
    detail::prepare_out(cfg);
    const ScanSpec scan{cfg.task.q_lo, cfg.task.q_hi, cfg.task.q_step, cfg.task.fresh_every};
    SolverOptions opts;
    opts.workers = detail::resolved_workers(cfg);
    for (const auto& pt : detail::sweep(cfg)) {
        const auto base = saddle_config(pt.driver, cfg.atom.Ip, cfg.task.q_lo);
        const auto result = scan_harmonics(base, scan, {}, opts);
        CsvTable csv({"q", "Re_t_ion", "Im_t_ion", "Re_t_re", "Im_t_re", "Re_p_par", "Im_p_par", "Re_p_perp",
                      "Im_p_perp", "Re_eps", "Im_eps", "residual", "family"});
        std::size_t n = 0;
        for (const auto& [q, sols] : result) {
            for (const auto& s : sols) {
                std::vector<std::string> cells;
                for (double v : {q, s.t_ion.real(), s.t_ion.imag(), s.t_re.real(), s.t_re.imag(), s.p_par.real(),
                                 s.p_par.imag(), s.p_perp.real(), s.p_perp.imag(), s.eps_fluct.real(),
                                 s.eps_fluct.imag(), s.residual_norm})
                    cells.push_back(format_number(v));
                cells.push_back(to_string(s.family));
                csv.row_strings(cells);
                ++n;
            }
        }
        const auto cut = orbit_cutoffs(result, base);
        const std::string name = "orbits" + pt.suffix + ".csv";
        nlohmann::json extra;
        extra["intensity"] = pt.intensity;
        extra["n_solutions"] = n;
        extra["recombination_cutoffs"] = {{"overall", detail::cutoff_json(cut.overall)},
                                          {"parallel_set", detail::cutoff_json(cut.parallel_set)},
                                          {"perp_set", detail::cutoff_json(cut.perp_set)}};
        write_artifact(cfg.io.out, name, csv.text(), "orbits", cfg, extra);
        rep.files.push_back(cfg.io.out / name);
        log("orbits" + pt.suffix + ": " + std::to_string(n) + " solutions");
    }
    return rep;
}

inline RunReport run_lissajous(const RunConfig& cfg, const LogSink& log = stderr_log()) {
    RunReport rep;
    if (detail::warn_if_empty(cfg, log)) return rep;
    detail::prepare_out(cfg);
    const double period = 2.0 * std::numbers::pi / cfg.driver.omega;
    std::vector<double> times(cfg.task.n_times);
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = period * static_cast<double>(i) / static_cast<double>(times.size());
    std::size_t index = 0;
    for (const auto& pt : detail::sweep(cfg)) {
        std::mt19937_64 rng(cfg.io.seed + index++);
        const auto sample = sample_lissajous(pt.driver, cfg.task.n_samples, times, cfg.task.display_eps, rng);
        CsvTable samples({"t", "sample", "E_par", "E_perp"});
        for (std::size_t it = 0; it < times.size(); ++it)
            for (std::size_t k = 0; k < sample.n_samples; ++k) {
                const auto& e = sample.at(it, k);
                samples.row({times[it], static_cast<double>(k), e[0], e[1]});
            }
        const auto h = lissajous_histogram(sample, cfg.task.bins, cfg.task.range);
        CsvTable hist({"E_par", "E_perp", "count"});
        const double width = 2.0 * h.range / static_cast<double>(h.bins);
        for (std::size_t row = 0; row < h.bins; ++row)
            for (std::size_t col = 0; col < h.bins; ++col)
                hist.row({-h.range + (static_cast<double>(col) + 0.5) * width,
                          -h.range + (static_cast<double>(row) + 0.5) * width,
                          static_cast<double>(h.counts[row * h.bins + col])});
        nlohmann::json extra;
        extra["intensity"] = pt.intensity;
        extra["seed"] = cfg.io.seed + index - 1;
        const std::string sname = "lissajous" + pt.suffix + ".csv";
        const std::string hname = "lissajous_hist" + pt.suffix + ".csv";
        write_artifact(cfg.io.out, sname, samples.text(), "lissajous", cfg, extra);
        write_artifact(cfg.io.out, hname, hist.text(), "lissajous", cfg, extra);
        rep.files.push_back(cfg.io.out / sname);
        rep.files.push_back(cfg.io.out / hname);
    }
    return rep;
}

inline RunReport run_ellipticity(const RunConfig& cfg, const LogSink& log = stderr_log()) {
    RunReport rep;
    if (detail::warn_if_empty(cfg, log)) return rep;
    detail::prepare_out(cfg);
    std::vector<Quadrature> quads = cfg.task.quadratures;
    if (quads.empty()) quads.push_back(cfg.driver.perp.squeezed);
    const std::vector<double> intensities =
        cfg.task.intensities ? *cfg.task.intensities : std::vector<double>{cfg.driver.perp.intensity};
    require(cfg.driver.perp.kind != StateKind::DisplacedThermal, ErrorKind::UnsupportedState,
            "ellipticity fluctuations are not available for thermal drivers");

    struct Row {
        double intensity;
        Quadrature q;
        EllipticityStats closed, mc;
    };
    std::vector<Row> rows;
    for (auto q : quads)
        for (double i : intensities) rows.push_back({i, q, {}, {}});
    parallel_for(rows.size(), detail::resolved_workers(cfg), [&](std::size_t r) {
        DriverConfig d = cfg.driver;
        d.perp = PolarizationState::squeezed_vacuum(cfg.driver.perp.mean, rows[r].intensity, rows[r].q);
        rows[r].closed = ellipticity_stats(d);
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.io.seed), static_cast<std::uint32_t>(cfg.io.seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        rows[r].mc = monte_carlo_ellipticity(d, cfg.task.n_samples, cfg.task.display_eps, rng);
    });
    CsvTable csv({"I_squ", "quadrature", "E", "dE", "E_mc", "dE_mc"});
    for (const auto& r : rows)
        csv.row_strings({format_number(r.intensity), to_string(r.q), format_number(r.closed.mean_ellipticity),
                         format_number(r.closed.delta_ellipticity), format_number(r.mc.mean_ellipticity),
                         format_number(r.mc.delta_ellipticity)});
    write_artifact(cfg.io.out, "ellipticity.csv", csv.text(), "ellipticity", cfg);
    rep.files.push_back(cfg.io.out / "ellipticity.csv");
    return rep;
}

inline RunReport run_g2(const RunConfig& cfg, const LogSink& log = stderr_log()) {
    RunReport rep;
    if (detail::warn_if_empty(cfg, log)) return rep;
    detail::prepare_out(cfg);
    auto bands = cfg.task.bands;
    if (bands.empty()) bands = {{15, 25}, {25, 35}, {35, 45}, {45, 55}, {55, 65}};
    auto cache = detail::open_cache(cfg, log);
    const ComputeOptions opts{detail::resolved_workers(cfg), cache.get()};
    const GridSpec grid{cfg.task.grid_points, cfg.task.n_sigma};
    CsvTable csv({"intensity", "q_lo", "q_hi", "g2"});
    for (const auto& pt : detail::sweep(cfg)) {
        const auto set = compute_realizations(pt.driver, cfg.atom, cfg.numerics, grid, opts);
        for (const auto& band : bands) {
            const auto g = g2_from_set(set, pt.driver.omega, band);
            csv.row({pt.intensity, band.first, band.second, g.g2});
        }
        rep.cache_hits += set.cache_hits;
        rep.realizations += set.powers.size();
    }
    write_artifact(cfg.io.out, "g2.csv", csv.text(), "g2", cfg);
    rep.files.push_back(cfg.io.out / "g2.csv");
    return rep;
}

inline RunReport run_convergence(const RunConfig& cfg, const LogSink& log = stderr_log()) {
    RunReport rep;
    if (detail::warn_if_empty(cfg, log)) return rep;
    detail::prepare_out(cfg);
    auto cache = detail::open_cache(cfg, log);
    const ComputeOptions opts{detail::resolved_workers(cfg), cache.get()};
    for (const auto& pt : detail::sweep(cfg)) {
        const auto rows =
            convergence_scan(pt.driver, cfg.atom, cfg.numerics, cfg.task.grid_points_list, cfg.task.n_sigma, opts);
        CsvTable csv({"n_points", "deviation", "decades"});
        for (const auto& r : rows) csv.row({static_cast<double>(r.n_points), r.deviation, r.decades});
        const std::string name = "convergence" + pt.suffix + ".csv";
        nlohmann::json extra;
        extra["intensity"] = pt.intensity;
        write_artifact(cfg.io.out, name, csv.text(), "convergence", cfg, extra);
        rep.files.push_back(cfg.io.out / name);
    }
    return rep;
}

/// 0 success, 2 configuration error, 3 numerical fault.
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::InvalidArgument:
        case ErrorKind::UnsupportedState:
        case ErrorKind::Io: return 2;
        default: return 3;
    }
}

} // namespace sqhhg
