// CSV tables, atomic file publication and JSON metadata sidecars.
#pragma once

#include <atomic>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cache.hpp"
#include "config.hpp"
#include "error.hpp"

namespace sqhhg {

/// Shortest round-trip decimal form; locale independent.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

    CsvTable& row(const std::vector<double>& values) {
        require(values.size() == columns_, ErrorKind::InvalidArgument, "CSV row has the wrong number of columns");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) text_ += ',';
            text_ += format_number(values[i]);
        }
        text_ += '\n';
        return *this;
    }

    CsvTable& row_strings(const std::vector<std::string>& cells) {
        require(cells.size() == columns_, ErrorKind::InvalidArgument, "CSV row has the wrong number of columns");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
        return *this;
    }

    const std::string& text() const { return text_; }

  private:
    std::size_t columns_;
    std::string text_;
};

/// Writes to a sibling temp file and renames it over @p path.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
    static std::atomic<unsigned long> counter{0};
    std::filesystem::path tmp = path;
    tmp += ".part." + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(ErrorKind::Io, "short write on " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot rename onto " + path.string());
    }
}

inline nlohmann::json to_json(const PolarizationState& s) {
    nlohmann::json j;
    j["state"] = to_string(s.kind);
    j["mean"] = {s.mean.real(), s.mean.imag()};
    if (s.kind != StateKind::Coherent) j["intensity"] = s.intensity;
    if (s.kind == StateKind::DisplacedSqueezedVacuum) j["quadrature"] = to_string(s.squeezed);
    return j;
}

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["driver"] = {{"omega", c.driver.omega}, {"parallel", to_json(c.driver.parallel)}, {"perp", to_json(c.driver.perp)}};
    j["atom"] = {{"ip", c.atom.Ip}, {"dipole", "hydrogen1s"}};
    j["numerics"] = {{"dt", c.numerics.dt},
                     {"n_cycles", c.numerics.n_cycles},
                     {"window", to_string(c.numerics.window)},
                     {"epsilon_reg", c.numerics.epsilon_reg},
                     {"excursion_cap", c.numerics.excursion_cap}};
    const auto& t = c.task;
    nlohmann::json task = {{"grid_points", t.grid_points}, {"n_sigma", t.n_sigma}, {"drop_db", t.drop_db},
                           {"q_lo", t.q_lo}, {"q_hi", t.q_hi}, {"q_step", t.q_step}, {"fresh_every", t.fresh_every},
                           {"n_samples", t.n_samples}, {"n_times", t.n_times}, {"bins", t.bins}, {"range", t.range},
                           {"display_eps", t.display_eps}, {"grid_points_list", t.grid_points_list}};
    task["intensities"] = t.intensities ? nlohmann::json(*t.intensities) : nlohmann::json(nullptr);
    task["quadratures"] = nlohmann::json::array();
    for (auto q : t.quadratures) task["quadratures"].push_back(to_string(q));
    task["bands"] = nlohmann::json::array();
    for (auto [lo, hi] : t.bands) task["bands"].push_back({lo, hi});
    j["task"] = task;
    j["io"] = {{"out", c.io.out.string()}, {"cache", c.io.cache.string()}, {"seed", c.io.seed}};
    return j;
}

inline std::string weights_checksum(const std::vector<double>& weights) {
    std::string s;
    for (double w : weights) s += hexfloat(w) + ";";
    return sha256_hex(s);
}

/**
 * Publishes @p data at dir/name and a sidecar dir/name.json holding the
 * resolved config, the data hash and @p extra. Data before metadata, so a
 * sidecar never describes a missing file.
 */
inline void write_artifact(const std::filesystem::path& dir, const std::string& name, const std::string& data,
                           const std::string& subcommand, const RunConfig& cfg, nlohmann::json extra = nlohmann::json::object()) {
    const auto path = dir / name;
    atomic_write(path, data);
    nlohmann::json meta;
    meta["subcommand"] = subcommand;
    meta["data_file"] = name;
    meta["sha256"] = sha256_hex(data);
    meta["config"] = to_json(cfg);
    for (auto& [k, v] : extra.items()) meta[k] = v;
    atomic_write(dir / (name + ".json"), meta.dump(2) + "\n");
}

} // namespace sqhhg
