// YAML run configuration for the command-line front end.
//
// Sections: driver, atom, numerics, task, io. Every failure is reported as
// ErrorKind::Config with "file:line:column: section.field: message".
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "driver.hpp"
#include "error.hpp"
#include "sfa.hpp"

namespace sqhhg {

struct TaskSpec {
    std::optional<std::vector<double>> intensities; ///< sweep of the perp fluctuation intensity
    std::size_t grid_points = 241;
    double n_sigma = 4.0;
    double drop_db = 20.0;
    double q_lo = 12.0;
    double q_hi = 80.0;
    double q_step = 1.0;
    std::size_t fresh_every = 5;
    std::size_t n_samples = 2000;
    std::size_t n_times = 200;
    std::size_t bins = 100;
    double range = 0.12;
    double display_eps = default_display_eps;
    std::vector<Quadrature> quadratures;
    std::vector<std::pair<double, double>> bands;
    std::vector<std::size_t> grid_points_list{31, 61, 121, 241};
};

struct IoSpec {
    std::filesystem::path out = "out";
    std::filesystem::path cache;
    unsigned workers = 0; ///< 0 = logical cores
    std::uint64_t seed = 1;
};

struct RunConfig {
    DriverConfig driver;
    AtomSpec atom;
    NumericsSpec numerics;
    TaskSpec task;
    IoSpec io;
    std::string source = "<config>";
};

namespace detail {

class ConfigReader {
  public:
    explicit ConfigReader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& what) const {
        std::string where = source_;
        if (node.IsDefined() && node.Mark().line >= 0)
            where += ":" + std::to_string(node.Mark().line + 1) + ":" + std::to_string(node.Mark().column + 1);
        throw Error(ErrorKind::Config, where + ": " + path + ": " + what);
    }

    void check_keys(const YAML::Node& map, const std::string& path, const std::set<std::string>& allowed) const {
        if (!map.IsDefined() || map.IsNull()) return;
        if (!map.IsMap()) fail(map, path, "expected a mapping");
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, join(path, key), "unknown field");
        }
    }

    double number(const YAML::Node& n, const std::string& path) const {
        try {
            const double v = n.as<double>();
            if (!std::isfinite(v)) fail(n, path, "must be finite");
            return v;
        } catch (const YAML::Exception&) {
            fail(n, path, "expected a number");
        }
    }

    std::uint64_t unsigned_int(const YAML::Node& n, const std::string& path) const {
        try {
            if (n.Scalar().starts_with("-")) fail(n, path, "must be >= 0");
            return n.as<std::uint64_t>();
        } catch (const YAML::Exception&) {
            fail(n, path, "expected a non-negative integer");
        }
    }

    std::string text(const YAML::Node& n, const std::string& path) const {
        if (!n.IsScalar()) fail(n, path, "expected a string");
        return n.Scalar();
    }

    cplx complex(const YAML::Node& n, const std::string& path) const {
        if (n.IsSequence() && n.size() == 2) return {number(n[0], path + "[0]"), number(n[1], path + "[1]")};
        if (n.IsScalar()) return {number(n, path), 0.0};
        fail(n, path, "expected [re, im]");
    }

    std::vector<double> numbers(const YAML::Node& n, const std::string& path) const {
        if (!n.IsSequence()) fail(n, path, "expected a list");
        std::vector<double> out;
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(number(n[i], path + "[" + std::to_string(i) + "]"));
        return out;
    }

    Quadrature quadrature(const YAML::Node& n, const std::string& path) const {
        const auto s = text(n, path);
        if (s == "x" || s == "X" || s == "amplitude") return Quadrature::X;
        if (s == "y" || s == "Y" || s == "phase") return Quadrature::Y;
        fail(n, path, "expected x|y|amplitude|phase, got '" + s + "'");
    }

    PolarizationState state(const YAML::Node& n, const std::string& path) const {
        if (!n.IsDefined()) fail(n, path, "missing");
        check_keys(n, path, {"state", "mean", "quadrature", "intensity"});
        if (!n["mean"]) fail(n, path + ".mean", "missing");
        const cplx mean = complex(n["mean"], path + ".mean");
        const std::string kind = n["state"] ? text(n["state"], path + ".state") : "coherent";
        const double intensity = n["intensity"] ? number(n["intensity"], path + ".intensity") : 0.0;
        if (intensity < 0.0) fail(n["intensity"], path + ".intensity", "must be >= 0");
        if (kind == "coherent") {
            if (n["intensity"] && intensity != 0.0) fail(n["intensity"], path + ".intensity", "coherent state has no intensity");
            return PolarizationState::coherent(mean);
        }
        if (kind == "squeezed") {
            if (!n["quadrature"]) fail(n, path + ".quadrature", "missing for a squeezed state");
            return PolarizationState::squeezed_vacuum(mean, intensity, quadrature(n["quadrature"], path + ".quadrature"));
        }
        if (kind == "thermal") return PolarizationState::thermal(mean, intensity);
        fail(n["state"], path + ".state", "expected coherent|squeezed|thermal, got '" + kind + "'");
    }

    static std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

  private:
    std::string source_;
};

} // namespace detail

inline RunConfig parse_config(const YAML::Node& root, const std::string& source = "<config>") {
    detail::ConfigReader rd(source);
    RunConfig c;
    c.source = source;
    if (!root.IsMap()) rd.fail(root, "<root>", "expected a mapping with driver/atom/numerics/task/io");
    rd.check_keys(root, "", {"driver", "atom", "numerics", "task", "io"});

    const auto drv = root["driver"];
    if (!drv) rd.fail(root, "driver", "missing section");
    rd.check_keys(drv, "driver", {"omega", "parallel", "perp"});
    if (drv["omega"]) c.driver.omega = rd.number(drv["omega"], "driver.omega");
    if (c.driver.omega <= 0.0) rd.fail(drv["omega"], "driver.omega", "must be > 0");
    c.driver.parallel = rd.state(drv["parallel"], "driver.parallel");
    c.driver.perp = rd.state(drv["perp"], "driver.perp");
    if (c.driver.parallel.kind != StateKind::Coherent)
        rd.fail(drv["parallel"], "driver.parallel.state", "only a coherent parallel component is supported");

    if (const auto atom = root["atom"]) {
        rd.check_keys(atom, "atom", {"ip"});
        if (atom["ip"]) c.atom.Ip = rd.number(atom["ip"], "atom.ip");
        if (c.atom.Ip <= 0.0) rd.fail(atom["ip"], "atom.ip", "must be > 0");
    }

    c.numerics = NumericsSpec::defaults_for(c.driver.omega);
    const double period = 2.0 * std::numbers::pi / c.driver.omega;
    if (const auto num = root["numerics"]) {
        rd.check_keys(num, "numerics", {"dt", "steps_per_cycle", "n_cycles", "window", "epsilon_reg", "excursion_cap_cycles"});
        if (num["dt"] && num["steps_per_cycle"]) rd.fail(num, "numerics", "give dt or steps_per_cycle, not both");
        if (num["dt"]) c.numerics.dt = rd.number(num["dt"], "numerics.dt");
        if (num["steps_per_cycle"]) {
            const auto m = rd.unsigned_int(num["steps_per_cycle"], "numerics.steps_per_cycle");
            if (m < 4) rd.fail(num["steps_per_cycle"], "numerics.steps_per_cycle", "must be >= 4");
            c.numerics.dt = period / static_cast<double>(m);
        }
        if (num["n_cycles"]) {
            const auto n = rd.unsigned_int(num["n_cycles"], "numerics.n_cycles");
            if (n < 1) rd.fail(num["n_cycles"], "numerics.n_cycles", "must be >= 1");
            c.numerics.n_cycles = static_cast<int>(n);
        }
        if (num["window"]) {
            const auto w = rd.text(num["window"], "numerics.window");
            if (w == "none") c.numerics.window = Window::None;
            else if (w == "hann") c.numerics.window = Window::Hann;
            else if (w == "blackman") c.numerics.window = Window::Blackman;
            else rd.fail(num["window"], "numerics.window", "expected none|hann|blackman");
        }
        if (num["epsilon_reg"]) c.numerics.epsilon_reg = rd.number(num["epsilon_reg"], "numerics.epsilon_reg");
        if (num["excursion_cap_cycles"])
            c.numerics.excursion_cap = period * rd.number(num["excursion_cap_cycles"], "numerics.excursion_cap_cycles");
        try {
            c.numerics.validate(c.driver.omega);
        } catch (const Error& e) {
            rd.fail(num, "numerics", e.what());
        }
    }

    if (const auto t = root["task"]) {
        rd.check_keys(t, "task",
                      {"intensities", "grid_points", "n_sigma", "drop_db", "q_lo", "q_hi", "q_step", "fresh_every",
                       "n_samples", "n_times", "bins", "range", "display_eps", "quadratures", "bands", "grid_points_list"});
        auto& k = c.task;
        if (t["intensities"]) {
            k.intensities = rd.numbers(t["intensities"], "task.intensities");
            for (double v : *k.intensities)
                if (v < 0.0) rd.fail(t["intensities"], "task.intensities", "intensities must be >= 0");
        }
        if (t["grid_points"]) k.grid_points = rd.unsigned_int(t["grid_points"], "task.grid_points");
        if (t["n_sigma"]) k.n_sigma = rd.number(t["n_sigma"], "task.n_sigma");
        if (t["drop_db"]) k.drop_db = rd.number(t["drop_db"], "task.drop_db");
        if (t["q_lo"]) k.q_lo = rd.number(t["q_lo"], "task.q_lo");
        if (t["q_hi"]) k.q_hi = rd.number(t["q_hi"], "task.q_hi");
        if (t["q_step"]) k.q_step = rd.number(t["q_step"], "task.q_step");
        if (t["fresh_every"]) k.fresh_every = rd.unsigned_int(t["fresh_every"], "task.fresh_every");
        if (t["n_samples"]) k.n_samples = rd.unsigned_int(t["n_samples"], "task.n_samples");
        if (t["n_times"]) k.n_times = rd.unsigned_int(t["n_times"], "task.n_times");
        if (t["bins"]) k.bins = rd.unsigned_int(t["bins"], "task.bins");
        if (t["range"]) k.range = rd.number(t["range"], "task.range");
        if (t["display_eps"]) k.display_eps = rd.number(t["display_eps"], "task.display_eps");
        if (t["quadratures"]) {
            const auto q = t["quadratures"];
            if (!q.IsSequence()) rd.fail(q, "task.quadratures", "expected a list");
            for (std::size_t i = 0; i < q.size(); ++i)
                k.quadratures.push_back(rd.quadrature(q[i], "task.quadratures[" + std::to_string(i) + "]"));
        }
        if (t["bands"]) {
            const auto b = t["bands"];
            if (!b.IsSequence()) rd.fail(b, "task.bands", "expected a list of [q_lo, q_hi]");
            for (std::size_t i = 0; i < b.size(); ++i) {
                const std::string p = "task.bands[" + std::to_string(i) + "]";
                const auto v = rd.numbers(b[i], p);
                if (v.size() != 2 || v[0] > v[1]) rd.fail(b[i], p, "expected [q_lo, q_hi] with q_lo <= q_hi");
                k.bands.emplace_back(v[0], v[1]);
            }
        }
        if (t["grid_points_list"]) {
            k.grid_points_list.clear();
            for (double v : rd.numbers(t["grid_points_list"], "task.grid_points_list")) {
                if (v < 2.0 || v != std::floor(v)) rd.fail(t["grid_points_list"], "task.grid_points_list", "entries must be integers >= 2");
                k.grid_points_list.push_back(static_cast<std::size_t>(v));
            }
        }
        if (k.grid_points < 2) rd.fail(t["grid_points"], "task.grid_points", "must be >= 2");
        if (k.n_sigma <= 0.0) rd.fail(t["n_sigma"], "task.n_sigma", "must be > 0");
        if (k.drop_db <= 0.0) rd.fail(t["drop_db"], "task.drop_db", "must be > 0");
        if (k.q_step <= 0.0) rd.fail(t["q_step"], "task.q_step", "must be > 0");
        if (k.bins == 0) rd.fail(t["bins"], "task.bins", "must be > 0");
        if (k.range <= 0.0) rd.fail(t["range"], "task.range", "must be > 0");
        if (k.display_eps <= 0.0) rd.fail(t["display_eps"], "task.display_eps", "must be > 0");
    }

    if (const auto io = root["io"]) {
        rd.check_keys(io, "io", {"out", "cache", "workers", "seed"});
        if (io["out"]) c.io.out = rd.text(io["out"], "io.out");
        if (io["cache"]) c.io.cache = rd.text(io["cache"], "io.cache");
        if (io["workers"]) c.io.workers = static_cast<unsigned>(rd.unsigned_int(io["workers"], "io.workers"));
        if (io["seed"]) c.io.seed = rd.unsigned_int(io["seed"], "io.seed");
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::BadFile&) {
        throw Error(ErrorKind::Config, path.string() + ": cannot open config file");
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorKind::Config, path.string() + ":" + std::to_string(e.mark.line + 1) + ":" +
                                           std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    return parse_config(root, path.string());
}

inline RunConfig load_config_string(const std::string& text, const std::string& source = "<string>") {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorKind::Config, source + ":" + std::to_string(e.mark.line + 1) + ":" +
                                           std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    return parse_config(root, source);
}

} // namespace sqhhg
