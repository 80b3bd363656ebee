// Gaussian-weighted HHG spectra over classical field realizations,
// cutoff detection, grid convergence and g2(0).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "cache.hpp"
#include "driver.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "sfa.hpp"

namespace sqhhg {

struct GridSpec {
    std::size_t n_points = 241;
    double n_sigma = 4.0;
};

enum class Normalization { Raw, Max1 };

inline const char* to_string(Normalization n) { return n == Normalization::Raw ? "raw" : "max1"; }

struct SpectrumResult {
    std::vector<double> harmonic_orders;
    std::vector<double> S;
    std::size_t n_realizations = 0;
    std::vector<double> weights_used;
    Normalization normalization = Normalization::Raw;
    double omega0 = 0.0;
    double threshold_order = 0.0; ///< Ip / omega0; cutoff search starts here

    SpectrumResult normalized() const {
        SpectrumResult out = *this;
        const double peak = S.empty() ? 0.0 : *std::max_element(S.begin(), S.end());
        if (peak > 0.0)
            for (double& v : out.S) v /= peak;
        out.normalization = Normalization::Max1;
        return out;
    }
};

struct ComputeOptions {
    unsigned workers = 1;
    SpectrumCache* cache = nullptr;
};

/// Realizations of a driver together with their weights and power spectra.
struct RealizationSet {
    std::vector<FieldRealization> fields;
    std::vector<double> weights;
    std::vector<std::shared_ptr<const RealizationPower>> powers;
    std::size_t cache_hits = 0;
};

inline RealizationSet compute_realizations(const DriverConfig& cfg, const AtomSpec& atom, const NumericsSpec& num,
                                           const GridSpec& grid, const ComputeOptions& opts = {}) {
    atom.validate();
    num.validate(cfg.omega);
    RealizationSet set;
    for (auto& [field, weight] : realizations(cfg, grid.n_points, grid.n_sigma)) {
        set.fields.push_back(field);
        set.weights.push_back(weight);
    }
    const std::size_t n = set.fields.size();
    set.powers.resize(n);
    std::vector<char> hit(n, 0);
    parallel_for(n, opts.workers, [&](std::size_t j) {
        std::string key;
        if (opts.cache) {
            key = content_hash(set.fields[j], atom, num);
            if (auto cached = opts.cache->get(key)) {
                set.powers[j] = std::move(cached);
                hit[j] = 1;
                return;
            }
        }
        auto power = power_of(realization_spectrum(set.fields[j], atom, num));
        if (opts.cache) {
            opts.cache->put(key, power);
            set.powers[j] = opts.cache->get(key);
        } else {
            set.powers[j] = std::make_shared<const RealizationPower>(std::move(power));
        }
    });
    for (char h : hit) set.cache_hits += static_cast<std::size_t>(h);
    return set;
}

/// S(w) = w^4 sum_j w_j (|d_par^j|^2 + |d_perp^j|^2), summed in ascending j.
inline SpectrumResult assemble_spectrum(const RealizationSet& set, double omega0, double ip) {
    require(!set.powers.empty(), ErrorKind::InvalidArgument, "no realizations");
    const auto& grid = set.powers.front()->omegas;
    std::vector<double> acc(grid.size(), 0.0);
    for (std::size_t j = 0; j < set.powers.size(); ++j) {
        const auto& p = *set.powers[j];
        require(p.omegas.size() == grid.size(), ErrorKind::NumericalFault, "realization spectra differ in length");
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += set.weights[j] * (p.p_par[k] + p.p_perp[k]);
    }
    SpectrumResult res;
    res.omega0 = omega0;
    res.threshold_order = ip / omega0;
    res.n_realizations = set.powers.size();
    res.weights_used = set.weights;
    res.harmonic_orders.resize(grid.size());
    res.S.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        res.harmonic_orders[k] = w / omega0;
        res.S[k] = w * w * w * w * acc[k];
    }
    return res;
}

inline SpectrumResult hhg_spectrum(const DriverConfig& cfg, const AtomSpec& atom, const NumericsSpec& num,
                                   const GridSpec& grid = {}, const ComputeOptions& opts = {}) {
    return assemble_spectrum(compute_realizations(cfg, atom, num, grid, opts), cfg.omega, atom.Ip);
}

// ---------------------------------------------------------------------------
// g2(0)

struct G2Result {
    std::pair<double, double> harmonic_band{};
    double g2 = 0.0;
};

/// sum_j w_j X_j^2 / (sum_j w_j X_j)^2.
inline double g2_from_samples(const std::vector<double>& weights, const std::vector<double>& values) {
    require(weights.size() == values.size(), ErrorKind::InvalidArgument, "weights and values differ in length");
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        num += weights[j] * values[j] * values[j];
        den += weights[j] * values[j];
    }
    require(den > 0.0, ErrorKind::NoSignal, "zero band intensity");
    return num / (den * den);
}

/// Band intensity |d_par|^2 + |d_perp|^2 summed over q_lo <= q <= q_hi.
inline double band_intensity(const RealizationPower& p, double omega0, double q_lo, double q_hi) {
    double x = 0.0;
    for (std::size_t k = 0; k < p.omegas.size(); ++k) {
        const double q = p.omegas[k] / omega0;
        if (q >= q_lo && q <= q_hi) x += p.p_par[k] + p.p_perp[k];
    }
    return x;
}

inline G2Result g2_from_set(const RealizationSet& set, double omega0, std::pair<double, double> band) {
    require(band.first <= band.second, ErrorKind::InvalidArgument, "harmonic band must have q_lo <= q_hi");
    std::vector<double> x(set.powers.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = band_intensity(*set.powers[j], omega0, band.first, band.second);
    return {band, g2_from_samples(set.weights, x)};
}

inline G2Result g2_zero(const DriverConfig& cfg, const AtomSpec& atom, const NumericsSpec& num,
                        std::pair<double, double> band, const GridSpec& grid = {}, const ComputeOptions& opts = {}) {
    return g2_from_set(compute_realizations(cfg, atom, num, grid, opts), cfg.omega, band);
}

// ---------------------------------------------------------------------------
// Cutoffs

struct EnvelopePoint {
    int order = 0;
    double value = 0.0;
};

/// Odd-harmonic peak envelope: max of S over |q - q_odd| <= 0.5.
inline std::vector<EnvelopePoint> odd_harmonic_envelope(const SpectrumResult& res) {
    std::vector<EnvelopePoint> env;
    if (res.harmonic_orders.empty()) return env;
    const double q_top = res.harmonic_orders.back();
    for (int q = 1; q + 0.5 <= q_top + 1e-9; q += 2) {
        double m = 0.0;
        bool any = false;
        for (std::size_t k = 0; k < res.S.size(); ++k) {
            if (std::abs(res.harmonic_orders[k] - q) <= 0.5 + 1e-9) {
                m = any ? std::max(m, res.S[k]) : res.S[k];
                any = true;
            }
        }
        if (any) env.push_back({q, m});
    }
    return env;
}

/**
 * Cutoffs of the odd-harmonic envelope above the threshold order.
 *
 * A cliff starts at odd order q when the envelope (in dB) falls by at least
 * drop_db from q to q+4 and never climbs back above E(q) - drop_db. The first
 * order q0 of a run of cliff orders must follow a plateau: the envelope steps
 * q0-4 -> q0-2 -> q0 each change by less than drop_db/2. The plateau level L
 * is the envelope maximum over [q0-4, q0] and the cutoff is the last sampled
 * order up to q0+4 whose spectrum is within drop_db/2 of L, rounded to an
 * integer. At most the two highest cutoffs are returned, in ascending order.
 */
inline std::vector<int> cutoff_detect(const SpectrumResult& res, double drop_db = 20.0) {
    require(drop_db > 0.0, ErrorKind::InvalidArgument, "drop_db must be > 0");
    std::vector<int> out;
    if (res.S.empty()) return out;
    const double peak = *std::max_element(res.S.begin(), res.S.end());
    if (!(peak > 0.0)) return out;

    auto db = [&](double v) { return v > 0.0 ? 10.0 * std::log10(v / peak) : -1e4; };
    std::vector<EnvelopePoint> env;
    for (const auto& p : odd_harmonic_envelope(res))
        if (p.order >= res.threshold_order) env.push_back({p.order, db(p.value)});
    const std::size_t n = env.size();
    if (n < 3) return out;

    std::vector<double> tail_max(n + 1, -std::numeric_limits<double>::infinity());
    for (std::size_t i = n; i-- > 0;) tail_max[i] = std::max(tail_max[i + 1], env[i].value);

    std::vector<char> cliff(n, 0);
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const double e = env[i].value;
        cliff[i] = e - env[i + 2].value >= drop_db - 1e-9 && tail_max[i + 2] <= e - drop_db + 1e-9;
    }

    std::vector<int> cutoffs;
    for (std::size_t i = 0; i < n; ++i) {
        if (!cliff[i] || (i > 0 && cliff[i - 1]) || i < 2) continue;
        if (std::abs(env[i - 2].value - env[i - 1].value) >= 0.5 * drop_db ||
            std::abs(env[i - 1].value - env[i].value) >= 0.5 * drop_db)
            continue;
        const int q0 = env[i].order;
        double level = env[i].value;
        for (std::size_t j = i - 2; j < i; ++j) level = std::max(level, env[j].value);
        const double threshold = level - 0.5 * drop_db;
        double last = -1.0;
        for (std::size_t k = 0; k < res.S.size(); ++k) {
            const double q = res.harmonic_orders[k];
            if (q < q0 - 4 - 1e-9 || q > q0 + 4 + 1e-9) continue;
            if (db(res.S[k]) >= threshold) last = q;
        }
        if (last >= 0.0) cutoffs.push_back(static_cast<int>(std::lround(last)));
    }
    std::sort(cutoffs.begin(), cutoffs.end());
    cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
    if (cutoffs.size() > 2) cutoffs.erase(cutoffs.begin(), cutoffs.end() - 2);
    return cutoffs;
}

// ---------------------------------------------------------------------------
// Grid convergence

struct ConvergenceRow {
    std::size_t n_points = 0;
    double deviation = 0.0; ///< max relative deviation of log10 S
    double decades = 0.0;   ///< max absolute deviation of log10 S
};

struct LogDeviation {
    double relative = 0.0;
    double decades = 0.0;
};

/**
 * Compares the odd-harmonic envelopes of two spectra, each normalized to a
 * maximum of 1, over odd orders q <= q_max. relative is
 * max |log10 E_a - log10 E_b| / max(|log10 E_b|, 1); decades is the numerator.
 */
inline LogDeviation log_envelope_deviation(const SpectrumResult& a, const SpectrumResult& b, double q_max) {
    const auto ea = odd_harmonic_envelope(a.normalized());
    const auto eb = odd_harmonic_envelope(b.normalized());
    require(ea.size() == eb.size(), ErrorKind::InvalidArgument, "spectra have different frequency grids");
    LogDeviation dev;
    for (std::size_t i = 0; i < ea.size(); ++i) {
        if (ea[i].order > q_max) break;
        if (ea[i].value <= 0.0 && eb[i].value <= 0.0) continue;
        if (ea[i].value <= 0.0 || eb[i].value <= 0.0) {
            const double inf = std::numeric_limits<double>::infinity();
            return {inf, inf};
        }
        const double ref = std::log10(eb[i].value);
        const double d = std::abs(std::log10(ea[i].value) - ref);
        dev.decades = std::max(dev.decades, d);
        dev.relative = std::max(dev.relative, d / std::max(std::abs(ref), 1.0));
    }
    return dev;
}

/**
 * Deviation of each grid's spectrum from the finest (last) grid, measured on
 * log10 S of the odd-harmonic envelope for orders 1 .. cutoff + 10, where the
 * cutoff is the highest detected on the finest grid.
 */
inline std::vector<ConvergenceRow> convergence_scan(const DriverConfig& cfg, const AtomSpec& atom,
                                                    const NumericsSpec& num,
                                                    const std::vector<std::size_t>& n_points_list,
                                                    double n_sigma = 4.0, const ComputeOptions& opts = {}) {
    std::vector<ConvergenceRow> rows;
    if (n_points_list.empty()) return rows;
    require(std::is_sorted(n_points_list.begin(), n_points_list.end()), ErrorKind::InvalidArgument,
            "grid sizes must be sorted ascending");
    std::vector<SpectrumResult> spectra;
    for (std::size_t n : n_points_list) spectra.push_back(hhg_spectrum(cfg, atom, num, {n, n_sigma}, opts));
    const auto& ref = spectra.back();
    const auto cut = cutoff_detect(ref);
    const double q_max = cut.empty() ? std::numeric_limits<double>::infinity() : cut.back() + 10.0;
    for (std::size_t i = 0; i < spectra.size(); ++i) {
        const auto d = log_envelope_deviation(spectra[i], ref, q_max);
        rows.push_back({n_points_list[i], d.relative, d.decades});
    }
    return rows;
}

} // namespace sqhhg
