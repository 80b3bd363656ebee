// Quantum driver states, their classical field realizations and
// Gaussian weights, Lissajous sampling and ellipticity statistics.
//
// All quantities are in atomic units. A polarization component is described by
// its complex mean amplitude eps = eps_x + i eps_y; in the classical limit a
// squeezed component fluctuates along one quadrature only (variance 4 I_squ)
// and a thermal component fluctuates isotropically (variance 2 I_th per axis).
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "error.hpp"
#include "field.hpp"

namespace sqhhg {

enum class StateKind { Coherent, DisplacedSqueezedVacuum, DisplacedThermal };

/// Quadrature carrying the enlarged variance of a squeezed component. For the
/// eps_perp = i|eps| configuration, X is amplitude squeezing and Y is phase
/// squeezing.
enum class Quadrature { X, Y };

inline const char* to_string(StateKind k) {
    switch (k) {
        case StateKind::Coherent: return "coherent";
        case StateKind::DisplacedSqueezedVacuum: return "squeezed";
        case StateKind::DisplacedThermal: return "thermal";
    }
    return "?";
}

inline const char* to_string(Quadrature q) { return q == Quadrature::X ? "x" : "y"; }

inline double quadrature_of(cplx z, Quadrature q) { return q == Quadrature::X ? z.real() : z.imag(); }

inline cplx with_quadrature(cplx z, Quadrature q, double value) {
    return q == Quadrature::X ? cplx(value, z.imag()) : cplx(z.real(), value);
}

struct PolarizationState {
    StateKind kind = StateKind::Coherent;
    cplx mean{};
    double intensity = 0.0; // I_squ for squeezed, I_th for thermal
    Quadrature squeezed = Quadrature::X;

    static PolarizationState coherent(cplx mean) { return {StateKind::Coherent, mean, 0.0, Quadrature::X}; }

    static PolarizationState squeezed_vacuum(cplx mean, double i_squ, Quadrature q) {
        require(i_squ >= 0.0 && std::isfinite(i_squ), ErrorKind::InvalidArgument, "I_squ must be >= 0");
        return {StateKind::DisplacedSqueezedVacuum, mean, i_squ, q};
    }

    static PolarizationState thermal(cplx mean, double i_th) {
        require(i_th >= 0.0 && std::isfinite(i_th), ErrorKind::InvalidArgument, "I_th must be >= 0");
        return {StateKind::DisplacedThermal, mean, i_th, Quadrature::X};
    }

    /// Variance of the classical-limit weight: 4 I_squ (1D) or 2 I_th per axis.
    double weight_variance() const {
        switch (kind) {
            case StateKind::Coherent: return 0.0;
            case StateKind::DisplacedSqueezedVacuum: return 4.0 * intensity;
            case StateKind::DisplacedThermal: return 2.0 * intensity;
        }
        return 0.0;
    }

    bool fluctuates() const { return kind != StateKind::Coherent && intensity > 0.0; }
};

struct DriverConfig {
    PolarizationState parallel;
    PolarizationState perp;
    double omega = 0.057;

    void validate() const {
        require(omega > 0.0 && std::isfinite(omega), ErrorKind::InvalidArgument, "omega must be > 0");
    }

    /// True iff eps_perp = i eps_par to relative precision 1e-12.
    bool is_circular() const {
        const cplx target = cplx(0.0, 1.0) * parallel.mean;
        const double scale = std::max(std::abs(parallel.mean), std::abs(perp.mean));
        if (scale == 0.0) return false;
        return std::abs(perp.mean - target) <= 1e-12 * scale;
    }
};

/// One classical field sample.
struct FieldRealization {
    cplx eps_par{};
    cplx eps_perp{};
    double omega = 0.057;

    MonochromaticField<double> field() const {
        return {{eps_par.real(), eps_par.imag()}, {eps_perp.real(), eps_perp.imag()}, omega};
    }
};

template <typename Time>
Pair<cplx> vector_potential(const FieldRealization& r, Time t) {
    const auto a = r.field().vector_potential(t);
    return {cplx(a[0]), cplx(a[1])};
}

template <typename Time>
Pair<cplx> electric_field(const FieldRealization& r, Time t) {
    const auto e = r.field().electric_field(t);
    return {cplx(e[0]), cplx(e[1])};
}

// ---------------------------------------------------------------------------
// Gaussian weights

namespace detail {
inline void require_fluctuating(const PolarizationState& s) {
    if (s.kind == StateKind::Coherent)
        throw Error(ErrorKind::DegenerateWeight, "coherent state has a point-mass weight");
    if (s.weight_variance() <= 0.0)
        throw Error(ErrorKind::DegenerateWeight, "zero fluctuation intensity gives a point-mass weight");
}
} // namespace detail

/// 1D marginal density along the squeezed quadrature (squeezed states only).
inline double marginal_weight(const PolarizationState& s, double quadrature_value) {
    detail::require_fluctuating(s);
    require(s.kind == StateKind::DisplacedSqueezedVacuum, ErrorKind::InvalidArgument,
            "1D marginal requested for a thermal state; pass a complex amplitude");
    const double var = s.weight_variance();
    const double d = quadrature_value - quadrature_of(s.mean, s.squeezed);
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

/// Density at a complex amplitude: 1D marginal for squeezed (only the squeezed
/// quadrature of @p eps is read), isotropic 2D Gaussian for thermal.
inline double marginal_weight(const PolarizationState& s, cplx eps) {
    detail::require_fluctuating(s);
    if (s.kind == StateKind::DisplacedSqueezedVacuum) return marginal_weight(s, quadrature_of(eps, s.squeezed));
    const double var = s.weight_variance();
    return std::exp(-std::norm(eps - s.mean) / (2.0 * var)) / (2.0 * std::numbers::pi * var);
}

struct GridNode {
    cplx eps{};
    double weight = 1.0;
};

/**
 * Uniform quadrature grid over mean +- n_sigma standard deviations.
 *
 * Squeezed: n_points nodes along the squeezed quadrature. Thermal: an
 * n_points x n_points square (row-major, x fastest). Weights are the density
 * times the cell measure, renormalized to sum to one after truncation. A
 * coherent state, or a fluctuating state with zero intensity, yields its mean
 * with weight one.
 */
inline std::vector<GridNode> amplitude_grid(const PolarizationState& s, std::size_t n_points, double n_sigma = 4.0) {
    if (!s.fluctuates()) return {GridNode{s.mean, 1.0}};
    if (s.kind == StateKind::DisplacedSqueezedVacuum)
        require(n_points >= 3 && n_points % 2 == 1, ErrorKind::GridTooCoarse,
                "squeezed amplitude grid needs an odd number of points >= 3, got " + std::to_string(n_points));
    else
        require(n_points >= 2, ErrorKind::GridTooCoarse,
                "thermal amplitude grid needs at least 2 points per axis, got " + std::to_string(n_points));
    require(n_sigma > 0.0, ErrorKind::InvalidArgument, "n_sigma must be > 0");

    const double half_width = n_sigma * std::sqrt(s.weight_variance());
    const long m = static_cast<long>(n_points) - 1;
    std::vector<double> offsets(n_points);
    for (std::size_t j = 0; j < n_points; ++j) {
        const double ratio = static_cast<double>(2 * static_cast<long>(j) - m) / static_cast<double>(m);
        offsets[j] = half_width * ratio;
    }

    std::vector<GridNode> nodes;
    double total = 0.0;
    if (s.kind == StateKind::DisplacedSqueezedVacuum) {
        const double centre = quadrature_of(s.mean, s.squeezed);
        nodes.reserve(n_points);
        for (double off : offsets) {
            const cplx eps = with_quadrature(s.mean, s.squeezed, centre + off);
            const double w = marginal_weight(s, eps);
            nodes.push_back({eps, w});
            total += w;
        }
    } else {
        nodes.reserve(n_points * n_points);
        for (double oy : offsets) {
            for (double ox : offsets) {
                const cplx eps = s.mean + cplx(ox, oy);
                const double w = marginal_weight(s, eps);
                nodes.push_back({eps, w});
                total += w;
            }
        }
    }
    for (auto& n : nodes) n.weight /= total;
    return nodes;
}

/// Realizations of a driver: the parallel component is held at its mean and
/// the perpendicular component runs over its amplitude grid.
inline std::vector<std::pair<FieldRealization, double>> realizations(const DriverConfig& cfg, std::size_t n_points,
                                                                     double n_sigma = 4.0) {
    cfg.validate();
    require(!cfg.parallel.fluctuates(), ErrorKind::UnsupportedState,
            "only a coherent parallel component is supported for spectra");
    std::vector<std::pair<FieldRealization, double>> out;
    for (const auto& node : amplitude_grid(cfg.perp, n_points, n_sigma))
        out.push_back({FieldRealization{cfg.parallel.mean, node.eps, cfg.omega}, node.weight});
    return out;
}

// ---------------------------------------------------------------------------
// Ellipticity

struct EllipticityStats {
    double mean_ellipticity = 0.0;   ///< |E|
    double signed_ellipticity = 0.0; ///< S3 / S0, sign = helicity
    double delta_ellipticity = 0.0;
    double S0 = 0.0;
    double S3 = 0.0;
    double varS0 = 0.0;
    double varS3 = 0.0;
};

/// Combines Stokes moments into mean ellipticity and its propagated spread.
inline EllipticityStats ellipticity_from_moments(double s0, double s3, double var_s0, double var_s3) {
    require(s0 > 0.0, ErrorKind::ZeroIntensity, "S0 = 0");
    EllipticityStats st;
    st.S0 = s0;
    st.S3 = s3;
    st.varS0 = var_s0;
    st.varS3 = var_s3;
    st.signed_ellipticity = s3 / s0;
    st.mean_ellipticity = std::abs(st.signed_ellipticity);
    const double var_e = var_s3 / (s0 * s0) + s3 * s3 * var_s0 / (s0 * s0 * s0 * s0);
    st.delta_ellipticity = std::sqrt(std::max(var_e, 0.0));
    return st;
}

/**
 * Classical-limit Stokes statistics for a coherent parallel component and a
 * coherent or squeezed perpendicular component.
 *
 * S0 = (|e_par|^2 + |e_perp|^2)/4 + I, S3 = i(e_par* e_perp - c.c.)/4. The sign
 * of the Re(e^2) terms in the variances follows the quadrature that carries the
 * enlarged noise: + for X and - for Y in var S0, the opposite in var S3.
 */
inline EllipticityStats ellipticity_stats(const DriverConfig& cfg) {
    cfg.validate();
    require(cfg.parallel.kind == StateKind::Coherent, ErrorKind::UnsupportedState,
            "ellipticity requires a coherent parallel component");
    require(cfg.perp.kind != StateKind::DisplacedThermal, ErrorKind::UnsupportedState,
            "ellipticity fluctuations are not available for thermal drivers");

    const cplx ep = cfg.parallel.mean;
    const cplx es = cfg.perp.mean;
    const double isq = cfg.perp.kind == StateKind::DisplacedSqueezedVacuum ? cfg.perp.intensity : 0.0;
    const double sign = cfg.perp.squeezed == Quadrature::X ? 1.0 : -1.0;

    const double s0 = 0.25 * (std::norm(es) + std::norm(ep)) + isq;
    const double s3 = (cplx(0.0, 1.0) * (std::conj(ep) * es - ep * std::conj(es))).real() / 4.0;
    const double var_s0 = 2.0 * isq * isq + 0.5 * std::norm(es) * isq + sign * 0.5 * (es * es).real() * isq;
    const double var_s3 = 0.5 * std::norm(ep) * isq - sign * 0.5 * (ep * ep).real() * isq;
    return ellipticity_from_moments(s0, s3, var_s0, var_s3);
}

// ---------------------------------------------------------------------------
// Phase-space sampling

/// Draws one complex amplitude from the finite-eps Gaussian phase-space
/// distribution of the state (eps = single-photon field amplitude).
template <typename Rng>
cplx sample_amplitude(const PolarizationState& s, double display_eps, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double e2 = display_eps * display_eps;
    double var_x = e2, var_y = e2;
    switch (s.kind) {
        case StateKind::Coherent: break;
        case StateKind::DisplacedSqueezedVacuum: {
            const double r = std::asinh(std::sqrt(s.intensity) / display_eps);
            const double big = e2 * std::exp(2.0 * r);
            const double small = e2 * std::exp(-2.0 * r);
            var_x = s.squeezed == Quadrature::X ? big : small;
            var_y = s.squeezed == Quadrature::X ? small : big;
            break;
        }
        case StateKind::DisplacedThermal: {
            const double n_th = s.intensity / e2;
            var_x = var_y = e2 * (1.0 + 2.0 * n_th);
            break;
        }
    }
    const double zx = gauss(rng);
    const double zy = gauss(rng);
    return s.mean + cplx(std::sqrt(var_x) * zx, std::sqrt(var_y) * zy);
}

struct LissajousSample {
    std::vector<double> times;
    std::size_t n_samples = 0;
    std::vector<Pair<double>> samples; ///< [time index * n_samples + sample index]

    const Pair<double>& at(std::size_t time_index, std::size_t sample_index) const {
        return samples[time_index * n_samples + sample_index];
    }
};

inline constexpr double default_display_eps = 0.053 / 20.0;

template <typename Rng>
LissajousSample sample_lissajous(const DriverConfig& cfg, std::size_t n_samples, const std::vector<double>& times,
                                 double display_eps, Rng& rng) {
    cfg.validate();
    require(display_eps > 0.0, ErrorKind::InvalidArgument, "display_eps must be > 0");
    LissajousSample out;
    out.times = times;
    out.n_samples = n_samples;
    out.samples.reserve(times.size() * n_samples);
    for (double t : times) {
        for (std::size_t k = 0; k < n_samples; ++k) {
            const FieldRealization r{sample_amplitude(cfg.parallel, display_eps, rng),
                                     sample_amplitude(cfg.perp, display_eps, rng), cfg.omega};
            const auto e = r.field().electric_field(t);
            out.samples.push_back({e[0], e[1]});
        }
    }
    return out;
}

struct Histogram2D {
    std::size_t bins = 0;
    double range = 0.0; ///< square [-range, range]^2
    std::vector<std::size_t> counts; ///< [row (perp) * bins + col (par)]
};

inline Histogram2D lissajous_histogram(const LissajousSample& s, std::size_t bins, double range) {
    require(bins > 0 && range > 0.0, ErrorKind::InvalidArgument, "histogram needs bins > 0 and range > 0");
    Histogram2D h{bins, range, std::vector<std::size_t>(bins * bins, 0)};
    const double width = 2.0 * range / static_cast<double>(bins);
    for (const auto& e : s.samples) {
        const double cx = std::floor((e[0] + range) / width);
        const double cy = std::floor((e[1] + range) / width);
        if (cx < 0 || cy < 0 || cx >= static_cast<double>(bins) || cy >= static_cast<double>(bins)) continue;
        h.counts[static_cast<std::size_t>(cy) * bins + static_cast<std::size_t>(cx)]++;
    }
    return h;
}

/**
 * Monte-Carlo estimate of the classical-limit Stokes moments.
 *
 * Samples the finite-eps phase-space distribution at display_eps and at
 * display_eps/sqrt(2) with common random numbers, then extrapolates each moment
 * linearly in eps^2 to eps -> 0.
 */
template <typename Rng>
EllipticityStats monte_carlo_ellipticity(const DriverConfig& cfg, std::size_t n_samples, double display_eps,
                                         Rng& rng) {
    cfg.validate();
    require(n_samples >= 2, ErrorKind::InvalidArgument, "need at least two samples");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::array<double, 4>> z(n_samples);
    for (auto& v : z)
        for (auto& x : v) x = gauss(rng);

    auto stddevs = [](const PolarizationState& s, double eps) {
        const double e2 = eps * eps;
        double vx = e2, vy = e2;
        if (s.kind == StateKind::DisplacedSqueezedVacuum) {
            const double r = std::asinh(std::sqrt(s.intensity) / eps);
            const double big = e2 * std::exp(2.0 * r), small = e2 * std::exp(-2.0 * r);
            vx = s.squeezed == Quadrature::X ? big : small;
            vy = s.squeezed == Quadrature::X ? small : big;
        } else if (s.kind == StateKind::DisplacedThermal) {
            vx = vy = e2 + 2.0 * s.intensity;
        }
        return std::array<double, 2>{std::sqrt(vx), std::sqrt(vy)};
    };

    auto moments = [&](double eps) {
        const auto sp = stddevs(cfg.parallel, eps);
        const auto ss = stddevs(cfg.perp, eps);
        double m0 = 0, m3 = 0, q0 = 0, q3 = 0;
        for (const auto& v : z) {
            const cplx ep = cfg.parallel.mean + cplx(sp[0] * v[0], sp[1] * v[1]);
            const cplx es = cfg.perp.mean + cplx(ss[0] * v[2], ss[1] * v[3]);
            const double s0 = 0.25 * (std::norm(ep) + std::norm(es));
            const double s3 = -0.5 * (std::conj(ep) * es).imag();
            m0 += s0;
            m3 += s3;
            q0 += s0 * s0;
            q3 += s3 * s3;
        }
        const double n = static_cast<double>(z.size());
        m0 /= n;
        m3 /= n;
        return std::array<double, 4>{m0, m3, q0 / n - m0 * m0, q3 / n - m3 * m3};
    };

    const auto coarse = moments(display_eps);
    const auto fine = moments(display_eps / std::sqrt(2.0));
    std::array<double, 4> limit{};
    for (int k = 0; k < 4; ++k) limit[k] = 2.0 * fine[k] - coarse[k];
    return ellipticity_from_moments(limit[0], limit[1], std::max(limit[2], 0.0), std::max(limit[3], 0.0));
}

} // namespace sqhhg
