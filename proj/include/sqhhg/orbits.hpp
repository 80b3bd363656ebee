// Complex saddle-point quantum orbits for a coherent parallel and a
// squeezed perpendicular driver component.
//
// Unknowns z = (t_ion, t_re, p_par, p_perp, eps), where eps is the fluctuating
// quadrature of the perpendicular field (x: cos part of A, y: sin part of A).
// The saddle conditions of
//
//    S = 1/2 int (p + A)^2 + Ip (t_re - t_ion) - Omega t_re - i (eps - eps_bar)^2 / (2 sigma)
//
// are solved by damped Newton iteration with an analytic Jacobian.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "driver.hpp"
#include "error.hpp"
#include "field.hpp"
#include "parallel.hpp"

namespace sqhhg {

struct SaddleSystemConfig {
    cplx eps_par{0.053, 0.0};
    cplx eps_perp{0.0, 0.053};
    double omega = 0.057;
    double Ip = 0.5;
    double Omega = 0.0; ///< emitted photon energy q * omega
    Quadrature squeezed = Quadrature::X;
    double sigma = 0.0; ///< 4 I_squ; 0 pins eps to its mean

    double eps_bar() const { return quadrature_of(eps_perp, squeezed); }

    void validate() const {
        require(omega > 0.0, ErrorKind::InvalidArgument, "omega must be > 0");
        require(Ip > 0.0, ErrorKind::InvalidArgument, "Ip must be > 0");
        require(sigma >= 0.0, ErrorKind::InvalidArgument, "sigma must be >= 0");
    }

    /// Field with the fluctuating quadrature set to @p eps.
    MonochromaticField<cplx> field(cplx eps) const {
        MonochromaticField<cplx> f;
        f.par = {cplx(eps_par.real()), cplx(eps_par.imag())};
        f.perp = {cplx(eps_perp.real()), cplx(eps_perp.imag())};
        (squeezed == Quadrature::X ? f.perp.x : f.perp.y) = eps;
        f.omega = omega;
        return f;
    }
};

/// Builds the saddle configuration of a coherent-parallel / squeezed-perp driver at harmonic q.
inline SaddleSystemConfig saddle_config(const DriverConfig& cfg, double ip, double q) {
    require(cfg.parallel.kind == StateKind::Coherent, ErrorKind::UnsupportedState,
            "saddle equations need a coherent parallel component");
    require(cfg.perp.kind != StateKind::DisplacedThermal, ErrorKind::UnsupportedState,
            "saddle equations are not available for thermal drivers");
    SaddleSystemConfig s;
    s.eps_par = cfg.parallel.mean;
    s.eps_perp = cfg.perp.mean;
    s.omega = cfg.omega;
    s.Ip = ip;
    s.Omega = q * cfg.omega;
    s.squeezed = cfg.perp.squeezed;
    s.sigma = cfg.perp.weight_variance();
    return s;
}

using SaddleVars = std::array<cplx, 5>; // t_ion, t_re, p_par, p_perp, eps
using SaddleJacobian = Eigen::Matrix<cplx, 5, 5>;

enum class Family { Short, Long, ExtraShort, ExtraLong, Unclassified };

inline const char* to_string(Family f) {
    switch (f) {
        case Family::Short: return "short";
        case Family::Long: return "long";
        case Family::ExtraShort: return "extra-short";
        case Family::ExtraLong: return "extra-long";
        case Family::Unclassified: return "unclassified";
    }
    return "?";
}

struct SaddleSolution {
    cplx t_ion, t_re, p_par, p_perp, eps_fluct;
    double residual_norm = std::numeric_limits<double>::infinity();
    double harmonic_order = 0.0;
    Family family = Family::Unclassified;
    int track = -1; ///< continuation track id within a scan

    SaddleVars vars() const { return {t_ion, t_re, p_par, p_perp, eps_fluct}; }

    static SaddleSolution from(const SaddleVars& z) { return {z[0], z[1], z[2], z[3], z[4]}; }
};

namespace detail {
struct KernelIntegrals {
    cplx k1;      ///< int k
    cplx k_sq;    ///< int k^2
    cplx k_other; ///< int k * (other trig function)
};

inline cplx kernel(Quadrature q, cplx phase) { return q == Quadrature::X ? std::cos(phase) : std::sin(phase); }

inline KernelIntegrals kernel_integrals(Quadrature q, double omega, cplx t1, cplx t2) {
    const auto ti = trig_integrals(omega, t1, t2);
    if (q == Quadrature::X) return {ti.c, ti.cc, ti.cs};
    return {ti.s, ti.ss, ti.cs};
}
} // namespace detail

/// The five saddle residuals; eq. (v) becomes eps - eps_bar when sigma = 0.
inline SaddleVars saddle_residuals(const SaddleVars& z, const SaddleSystemConfig& cfg) {
    const cplx t1 = z[0], t2 = z[1], pp = z[2], ps = z[3], eps = z[4];
    const auto f = cfg.field(eps);
    const double w = cfg.omega;
    const auto a1 = f.vector_potential(t1);
    const auto a2 = f.vector_potential(t2);
    const cplx v1p = pp + a1[0], v1s = ps + a1[1];
    const cplx v2p = pp + a2[0], v2s = ps + a2[1];
    const cplx tau = t2 - t1;

    SaddleVars r;
    r[0] = 0.5 * (v1p * v1p + v1s * v1s) + cfg.Ip;
    r[1] = ps * tau + f.potential_integral(1, t1, t2);
    r[2] = pp * tau + f.potential_integral(0, t1, t2);
    r[3] = 0.5 * (v2p * v2p + v2s * v2s) + cfg.Ip - cfg.Omega;
    if (cfg.sigma > 0.0) {
        const auto ki = detail::kernel_integrals(cfg.squeezed, w, t1, t2);
        const cplx other = cfg.squeezed == Quadrature::X ? f.perp.y : f.perp.x;
        const cplx proj = ps * ki.k1 + (eps * ki.k_sq + other * ki.k_other) / w;
        r[4] = proj / w - cplx(0.0, 1.0 / cfg.sigma) * (eps - cfg.eps_bar());
    } else {
        r[4] = eps - cfg.eps_bar();
    }
    return r;
}

inline SaddleJacobian saddle_jacobian(const SaddleVars& z, const SaddleSystemConfig& cfg) {
    const cplx t1 = z[0], t2 = z[1], pp = z[2], ps = z[3], eps = z[4];
    const auto f = cfg.field(eps);
    const double w = cfg.omega;
    const auto a1 = f.vector_potential(t1);
    const auto a2 = f.vector_potential(t2);
    const auto e1 = f.electric_field(t1);
    const auto e2 = f.electric_field(t2);
    const cplx v1p = pp + a1[0], v1s = ps + a1[1];
    const cplx v2p = pp + a2[0], v2s = ps + a2[1];
    const cplx tau = t2 - t1;
    const cplx k1 = detail::kernel(cfg.squeezed, w * t1);
    const cplx k2 = detail::kernel(cfg.squeezed, w * t2);
    const auto ki = detail::kernel_integrals(cfg.squeezed, w, t1, t2);

    SaddleJacobian j = SaddleJacobian::Zero();
    // dA/dt = -E; dA_perp/deps = k / w
    j(0, 0) = -(v1p * e1[0] + v1s * e1[1]);
    j(0, 2) = v1p;
    j(0, 3) = v1s;
    j(0, 4) = v1s * k1 / w;

    j(1, 0) = -v1s;
    j(1, 1) = v2s;
    j(1, 3) = tau;
    j(1, 4) = ki.k1 / w;

    j(2, 0) = -v1p;
    j(2, 1) = v2p;
    j(2, 2) = tau;

    j(3, 1) = -(v2p * e2[0] + v2s * e2[1]);
    j(3, 2) = v2p;
    j(3, 3) = v2s;
    j(3, 4) = v2s * k2 / w;

    if (cfg.sigma > 0.0) {
        j(4, 0) = -v1s * k1 / w;
        j(4, 1) = v2s * k2 / w;
        j(4, 3) = ki.k1 / w;
        j(4, 4) = ki.k_sq / (w * w) - cplx(0.0, 1.0 / cfg.sigma);
    } else {
        j(4, 4) = 1.0;
    }
    return j;
}

inline double max_abs(const SaddleVars& r) {
    double m = 0.0;
    for (const auto& x : r) m = std::max(m, std::abs(x));
    return m;
}

struct NewtonResult {
    SaddleVars z{};
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

/// Damped Newton: on residual increase the step is halved up to 8 times.
inline NewtonResult newton_solve(SaddleVars z, const SaddleSystemConfig& cfg, double tol, int max_iter) {
    NewtonResult out;
    auto r = saddle_residuals(z, cfg);
    double norm = max_abs(r);
    for (int it = 0; it < max_iter && std::isfinite(norm); ++it) {
        if (norm < tol) {
            out.converged = true;
            break;
        }
        Eigen::Matrix<cplx, 5, 1> rv;
        for (int i = 0; i < 5; ++i) rv(i) = r[i];
        const Eigen::Matrix<cplx, 5, 1> step = saddle_jacobian(z, cfg).partialPivLu().solve(rv);
        if (!step.allFinite()) break;

        double scale = 1.0;
        SaddleVars trial{};
        SaddleVars trial_r{};
        double trial_norm = std::numeric_limits<double>::infinity();
        for (int halving = 0; halving <= 8; ++halving) {
            for (int i = 0; i < 5; ++i) trial[i] = z[i] - scale * step(i);
            trial_r = saddle_residuals(trial, cfg);
            trial_norm = max_abs(trial_r);
            if (trial_norm < norm) break;
            scale *= 0.5;
        }
        z = trial;
        r = trial_r;
        norm = trial_norm;
        out.iterations = it + 1;
    }
    out.z = z;
    out.residual = norm;
    out.converged = out.converged || norm < tol;
    return out;
}

// ---------------------------------------------------------------------------
// Seeds and solving

struct SeedGridSpec {
    std::size_t n_re = 40;
    double t_lo = std::numeric_limits<double>::quiet_NaN(); ///< default -pi/omega
    double t_hi = std::numeric_limits<double>::quiet_NaN(); ///< default 2 pi/omega
    std::vector<double> im_ion{0.1, 0.5}; ///< units of 1/omega
    std::vector<double> im_re{-0.1, 0.1}; ///< units of 1/omega
    double max_excursion_cycles = 1.5;    ///< Re(t_re - t_ion) bound, matches the spectrum's excursion cap
    double max_im_ion = 2.0 * std::numbers::pi; ///< Im t_ion bound, units of 1/omega
    double max_im_re = 0.5;                      ///< |Im t_re| bound, units of 1/omega
};

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 200;
    unsigned workers = 1;
};

inline std::pair<double, double> solution_window(const SaddleSystemConfig& cfg, const SeedGridSpec& seeds = {}) {
    const double lo = std::isnan(seeds.t_lo) ? -std::numbers::pi / cfg.omega : seeds.t_lo;
    const double hi = std::isnan(seeds.t_hi) ? 2.0 * std::numbers::pi / cfg.omega : seeds.t_hi;
    return {lo, hi};
}

/// Seed from complex times: mean-field stationary momentum and eps = eps_bar.
inline SaddleVars seed_at(const SaddleSystemConfig& cfg, cplx t1, cplx t2) {
    const auto f = cfg.field(cfg.eps_bar());
    const cplx tau = t2 - t1;
    return {t1, t2, -f.potential_integral(0, t1, t2) / tau, -f.potential_integral(1, t1, t2) / tau,
            cplx(cfg.eps_bar())};
}

inline std::vector<SaddleVars> seed_grid(const SaddleSystemConfig& cfg, const SeedGridSpec& spec) {
    const auto [lo, hi] = solution_window(cfg, spec);
    std::vector<SaddleVars> seeds;
    const std::size_t n = std::max<std::size_t>(spec.n_re, 2);
    for (std::size_t a = 0; a < n; ++a) {
        const double re1 = lo + (hi - lo) * static_cast<double>(a) / static_cast<double>(n - 1);
        for (std::size_t b = 0; b < n; ++b) {
            const double re2 = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(n - 1);
            if (re2 <= re1) continue;
            for (double im1 : spec.im_ion)
                for (double im2 : spec.im_re)
                    seeds.push_back(seed_at(cfg, cplx(re1, im1 / cfg.omega), cplx(re2, im2 / cfg.omega)));
        }
    }
    return seeds;
}

inline bool solution_less(const SaddleSolution& a, const SaddleSolution& b) {
    const auto za = a.vars(), zb = b.vars();
    for (int i = 0; i < 5; ++i) {
        if (za[i].real() != zb[i].real()) return za[i].real() < zb[i].real();
        if (za[i].imag() != zb[i].imag()) return za[i].imag() < zb[i].imag();
    }
    return a.residual_norm < b.residual_norm;
}

/// Merges roots closer than @p tol in every complex coordinate, keeping the lowest residual.
inline std::vector<SaddleSolution> deduplicate(std::vector<SaddleSolution> sols, double tol = 1e-6) {
    std::sort(sols.begin(), sols.end(), solution_less);
    std::vector<SaddleSolution> out;
    for (const auto& s : sols) {
        bool merged = false;
        for (auto& kept : out) {
            const auto a = s.vars(), b = kept.vars();
            bool close = true;
            for (int i = 0; i < 5 && close; ++i) close = std::abs(a[i] - b[i]) < tol;
            if (close) {
                const int track = kept.track >= 0 ? kept.track : s.track;
                if (s.residual_norm < kept.residual_norm) kept = s;
                kept.track = track;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(s);
    }
    return out;
}

inline bool physical(const SaddleSolution& s, const SaddleSystemConfig& cfg, const SeedGridSpec& seeds) {
    const auto [lo, hi] = solution_window(cfg, seeds);
    const double period = 2.0 * std::numbers::pi / cfg.omega;
    const double excursion = (s.t_re - s.t_ion).real();
    return s.t_ion.real() >= lo && s.t_ion.real() <= hi && s.t_ion.imag() > 0.0 &&
           s.t_ion.imag() * cfg.omega <= seeds.max_im_ion && std::abs(s.t_re.imag()) * cfg.omega <= seeds.max_im_re &&
           excursion > 0.0 && excursion <= seeds.max_excursion_cycles * period;
}

/// Runs Newton from every seed and keeps converged, physical, distinct roots.
inline std::vector<SaddleSolution> solve_from(const SaddleSystemConfig& cfg, const std::vector<SaddleVars>& starts,
                                              const SeedGridSpec& seeds, const SolverOptions& opts) {
    require(opts.tol > 0.0, ErrorKind::InvalidArgument, "tol must be > 0");
    cfg.validate();
    std::vector<NewtonResult> results(starts.size());
    parallel_for(starts.size(), opts.workers,
                 [&](std::size_t i) { results[i] = newton_solve(starts[i], cfg, opts.tol, opts.max_iter); });
    std::vector<SaddleSolution> found;
    for (const auto& r : results) {
        if (!r.converged) continue;
        auto s = SaddleSolution::from(r.z);
        s.residual_norm = r.residual;
        s.harmonic_order = cfg.Omega / cfg.omega;
        if (physical(s, cfg, seeds)) found.push_back(s);
    }
    return deduplicate(std::move(found));
}

inline std::vector<SaddleSolution> solve_saddles(const SaddleSystemConfig& cfg, const SeedGridSpec& seeds = {},
                                                 const SolverOptions& opts = {}) {
    return solve_from(cfg, seed_grid(cfg, seeds), seeds, opts);
}

// ---------------------------------------------------------------------------
// Harmonic scan with continuation

/// Labels solutions at one harmonic order by excursion-time rank within each
/// ionization half-cycle.
inline void classify_families(std::vector<SaddleSolution>& sols, double omega) {
    const double half = std::numbers::pi / omega;
    std::map<long, std::vector<std::size_t>> sets;
    for (std::size_t i = 0; i < sols.size(); ++i)
        sets[static_cast<long>(std::floor(sols[i].t_ion.real() / half))].push_back(i);
    for (auto& [key, idx] : sets) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return (sols[a].t_re - sols[a].t_ion).real() < (sols[b].t_re - sols[b].t_ion).real();
        });
        static const std::vector<std::vector<Family>> labels = {
            {Family::Unclassified},
            {Family::Short, Family::Long},
            {Family::ExtraShort, Family::Short, Family::Long},
            {Family::ExtraShort, Family::Short, Family::Long, Family::ExtraLong},
        };
        for (std::size_t r = 0; r < idx.size(); ++r)
            sols[idx[r]].family = idx.size() <= labels.size() ? labels[idx.size() - 1][r] : Family::Unclassified;
    }
}

struct ScanSpec {
    double q_lo = 0.0;
    double q_hi = 0.0;
    double q_step = 1.0;
    std::size_t fresh_every = 5; ///< fresh seed grid injected every this many steps
};

/**
 * Solutions at q = q_lo, q_lo + q_step, ... <= q_hi. Roots at one order seed
 * the next; the fresh seed grid is added on the first step and every
 * fresh_every steps. Roots reached from a previous root inherit its track id.
 */
inline std::map<double, std::vector<SaddleSolution>> scan_harmonics(const SaddleSystemConfig& base,
                                                                    const ScanSpec& scan,
                                                                    const SeedGridSpec& seeds = {},
                                                                    const SolverOptions& opts = {}) {
    std::map<double, std::vector<SaddleSolution>> out;
    if (!(scan.q_hi >= scan.q_lo) || scan.q_step <= 0.0) return out;
    require(scan.q_lo > base.Ip / base.omega, ErrorKind::InvalidArgument,
            "harmonic scan must start above the ionization threshold");

    // Tracks are followed through a wider Im(t_re) band than the one reported,
    // so an orbit may leave the reported region and come back.
    SeedGridSpec follow = seeds;
    follow.max_im_re = std::max(seeds.max_im_re, seeds.max_im_ion);

    std::vector<SaddleSolution> previous;
    int next_track = 0;
    const std::size_t n_steps = static_cast<std::size_t>(std::floor((scan.q_hi - scan.q_lo) / scan.q_step + 1e-9)) + 1;
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double q = scan.q_lo + static_cast<double>(step) * scan.q_step;
        SaddleSystemConfig cfg = base;
        cfg.Omega = q * base.omega;

        std::vector<SaddleVars> starts;
        for (const auto& s : previous) starts.push_back(s.vars());
        const std::size_t n_continued = starts.size();
        if (step % std::max<std::size_t>(scan.fresh_every, 1) == 0)
            for (const auto& z : seed_grid(cfg, seeds)) starts.push_back(z);

        std::vector<NewtonResult> results(starts.size());
        parallel_for(starts.size(), opts.workers,
                     [&](std::size_t i) { results[i] = newton_solve(starts[i], cfg, opts.tol, opts.max_iter); });
        std::vector<SaddleSolution> found;
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (!results[i].converged) continue;
            auto s = SaddleSolution::from(results[i].z);
            s.residual_norm = results[i].residual;
            s.harmonic_order = q;
            s.track = i < n_continued ? previous[i].track : -1;
            if (physical(s, cfg, follow)) found.push_back(s);
        }
        auto sols = deduplicate(std::move(found));
        for (auto& s : sols)
            if (s.track < 0) s.track = next_track++;
        // Two continued roots converging onto one root would share an id; split them.
        std::map<int, int> seen;
        for (auto& s : sols)
            if (seen[s.track]++ > 0) s.track = next_track++;
        previous = sols;

        std::vector<SaddleSolution> reported;
        for (const auto& s : sols)
            if (physical(s, cfg, seeds)) reported.push_back(s);
        classify_families(reported, base.omega);
        out[q] = std::move(reported);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trajectories and forces

struct Trajectory {
    std::vector<double> times;
    std::vector<double> r_par;
    std::vector<double> r_perp;

    double endpoint_distance() const {
        return times.empty() ? 0.0 : std::hypot(r_par.back(), r_perp.back());
    }
};

/**
 * r(t) = Re int_{t_ion}^{t} (p + A) on Re(t) in [Re t_ion, Re t_re]. The
 * integrand is entire, so the straight-then-real contour reduces to the
 * antiderivative. With @p freeze_eps the mean quadrature replaces eps_fluct.
 */
inline Trajectory trajectory(const SaddleSolution& sol, const SaddleSystemConfig& cfg, std::size_t n_points,
                             bool freeze_eps = false, double tol = 1e-8) {
    require(sol.residual_norm < tol, ErrorKind::Unconverged,
            "trajectory requested for an unconverged saddle (residual " + std::to_string(sol.residual_norm) + ")");
    const auto f = cfg.field(freeze_eps ? cplx(cfg.eps_bar()) : sol.eps_fluct);
    const double t_start = sol.t_ion.real();
    const double t_end = sol.t_re.real();
    Trajectory tr;
    if (n_points == 0) return tr;
    const std::size_t n = n_points;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? t_end : t_start + (t_end - t_start) * static_cast<double>(i) / static_cast<double>(n - 1);
        const cplx dt = cplx(t) - sol.t_ion;
        const cplx rp = sol.p_par * dt + f.potential_integral(0, sol.t_ion, cplx(t));
        const cplx rs = sol.p_perp * dt + f.potential_integral(1, sol.t_ion, cplx(t));
        tr.times.push_back(t);
        tr.r_par.push_back(rp.real());
        tr.r_perp.push_back(rs.real());
    }
    return tr;
}

struct PhotonForce {
    cplx total{};
    cplx f1{}; ///< phase squeezing: eps_bar term; amplitude squeezing: total
    cplx f2{}; ///< phase squeezing: p_perp term
};

/**
 * F(t) = (i sigma / w^2) k(w t) int_{t_ion}^{t} [p_perp + A_perp_bar(tau)] k(w tau) dtau,
 * k = cos (amplitude) or sin (phase), with the mean-field A_perp_bar.
 */
inline PhotonForce photon_statistics_force(const SaddleSolution& sol, const SaddleSystemConfig& cfg, cplx t) {
    PhotonForce out;
    if (cfg.sigma == 0.0) return out;
    const double w = cfg.omega;
    const cplx pre = cplx(0.0, cfg.sigma / (w * w)) * detail::kernel(cfg.squeezed, w * t);
    const auto ki = detail::kernel_integrals(cfg.squeezed, w, sol.t_ion, t);
    const double bx = cfg.eps_perp.real(), by = cfg.eps_perp.imag();
    // int A_perp_bar k = (bx int cos k + by int sin k) / w
    const cplx own = cfg.squeezed == Quadrature::X ? bx * ki.k_sq : by * ki.k_sq;
    const cplx cross = cfg.squeezed == Quadrature::X ? by * ki.k_other : bx * ki.k_other;
    const cplx field_part = pre * (own + cross) / w;
    const cplx momentum_part = pre * sol.p_perp * ki.k1;
    out.total = field_part + momentum_part;
    if (cfg.squeezed == Quadrature::Y) {
        out.f1 = field_part;
        out.f2 = momentum_part;
    } else {
        out.f1 = out.total;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orbit cutoffs

/// The real-time path built from the saddle ends within @p radius of the ion.
inline bool recombines(const SaddleSolution& sol, const SaddleSystemConfig& cfg, double radius = 1.0) {
    return trajectory(sol, cfg, 2).endpoint_distance() < radius;
}

enum class IonizationSet { Parallel, Perp };

inline const char* to_string(IonizationSet s) { return s == IonizationSet::Parallel ? "parallel" : "perp"; }

/// Component whose mean electric field is stronger at Re(t_ion).
inline IonizationSet ionization_set(const SaddleSolution& sol, const SaddleSystemConfig& cfg) {
    const auto f = cfg.field(cplx(cfg.eps_bar()));
    const auto e = f.electric_field(cplx(sol.t_ion.real()));
    return std::abs(e[0]) >= std::abs(e[1]) ? IonizationSet::Parallel : IonizationSet::Perp;
}

struct OrbitCutoffs {
    double overall = std::numeric_limits<double>::quiet_NaN();
    double parallel_set = std::numeric_limits<double>::quiet_NaN();
    double perp_set = std::numeric_limits<double>::quiet_NaN();
};

/// Highest scanned harmonic with a recombining orbit, overall and per ionization set.
inline OrbitCutoffs orbit_cutoffs(const std::map<double, std::vector<SaddleSolution>>& scan,
                                  const SaddleSystemConfig& base, double radius = 1.0) {
    OrbitCutoffs c;
    auto raise = [](double& slot, double q) { slot = std::isnan(slot) ? q : std::max(slot, q); };
    for (const auto& [q, sols] : scan) {
        SaddleSystemConfig cfg = base;
        cfg.Omega = q * base.omega;
        for (const auto& s : sols) {
            if (!recombines(s, cfg, radius)) continue;
            raise(c.overall, q);
            raise(ionization_set(s, cfg) == IonizationSet::Parallel ? c.parallel_set : c.perp_set, q);
        }
    }
    return c;
}

} // namespace sqhhg
