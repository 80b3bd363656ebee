// Lewenstein-model dipole response of a hydrogen-like atom to one
// classical monochromatic field realization, and its spectrum.
//
// The field is treated as continuous-wave: ionization times may precede the
// start of the recorded window, so the recorded dipole is the periodic steady
// state and the record holds an integer number of optical cycles.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>

#include "driver.hpp"
#include "error.hpp"
#include "field.hpp"

namespace sqhhg {

enum class DipoleModel { HydrogenLike1s };

struct AtomSpec {
    double Ip = 0.5;
    DipoleModel dipole_model = DipoleModel::HydrogenLike1s;

    void validate() const { require(Ip > 0.0 && std::isfinite(Ip), ErrorKind::InvalidArgument, "Ip must be > 0"); }
};

enum class Window { None, Hann, Blackman };

inline const char* to_string(Window w) {
    switch (w) {
        case Window::None: return "none";
        case Window::Hann: return "hann";
        case Window::Blackman: return "blackman";
    }
    return "?";
}

struct NumericsSpec {
    double dt = 0.0;
    int n_cycles = 5;
    Window window = Window::Hann;
    double epsilon_reg = 1e-4;
    double excursion_cap = 0.0;

    /// dt = T/400 and an excursion cap of 1.5 optical cycles.
    static NumericsSpec defaults_for(double omega) {
        const double period = 2.0 * std::numbers::pi / omega;
        NumericsSpec n;
        n.dt = period / 400.0;
        n.excursion_cap = 1.5 * period;
        return n;
    }

    /// Time steps per optical period; dt must divide the period.
    std::size_t steps_per_cycle(double omega) const {
        const double period = 2.0 * std::numbers::pi / omega;
        const double m = period / dt;
        const double rounded = std::round(m);
        require(rounded >= 4.0 && std::abs(m - rounded) <= 1e-6 * rounded, ErrorKind::InvalidArgument,
                "dt must divide the optical period into an integer number (>= 4) of steps");
        return static_cast<std::size_t>(rounded);
    }

    void validate(double omega) const {
        require(dt > 0.0 && std::isfinite(dt), ErrorKind::InvalidArgument, "dt must be > 0");
        require(n_cycles >= 1, ErrorKind::InvalidArgument, "n_cycles must be >= 1");
        require(epsilon_reg > 0.0, ErrorKind::InvalidArgument, "epsilon_reg must be > 0");
        require(excursion_cap > 0.0, ErrorKind::InvalidArgument, "excursion_cap must be > 0");
        (void)steps_per_cycle(omega);
    }
};

struct DipoleTimeSeries {
    std::vector<double> times;
    std::vector<cplx> d_par;
    std::vector<cplx> d_perp;
};

struct DipoleSpectrum {
    std::vector<double> omegas;
    std::vector<double> harmonic_orders;
    std::vector<cplx> d_par;
    std::vector<cplx> d_perp;
};

// ---------------------------------------------------------------------------
// Building blocks

inline double hydrogen_dipole_constant(double ip) {
    return std::pow(2.0, 3.5) * std::pow(2.0 * ip, 1.25) / std::numbers::pi;
}

/// Hydrogenic 1s transition dipole d(p) = i N p / (p^2 + 2 Ip)^3.
template <typename T>
Pair<promote_t<cplx, T>> transition_dipole(const Pair<T>& p, double ip) {
    using R = promote_t<cplx, T>;
    const auto denom = p[0] * p[0] + p[1] * p[1] + 2.0 * ip;
    const auto d3 = denom * denom * denom;
    const R scale = cplx(0.0, hydrogen_dipole_constant(ip)) / R(d3);
    return {scale * R(p[0]), scale * R(p[1])};
}

/// p_st = -(1/(t2 - t1)) int_{t1}^{t2} A.
template <typename Time>
Pair<promote_t<double, Time>> stationary_momentum(const FieldRealization& r, Time t1, Time t2) {
    using R = promote_t<double, Time>;
    const Time tau = t2 - t1;
    require(std::abs(tau) >= 1e-12, ErrorKind::DegenerateExcursion, "|t2 - t1| < 1e-12");
    const auto f = r.field();
    return {R(-f.potential_integral(0, t1, t2) / tau), R(-f.potential_integral(1, t1, t2) / tau)};
}

/// S = 1/2 int_{t1}^{t2} (p + A)^2 + Ip (t2 - t1), using the bilinear square (no conjugation).
template <typename P, typename Time>
auto semiclassical_action(const FieldRealization& r, const Pair<P>& p, Time t1, Time t2, double ip) {
    const auto f = r.field();
    const Time tau = t2 - t1;
    auto total = ip * tau;
    using R = decltype(p[0] * f.potential_integral(0, t1, t2) + total);
    R s = R(total);
    for (int mu = 0; mu < 2; ++mu)
        s += 0.5 * (p[mu] * p[mu] * tau + 2.0 * p[mu] * f.potential_integral(mu, t1, t2) +
                    f.potential_square_integral(mu, t1, t2));
    return s;
}

inline std::vector<double> window_weights(Window w, std::size_t n) {
    std::vector<double> out(n, 1.0);
    if (w == Window::None || n == 0) return out;
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = two_pi * static_cast<double>(k) / static_cast<double>(n);
        out[k] = w == Window::Hann ? 0.5 - 0.5 * std::cos(x) : 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dipole response

/**
 * d(t2) = i sum_{t1 < t2} dt C(tau) d*(p_st + A(t2)) exp(-i S) E(t1).d(p_st + A(t1)) + c.c.
 * with C(tau) = [pi / (eps_reg + i tau / 2)]^{3/2}, tau = t2 - t1 <= excursion_cap.
 */
inline DipoleTimeSeries dipole_response(const FieldRealization& r, const AtomSpec& atom, const NumericsSpec& num) {
    require(r.omega > 0.0, ErrorKind::InvalidArgument, "omega must be > 0");
    atom.validate();
    num.validate(r.omega);

    const std::size_t per_cycle = num.steps_per_cycle(r.omega);
    const std::size_t n = per_cycle * static_cast<std::size_t>(num.n_cycles);
    const double dt = 2.0 * std::numbers::pi / r.omega / static_cast<double>(per_cycle);
    const std::size_t k_max = static_cast<std::size_t>(std::floor(num.excursion_cap / dt + 1e-9));
    const double ip = atom.Ip;
    const auto f = r.field();

    // Field tables on t_j = (j - k_max) dt, j = 0 .. k_max + n - 1.
    const std::size_t len = k_max + n;
    std::vector<Pair<double>> a(len), e(len), big_f(len);
    std::vector<double> big_g(len);
    for (std::size_t j = 0; j < len; ++j) {
        const double t = (static_cast<double>(j) - static_cast<double>(k_max)) * dt;
        a[j] = f.vector_potential(t);
        e[j] = f.electric_field(t);
        big_f[j] = {f.potential_antiderivative(0, t), f.potential_antiderivative(1, t)};
        big_g[j] = f.potential_square_antiderivative(0, t) + f.potential_square_antiderivative(1, t);
    }

    std::vector<cplx> prefactor(k_max + 1);
    for (std::size_t k = 1; k <= k_max; ++k) {
        const double tau = static_cast<double>(k) * dt;
        prefactor[k] = std::pow(std::numbers::pi / cplx(num.epsilon_reg, 0.5 * tau), 1.5);
    }
    if (k_max >= 1) prefactor[k_max] *= 0.5;

    const double nd = hydrogen_dipole_constant(ip);
    const double norm2 = nd * nd;

    DipoleTimeSeries out;
    out.times.resize(n);
    out.d_par.resize(n);
    out.d_perp.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j2 = i + k_max;
        cplx acc_par = 0.0, acc_perp = 0.0;
        for (std::size_t k = 1; k <= k_max; ++k) {
            const std::size_t j1 = j2 - k;
            const double tau = static_cast<double>(k) * dt;
            const double df0 = big_f[j2][0] - big_f[j1][0];
            const double df1 = big_f[j2][1] - big_f[j1][1];
            const double p0 = -df0 / tau, p1 = -df1 / tau;
            const double action = 0.5 * (big_g[j2] - big_g[j1] - (df0 * df0 + df1 * df1) / tau) + ip * tau;

            const double v20 = p0 + a[j2][0], v21 = p1 + a[j2][1];
            const double v10 = p0 + a[j1][0], v11 = p1 + a[j1][1];
            const double den2 = v20 * v20 + v21 * v21 + 2.0 * ip;
            const double den1 = v10 * v10 + v11 * v11 + 2.0 * ip;
            const double drive = (e[j1][0] * v10 + e[j1][1] * v11) / (den1 * den1 * den1);
            const double recomb = 1.0 / (den2 * den2 * den2);

            const cplx amp = prefactor[k] * std::polar(drive * recomb, -action);
            acc_par += amp * v20;
            acc_perp += amp * v21;
        }
        // i * [(-i N v2/D2^3)(i N E.v1/D1^3)] = i N^2 (...) ; add c.c.
        const cplx scale(0.0, dt * norm2);
        out.times[i] = static_cast<double>(i) * dt;
        out.d_par[i] = 2.0 * (scale * acc_par).real();
        out.d_perp[i] = 2.0 * (scale * acc_perp).real();
        if (!std::isfinite(out.d_par[i].real()) || !std::isfinite(out.d_perp[i].real()))
            throw Error(ErrorKind::NumericalFault, "non-finite dipole at t = " + std::to_string(out.times[i]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spectrum

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// X_k = sum_n x_n exp(+2 pi i k n / N).
inline std::vector<cplx> dft_positive_exponent(const std::vector<cplx>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<cplx> in(x), out(x.size());
    auto* pin = reinterpret_cast<fftw_complex*>(in.data());
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, pin, pout, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    require(plan != nullptr, ErrorKind::NumericalFault, "FFT planning failed");
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}
} // namespace detail

/**
 * d(w_k) = dt sum_n w_n x_n exp(i w_k t_n) for w_k = 2 pi k / (N dt), k = 0..N/2.
 * @p omega0 only sets the harmonic-order metadata.
 */
inline DipoleSpectrum dipole_spectrum(const DipoleTimeSeries& series, Window window, double omega0) {
    const std::size_t n = series.times.size();
    require(n >= 2 && series.d_par.size() == n && series.d_perp.size() == n, ErrorKind::InvalidArgument,
            "time series needs >= 2 samples of equal length");
    require(omega0 > 0.0, ErrorKind::InvalidArgument, "omega0 must be > 0");
    const double dt = series.times[1] - series.times[0];
    require(dt > 0.0, ErrorKind::NonUniformGrid, "times must increase");
    for (std::size_t i = 1; i < n; ++i) {
        const double step = series.times[i] - series.times[i - 1];
        if (std::abs(step - dt) > 1e-9 * dt)
            throw Error(ErrorKind::NonUniformGrid, "time step " + std::to_string(i) + " differs from dt");
    }

    const auto w = window_weights(window, n);
    std::vector<cplx> xp(n), xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xp[i] = w[i] * series.d_par[i];
        xs[i] = w[i] * series.d_perp[i];
    }
    const auto fp = detail::dft_positive_exponent(xp);
    const auto fs = detail::dft_positive_exponent(xs);

    // exp(i w_k t_0) accounts for a record that does not start at t = 0.
    const double t0 = series.times.front();
    const double d_omega = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    DipoleSpectrum out;
    const std::size_t half = n / 2 + 1;
    out.omegas.resize(half);
    out.harmonic_orders.resize(half);
    out.d_par.resize(half);
    out.d_perp.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
        const double wk = d_omega * static_cast<double>(k);
        const cplx shift = t0 == 0.0 ? cplx(1.0) : std::polar(1.0, wk * t0);
        out.omegas[k] = wk;
        out.harmonic_orders[k] = wk / omega0;
        out.d_par[k] = dt * shift * fp[k];
        out.d_perp[k] = dt * shift * fs[k];
    }
    return out;
}

/// dipole_response followed by dipole_spectrum with the configured window.
inline DipoleSpectrum realization_spectrum(const FieldRealization& r, const AtomSpec& atom, const NumericsSpec& num) {
    return dipole_spectrum(dipole_response(r, atom, num), num.window, r.omega);
}

} // namespace sqhhg
