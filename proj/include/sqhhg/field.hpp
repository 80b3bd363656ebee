// Closed forms for a monochromatic two-component field.
//
// Each polarization component carries two quadrature amplitudes (cos and sin
// coefficients) and the vector potential is
//
//    A(t) = (eps_x / w) cos(w t) + (eps_y / w) sin(w t),    E(t) = -dA/dt.
//
// Everything is templated on the coefficient and time types so the same code
// serves real-time SFA sums (double) and complex-time saddle equations
// (std::complex<double>), where the fluctuating quadrature is itself complex.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <type_traits>

namespace sqhhg {

using cplx = std::complex<double>;

template <typename T>
using Pair = std::array<T, 2>; // {parallel, perpendicular}

template <typename A, typename B>
using promote_t = decltype(std::declval<A>() * std::declval<B>());

/// One polarization component: E = x sin(wt) - y cos(wt).
template <typename Coef>
struct Quadratures {
    Coef x{};
    Coef y{};
};

template <typename Coef>
struct MonochromaticField {
    Quadratures<Coef> par;
    Quadratures<Coef> perp;
    double omega = 1.0;

    const Quadratures<Coef>& component(int mu) const { return mu == 0 ? par : perp; }

    template <typename Time>
    auto potential(int mu, Time t) const {
        const auto& q = component(mu);
        using std::cos;
        using std::sin;
        return (q.x * cos(omega * t) + q.y * sin(omega * t)) / omega;
    }

    template <typename Time>
    auto field(int mu, Time t) const {
        const auto& q = component(mu);
        using std::cos;
        using std::sin;
        return q.x * sin(omega * t) - q.y * cos(omega * t);
    }

    template <typename Time>
    auto vector_potential(Time t) const {
        using R = promote_t<Coef, Time>;
        return Pair<R>{R(potential(0, t)), R(potential(1, t))};
    }

    template <typename Time>
    auto electric_field(Time t) const {
        using R = promote_t<Coef, Time>;
        return Pair<R>{R(field(0, t)), R(field(1, t))};
    }

    /// Antiderivative of A_mu (zero at t = 0 for the sin part).
    template <typename Time>
    auto potential_antiderivative(int mu, Time t) const {
        const auto& q = component(mu);
        using std::cos;
        using std::sin;
        const double w2 = omega * omega;
        return (q.x * sin(omega * t) - q.y * cos(omega * t)) / w2;
    }

    /// Integral of A_mu over [t1, t2] (any contour; the integrand is entire).
    template <typename Time>
    auto potential_integral(int mu, Time t1, Time t2) const {
        return potential_antiderivative(mu, t2) - potential_antiderivative(mu, t1);
    }

    /// Antiderivative of A_mu^2.
    template <typename Time>
    auto potential_square_antiderivative(int mu, Time t) const {
        const auto& q = component(mu);
        using std::cos;
        using std::sin;
        const double w = omega;
        const auto s2 = sin(2.0 * w * t);
        const auto c2 = cos(2.0 * w * t);
        const auto cc = t / 2.0 + s2 / (4.0 * w); // int cos^2
        const auto ss = t / 2.0 - s2 / (4.0 * w); // int sin^2
        const auto cs = -c2 / (4.0 * w);           // int sin cos
        return (q.x * q.x * cc + 2.0 * q.x * q.y * cs + q.y * q.y * ss) / (w * w);
    }

    template <typename Time>
    auto potential_square_integral(int mu, Time t1, Time t2) const {
        return potential_square_antiderivative(mu, t2) - potential_square_antiderivative(mu, t1);
    }
};

/// Integrals of cos(wt), sin(wt), cos^2, sin^2, sin*cos over [t1, t2].
template <typename Time>
struct TrigIntegrals {
    Time c, s, cc, ss, cs;
};

template <typename Time>
TrigIntegrals<Time> trig_integrals(double omega, Time t1, Time t2) {
    using std::cos;
    using std::sin;
    const double w = omega;
    auto sin_int = [&](Time t) { return -cos(w * t) / w; };
    auto cos_int = [&](Time t) { return sin(w * t) / w; };
    auto cc_int = [&](Time t) { return t / 2.0 + sin(2.0 * w * t) / (4.0 * w); };
    auto ss_int = [&](Time t) { return t / 2.0 - sin(2.0 * w * t) / (4.0 * w); };
    auto cs_int = [&](Time t) { return -cos(2.0 * w * t) / (4.0 * w); };
    return {cos_int(t2) - cos_int(t1), sin_int(t2) - sin_int(t1), cc_int(t2) - cc_int(t1),
            ss_int(t2) - ss_int(t1), cs_int(t2) - cs_int(t1)};
}

} // namespace sqhhg
