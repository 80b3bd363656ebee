#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sqhhg/driver.hpp"

using namespace sqhhg;

namespace {

DriverConfig squeezed(double i_squ, Quadrature q) {
    return {PolarizationState::coherent({0.053, 0.0}), PolarizationState::squeezed_vacuum({0.0, 0.053}, i_squ, q),
            0.057};
}

} // namespace

TEST(PolarizationState, RejectsNegativeIntensity) {
    EXPECT_THROW(PolarizationState::squeezed_vacuum({0.0, 0.053}, -1e-6, Quadrature::X), Error);
    EXPECT_THROW(PolarizationState::thermal({0.0, 0.053}, -1e-6), Error);
}

TEST(DriverConfig, CircularFlag) {
    EXPECT_TRUE(squeezed(0.0, Quadrature::X).is_circular());
    DriverConfig lin{PolarizationState::coherent({0.053, 0.0}), PolarizationState::coherent({0.0, 0.0}), 0.057};
    EXPECT_FALSE(lin.is_circular());
    DriverConfig off = squeezed(0.0, Quadrature::X);
    off.perp.mean = cplx(0.0, 0.053 * (1.0 + 1e-9));
    EXPECT_FALSE(off.is_circular());
}

TEST(MarginalWeight, PeakValue) {
    const auto s = PolarizationState::squeezed_vacuum({0.0, 0.053}, 5e-5, Quadrature::X);
    EXPECT_NEAR(marginal_weight(s, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi * 2e-4), 1e-9);
}

TEST(MarginalWeight, Normalized) {
    const auto s = PolarizationState::squeezed_vacuum({0.0, 0.053}, 5e-5, Quadrature::Y);
    const double sd = std::sqrt(s.weight_variance());
    const double total = oracle::real_integral([&](double y) { return marginal_weight(s, y); }, 0.053 - 8 * sd, 0.053 + 8 * sd);
    EXPECT_NEAR(total, 1.0, 1e-8);

    const auto th = PolarizationState::thermal({0.0, 0.053}, 5e-5);
    const double sth = std::sqrt(th.weight_variance());
    const double total2 = oracle::real_integral(
        [&](double x) {
            return oracle::real_integral([&](double y) { return marginal_weight(th, cplx(x, y)); }, 0.053 - 8 * sth,
                                         0.053 + 8 * sth);
        },
        -8 * sth, 8 * sth);
    EXPECT_NEAR(total2, 1.0, 1e-8);
}

TEST(MarginalWeight, ThermalConcentratesAsIntensityVanishes) {
    const double i_th = 1e-12;
    const auto th = PolarizationState::thermal({0.0, 0.053}, i_th);
    const double r = 4.0 * std::sqrt(2.0 * i_th);
    // mass inside the disc of radius r around the mean, in polar coordinates
    const double mass = oracle::real_integral(
        [&](double rho) { return 2.0 * std::numbers::pi * rho * marginal_weight(th, cplx(0.0, 0.053) + cplx(rho, 0.0)); },
        0.0, r);
    EXPECT_NEAR(mass, 1.0 - std::exp(-r * r / (4.0 * i_th)), 1e-9);
    EXPECT_GT(mass, 0.9996);
    EXPECT_LT(r, 1e-5);
}

TEST(MarginalWeight, CoherentIsDegenerate) {
    EXPECT_THROW(marginal_weight(PolarizationState::coherent({0.053, 0}), 0.0), Error);
    EXPECT_THROW(marginal_weight(PolarizationState::squeezed_vacuum({0, 0.053}, 0.0, Quadrature::X), 0.0), Error);
}

TEST(AmplitudeGrid, SqueezedGridProperties) {
    const auto s = PolarizationState::squeezed_vacuum({0.0, 0.053}, 5e-5, Quadrature::X);
    const auto g = amplitude_grid(s, 241, 4.0);
    ASSERT_EQ(g.size(), 241u);
    double sum = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        EXPECT_GE(g[j].weight, 0.0);
        sum += g[j].weight;
        const auto& m = g[g.size() - 1 - j];
        EXPECT_NEAR(g[j].eps.real(), -m.eps.real(), 1e-15);
        EXPECT_EQ(g[j].eps.imag(), 0.053);
        EXPECT_NEAR(g[j].weight, m.weight, 1e-15);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(g.back().eps.real(), 4.0 * std::sqrt(2e-4), 1e-15);
}

TEST(AmplitudeGrid, ThermalSquareGrid) {
    const auto g = amplitude_grid(PolarizationState::thermal({0.0, 0.053}, 5e-5), 76, 4.0);
    EXPECT_EQ(g.size(), 76u * 76u);
    double sum = 0.0;
    for (const auto& n : g) sum += n.weight;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(AmplitudeGrid, CoherentSingleNode) {
    const auto g = amplitude_grid(PolarizationState::coherent({0.0, 0.053}), 241);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0].weight, 1.0);
    EXPECT_EQ(g[0].eps, cplx(0.0, 0.053));
}

TEST(Ellipticity, CoherentCircular) {
    const auto st = ellipticity_stats(squeezed(0.0, Quadrature::X));
    EXPECT_NEAR(st.mean_ellipticity, 1.0, 1e-15);
    EXPECT_EQ(st.delta_ellipticity, 0.0);
}

TEST(Ellipticity, ClosedFormValue) {
    const auto st = ellipticity_stats(squeezed(5e-5, Quadrature::X));
    const double e2 = 0.053 * 0.053;
    EXPECT_NEAR(st.mean_ellipticity, 2 * e2 / (2 * e2 + 4 * 5e-5), 1e-14);
    EXPECT_NEAR(st.mean_ellipticity, 0.9656, 1e-4);
}

TEST(Ellipticity, MatchesClassicalMonteCarlo) {
    for (auto q : {Quadrature::X, Quadrature::Y}) {
        for (double i : {1e-6, 1e-5, 5e-5}) {
            const auto cfg = squeezed(i, q);
            const auto st = ellipticity_stats(cfg);
            const auto m = oracle::classical_stokes(cfg, 2'000'000, 99);
            EXPECT_NEAR(m.s0 / st.S0, 1.0, 1e-3);
            EXPECT_NEAR(m.s3 / st.S3, 1.0, 1e-3);
            const auto mc = ellipticity_from_moments(m.s0, m.s3, m.var_s0, m.var_s3);
            EXPECT_NEAR(mc.mean_ellipticity / st.mean_ellipticity, 1.0, 1e-2);
            EXPECT_NEAR(mc.delta_ellipticity / st.delta_ellipticity, 1.0, 1e-2) << to_string(q) << " " << i;
        }
    }
}

TEST(Ellipticity, LibraryMonteCarloExtrapolation) {
    for (auto q : {Quadrature::X, Quadrature::Y}) {
        const auto cfg = squeezed(2.5e-5, q);
        std::mt19937_64 rng(5);
        const auto mc = monte_carlo_ellipticity(cfg, 1'000'000, 1e-7, rng);
        const auto st = ellipticity_stats(cfg);
        EXPECT_NEAR(mc.mean_ellipticity / st.mean_ellipticity, 1.0, 1e-2);
        EXPECT_NEAR(mc.delta_ellipticity / st.delta_ellipticity, 1.0, 1e-2);
    }
}

TEST(Ellipticity, MonotoneInIntensity) {
    for (auto q : {Quadrature::X, Quadrature::Y}) {
        double prev_e = 2.0, prev_d = -1.0;
        for (int k = 0; k < 20; ++k) {
            const double i = 5e-5 * k / 19.0;
            const auto st = ellipticity_stats(squeezed(i, q));
            EXPECT_LE(st.mean_ellipticity, 1.0 + 1e-12);
            EXPECT_GE(st.delta_ellipticity, 0.0);
            EXPECT_LT(st.mean_ellipticity, prev_e);
            EXPECT_GT(st.delta_ellipticity, prev_d);
            prev_e = st.mean_ellipticity;
            prev_d = st.delta_ellipticity;
        }
    }
}

TEST(Ellipticity, ThermalUnsupported) {
    DriverConfig cfg = squeezed(1e-5, Quadrature::X);
    cfg.perp = PolarizationState::thermal({0.0, 0.053}, 1e-5);
    try {
        ellipticity_stats(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsupportedState);
    }
}

TEST(Lissajous, EmptySample) {
    std::mt19937_64 rng(1);
    const auto s = sample_lissajous(squeezed(1e-5, Quadrature::Y), 0, {0.0, 1.0}, default_display_eps, rng);
    EXPECT_TRUE(s.samples.empty());
}

TEST(Lissajous, SampleMeanApproachesMeanField) {
    const auto cfg = squeezed(1e-5, Quadrature::Y);
    const std::size_t n = 20000;
    std::vector<double> times;
    for (int k = 0; k < 8; ++k) times.push_back(k * 2.0 * std::numbers::pi / cfg.omega / 8.0);
    std::mt19937_64 rng(3);
    const auto s = sample_lissajous(cfg, n, times, default_display_eps, rng);
    const FieldRealization mean{cfg.parallel.mean, cfg.perp.mean, cfg.omega};
    for (std::size_t it = 0; it < times.size(); ++it) {
        const auto e = electric_field(mean, times[it]);
        for (int mu = 0; mu < 2; ++mu) {
            double m = 0, q = 0;
            for (std::size_t k = 0; k < n; ++k) {
                const double v = s.at(it, k)[mu];
                m += v;
                q += v * v;
            }
            m /= n;
            const double sd = std::sqrt(q / n - m * m);
            EXPECT_LT(std::abs(m - e[mu].real()), 3.0 * sd / std::sqrt(static_cast<double>(n)) + 1e-15);
        }
    }
}

TEST(Lissajous, CoherentAnnulusHasUniformAngularDensity) {
    DriverConfig cfg = squeezed(0.0, Quadrature::X);
    cfg.perp = PolarizationState::coherent({0.0, 0.053});
    std::vector<double> times;
    const std::size_t nt = 400;
    for (std::size_t k = 0; k < nt; ++k) times.push_back(k * 2.0 * std::numbers::pi / cfg.omega / nt);
    std::mt19937_64 rng(4);
    const auto s = sample_lissajous(cfg, 200, times, default_display_eps, rng);
    std::vector<double> sectors(8, 0.0);
    for (const auto& e : s.samples) {
        const double a = std::atan2(e[1], e[0]) + std::numbers::pi;
        sectors[std::min<std::size_t>(7, static_cast<std::size_t>(a / (2.0 * std::numbers::pi) * 8.0))] += 1.0;
    }
    const double expect = static_cast<double>(s.samples.size()) / 8.0;
    for (double c : sectors) EXPECT_NEAR(c / expect, 1.0, 0.03);
}

TEST(Lissajous, HistogramCountsInRangeSamples) {
    const auto cfg = squeezed(5e-5, Quadrature::X);
    std::mt19937_64 rng(8);
    const auto s = sample_lissajous(cfg, 500, {0.0, 10.0, 20.0}, default_display_eps, rng);
    const auto h = lissajous_histogram(s, 50, 1.0);
    std::size_t total = 0;
    for (auto c : h.counts) total += c;
    EXPECT_EQ(total, s.samples.size());
}
