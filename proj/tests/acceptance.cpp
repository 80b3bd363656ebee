// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "sqhhg/orbits.hpp"
#include "sqhhg/spectrum.hpp"

using namespace sqhhg;

namespace {

constexpr double kOmega = 0.057;
constexpr double kEps = 0.053;
constexpr double kIp = 0.5;

struct Context {
    std::unique_ptr<SpectrumCache> cache;
    unsigned workers = 1;
    NumericsSpec num = NumericsSpec::defaults_for(kOmega);

    ComputeOptions opts() const { return {workers, cache.get()}; }

    RealizationSet realizations(const DriverConfig& d, std::size_t n_points) const {
        return compute_realizations(d, AtomSpec{kIp}, num, {n_points, 4.0}, opts());
    }
    SpectrumResult spectrum(const DriverConfig& d, std::size_t n_points = 241) const {
        return assemble_spectrum(realizations(d, n_points), kOmega, kIp);
    }
};

DriverConfig linear() {
    return {PolarizationState::coherent({kEps, 0.0}), PolarizationState::coherent({0.0, 0.0}), kOmega};
}

DriverConfig circular() {
    return {PolarizationState::coherent({kEps, 0.0}), PolarizationState::coherent({0.0, kEps}), kOmega};
}

DriverConfig squeezed(double i_squ, Quadrature q) {
    return {PolarizationState::coherent({kEps, 0.0}), PolarizationState::squeezed_vacuum({0.0, kEps}, i_squ, q), kOmega};
}

DriverConfig thermal(double i_th) {
    return {PolarizationState::coherent({kEps, 0.0}), PolarizationState::thermal({0.0, kEps}, i_th), kOmega};
}

std::string list(const std::vector<int>& v) {
    std::ostringstream s;
    s << "[";
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
    s << "]";
    return s.str();
}

std::string num(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("C%-2d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
}

double envelope_at(const std::vector<EnvelopePoint>& env, int q) {
    for (const auto& p : env)
        if (p.order == q) return p.value;
    return 0.0;
}

void cutoff_law(const Context& ctx) {
    const auto c = cutoff_detect(ctx.spectrum(linear(), 1));
    const bool pass = !c.empty() && within(c.back(), 21.0, 2.0);
    report(1, "linear cutoff 21 +- 2", pass, "cutoffs " + list(c));
}

void circular_suppression(const Context& ctx) {
    const auto lin = odd_harmonic_envelope(ctx.spectrum(linear(), 1));
    const auto circ = odd_harmonic_envelope(ctx.spectrum(circular(), 1));
    double worst = std::numeric_limits<double>::infinity();
    for (int q = 11; q <= 21; q += 2) {
        const double a = envelope_at(lin, q), b = envelope_at(circ, q);
        const double gap = b > 0.0 ? std::log10(a / b) : std::numeric_limits<double>::infinity();
        worst = std::min(worst, gap);
    }
    report(2, "circular suppression >= 6 decades at odd q 11..21", worst >= 6.0, "smallest gap " + num(worst) + " decades");
}

void amplitude_spectrum(const Context& ctx) {
    std::ostringstream d;
    int prev = -1;
    bool monotone = true;
    std::vector<int> top;
    for (double i : {5e-6, 1e-5, 5e-5}) {
        top = cutoff_detect(ctx.spectrum(squeezed(i, Quadrature::X)));
        d << "I=" << num(i) << " " << list(top) << "; ";
        const int c = top.empty() ? -1 : top.back();
        monotone = monotone && c >= prev && c >= 0;
        prev = c;
    }
    const bool single = top.size() == 1 && within(top[0], 40.0, 3.0);
    report(3, "amplitude squeezing single plateau 40 +- 3, non-decreasing", single && monotone,
           d.str() + (monotone ? "non-decreasing" : "not non-decreasing"));
}

void phase_spectrum(const Context& ctx) {
    std::ostringstream d;
    std::vector<int> firsts, top;
    for (double i : {5e-6, 1e-5, 5e-5}) {
        top = cutoff_detect(ctx.spectrum(squeezed(i, Quadrature::Y)));
        d << "I=" << num(i) << " " << list(top) << "; ";
        if (!top.empty()) firsts.push_back(top.front());
    }
    const bool two = top.size() == 2 && top[0] >= 18 && top[0] <= 27 && within(top[1], 60.0, 5.0);
    const bool stable = firsts.size() == 3 && *std::max_element(firsts.begin(), firsts.end()) -
                                                      *std::min_element(firsts.begin(), firsts.end()) < 3;
    report(4, "phase squeezing cutoffs [18..27] and 60 +- 5, first stable < 3", two && stable, d.str());
}

void coherent_limit(const Context& ctx) {
    const auto sq = ctx.spectrum(squeezed(5e-11, Quadrature::X));
    const auto coh = ctx.spectrum(circular(), 1);
    double worst = 0.0, at = 0.0;
    std::size_t bad = 0;
    for (std::size_t k = 0; k < sq.S.size(); ++k) {
        const double q = sq.harmonic_orders[k];
        if (q <= 0.0) continue;
        double rel;
        if (sq.S[k] <= 0.0 || coh.S[k] <= 0.0) rel = sq.S[k] == coh.S[k] ? 0.0 : std::numeric_limits<double>::infinity();
        else {
            const double ref = std::log10(coh.S[k]);
            rel = std::abs(std::log10(sq.S[k]) - ref) / std::max(std::abs(ref), 1.0);
        }
        if (rel > 0.01) ++bad;
        if (rel > worst) {
            worst = rel;
            at = q;
        }
    }
    report(5, "I=5e-11 matches coherent circular within 1% on log10 S", bad == 0,
           "worst " + num(100.0 * worst) + "% at q=" + num(at) + ", " + std::to_string(bad) + " of " +
               std::to_string(sq.S.size()) + " samples above 1%");
}

void thermal_comparison(const Context& ctx) {
    const auto amp = ctx.spectrum(squeezed(2.5e-5, Quadrature::X));
    const auto th = ctx.spectrum(thermal(5e-5), 76);
    const auto ca = cutoff_detect(amp), ct = cutoff_detect(th);
    const auto ea = odd_harmonic_envelope(amp), et = odd_harmonic_envelope(th);
    double worst = 0.0, signed_worst = 0.0;
    int worst_q = 0;
    const int plateau_end = ca.empty() ? 0 : ca.front();
    for (const auto& p : ea) {
        if (p.order < amp.threshold_order || p.order > plateau_end) continue;
        const double t = envelope_at(et, p.order);
        const double r = t > 0.0 && p.value > 0.0 ? std::log10(t / p.value) : INFINITY;
        if (std::abs(r) > worst) {
            worst = std::abs(r);
            signed_worst = r;
            worst_q = p.order;
        }
    }
    const bool yield = !ca.empty() && worst <= 1.0;
    const bool cut = !ca.empty() && !ct.empty() && ct.back() >= ca.back();
    report(6, "thermal I_th=5e-5 within 1 decade of amplitude I_squ=2.5e-5, cutoff >=", yield && cut,
           "log10(thermal/amplitude) " + num(signed_worst) + " at q=" + std::to_string(worst_q) + "; cutoffs thermal " + list(ct) + " amplitude " + list(ca));
}

struct OrbitCase {
    Quadrature quad;
    double intensity;
    std::vector<double> expect;
    double tol;
};

void orbit_cutoff_agreement(unsigned workers) {
    const std::vector<OrbitCase> cases = {{Quadrature::X, 5e-5, {40.0}, 3.0},
                                          {Quadrature::X, 5e-6, {33.0}, 3.0},
                                          {Quadrature::Y, 5e-6, {27.0, 39.0}, 3.0},
                                          {Quadrature::Y, 5e-5, {25.0, 60.0}, 4.0}};
    SolverOptions opts;
    opts.workers = workers;
    bool pass = true;
    std::ostringstream d;
    for (const auto& c : cases) {
        const auto base = saddle_config(squeezed(c.intensity, c.quad), kIp, 12.0);
        const auto scan = scan_harmonics(base, {12.0, 80.0, 1.0, 5}, {}, opts);
        const auto cut = orbit_cutoffs(scan, base);
        std::vector<double> got;
        if (c.expect.size() == 1) {
            got = {cut.overall};
        } else {
            got = {cut.parallel_set, cut.perp_set};
            std::sort(got.begin(), got.end());
        }
        bool ok = got.size() == c.expect.size();
        for (std::size_t i = 0; ok && i < got.size(); ++i) ok = !std::isnan(got[i]) && within(got[i], c.expect[i], c.tol);
        pass = pass && ok;
        d << to_string(c.quad) << " " << num(c.intensity) << ":";
        for (double g : got) d << " " << num(g);
        d << (ok ? " ok; " : " off; ");
    }
    report(7, "orbit recombination cutoffs match spectra", pass, d.str());
}

void recombination(unsigned workers) {
    SolverOptions opts;
    opts.workers = workers;
    std::size_t total = 0, recomb = 0, frozen = 0;
    for (auto quad : {Quadrature::X, Quadrature::Y})
        for (double i : {5e-6, 5e-5})
            for (double q : {31.0, 33.0}) {
                const auto cfg = saddle_config(squeezed(i, quad), kIp, q);
                for (const auto& s : solve_saddles(cfg, {}, opts)) {
                    ++total;
                    if (trajectory(s, cfg, 2).endpoint_distance() < 1.0) ++recomb;
                    if (trajectory(s, cfg, 2, true).endpoint_distance() > 10.0) ++frozen;
                }
            }
    report(8, "every solution at q=31,33 recombines, frozen eps misses by > 10", total > 0 && recomb == total && frozen == total,
           std::to_string(recomb) + " of " + std::to_string(total) + " recombine, " + std::to_string(frozen) + " of " +
               std::to_string(total) + " miss with frozen eps");
}

void ellipticity_suite() {
    bool pass = true;
    std::ostringstream d;
    for (auto q : {Quadrature::X, Quadrature::Y}) {
        const auto st = ellipticity_stats(squeezed(0.0, q));
        if (std::abs(st.mean_ellipticity - 1.0) > 1e-12 || st.delta_ellipticity != 0.0) {
            pass = false;
            d << "I=0 " << to_string(q) << " |E|=" << num(st.mean_ellipticity) << "; ";
        }
    }
    bool monotone = true, ordered = true;
    double worst_order = INFINITY;
    for (auto q : {Quadrature::X, Quadrature::Y}) {
        double pe = 2.0, pd = -1.0;
        for (int k = 0; k <= 50; ++k) {
            const auto st = ellipticity_stats(squeezed(5e-5 * k / 50.0, q));
            monotone = monotone && st.mean_ellipticity < pe && st.delta_ellipticity > pd;
            pe = st.mean_ellipticity;
            pd = st.delta_ellipticity;
        }
    }
    for (int k = 1; k <= 50; ++k) {
        const double i = 5e-5 * k / 50.0;
        const double dx = ellipticity_stats(squeezed(i, Quadrature::X)).delta_ellipticity;
        const double dy = ellipticity_stats(squeezed(i, Quadrature::Y)).delta_ellipticity;
        ordered = ordered && dx > dy;
        worst_order = std::min(worst_order, dx - dy);
    }
    double worst_mc = 0.0;
    for (auto q : {Quadrature::X, Quadrature::Y})
        for (double i : {1e-6, 1e-5, 5e-5}) {
            const auto cfg = squeezed(i, q);
            const auto st = ellipticity_stats(cfg);
            const auto m = oracle::classical_stokes(cfg, 2'000'000, 1234);
            const auto mc = ellipticity_from_moments(m.s0, m.s3, m.var_s0, m.var_s3);
            worst_mc = std::max({worst_mc, std::abs(mc.mean_ellipticity / st.mean_ellipticity - 1.0),
                                 std::abs(mc.delta_ellipticity / st.delta_ellipticity - 1.0)});
        }
    const double at5 = ellipticity_stats(squeezed(5e-5, Quadrature::X)).delta_ellipticity;
    const double at5y = ellipticity_stats(squeezed(5e-5, Quadrature::Y)).delta_ellipticity;
    pass = pass && monotone && ordered && worst_mc < 0.01;
    d << (monotone ? "monotone" : "not monotone") << "; dE(x) > dE(y) " << (ordered ? "holds" : "fails")
      << " (at 5e-5: " << num(at5) << " vs " << num(at5y) << ", min dE(x)-dE(y) " << num(worst_order)
      << "); MC worst " << num(100.0 * worst_mc) << "%";
    report(9, "ellipticity suite", pass, d.str());
}

void g2_bound(const Context& ctx) {
    const std::vector<std::pair<double, double>> bands = {{15, 25}, {25, 35}, {35, 45}, {45, 55}, {55, 65}};
    struct Driver {
        std::string name;
        DriverConfig cfg;
        std::size_t n;
        bool coherent;
    };
    const std::vector<Driver> drivers = {{"linear", linear(), 1, true},
                                         {"circular", circular(), 1, true},
                                         {"x 5e-6", squeezed(5e-6, Quadrature::X), 241, false},
                                         {"x 5e-5", squeezed(5e-5, Quadrature::X), 241, false},
                                         {"y 5e-6", squeezed(5e-6, Quadrature::Y), 241, false},
                                         {"y 5e-5", squeezed(5e-5, Quadrature::Y), 241, false},
                                         {"thermal 5e-5", thermal(5e-5), 76, false}};
    bool pass = true;
    double lowest = INFINITY, coherent_dev = 0.0;
    std::size_t evaluated = 0, silent = 0;
    for (const auto& dr : drivers) {
        const auto set = ctx.realizations(dr.cfg, dr.n);
        for (const auto& b : bands) {
            double g;
            try {
                g = g2_from_set(set, kOmega, b).g2;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NoSignal) throw;
                ++silent;
                continue;
            }
            ++evaluated;
            lowest = std::min(lowest, g);
            if (g < 1.0 - 1e-9) pass = false;
            if (dr.coherent) {
                coherent_dev = std::max(coherent_dev, std::abs(g - 1.0));
                if (std::abs(g - 1.0) > 1e-6) pass = false;
            }
        }
    }
    report(10, "g2 >= 1 - 1e-9, coherent = 1 +- 1e-6", pass && evaluated > 0,
           std::to_string(evaluated) + " driver-bands, min g2 " + num(lowest) + ", coherent |g2-1| max " +
               num(coherent_dev) + (silent ? ", " + std::to_string(silent) + " bands without signal" : ""));
}

void numerical_hygiene(const Context& ctx, unsigned workers) {
    std::ostringstream d;
    bool pass = true;

    SolverOptions opts;
    opts.workers = workers;
    double worst_res = 0.0;
    std::size_t n_sol = 0;
    for (auto quad : {Quadrature::X, Quadrature::Y}) {
        const auto cfg = saddle_config(squeezed(5e-5, quad), kIp, 31.0);
        for (const auto& s : solve_saddles(cfg, {}, opts)) {
            worst_res = std::max(worst_res, max_abs(saddle_residuals(s.vars(), cfg)));
            ++n_sol;
        }
    }
    pass = pass && n_sol > 0 && worst_res < 1e-8;
    d << "saddle residual " << num(worst_res) << " (" << n_sol << " solutions); ";

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ure(-60.0, 120.0), uim(-15.0, 15.0), ua(-0.08, 0.08);
    double worst_int = 0.0;
    for (int i = 0; i < 40; ++i) {
        MonochromaticField<cplx> f{{cplx(ua(rng)), cplx(ua(rng))}, {cplx(ua(rng), ua(rng)), cplx(ua(rng))}, kOmega};
        const cplx t1(ure(rng), uim(rng)), t2(ure(rng), uim(rng));
        for (int mu = 0; mu < 2; ++mu) {
            const cplx q1 = oracle::segment_integral([&](cplx t) { return f.potential(mu, t); }, t1, t2);
            const cplx q2 =
                oracle::segment_integral([&](cplx t) { return f.potential(mu, t) * f.potential(mu, t); }, t1, t2);
            const cplx c1 = f.potential_integral(mu, t1, t2), c2 = f.potential_square_integral(mu, t1, t2);
            worst_int = std::max({worst_int, std::abs(q1 - c1) / std::max(1.0, std::abs(c1)),
                                  std::abs(q2 - c2) / std::max(1.0, std::abs(c2))});
        }
        const auto ti = trig_integrals(kOmega, t1, t2);
        const cplx cs = oracle::segment_integral([&](cplx t) { return std::sin(kOmega * t) * std::cos(kOmega * t); }, t1, t2);
        worst_int = std::max(worst_int, std::abs(cs - ti.cs) / std::max(1.0, std::abs(cs)));
    }
    pass = pass && worst_int < 1e-10;
    d << "closed form vs quadrature " << num(worst_int) << "; ";

    double worst_fd = 0.0;
    const double h = 1e-4;
    for (int i = 0; i < 1000; ++i) {
        const FieldRealization r{cplx(ua(rng), ua(rng)), cplx(ua(rng), ua(rng)), kOmega};
        const double t = ure(rng);
        const auto e = electric_field(r, t);
        const auto ap = vector_potential(r, t + h), am = vector_potential(r, t - h);
        for (int mu = 0; mu < 2; ++mu) worst_fd = std::max(worst_fd, std::abs(e[mu] + (ap[mu] - am[mu]) / (2.0 * h)));
    }
    pass = pass && worst_fd < 1e-6;
    d << "E + dA/dt " << num(worst_fd) << "; ";

    for (auto quad : {Quadrature::X, Quadrature::Y}) {
        const auto fine = ctx.spectrum(squeezed(5e-5, quad), 241);
        const auto coarse = ctx.spectrum(squeezed(5e-5, quad), 121);
        const auto cut = cutoff_detect(fine);
        const double q_max = cut.empty() ? INFINITY : cut.back() + 10.0;
        const auto dev = log_envelope_deviation(coarse, fine, q_max);
        pass = pass && dev.relative < 0.05;
        d << "121 vs 241 " << to_string(quad) << " " << num(100.0 * dev.relative) << "%"
          << (quad == Quadrature::X ? "; " : "");
    }
    report(11, "numerical hygiene", pass, d.str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string cache_dir;
    unsigned workers = 0;
    std::vector<int> only;
    app.add_option("--cache", cache_dir, "spectrum cache directory");
    app.add_option("--workers", workers, "worker threads, 0 = logical cores");
    app.add_option("--only", only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);

    Context ctx;
    ctx.workers = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
    if (!cache_dir.empty())
        ctx.cache = std::make_unique<SpectrumCache>(cache_dir, [](const std::string& m) {
            std::fprintf(stderr, "warning: %s\n", m.c_str());
        });

    const std::vector<std::function<void()>> criteria = {
        [&] { cutoff_law(ctx); },
        [&] { circular_suppression(ctx); },
        [&] { amplitude_spectrum(ctx); },
        [&] { phase_spectrum(ctx); },
        [&] { coherent_limit(ctx); },
        [&] { thermal_comparison(ctx); },
        [&] { orbit_cutoff_agreement(ctx.workers); },
        [&] { recombination(ctx.workers); },
        [&] { ellipticity_suite(); },
        [&] { g2_bound(ctx); },
        [&] { numerical_hygiene(ctx, ctx.workers); },
    };
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(i + 1)) == only.end()) continue;
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), "criterion", false, std::string("error: ") + e.what());
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
