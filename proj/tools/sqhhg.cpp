#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "sqhhg/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectra, quantum orbits and driver statistics for squeezed and thermal circular drivers"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir, cache_dir;
    unsigned workers = 0;
    std::uint64_t seed = 0;
    std::size_t grid_points = 0;
    double n_sigma = 0.0;

    const std::map<std::string, std::string> help = {
        {"spectrum", "Weighted HHG spectrum per intensity"},
        {"orbits", "Saddle-point solutions over a harmonic scan"},
        {"lissajous", "Field samples and 2D histogram of the Lissajous figure"},
        {"ellipticity", "Mean ellipticity and its spread, closed form and Monte Carlo"},
        {"g2", "g2(0) per harmonic band"},
        {"convergence", "Spectrum deviation versus amplitude-grid size"},
    };
    for (const auto& [name, text] : help) {
        auto* sub = app.add_subcommand(name, text);
        sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--workers", workers, "Worker threads (0 = logical cores)");
        sub->add_option("--cache", cache_dir, "Spectrum cache directory");
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--grid-points", grid_points, "Amplitude grid points")->check(CLI::PositiveNumber);
        sub->add_option("--n-sigma", n_sigma, "Amplitude grid half-width in standard deviations")
            ->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    auto* sub = app.get_subcommand(command);
    try {
        auto cfg = sqhhg::load_config(config_path);
        if (sub->count("--out")) cfg.io.out = out_dir;
        if (sub->count("--workers")) cfg.io.workers = workers;
        if (sub->count("--cache")) cfg.io.cache = cache_dir;
        if (sub->count("--seed")) cfg.io.seed = seed;
        if (sub->count("--grid-points")) cfg.task.grid_points = grid_points;
        if (sub->count("--n-sigma")) cfg.task.n_sigma = n_sigma;

        sqhhg::RunReport rep;
        if (command == "spectrum") rep = sqhhg::run_spectrum(cfg);
        else if (command == "orbits") rep = sqhhg::run_orbits(cfg);
        else if (command == "lissajous") rep = sqhhg::run_lissajous(cfg);
        else if (command == "ellipticity") rep = sqhhg::run_ellipticity(cfg);
        else if (command == "g2") rep = sqhhg::run_g2(cfg);
        else rep = sqhhg::run_convergence(cfg);
        for (const auto& f : rep.files) std::cout << f.string() << '\n';
    } catch (const sqhhg::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return sqhhg::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
