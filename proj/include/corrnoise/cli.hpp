#pragma once

// Command-line front end. Exit codes: 0 success, 2 invalid parameters
// (including unphysical correlation without --allow-unphysical), 3 numerical
// failure, 1 anything else (I/O).

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "corrnoise/experiments.hpp"
#include "corrnoise/io.hpp"

namespace corrnoise::cli {

using io::RunConfig;
using io::resolve_initial;

enum ExitCode : int { Ok = 0, Failure = 1, BadParameters = 2, NumericalError = 3 };

namespace detail {

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

inline const std::vector<Flag>& flags() {
    static const std::vector<Flag> f{
        {"--initial", "initial", "bell-phi | bell-psi | fig4-x | x-state | file"},
        {"--x-state", "x_state", "a,b,c,d,z,w for --initial x-state"},
        {"--initial-file", "initial_file", "4x4 matrix file for --initial file"},
        {"--gamma", "gamma", "noise strength gamma (both qubits)"},
        {"--big-gamma", "big_gamma", "cross-correlation Gamma"},
        {"--big-gammas", "big_gammas", "comma-separated Gamma list for sweep/esd"},
        {"--omega", "omega", "qubit transition frequency"},
        {"--method", "method", "analytic | secular-rk4 | full-rk4 | trajectories"},
        {"--convention", "convention", "calibrated | printed-eq6"},
        {"--unraveling", "unraveling", "phase-randomized | literal"},
        {"--t-max", "t_max", "time horizon"},
        {"--dt", "dt", "integration / trajectory step"},
        {"--grid-points", "grid_points", "output time grid points"},
        {"--seed", "seed", "master seed for trajectories"},
        {"--n-traj", "n_traj", "number of trajectories"},
        {"--out", "output", "output path (default: stdout)"},
    };
    return f;
}

inline std::string generator_tag(const RunConfig& c) {
    if (c.method == "analytic") return "calibrated/secular closed form";
    if (c.method == "secular-rk4") return c.convention + "/secular";
    if (c.method == "full-rk4") return c.convention + "/full";
    return "calibrated/" + c.unraveling + " unraveling";
}

inline SweepOptions sweep_options(const RunConfig& c, unsigned threads) {
    SweepOptions o;
    o.omega = c.omega;
    o.dt = c.dt;
    o.convention = convention_from_string(c.convention);
    o.n_traj = c.n_traj;
    o.seed = c.seed;
    o.unraveling = unraveling_from_string(c.unraveling);
    o.workers = threads;
    o.allow_unphysical = c.allow_unphysical;
    return o;
}

inline void check_common(const RunConfig& c) {
    validate(NoiseParams::symmetric(c.gamma, c.big_gamma, c.omega));
    if (!(c.dt > 0.0)) throw InvalidParameter("--dt must be > 0");
    if (!(c.t_max > 0.0)) throw InvalidParameter("--t-max must be > 0");
    if (c.grid_points < 2) throw InvalidParameter("--grid-points must be >= 2");
    if (c.n_traj < 1) throw InvalidParameter("--n-traj must be >= 1");
    method_from_string(c.method);
    convention_from_string(c.convention);
    unraveling_from_string(c.unraveling);
}

/// Writes to the configured output path, or `out` when none is set.
template <class F>
void emit(const RunConfig& c, std::ostream& out, F&& write) {
    if (c.output.empty()) {
        write(out);
        return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + c.output + "' for writing");
    write(f);
    if (!f) throw std::runtime_error("write failure on '" + c.output + "'");
}

inline void run_sweep(const RunConfig& c, const std::vector<double>& big_gammas, unsigned threads,
                      std::ostream& out) {
    const InitialState init = resolve_initial(c);
    const auto grid = uniform_grid(c.t_max, c.grid_points);
    const auto result = sweep_concurrence(init, c.gamma, big_gammas, grid, method_from_string(c.method),
                                          sweep_options(c, threads));
    emit(c, out, [&](std::ostream& os) { io::write_csv(os, io::metadata_of(c, generator_tag(c)), io::rows_of(result)); });
}

inline void run_esd(const RunConfig& c, std::ostream& out) {
    const InitialState init = resolve_initial(c);
    const XState& x0 = init.require_x("esd");
    const auto rows = esd_table(x0, c.gamma, c.big_gammas, c.t_max, std::max<std::size_t>(c.grid_points, 400));
    emit(c, out, [&](std::ostream& os) {
        for (const auto& m : io::metadata_of(c, generator_tag(c))) os << "# " << m << '\n';
        os << "big_gamma,kind,t\n";
        for (const auto& r : rows)
            for (const auto& cr : r.crossings)
                os << io::format_double(r.big_gamma) << ',' << (cr.kind == CrossingKind::Death ? "death" : "revival")
                   << ',' << io::format_double(cr.t) << '\n';
    });
}

inline void run_compare(const RunConfig& c, unsigned threads, std::ostream& out) {
    const InitialState init = resolve_initial(c);
    const auto grid = uniform_grid(c.t_max, c.grid_points);
    const auto rep = compare_methods(init, c.gamma, c.big_gamma, grid, sweep_options(c, threads));
    emit(c, out, [&](std::ostream& os) { os << io::to_json(rep, &c).dump(2) << '\n'; });
}

} // namespace detail

/// Parses argv and runs one command; diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Two qubits under correlated classical noise: dynamics, concurrence and sudden death"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "flat 'key = value' config file; flags override it");
    std::map<std::string, std::string> given;
    std::map<std::string, CLI::Option*> options;
    for (const auto& f : detail::flags()) options[f.key] = app.add_option(f.name, given[f.key], f.help);
    bool allow_unphysical = false;
    auto* allow_opt = app.add_flag("--allow-unphysical", allow_unphysical, "accept |Gamma| > gamma");
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads for trajectories (0 = all cores)");

    auto* evolve = app.add_subcommand("evolve", "single concurrence/state series (--big-gamma)");
    auto* sweep = app.add_subcommand("sweep", "concurrence series for each Gamma in --big-gammas");
    auto* esd = app.add_subcommand("esd", "sudden-death / revival times per Gamma");
    auto* compare = app.add_subcommand("compare", "cross-method deviation report (JSON)");
    auto* fig = app.add_subcommand("fig", "figure dataset: fig 2 | fig 3 | fig 4");
    int figure_id = 0;
    fig->add_option("id", figure_id, "figure number")->required()->check(CLI::IsMember({2, 3, 4}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return BadParameters;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = io::parse_config_text(io::read_file(config_path));
        for (const auto& [key, opt] : options)
            if (opt->count() > 0) io::set_config_value(cfg, key, given[key]);
        if (allow_opt->count() > 0) cfg.allow_unphysical = allow_unphysical;
        const bool list_given = options["big_gammas"]->count() > 0;
        const bool single_given = options["big_gamma"]->count() > 0;

        if (evolve->parsed()) {
            cfg.command = "evolve";
            detail::check_common(cfg);
            detail::run_sweep(cfg, {cfg.big_gamma}, threads, out);
        } else if (sweep->parsed() || esd->parsed()) {
            cfg.command = sweep->parsed() ? "sweep" : "esd";
            if (single_given && !list_given) cfg.big_gammas = {cfg.big_gamma};
            detail::check_common(cfg);
            if (sweep->parsed()) detail::run_sweep(cfg, cfg.big_gammas, threads, out);
            else detail::run_esd(cfg, out);
        } else if (compare->parsed()) {
            cfg.command = "compare";
            detail::check_common(cfg);
            detail::run_compare(cfg, threads, out);
        } else if (fig->parsed()) {
            const FigurePreset preset = figure_preset(figure_id);
            cfg.command = "fig";
            cfg.figure = figure_id;
            cfg.initial = preset.initial.tag;
            cfg.gamma = preset.gamma;
            cfg.big_gammas = preset.big_gammas;
            cfg.t_max = preset.grid.back();
            cfg.grid_points = preset.grid.size();
            detail::check_common(cfg);
            detail::run_sweep(cfg, cfg.big_gammas, threads, out);
        }
        return Ok;
    } catch (const InvalidParameter& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return BadParameters;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return NumericalError;
    } catch (const PsdViolation& e) {
        err << "numerical failure: " << e.what() << '\n';
        return NumericalError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Failure;
    }
}

} // namespace corrnoise::cli
