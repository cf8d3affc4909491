#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "cli.hpp"
#include "pendrot/error.hpp"

using namespace pendrot;
using namespace pendrot::cli;

int main(int argc, char** argv) {
    CLI::App app{"Pendulum-rotor scattering maps, crests and diffusion pseudo-orbits", "pendrot"};
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    double a1 = 0, a2 = 0, mu = 0, I_min = 0, I_max = 0;
    int grid_n = 0, theta_n = 0;
    std::string r;
    auto* o_a1 = app.add_option("--a1", a1, "amplitude of the first harmonic");
    auto* o_a2 = app.add_option("--a2", a2, "amplitude of the second harmonic");
    auto* o_mu = app.add_option("--mu", mu, "a1/a2; sets a1 from a2 (default a2 = 1)");
    auto* o_k1 = app.add_option("--k1", cfg.k1);
    auto* o_k2 = app.add_option("--k2", cfg.k2);
    auto* o_l1 = app.add_option("--l1", cfg.l1);
    auto* o_l2 = app.add_option("--l2", cfg.l2);
    auto* o_r = app.add_option("--r", r, "frequency ratio of the reduced model, p/q or decimal, in (0, 1]");
    app.add_option("--eps", cfg.eps, "perturbation size")->capture_default_str();
    auto* o_imin = app.add_option("--I-min", I_min, "lower end of the action grid");
    auto* o_imax = app.add_option("--I-max", I_max, "upper end of the action grid");
    auto* o_gn = app.add_option("--grid-n", grid_n, "points of the action grid");
    auto* o_tn = app.add_option("--theta-n", theta_n, "points of the angle grid on [0, 2pi)");
    app.add_option("--I-values", cfg.I_values, "explicit action values instead of a grid")->delimiter(',');
    app.add_option("--criterion", cfg.criterion, "down, up, minabs, branch=K or extended=K")->capture_default_str();
    const std::map<std::string, Format> formats{{"csv", Format::Csv}, {"jsonl", Format::Jsonl}};
    app.add_option("--format", cfg.format, "csv or jsonl")->transform(CLI::CheckedTransformer(formats));
    app.add_option("--out", cfg.out, "output path (stdout if omitted)");
    app.add_option("--threads", cfg.threads, "worker threads for grid sweeps (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--tol-override", cfg.tol_overrides, "KEY=VAL, repeatable");
    app.add_option("--samples", cfg.samples, "samples per crest branch, trajectory or verify queries")->capture_default_str();
    app.add_option("--duration", cfg.duration, "inner-portrait integration time")->capture_default_str();
    app.add_option("--phi0", cfg.phi0, "inner-portrait initial angle")->capture_default_str();
    app.add_option("--s0", cfg.s0, "inner-portrait initial time phase")->capture_default_str();
    app.add_option("--I-start", cfg.I_start, "diffuse: starting action")->capture_default_str();
    app.add_option("--I-end", cfg.I_end, "diffuse: target action")->capture_default_str();
    app.add_option("--seed", cfg.seed, "verify: random seed")->capture_default_str();
    app.add_option("--inject-fault", cfg.inject_fault, "verify: a2-sign flips a2 in the closed form");

    std::string command;
    const std::map<std::string, int (*)(const RunConfig&)> commands{
        {"thresholds", cmd_thresholds}, {"crests", cmd_crests},   {"portrait", cmd_portrait},
        {"tau-field", cmd_tau_field},   {"inner-portrait", cmd_inner_portrait},
        {"diffuse", cmd_diffuse},       {"verify", cmd_verify}};
    const std::map<std::string, std::string> help{
        {"thresholds", "threshold actions and crest-regime intervals"},
        {"crests", "sampled crest branches"},
        {"portrait", "reduced Poincare function on an (I, theta) grid"},
        {"tau-field", "critical times on an (I, theta) grid"},
        {"inner-portrait", "inner-flow trajectories"},
        {"diffuse", "build and verify a pseudo-orbit"},
        {"verify", "oracle and invariant checks"}};
    for (const auto& [name, fn] : commands) {
        app.add_subcommand(name, help.at(name))->callback([&command, name = name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (o_a1->count()) cfg.a1 = a1;
    if (o_a2->count()) cfg.a2 = a2;
    if (o_mu->count()) cfg.mu = mu;
    if (o_r->count()) cfg.r = r;
    if (o_imin->count()) cfg.I_min = I_min;
    if (o_imax->count()) cfg.I_max = I_max;
    if (o_gn->count()) cfg.grid_n = grid_n;
    if (o_tn->count()) cfg.theta_n = theta_n;
    cfg.harmonics_given = o_k1->count() + o_k2->count() + o_l1->count() + o_l2->count() > 0;

    try {
        return commands.at(command)(cfg);
    } catch (const Error& e) {
        std::cerr << "pendrot " << command << ": " << e.what() << "\n";
        return e.code() == ErrorCode::InvalidParams ? kExitConfig : kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "pendrot " << command << ": " << e.what() << "\n";
        return kExitSolver;
    }
}
