// Command-line front end: run the solver, launch experiment sweeps and
// probes, and execute the static (non-dynamical) property suites.
//
// Exit codes: 0 all verdicts pass, 1 any fail, 2 usage/config error,
// 3 run aborted (blowup or nonfinite).

#include "gdnls/experiments.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

using namespace gdnls;

namespace {

RunConfig load_with_overrides(const std::string& config_path,
                              const std::vector<std::string>& overrides,
                              const std::string& out_dir, int64_t seed_flag) {
    nlohmann::json j;
    {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("config: cannot open " + config_path);
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::invalid_argument("config: " + config_path + ": " + e.what());
        }
    }
    for (const auto& o : overrides) apply_override(j, o);
    RunConfig cfg = config_from_json(j);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_flag >= 0) cfg.seed = static_cast<uint64_t>(seed_flag);
    return cfg;
}

std::string run_dir_name(const RunConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(dump.data(), dump.size())));
    return std::string("run_") + buf + "_" + std::to_string(cfg.seed);
}

int verdict_exit(Verdict v) { return v == Verdict::pass ? 0 : 1; }

SpectralField random_field_seeded(std::mt19937_64& rng, int num_modes, double decay) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField f(num_modes);
    for (int k = -num_modes; k <= num_modes; ++k) {
        const double scale = 1.0 / std::pow(1.0 + std::abs(static_cast<double>(k)), decay);
        f.mode(k) = scale * cplx(gauss(rng), gauss(rng));
    }
    return f;
}

int cmd_run(const RunConfig& cfg) {
    const SpectralField u0 = cfg.initial.realize(cfg.num_modes);
    const Trajectory traj = evolve(u0, cfg.model, cfg.solver);
    const auto dir = cfg.out_dir / run_dir_name(cfg);
    save_trajectory(traj, dir);
    save_config(cfg, dir / "config.json");
    std::cout << "trajectory written to " << dir.string() << "\n";

    if (traj.termination == Termination::blowup_abort) {
        std::cout << "run aborted: H2 norm crossed the blowup threshold\n";
        return 3;
    }
    if (traj.termination == Termination::nonfinite_abort) {
        std::cout << "run aborted: nonfinite field\n";
        return 3;
    }

    if (cfg.initial.kind == InitialSpec::Kind::plane_wave && cfg.model.cutoff.is_infinite()) {
        const int k = cfg.initial.wavenumber;
        const cplx a = cfg.initial.amplitude;
        const double rate = k * k + k * std::pow(std::norm(a), cfg.model.sigma);
        SpectralField exact(cfg.num_modes);
        exact.mode(k) = a * std::exp(cplx(0.0, -rate * traj.final_time()));
        SpectralField diff = traj.final_field();
        diff -= exact;
        std::cout << "plane-wave final L2 error vs analytic: " << format_double(l2_norm(diff))
                  << "\n";
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg, std::vector<int> cutoffs, int reference) {
    const SpectralField u0 = cfg.initial.realize(cfg.num_modes);
    ExperimentReport rep =
        eps_convergence(u0, cfg.model.sigma, cutoffs, reference, cfg.model.oversample, cfg.solver);
    rep.seed = cfg.seed;
    const auto dir = write_report(rep, cfg.out_dir);
    std::cout << rep.name << ": " << verdict_name(rep.verdict) << " (" << dir.string() << ")\n";
    return verdict_exit(rep.verdict);
}

int cmd_probe(const RunConfig& cfg, const std::string& name, const std::string& traj_dir,
              double r, double s_prime, double delta) {
    ExperimentReport rep;
    if (name == "lower-order") {
        rep = lower_order_probe(load_trajectory(traj_dir), r);
    } else if (name == "h2-growth") {
        const Trajectory traj = load_trajectory(traj_dir);
        rep = h2_growth_probe(traj, traj.params.sigma);
    } else if (name == "hamiltonian") {
        rep = hamiltonian_monotonicity(load_trajectory(traj_dir));
    } else if (name == "continuous-dependence") {
        const SpectralField u0 = cfg.initial.realize(cfg.num_modes);
        rep = continuous_dependence_probe(u0, delta, s_prime, cfg.model, cfg.solver);
    } else {
        throw std::invalid_argument("probe: unknown name " + name);
    }
    rep.seed = cfg.seed;
    const auto dir = write_report(rep, cfg.out_dir);
    std::cout << rep.name << ": " << verdict_name(rep.verdict) << " (" << dir.string() << ")\n";
    return verdict_exit(rep.verdict);
}

int cmd_dichotomy(const RunConfig& cfg, std::vector<double> amplitudes, int wavenumber) {
    ExperimentReport rep = dichotomy_experiment(amplitudes, cfg.model.sigma, wavenumber,
                                                cfg.num_modes, cfg.model, cfg.solver);
    rep.seed = cfg.seed;
    const auto dir = write_report(rep, cfg.out_dir);
    std::cout << rep.name << ": " << verdict_name(rep.verdict) << " (" << dir.string() << ")\n";
    return verdict_exit(rep.verdict);
}

int cmd_blowup_scan(const RunConfig& cfg, std::vector<double> sigmas) {
    const SpectralField u0 = cfg.initial.realize(cfg.num_modes);
    ExperimentReport rep = blowup_scan(u0, sigmas, cfg.model, cfg.solver);
    rep.seed = cfg.seed;
    const auto dir = write_report(rep, cfg.out_dir);
    std::cout << rep.name << ": " << verdict_name(rep.verdict) << " (" << dir.string() << ")\n";
    return rep.verdict == Verdict::fail ? 1 : 0;
}

int cmd_verify_static(const RunConfig& cfg, int samples) {
    std::mt19937_64 rng(cfg.seed);
    const int n = cfg.num_modes;
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "pass" : "FAIL") << "  " << name << "\n";
        all_ok = all_ok && ok;
    };

    {
        bool ok = true;
        const Cutoff c = Cutoff::at(std::max(1, n / 4));
        for (int i = 0; i < samples && ok; ++i) {
            const SpectralField f = random_field_seeded(rng, n, 1.5);
            ok = ok && project(project(f, c), c) == project(f, c);
            ok = ok && l2_norm(project(f, c)) <= l2_norm(f) * (1.0 + 1e-15);
        }
        report("mollifier idempotence + non-expansiveness", ok);
    }
    {
        bool ok = true;
        const Cutoff c = Cutoff::at(std::max(1, n / 4));
        for (int i = 0; i < samples && ok; ++i) {
            const SpectralField f = random_field_seeded(rng, n, 1.0);
            for (double s : {0.5, 1.0, 2.0})
                ok = ok && mollifier_gain_probe(f, SobolevIndex{s}, c) <= std::sqrt(2.0) + 1e-14;
        }
        report("mollifier gain ratio <= sqrt(2)", ok);
    }
    {
        bool ok = true;
        const std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0};
        for (int i = 0; i < samples && ok; ++i) {
            const SpectralField f = random_field_seeded(rng, n, 1.5);
            for (double m : grid)
                for (double l : grid)
                    if (m <= l) ok = ok && interpolation_check(f, SobolevIndex{m}, SobolevIndex{l});
        }
        report("interpolation inequality (c = sqrt(2))", ok);
    }
    {
        bool ok = true;
        for (int i = 0; i < samples && ok; ++i) {
            const SpectralField f = random_field_seeded(rng, n, 1.5);
            const double h1 = hs_norm(f, SobolevIndex{1.0});
            for (double sigma : {1.0, 1.5, 2.0, 2.5})
                ok = ok && energy(f, sigma, cfg.model.cutoff, cfg.model.oversample) >=
                               0.5 * h1 * h1 - 1e-10;
        }
        report("energy dominates H1 norm", ok);
    }
    {
        bool ok = true;
        for (double sigma : {1.0, 1.5, 2.0}) {
            const double c_sig = compute_c_sigma(sigma, n);
            for (int i = 0; i < samples && ok; ++i) {
                const SpectralField f = random_field_seeded(rng, n, 1.2);
                const double h1 = hs_norm(f, SobolevIndex{1.0});
                const double lhs =
                    std::pow(lp_integral(f, 4.0 * sigma + 2.0, 4),
                             (2.0 * sigma + 1.0) / (4.0 * sigma + 2.0)) *
                    l2_norm(derivative(f)) / (sigma + 1.0);
                ok = ok && lhs <= c_sig * std::pow(h1, 2.0 * sigma + 2.0) * (1.0 + 1e-12);
            }
        }
        report("c_sigma validity inequality", ok);
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gdnls: pseudospectral gDNLS solver and verification harness"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand

    std::string config_path;
    std::string out_dir;
    int64_t seed = -1;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "path to JSON run config")->required();
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "seed (overrides config)");
    app.add_option("--override", overrides, "key=value config override (dotted paths)");

    auto* run = app.add_subcommand("run", "evolve and persist a trajectory");

    auto* sweep = app.add_subcommand("sweep", "cutoff convergence sweep");
    std::vector<int> cutoffs{8, 16, 32, 64};
    int reference = 128;
    sweep->add_option("--cutoffs", cutoffs, "cutoff list (increasing)");
    sweep->add_option("--reference", reference, "reference cutoff");

    auto* probe = app.add_subcommand("probe", "run a named probe");
    std::string probe_name, traj_dir;
    double probe_r = 2.0, probe_s_prime = 0.0, probe_delta = 1e-2;
    probe->add_option("--name", probe_name,
                      "lower-order | h2-growth | hamiltonian | continuous-dependence")
        ->required();
    probe->add_option("--traj", traj_dir, "stored trajectory directory");
    probe->add_option("--r", probe_r, "power for lower-order probe");
    probe->add_option("--s-prime", probe_s_prime, "Sobolev index for continuous dependence");
    probe->add_option("--delta", probe_delta, "base perturbation size");

    auto* dicho = app.add_subcommand("dichotomy", "plane-wave dichotomy scan");
    std::vector<double> amplitudes{0.0, 0.05, 0.1, 2.0};
    int wavenumber = 1;
    dicho->add_option("--amplitudes", amplitudes, "amplitude list");
    dicho->add_option("--wavenumber", wavenumber, "plane-wave wavenumber");

    auto* blowup = app.add_subcommand("blowup-scan", "H2 boundedness scan over sigma");
    std::vector<double> sigmas{1.0, 1.5, 2.0};
    blowup->add_option("--sigmas", sigmas, "sigma list");

    auto* verify = app.add_subcommand("verify-static", "non-dynamical property suites");
    int samples = 1000;
    verify->add_option("--samples", samples, "random fields per suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const RunConfig cfg = load_with_overrides(config_path, overrides, out_dir, seed);
        if (run->parsed()) return cmd_run(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg, cutoffs, reference);
        if (probe->parsed())
            return cmd_probe(cfg, probe_name, traj_dir, probe_r, probe_s_prime, probe_delta);
        if (dicho->parsed()) return cmd_dichotomy(cfg, amplitudes, wavenumber);
        if (blowup->parsed()) return cmd_blowup_scan(cfg, sigmas);
        if (verify->parsed()) return cmd_verify_static(cfg, samples);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
