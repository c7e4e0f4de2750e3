#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gdnls/io.hpp"
#include "test_support.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace gdnls;
using gdnls::testing::random_field;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("gdnls_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("field JSON round trip") {
    std::mt19937_64 rng(1);
    const SpectralField f = random_field(rng, 6);
    const SpectralField back = field_from_json(field_to_json(f));
    CHECK(back == f);
}

TEST_CASE("field binary round trip and checksum stability") {
    std::mt19937_64 rng(2);
    const SpectralField f = random_field(rng, 9);
    const auto bytes = field_to_binary(f);
    CHECK(field_from_binary(bytes) == f);
    CHECK(fnv1a64(bytes.data(), bytes.size()) ==
          fnv1a64(field_to_binary(f).data(), bytes.size()));
    CHECK_THROWS_AS(field_from_binary(std::span<const std::byte>(bytes.data(), 5)),
                    std::invalid_argument);
}

TEST_CASE("csv round trips exact floating values") {
    TempDir tmp;
    std::vector<InvariantRecord> trace;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        InvariantRecord r;
        r.t = i * 0.1 + u(rng) * 1e-9;
        r.mass = u(rng);
        r.momentum = u(rng);
        r.hamiltonian = u(rng);
        r.hamiltonian_eps = u(rng);
        r.energy_eps = u(rng);
        r.h1_norm = std::abs(u(rng));
        r.h2_norm = std::abs(u(rng));
        trace.push_back(r);
    }
    write_invariants_csv(tmp.path / "inv.csv", trace);
    const auto back = read_invariants_csv(tmp.path / "inv.csv");
    REQUIRE(back.size() == trace.size());
    for (size_t i = 0; i < trace.size(); ++i) {
        CHECK(back[i].t == trace[i].t);
        CHECK(back[i].mass == trace[i].mass);
        CHECK(back[i].momentum == trace[i].momentum);
        CHECK(back[i].hamiltonian == trace[i].hamiltonian);
        CHECK(back[i].hamiltonian_eps == trace[i].hamiltonian_eps);
        CHECK(back[i].energy_eps == trace[i].energy_eps);
        CHECK(back[i].h1_norm == trace[i].h1_norm);
        CHECK(back[i].h2_norm == trace[i].h2_norm);
    }
}

TEST_CASE("minimal config fills defaults") {
    const RunConfig cfg = config_from_json(nlohmann::json::parse(R"({"num_modes": 32})"));
    CHECK(cfg.num_modes == 32);
    CHECK(cfg.model.oversample == 2);
    CHECK(cfg.model.cutoff.is_infinite());
    CHECK(cfg.solver.scheme == Scheme::if_rk4);
}

TEST_CASE("unknown keys are rejected with the offending path") {
    const auto j = nlohmann::json::parse(R"({"num_modes": 32, "solver": {"dtt": 0.1}})");
    CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("solver.dtt"),
                         std::invalid_argument);
}

TEST_CASE("cross-field validation names the constraint") {
    const auto j = nlohmann::json::parse(R"({"num_modes": 8, "model": {"cutoff": 16}})");
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
}

TEST_CASE("config emit -> load -> emit is byte-identical") {
    TempDir tmp;
    RunConfig cfg;
    cfg.num_modes = 64;
    cfg.model.sigma = 1.5;
    cfg.model.cutoff = Cutoff::at(16);
    cfg.solver.dt = 1e-3;
    cfg.initial.kind = InitialSpec::Kind::smooth_preset;
    cfg.initial.preset_amplitude = 0.7;
    cfg.seed = 12345;

    save_config(cfg, tmp.path / "a.json");
    const RunConfig loaded = load_config(tmp.path / "a.json");
    save_config(loaded, tmp.path / "b.json");

    std::ifstream a(tmp.path / "a.json"), b(tmp.path / "b.json");
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("overrides follow dotted paths") {
    nlohmann::json j = config_to_json(RunConfig{});
    apply_override(j, "solver.dt=0.0005");
    apply_override(j, "model.cutoff=8");
    apply_override(j, "initial.kind=plane_wave");
    const RunConfig cfg = config_from_json(j);
    CHECK(cfg.solver.dt == 0.0005);
    CHECK(cfg.model.cutoff.k_max == 8);
}

TEST_CASE("initial spec realization") {
    SUBCASE("plane wave") {
        InitialSpec spec;
        spec.kind = InitialSpec::Kind::plane_wave;
        spec.amplitude = cplx(0.5, 0.1);
        spec.wavenumber = 3;
        const SpectralField f = spec.realize(8);
        CHECK(f.mode(3) == cplx(0.5, 0.1));
        CHECK(mass(f) == doctest::Approx(2.0 * M_PI * std::norm(cplx(0.5, 0.1))));
    }
    SUBCASE("mode list") {
        InitialSpec spec;
        spec.kind = InitialSpec::Kind::mode_list;
        spec.modes = {{1, cplx(1.0, 0.0)}, {-2, cplx(0.0, 0.5)}};
        const SpectralField f = spec.realize(4);
        CHECK(f.mode(1) == cplx(1.0, 0.0));
        CHECK(f.mode(-2) == cplx(0.0, 0.5));
    }
    SUBCASE("wavenumber beyond the grid is an error") {
        InitialSpec spec;
        spec.wavenumber = 9;
        CHECK_THROWS_AS(spec.realize(8), std::invalid_argument);
    }
    SUBCASE("file round trip with checksum") {
        TempDir tmp;
        std::mt19937_64 rng(5);
        const SpectralField f = random_field(rng, 6);
        const auto bytes = field_to_binary(f);
        std::ofstream out(tmp.path / "f.bin", std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.close();

        InitialSpec spec;
        spec.kind = InitialSpec::Kind::file;
        spec.path = tmp.path / "f.bin";
        spec.checksum = fnv1a64(bytes.data(), bytes.size());
        CHECK(spec.realize(6) == f);
        spec.checksum ^= 1;  // corrupt
        CHECK_THROWS_AS(spec.realize(6), std::runtime_error);
    }
}

TEST_CASE("smooth preset is the documented bump") {
    const SpectralField f = smooth_preset("bump", 0.5, 32);
    const auto grid = to_physical(f, 2);
    const int m = static_cast<int>(grid.size());
    for (int j = 0; j < m; j += 7) {
        const double x = 2.0 * M_PI * j / m;
        const cplx expected = 0.5 * (1.0 + 0.3 * std::cos(x)) * std::exp(cplx(0.0, std::sin(x)));
        CHECK(std::abs(grid[static_cast<size_t>(j)] - expected) < 1e-10);
    }
    CHECK_THROWS_AS(smooth_preset("unknown", 1.0, 8), std::invalid_argument);
}

TEST_CASE("trajectory save and load") {
    TempDir tmp;
    std::mt19937_64 rng(6);
    const SpectralField u0 = random_field(rng, 8, 2.0, 0.4);
    SolverConfig scfg;
    scfg.dt = 0.01;
    scfg.t_final = 0.1;
    scfg.snapshot_every = 2;
    scfg.invariant_every = 2;
    const Trajectory traj = evolve(u0, ModelParams{1.5, Cutoff::at(6), 2}, scfg);

    save_trajectory(traj, tmp.path / "run");
    const Trajectory back = load_trajectory(tmp.path / "run");
    CHECK(back.snapshots.size() == traj.snapshots.size());
    for (size_t i = 0; i < traj.snapshots.size(); ++i) {
        CHECK(back.snapshots[i].first == traj.snapshots[i].first);
        CHECK(back.snapshots[i].second == traj.snapshots[i].second);
    }
    CHECK(back.invariant_trace.size() == traj.invariant_trace.size());
    CHECK(back.params.cutoff == traj.params.cutoff);
    CHECK(back.termination == Termination::completed);
}
