#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gdnls/integrator.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace gdnls;
using gdnls::testing::random_field;

namespace {

SpectralField plane_wave(int num_modes, int k, cplx a) {
    SpectralField f(num_modes);
    f.mode(k) = a;
    return f;
}

// u(x, t) = A e^{i(kx - (k^2 + k|A|^{2s}) t)} solves the unmollified flow.
SpectralField plane_wave_exact(int num_modes, int k, cplx a, double sigma, double t) {
    const double rate = k * k + k * std::pow(std::norm(a), sigma);
    return plane_wave(num_modes, k, a * std::exp(cplx(0.0, -rate * t)));
}

double final_error(double sigma, int k, cplx a, double dt, double t_final) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_final = t_final;
    cfg.snapshot_every = 1 << 30;
    cfg.invariant_every = 1 << 30;
    const ModelParams p{sigma, Cutoff::infinite(), 2};
    const Trajectory traj = evolve(plane_wave(16, k, a), p, cfg);
    SpectralField diff = traj.final_field();
    diff -= plane_wave_exact(16, k, a, sigma, t_final);
    return l2_norm(diff);
}

}  // namespace

TEST_CASE("SolverConfig validation") {
    SolverConfig cfg;
    cfg.dt = 2.0;
    cfg.t_final = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.dt = 0.1;
    cfg.snapshot_every = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("zero field steps to zero field") {
    const SpectralField z(8);
    const ModelParams p{1.5, Cutoff::at(4), 2};
    CHECK(step(z, p, 1e-2) == z);
    CHECK(step(z, p, 1e-2, Scheme::if_euler) == z);
}

TEST_CASE("linear flow is advanced exactly by the semigroup") {
    // zero-amplitude nonlinearity: a field so small the nonlinear term is
    // at round-off; compare one step against the bare semigroup
    SpectralField f(8);
    f.mode(2) = 1e-160;
    const ModelParams p{1.0, Cutoff::infinite(), 2};
    SpectralField diff = step(f, p, 0.01);
    diff -= free_semigroup(f, 0.01);
    CHECK(l2_norm(diff) < 1e-170);
}

TEST_CASE("one step matches the plane-wave phase to O(dt^5)") {
    const double sigma = 1.5;
    const cplx a(0.5, 0.0);
    const int k = 2;
    for (double dt : {0.2, 0.1, 0.05}) {
        const ModelParams p{sigma, Cutoff::infinite(), 2};
        SpectralField diff = step(plane_wave(8, k, a), p, dt);
        diff -= plane_wave_exact(8, k, a, sigma, dt);
        const double nu = k * std::pow(std::norm(a), sigma);
        CHECK(l2_norm(diff) < std::pow(nu * dt, 5.0));
    }
}

TEST_CASE("evolve reproduces the exact plane-wave solution") {
    const double err = final_error(1.5, 2, cplx(0.5, 0.0), 1e-3, 1.0);
    CHECK(err <= 1e-8);
}

TEST_CASE("plane-wave global error ratio under dt halving is order 4") {
    const double e1 = final_error(1.0, 2, cplx(0.8, 0.0), 0.1, 1.0);
    const double e2 = final_error(1.0, 2, cplx(0.8, 0.0), 0.05, 1.0);
    const double ratio = e1 / e2;
    CHECK(ratio >= 14.0);
    CHECK(ratio <= 18.0);
}

TEST_CASE("euler scheme is first order") {
    auto euler_error = [](double dt) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.t_final = 1.0;
        cfg.scheme = Scheme::if_euler;
        cfg.snapshot_every = 1 << 30;
        cfg.invariant_every = 1 << 30;
        const ModelParams p{1.0, Cutoff::infinite(), 2};
        const Trajectory traj = evolve(plane_wave(8, 1, cplx(0.8, 0.0)), p, cfg);
        SpectralField diff = traj.final_field();
        diff -= plane_wave_exact(8, 1, cplx(0.8, 0.0), 1.0, 1.0);
        return l2_norm(diff);
    };
    const double ratio = euler_error(0.01) / euler_error(0.005);
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
}

TEST_CASE("zero data yields an identically zero trajectory") {
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 0.1;
    const Trajectory traj = evolve(SpectralField(8), ModelParams{1.5, Cutoff::at(4), 2}, cfg);
    CHECK(traj.termination == Termination::completed);
    for (const auto& [t, f] : traj.snapshots) CHECK(l2_norm(f) == 0.0);
    for (const auto& r : traj.invariant_trace) {
        CHECK(r.mass == 0.0);
        CHECK(r.energy_eps == 0.0);
    }
}

TEST_CASE("trajectory bookkeeping") {
    std::mt19937_64 rng(3);
    const SpectralField u0 = random_field(rng, 8, 2.0, 0.3);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 0.2;
    cfg.snapshot_every = 5;
    cfg.invariant_every = 2;
    const Trajectory traj = evolve(u0, ModelParams{1.0, Cutoff::at(6), 2}, cfg);
    CHECK(traj.snapshots.front().first == 0.0);
    CHECK(traj.snapshots.front().second == u0);
    for (size_t i = 1; i < traj.snapshots.size(); ++i)
        CHECK(traj.snapshots[i].first > traj.snapshots[i - 1].first);
    CHECK(traj.final_time() == doctest::Approx(0.2));
}

TEST_CASE("projected data stays in the cutoff band; outside modes keep modulus") {
    std::mt19937_64 rng(8);
    const Cutoff c = Cutoff::at(5);
    SolverConfig cfg;
    cfg.dt = 0.005;
    cfg.t_final = 0.25;
    cfg.snapshot_every = 10;
    const ModelParams p{1.5, c, 2};

    SUBCASE("u0 = J u0: modes above K never repopulate") {
        const SpectralField u0 = project(random_field(rng, 12, 2.0, 0.5), c);
        const Trajectory traj = evolve(u0, p, cfg);
        for (const auto& [t, f] : traj.snapshots)
            for (int k = -12; k <= 12; ++k)
                if (std::abs(k) > 5) CHECK(f.mode(k) == cplx(0.0));
    }
    SUBCASE("unprojected u0: above-cutoff moduli are constant") {
        const SpectralField u0 = random_field(rng, 12, 2.0, 0.5);
        const Trajectory traj = evolve(u0, p, cfg);
        for (const auto& [t, f] : traj.snapshots)
            for (int k = -12; k <= 12; ++k)
                if (std::abs(k) > 5)
                    CHECK(std::abs(f.mode(k)) ==
                          doctest::Approx(std::abs(u0.mode(k))).epsilon(1e-13));
    }
}

TEST_CASE("invariant drift scales as order 4 under dt halving") {
    std::mt19937_64 rng(19);
    const SpectralField u0 = project(random_field(rng, 16, 2.0, 0.8), Cutoff::at(8));
    const ModelParams p{1.5, Cutoff::at(8), 4};

    auto drift = [&](double dt) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.t_final = 0.5;
        cfg.snapshot_every = 1 << 30;
        cfg.invariant_every = 1 << 30;
        const Trajectory traj = evolve(u0, p, cfg);
        const InvariantRecord& a = traj.invariant_trace.front();
        const InvariantRecord& b = traj.invariant_trace.back();
        return std::array<double, 3>{std::abs(b.mass - a.mass),
                                     std::abs(b.momentum - a.momentum),
                                     std::abs(b.hamiltonian_eps - a.hamiltonian_eps)};
    };
    const auto d1 = drift(0.02);
    const auto d2 = drift(0.01);
    for (int i = 0; i < 3; ++i) {
        const double order = std::log2(d1[static_cast<size_t>(i)] / d2[static_cast<size_t>(i)]);
        // The leading global error term of the scheme rotates rather than
        // dissipates the quadratic invariants (|R(iy)|^2 = 1 - y^6/72 + ...),
        // so the drift decays at least at the scheme order and typically
        // faster (close to 5).
        CHECK(order >= 3.7);
        CHECK(order <= 5.5);
    }
}

TEST_CASE("time-reversal returns the initial datum") {
    // conj(u(-x, T - s)) solves the same equation, so running the forward
    // flow from the coefficient-conjugated final state undoes the evolution
    // (per-mode conjugation is conjugation composed with x -> -x).
    auto conj_coeffs = [](const SpectralField& f) {
        SpectralField out = f;
        for (int k = -f.num_modes(); k <= f.num_modes(); ++k)
            out.mode(k) = std::conj(out.mode(k));
        return out;
    };
    std::mt19937_64 rng(29);
    const SpectralField u0 = project(random_field(rng, 12, 2.0, 0.6), Cutoff::at(8));
    const ModelParams p{1.0, Cutoff::at(8), 2};
    SolverConfig cfg;
    cfg.dt = 0.002;
    cfg.t_final = 0.3;
    cfg.snapshot_every = 1 << 30;
    cfg.invariant_every = 1 << 30;

    const Trajectory fwd = evolve(u0, p, cfg);
    const Trajectory back = evolve(conj_coeffs(fwd.final_field()), p, cfg);
    SpectralField diff = conj_coeffs(back.final_field());
    diff -= u0;
    CHECK(l2_norm(diff) < 1e-9);
}

TEST_CASE("blowup threshold aborts the run") {
    std::mt19937_64 rng(4);
    const SpectralField u0 = random_field(rng, 8, 2.0, 0.5);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 1.0;
    cfg.invariant_every = 1;
    cfg.blowup_threshold = hs_norm(u0, SobolevIndex{2.0}) * 1e-6;  // guaranteed trip
    const Trajectory traj = evolve(u0, ModelParams{1.0, Cutoff::infinite(), 2}, cfg);
    CHECK(traj.termination == Termination::blowup_abort);
}

TEST_CASE("duhamel residual") {
    SUBCASE("t = 0 gives zero residual") {
        std::mt19937_64 rng(6);
        const SpectralField u0 = random_field(rng, 8, 2.0, 0.4);
        SolverConfig cfg;
        cfg.dt = 0.005;
        cfg.t_final = 0.1;
        cfg.snapshot_every = 1;
        const Trajectory traj = evolve(u0, ModelParams{1.0, Cutoff::infinite(), 2}, cfg);
        CHECK(duhamel_residual(traj, 0) == 0.0);
    }
    SUBCASE("plane wave residual is at the quadrature tolerance") {
        SolverConfig cfg;
        cfg.dt = 0.001;
        cfg.t_final = 0.5;
        cfg.snapshot_every = 5;
        const Trajectory traj =
            evolve(plane_wave(8, 2, cplx(0.5, 0.0)), ModelParams{1.5, Cutoff::infinite(), 2}, cfg);
        const int last = static_cast<int>(traj.snapshots.size()) - 1;
        CHECK(duhamel_residual(traj, last) < 1e-6);
    }
    SUBCASE("residual decreases at Simpson order under snapshot refinement") {
        std::mt19937_64 rng(16);
        const SpectralField u0 = random_field(rng, 12, 2.0, 0.8);
        auto residual_at = [&](int snapshot_every) {
            SolverConfig cfg;
            cfg.dt = 0.0005;
            cfg.t_final = 0.4;
            cfg.snapshot_every = snapshot_every;
            cfg.invariant_every = 1 << 30;
            const Trajectory traj = evolve(u0, ModelParams{1.0, Cutoff::infinite(), 2}, cfg);
            return duhamel_residual(traj, static_cast<int>(traj.snapshots.size()) - 1);
        };
        // Coarser spacings are preasymptotic for this datum; the Simpson
        // rate shows at spacing 5e-3 -> 2.5e-3.
        const double r_coarse = residual_at(10);
        const double r_fine = residual_at(5);
        const double order = std::log2(r_coarse / r_fine);
        CHECK(order >= 3.0);
        CHECK(order <= 5.0);
    }
    SUBCASE("odd snapshot index rejected") {
        SolverConfig cfg;
        cfg.dt = 0.01;
        cfg.t_final = 0.1;
        cfg.snapshot_every = 1;
        const Trajectory traj =
            evolve(plane_wave(4, 1, cplx(0.3, 0.0)), ModelParams{1.0, Cutoff::infinite(), 2}, cfg);
        CHECK_THROWS_AS(duhamel_residual(traj, 3), std::invalid_argument);
    }
}
