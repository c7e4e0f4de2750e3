#include "gdnls/integrator.hpp"

#include <cmath>
#include <stdexcept>

namespace gdnls {

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
    if (!(t_final > 0.0)) throw std::invalid_argument("SolverConfig: t_final must be > 0");
    if (dt > t_final) throw std::invalid_argument("SolverConfig: dt must be <= t_final");
    if (snapshot_every < 1) throw std::invalid_argument("SolverConfig: snapshot_every must be >= 1");
    if (invariant_every < 1)
        throw std::invalid_argument("SolverConfig: invariant_every must be >= 1");
    if (!(blowup_threshold > 0.0))
        throw std::invalid_argument("SolverConfig: blowup_threshold must be > 0");
}

SpectralField step(const SpectralField& f, const ModelParams& p, double dt, Scheme scheme) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    const Cutoff c = p.cutoff;

    SpectralField out(f.num_modes());
    if (scheme == Scheme::if_euler) {
        SpectralField stage = rhs_nonlinear(f, p);
        stage *= dt;
        stage += f;
        out = free_semigroup(stage, dt, c);
    } else {
        // Classical RK4 on w(tau) = e^{-i J dx^2 tau} u, whose derivative is
        // G(tau, w) = e^{-i J dx^2 tau} Nl(e^{i J dx^2 tau} w).
        const double h = dt;
        const SpectralField& w = f;

        const SpectralField k1 = rhs_nonlinear(w, p);

        SpectralField a = k1;
        a *= 0.5 * h;
        a += w;
        const SpectralField k2 =
            free_semigroup(rhs_nonlinear(free_semigroup(a, 0.5 * h, c), p), -0.5 * h, c);

        SpectralField b = k2;
        b *= 0.5 * h;
        b += w;
        const SpectralField k3 =
            free_semigroup(rhs_nonlinear(free_semigroup(b, 0.5 * h, c), p), -0.5 * h, c);

        SpectralField d = k3;
        d *= h;
        d += w;
        const SpectralField k4 = free_semigroup(rhs_nonlinear(free_semigroup(d, h, c), p), -h, c);

        SpectralField incr = k1;
        incr += k4;
        SpectralField mid = k2;
        mid += k3;
        mid *= 2.0;
        incr += mid;
        incr *= h / 6.0;
        incr += w;
        out = free_semigroup(incr, h, c);
    }
    if (!out.all_finite()) throw std::runtime_error("step: nonfinite field");
    return out;
}

Trajectory evolve(const SpectralField& u0, const ModelParams& p, const SolverConfig& cfg) {
    p.validate();
    cfg.validate();
    u0.check_finite();
    if (!p.cutoff.is_infinite() && p.cutoff.k_max > u0.num_modes())
        throw std::invalid_argument("evolve: cutoff exceeds field resolution");

    Trajectory traj;
    traj.params = p;
    traj.config = cfg;

    const long n_steps = std::lround(cfg.t_final / cfg.dt);
    SpectralField u = u0;

    auto record_time = [&](long step_idx) { return static_cast<double>(step_idx) * cfg.dt; };
    traj.snapshots.emplace_back(0.0, u);
    traj.invariant_trace.push_back(
        invariant_record(u, 0.0, p.sigma, p.cutoff, p.oversample));

    for (long i = 1; i <= n_steps; ++i) {
        try {
            u = step(u, p, cfg.dt, cfg.scheme);
        } catch (const std::runtime_error&) {
            traj.termination = Termination::nonfinite_abort;
            return traj;
        }
        const double t = record_time(i);
        const bool last = (i == n_steps);
        if (i % cfg.snapshot_every == 0 || last) traj.snapshots.emplace_back(t, u);
        if (i % cfg.invariant_every == 0 || last) {
            const InvariantRecord r = invariant_record(u, t, p.sigma, p.cutoff, p.oversample);
            traj.invariant_trace.push_back(r);
            if (r.h2_norm > cfg.blowup_threshold) {
                traj.termination = Termination::blowup_abort;
                return traj;
            }
        }
    }
    traj.termination = Termination::completed;
    return traj;
}

double duhamel_residual(const Trajectory& traj, int t_index) {
    const auto& snaps = traj.snapshots;
    if (t_index < 0 || t_index >= static_cast<int>(snaps.size()))
        throw std::invalid_argument("duhamel_residual: t_index out of range");
    if (t_index == 0) return 0.0;
    if (t_index % 2 != 0)
        throw std::invalid_argument("duhamel_residual: Simpson needs an even interval count");
    if (t_index < 2) throw std::invalid_argument("duhamel_residual: too few snapshots");

    const ModelParams& p = traj.params;
    const double t = snaps[static_cast<size_t>(t_index)].first;
    const double dt_snap = snaps[1].first - snaps[0].first;

    // Simpson weights over snapshots 0..t_index; the integrand is
    // e^{i J dx^2 (t - s)} Nl(u(s)), matching u(t) = e^{i J dx^2 t} u0 + integral.
    SpectralField integral(traj.initial().num_modes());
    for (int j = 0; j <= t_index; ++j) {
        double w = (j == 0 || j == t_index) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        const auto& [s, us] = snaps[static_cast<size_t>(j)];
        SpectralField term = free_semigroup(rhs_nonlinear(us, p), t - s, p.cutoff);
        term *= w;
        integral += term;
    }
    integral *= dt_snap / 3.0;

    SpectralField predicted = free_semigroup(traj.initial(), t, p.cutoff);
    predicted += integral;
    predicted -= snaps[static_cast<size_t>(t_index)].second;
    return l2_norm(predicted);
}

}  // namespace gdnls
