// Time stepping in integrating-factor form: the linear phase e^{-ik^2 t}
// (below the cutoff) is applied exactly by the free semigroup and the
// explicit stages see only the nonlinearity.

#pragma once

#include "gdnls/invariants.hpp"
#include "gdnls/model.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace gdnls {

enum class Scheme { if_rk4, if_euler };
enum class Termination { completed, blowup_abort, nonfinite_abort };

struct SolverConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    Scheme scheme = Scheme::if_rk4;
    int snapshot_every = 10;    // steps between stored snapshots
    int invariant_every = 10;   // steps between invariant samples
    double blowup_threshold = 1e6;  // H2 norm abort level

    void validate() const;
};

struct Trajectory {
    ModelParams params;
    SolverConfig config;
    std::vector<std::pair<double, SpectralField>> snapshots;
    std::vector<InvariantRecord> invariant_trace;
    Termination termination = Termination::completed;

    const SpectralField& initial() const { return snapshots.front().second; }
    const SpectralField& final_field() const { return snapshots.back().second; }
    double final_time() const { return snapshots.back().first; }
};

/// One step of the chosen scheme. Throws std::runtime_error on nonfinite output.
SpectralField step(const SpectralField& f, const ModelParams& p, double dt,
                   Scheme scheme = Scheme::if_rk4);

Trajectory evolve(const SpectralField& u0, const ModelParams& p, const SolverConfig& cfg);

/// L2 defect of the mild-solution identity at snapshot t_index, with the
/// Duhamel integral evaluated by composite Simpson over the stored snapshots
/// (t_index must be even so the interval count is).
double duhamel_residual(const Trajectory& traj, int t_index);

}  // namespace gdnls
