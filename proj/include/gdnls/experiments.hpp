// Scripted verification experiments: each one produces a deterministic
// pass/fail report with its data tables and fitted constants.

#pragma once

#include "gdnls/integrator.hpp"
#include "gdnls/io.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gdnls {

enum class Verdict { pass, fail, inconclusive };

const char* verdict_name(Verdict v);

struct NumericTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
    std::string name;
    Verdict verdict = Verdict::inconclusive;
    std::map<std::string, NumericTable> tables;
    std::map<std::string, double> fitted_constants;
    std::map<std::string, double> tolerances;
    uint64_t seed = 0;
    std::string detail;  // violating sample on fail, free-form notes otherwise
};

/// Least-squares line y = intercept + slope * x.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double max_abs_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Runs jobs concurrently, bounded by GDNLS_THREADS (default: hardware).
void run_parallel(std::vector<std::function<void()>> jobs);

/// Emits report.json plus one CSV per table under
/// base/<name>_<timestamp>_<seed>/ and returns the directory.
std::filesystem::path write_report(const ExperimentReport& report,
                                   const std::filesystem::path& base);

/// Cutoff sweep against a high-cutoff reference run; distance is the
/// discrete L2-in-time L2-in-space gap over common snapshot times.
ExperimentReport eps_convergence(const SpectralField& u0, double sigma,
                                 const std::vector<int>& cutoffs, int reference_cutoff,
                                 int oversample, const SolverConfig& cfg);

/// Sample-wise check of d/dt integral |u|^{2r} against (4r-1)(1+h1^2)^{r+sigma}.
ExperimentReport lower_order_probe(const Trajectory& traj, double r);

/// Sample-wise check of d/dt ||u||_{H2}^2 against (6s+8s^2)||u||_{H2}^e for
/// both candidate exponents e = 2s+2 and e = 4s+4; verdict keyed to 2s+2.
ExperimentReport h2_growth_probe(const Trajectory& traj, double sigma);

/// Perturbation scaling: gap at t_final in H^{s'} across delta, delta/10,
/// delta/100 must scale with exponent >= 0.9 (1 - s'/2), and the L2 gap may
/// grow at most exponentially in time.
ExperimentReport continuous_dependence_probe(const SpectralField& u0, double delta,
                                             double s_prime, const ModelParams& p,
                                             const SolverConfig& cfg);

ExperimentReport hamiltonian_monotonicity(const Trajectory& traj);

/// Plane-wave amplitude scan of the small-data dichotomy at wavenumber k.
ExperimentReport dichotomy_experiment(const std::vector<double>& amplitudes, double sigma,
                                      int wavenumber, int num_modes, const ModelParams& p,
                                      const SolverConfig& cfg);

/// H2 boundedness scan over sigma with an N-doubling / dt-halving cross-check
/// on any abort.
ExperimentReport blowup_scan(const SpectralField& u0, const std::vector<double>& sigma_list,
                             const ModelParams& p_template, const SolverConfig& cfg);

}  // namespace gdnls
