// Conserved functionals of the (mollified) gDNLS flow and the small-data
// dichotomy machinery built on them.

#pragma once

#include "gdnls/model.hpp"
#include "gdnls/spectral.hpp"

namespace gdnls {

struct InvariantRecord {
    double t = 0.0;
    double mass = 0.0;
    double momentum = 0.0;
    double hamiltonian = 0.0;      // unmollified H
    double hamiltonian_eps = 0.0;  // H with the cutoff inserted in the potential
    double energy_eps = 0.0;
    double h1_norm = 0.0;
    double h2_norm = 0.0;

    bool all_finite() const;
};

/// Parameters of the invariant bound M + H >= x^2 - c_sigma x^{2sigma+2}.
struct DichotomyParams {
    double sigma = 1.0;
    double c_sigma = 0.0;
    double x_star = 0.0;
    double f_at_x_star = 0.0;

    static DichotomyParams make(double sigma, double c_sigma);
};

enum class DichotomyClass { below, above, not_applicable };

/// M = integral |u|^2 = 2pi sum |c_k|^2 (Plancherel, no quadrature).
double mass(const SpectralField& f);

/// P = -1/2 integral conj(u) (1/i) u_x = -pi sum k |c_k|^2.
double momentum(const SpectralField& f);

/// integral |u|^p dx by trapezoid quadrature on the oversampled grid.
double lp_integral(const SpectralField& f, double p, int oversample = 2);

/// H = ||f_x||_{L2}^2 + (sigma+1)^{-1} integral |v|^{2sigma} Im(conj(v) v_x),
/// v = J f. The potential is the product-rule rewrite of
/// (sigma+1)^{-2} conj(v)^{sigma+1} D_x v^{sigma+1}, branch-free in sigma.
double hamiltonian(const SpectralField& f, double sigma, Cutoff c = Cutoff::infinite(),
                   int oversample = 2);

/// E = H_eps + 1/2 M + cbar integral |J f|^{4sigma+2}, cbar = 1/(2(sigma+1)^2).
/// Dominates ||f||_{H1}^2 / 2.
double energy(const SpectralField& f, double sigma, Cutoff c = Cutoff::infinite(),
              int oversample = 2);

InvariantRecord invariant_record(const SpectralField& f, double t, double sigma,
                                 Cutoff c = Cutoff::infinite(), int oversample = 2);

/// x^2 - c_sigma x^{2sigma+2}; x >= 0.
double f_sigma(double x, const DichotomyParams& d);

/// A documented c_sigma for fields band-limited to N:
///   (1/(sigma+1)) ||u||_{L^{4s+2}}^{2s+1} ||u_x||_{L2}
///     <= (1/(sigma+1)) (2pi)^{1/2} Cinf^{2s+1} ||u||_{H1}^{2s+2}
/// with Cinf = sqrt( sum_{|k|<=N} (1+k^2)^{-1} / (2pi) ), the Cauchy-Schwarz
/// bound ||u||_{Linf} <= Cinf ||u||_{H1} on the truncated mode range.
double compute_c_sigma(double sigma, int num_modes);

DichotomyClass dichotomy_classify(const InvariantRecord& r, const DichotomyParams& d);

}  // namespace gdnls
