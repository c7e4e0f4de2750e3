// The gDNLS right-hand side: pseudospectral evaluation of |u|^{2s}u_x and
// the projection-mollified evolution rhs -J(|Ju|^{2s} J u_x) + i (Ju)_xx.

#pragma once

#include "gdnls/spectral.hpp"

namespace gdnls {

struct ModelParams {
    double sigma = 1.0;               // nonlinearity power, >= 1
    Cutoff cutoff = Cutoff::infinite();
    int oversample = 2;               // dealiasing factor, 1..8

    void validate() const;  // throws std::invalid_argument
};

/// |u|^{2sigma} evaluated from |u|^2; defined (and zero) at u = 0 for sigma >= 1.
double amplitude_power(double abs_squared, double sigma);

/// g = |u|^{2sigma} u_x, computed on an oversampled grid and truncated back
/// to the field's modes. The cutoff in p is NOT applied here.
SpectralField nonlinearity(const SpectralField& f, const ModelParams& p);

/// -J(|J f|^{2sigma} (J f)_x) + i (J f)_xx. Output is supported on |k| <= K.
SpectralField rhs_mollified(const SpectralField& f, const ModelParams& p);

/// Just the nonlinear part, -J(|J f|^{2sigma} (J f)_x); the integrating-factor
/// stepper and the Duhamel quadrature both consume this.
SpectralField rhs_nonlinear(const SpectralField& f, const ModelParams& p);

/// ||rhs(f) - rhs(g)||_{H1} / ||f - g||_{H1}. Requires f != g.
double lipschitz_probe(const SpectralField& f, const SpectralField& g, const ModelParams& p);

}  // namespace gdnls
