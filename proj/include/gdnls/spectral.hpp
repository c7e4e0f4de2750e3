// Periodic Fourier representation on [0, 2pi): fields stored as modes
// k = -N..N, sharp spectral cutoff, Sobolev norms with weight 1 + |k|^{2s},
// and the free Schrodinger semigroup e^{-i k^2 t} below the cutoff.
//
// Normalization: u(x) = sum_k c_k e^{ikx}, so ||u||_{L2}^2 = 2pi sum |c_k|^2.

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gdnls {

using cplx = std::complex<double>;

/// Sharp Fourier cutoff: keeps modes |k| <= k_max. A negative k_max is the
/// "no cutoff" sentinel (identity projection).
struct Cutoff {
    int k_max = -1;

    static Cutoff infinite() { return Cutoff{-1}; }
    static Cutoff at(int k_max);
    /// k_max = ceil(1/eps), the projection radius for mollification strength eps.
    static Cutoff from_epsilon(double eps);

    bool is_infinite() const { return k_max < 0; }
    bool keeps(int k) const { return is_infinite() || std::abs(k) <= k_max; }

    bool operator==(const Cutoff&) const = default;
};

/// Nonnegative Sobolev smoothness index, capped to keep the spectral
/// weights |k|^{2s} well conditioned.
struct SobolevIndex {
    double s = 0.0;
    static constexpr double kMax = 4.0;

    SobolevIndex() = default;
    SobolevIndex(double value);  // throws std::invalid_argument outside [0, kMax]
};

class SpectralField {
public:
    explicit SpectralField(int num_modes);

    int num_modes() const { return num_modes_; }
    int size() const { return 2 * num_modes_ + 1; }

    cplx& mode(int k) { return coeffs_[static_cast<size_t>(k + num_modes_)]; }
    const cplx& mode(int k) const { return coeffs_[static_cast<size_t>(k + num_modes_)]; }

    std::span<cplx> coeffs() { return coeffs_; }
    std::span<const cplx> coeffs() const { return coeffs_; }

    bool all_finite() const;
    /// Throws std::runtime_error if any coefficient is NaN/Inf.
    void check_finite() const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(cplx scale);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(cplx s, SpectralField f) { return f *= s; }

    bool operator==(const SpectralField&) const = default;

private:
    int num_modes_;
    std::vector<cplx> coeffs_;
};

/// Smallest 5-smooth integer >= n; transform-friendly grid sizes.
int friendly_grid_size(int n);

/// Samples the band-limited field at M = friendly(oversample * (2N+1))
/// equispaced points x_j = 2pi j / M.
std::vector<cplx> to_physical(const SpectralField& f, int oversample = 1);

/// Recovers modes -N..N from equispaced samples; requires grid.size() >= 2N+1.
SpectralField to_spectral(std::span<const cplx> grid, int num_modes);

/// Sharp projection: zero all modes with |k| > c.k_max.
SpectralField project(const SpectralField& f, Cutoff c);

/// sqrt( 2pi sum_k (1 + |k|^{2s}) |c_k|^2 ); s = 0 gives the L2 norm.
double hs_norm(const SpectralField& f, SobolevIndex s);

double l2_norm(const SpectralField& f);

/// Plancherel inner product <f, g> = 2pi sum conj(f_k) g_k.
cplx inner_product(const SpectralField& f, const SpectralField& g);

/// Spectral derivative d^order/dx^order (multiply by (ik)^order).
SpectralField derivative(const SpectralField& f, int order = 1);

/// ||J f||_{H^s} / (K^s ||f||_{L2}); bounded by sqrt(2) for every input.
/// Requires a finite cutoff with k_max >= 1 and a nonzero field.
double mollifier_gain_probe(const SpectralField& f, SobolevIndex s, Cutoff c);

/// Whether ||f||_{H^m} <= sqrt(2) ||f||_{H^l}^{m/l} ||f||_{L2}^{1-m/l}.
/// Requires 0 <= m <= l and f nonzero.
bool interpolation_check(const SpectralField& f, SobolevIndex m, SobolevIndex l);

/// Diagonal phase e^{-i k^2 t} on modes |k| <= c.k_max, identity above.
/// c infinite gives the full free Schrodinger flow.
SpectralField free_semigroup(const SpectralField& f, double t, Cutoff c = Cutoff::infinite());

}  // namespace gdnls
