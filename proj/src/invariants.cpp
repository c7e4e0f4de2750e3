#include "gdnls/invariants.hpp"

#include <cmath>
#include <stdexcept>

namespace gdnls {

bool InvariantRecord::all_finite() const {
    for (double v : {t, mass, momentum, hamiltonian, hamiltonian_eps, energy_eps, h1_norm, h2_norm})
        if (!std::isfinite(v)) return false;
    return true;
}

DichotomyParams DichotomyParams::make(double sigma, double c_sigma) {
    if (!(sigma >= 1.0)) throw std::invalid_argument("DichotomyParams: sigma must be >= 1");
    if (!(c_sigma > 0.0)) throw std::invalid_argument("DichotomyParams: c_sigma must be > 0");
    DichotomyParams d;
    d.sigma = sigma;
    d.c_sigma = c_sigma;
    d.x_star = std::pow((sigma + 1.0) * c_sigma, -1.0 / (2.0 * sigma));
    d.f_at_x_star = f_sigma(d.x_star, d);
    return d;
}

double mass(const SpectralField& f) {
    double sum = 0.0;
    const int n = f.num_modes();
    for (int k = -n; k <= n; ++k) sum += std::norm(f.mode(k));
    return 2.0 * M_PI * sum;
}

double momentum(const SpectralField& f) {
    double sum = 0.0;
    const int n = f.num_modes();
    for (int k = -n; k <= n; ++k) sum += static_cast<double>(k) * std::norm(f.mode(k));
    return -M_PI * sum;
}

double lp_integral(const SpectralField& f, double p, int oversample) {
    const auto u = to_physical(f, oversample);
    double sum = 0.0;
    for (const cplx& v : u) sum += amplitude_power(std::norm(v), p / 2.0);
    return 2.0 * M_PI * sum / static_cast<double>(u.size());
}

double hamiltonian(const SpectralField& f, double sigma, Cutoff c, int oversample) {
    const double kinetic = 2.0 * M_PI * [&] {
        double s = 0.0;
        const int n = f.num_modes();
        for (int k = -n; k <= n; ++k) s += static_cast<double>(k) * k * std::norm(f.mode(k));
        return s;
    }();

    const SpectralField v = project(f, c);
    const auto vu = to_physical(v, oversample);
    const auto vx = to_physical(derivative(v), oversample);
    double pot = 0.0;
    for (size_t i = 0; i < vu.size(); ++i)
        pot += amplitude_power(std::norm(vu[i]), sigma) * std::imag(std::conj(vu[i]) * vx[i]);
    pot *= 2.0 * M_PI / static_cast<double>(vu.size());
    return kinetic + pot / (sigma + 1.0);
}

double energy(const SpectralField& f, double sigma, Cutoff c, int oversample) {
    const double cbar = 1.0 / (2.0 * (sigma + 1.0) * (sigma + 1.0));
    const SpectralField v = project(f, c);
    return hamiltonian(f, sigma, c, oversample) + 0.5 * mass(f) +
           cbar * lp_integral(v, 4.0 * sigma + 2.0, oversample);
}

InvariantRecord invariant_record(const SpectralField& f, double t, double sigma, Cutoff c,
                                 int oversample) {
    InvariantRecord r;
    r.t = t;
    r.mass = mass(f);
    r.momentum = momentum(f);
    r.hamiltonian = hamiltonian(f, sigma, Cutoff::infinite(), oversample);
    r.hamiltonian_eps = hamiltonian(f, sigma, c, oversample);
    r.energy_eps = energy(f, sigma, c, oversample);
    r.h1_norm = hs_norm(f, SobolevIndex{1.0});
    r.h2_norm = hs_norm(f, SobolevIndex{2.0});
    return r;
}

double f_sigma(double x, const DichotomyParams& d) {
    if (!(x >= 0.0)) throw std::invalid_argument("f_sigma: x must be >= 0");
    return x * x - d.c_sigma * std::pow(x, 2.0 * d.sigma + 2.0);
}

double compute_c_sigma(double sigma, int num_modes) {
    double series = 1.0;  // k = 0 term
    for (int k = 1; k <= num_modes; ++k) series += 2.0 / (1.0 + static_cast<double>(k) * k);
    const double c_inf = std::sqrt(series / (2.0 * M_PI));
    return std::sqrt(2.0 * M_PI) * std::pow(c_inf, 2.0 * sigma + 1.0) / (sigma + 1.0);
}

DichotomyClass dichotomy_classify(const InvariantRecord& r, const DichotomyParams& d) {
    if (r.mass + r.hamiltonian >= d.f_at_x_star) return DichotomyClass::not_applicable;
    return r.h1_norm < d.x_star ? DichotomyClass::below : DichotomyClass::above;
}

}  // namespace gdnls
