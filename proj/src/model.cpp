#include "gdnls/model.hpp"

#include <cmath>
#include <stdexcept>

namespace gdnls {

void ModelParams::validate() const {
    if (!(sigma >= 1.0)) throw std::invalid_argument("ModelParams: sigma must be >= 1");
    if (oversample < 1 || oversample > 8)
        throw std::invalid_argument("ModelParams: oversample must lie in 1..8");
}

double amplitude_power(double abs_squared, double sigma) {
    if (abs_squared < 1e-300) return 0.0;
    return std::exp(sigma * std::log(abs_squared));
}

SpectralField nonlinearity(const SpectralField& f, const ModelParams& p) {
    f.check_finite();
    const SpectralField fx = derivative(f);
    const auto u = to_physical(f, p.oversample);
    const auto ux = to_physical(fx, p.oversample);

    std::vector<cplx> product(u.size());
    for (size_t i = 0; i < u.size(); ++i)
        product[i] = amplitude_power(std::norm(u[i]), p.sigma) * ux[i];
    return to_spectral(product, f.num_modes());
}

SpectralField rhs_nonlinear(const SpectralField& f, const ModelParams& p) {
    const SpectralField v = project(f, p.cutoff);
    SpectralField out = project(nonlinearity(v, p), p.cutoff);
    out *= -1.0;
    return out;
}

SpectralField rhs_mollified(const SpectralField& f, const ModelParams& p) {
    const SpectralField v = project(f, p.cutoff);
    SpectralField out = rhs_nonlinear(f, p);
    out += cplx{0.0, 1.0} * derivative(v, 2);
    return out;
}

double lipschitz_probe(const SpectralField& f, const SpectralField& g, const ModelParams& p) {
    SpectralField diff = f;
    diff -= g;
    const double denom = hs_norm(diff, SobolevIndex{1.0});
    if (denom == 0.0) throw std::invalid_argument("lipschitz_probe: f == g");
    SpectralField dr = rhs_mollified(f, p);
    dr -= rhs_mollified(g, p);
    return hs_norm(dr, SobolevIndex{1.0}) / denom;
}

}  // namespace gdnls
