#include "gdnls/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace gdnls {

namespace {

constexpr int kMaxGridSize = 1 << 21;

// FFTW planner is not thread-safe; plans and their buffers are cached
// per thread, creation guarded globally.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftPlan {
    fftw_plan forward = nullptr;   // physical -> spectral (negative exponent)
    fftw_plan backward = nullptr;  // spectral -> physical (positive exponent)
    fftw_complex* buf_in = nullptr;
    fftw_complex* buf_out = nullptr;
    int n = 0;

    ~FftPlan() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buf_in) fftw_free(buf_in);
        if (buf_out) fftw_free(buf_out);
    }
};

FftPlan& plan_for(int n) {
    thread_local std::map<int, FftPlan> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    FftPlan& p = cache[n];
    p.n = n;
    p.buf_in = fftw_alloc_complex(static_cast<size_t>(n));
    p.buf_out = fftw_alloc_complex(static_cast<size_t>(n));
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        p.forward = fftw_plan_dft_1d(n, p.buf_in, p.buf_out, FFTW_FORWARD, FFTW_ESTIMATE);
        p.backward = fftw_plan_dft_1d(n, p.buf_in, p.buf_out, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    return p;
}

// Weight 1 + |k|^{2s}, with s = 0 collapsing to the plain L2 weight.
double sobolev_weight(int k, double s) {
    if (k == 0 || s == 0.0) return 1.0;
    return 1.0 + std::pow(static_cast<double>(std::abs(k)), 2.0 * s);
}

}  // namespace

Cutoff Cutoff::at(int k_max) {
    if (k_max < 0) throw std::invalid_argument("Cutoff::at: k_max must be >= 0");
    return Cutoff{k_max};
}

Cutoff Cutoff::from_epsilon(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("Cutoff::from_epsilon: eps must be > 0");
    return Cutoff{static_cast<int>(std::ceil(1.0 / eps))};
}

SobolevIndex::SobolevIndex(double value) : s(value) {
    if (!(value >= 0.0) || value > kMax)
        throw std::invalid_argument("SobolevIndex: s must lie in [0, " + std::to_string(kMax) + "]");
}

SpectralField::SpectralField(int num_modes) : num_modes_(num_modes) {
    if (num_modes < 0) throw std::invalid_argument("SpectralField: num_modes must be >= 0");
    coeffs_.assign(static_cast<size_t>(2 * num_modes + 1), cplx{0.0, 0.0});
}

bool SpectralField::all_finite() const {
    for (const cplx& c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

void SpectralField::check_finite() const {
    if (!all_finite()) throw std::runtime_error("SpectralField: nonfinite coefficient");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    if (other.num_modes_ != num_modes_) throw std::invalid_argument("mode count mismatch");
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    if (other.num_modes_ != num_modes_) throw std::invalid_argument("mode count mismatch");
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(cplx scale) {
    for (cplx& c : coeffs_) c *= scale;
    return *this;
}

int friendly_grid_size(int n) {
    for (int m = n;; ++m) {
        int r = m;
        while (r % 2 == 0) r /= 2;
        while (r % 3 == 0) r /= 3;
        while (r % 5 == 0) r /= 5;
        if (r == 1) return m;
    }
}

std::vector<cplx> to_physical(const SpectralField& f, int oversample) {
    if (oversample < 1) throw std::invalid_argument("to_physical: oversample must be >= 1");
    const int n_modes = f.size();
    const int m = friendly_grid_size(oversample * n_modes);
    if (m > kMaxGridSize) throw std::runtime_error("to_physical: grid size exceeds maximum");

    FftPlan& p = plan_for(m);
    for (int i = 0; i < m; ++i) p.buf_in[i][0] = p.buf_in[i][1] = 0.0;
    const int n = f.num_modes();
    for (int k = -n; k <= n; ++k) {
        const int idx = (k % m + m) % m;
        const cplx& c = f.mode(k);
        p.buf_in[idx][0] = c.real();
        p.buf_in[idx][1] = c.imag();
    }
    // BACKWARD: out[j] = sum_k in[k] e^{+2pi i jk/m} = u(2pi j/m), unscaled.
    fftw_execute(p.backward);

    std::vector<cplx> grid(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) grid[static_cast<size_t>(i)] = cplx(p.buf_out[i][0], p.buf_out[i][1]);
    return grid;
}

SpectralField to_spectral(std::span<const cplx> grid, int num_modes) {
    const int m = static_cast<int>(grid.size());
    if (m < 2 * num_modes + 1)
        throw std::invalid_argument("to_spectral: grid too coarse for requested modes");

    FftPlan& p = plan_for(m);
    for (int i = 0; i < m; ++i) {
        p.buf_in[i][0] = grid[static_cast<size_t>(i)].real();
        p.buf_in[i][1] = grid[static_cast<size_t>(i)].imag();
    }
    fftw_execute(p.forward);

    SpectralField f(num_modes);
    const double inv_m = 1.0 / m;
    for (int k = -num_modes; k <= num_modes; ++k) {
        const int idx = (k % m + m) % m;
        f.mode(k) = cplx(p.buf_out[idx][0], p.buf_out[idx][1]) * inv_m;
    }
    return f;
}

SpectralField project(const SpectralField& f, Cutoff c) {
    if (c.is_infinite()) return f;
    if (c.k_max > f.num_modes())
        throw std::invalid_argument("project: cutoff exceeds field resolution");
    SpectralField out = f;
    const int n = f.num_modes();
    for (int k = -n; k <= n; ++k)
        if (std::abs(k) > c.k_max) out.mode(k) = 0.0;
    return out;
}

double hs_norm(const SpectralField& f, SobolevIndex s) {
    double sum = 0.0;
    const int n = f.num_modes();
    for (int k = -n; k <= n; ++k) sum += sobolev_weight(k, s.s) * std::norm(f.mode(k));
    return std::sqrt(2.0 * M_PI * sum);
}

double l2_norm(const SpectralField& f) { return hs_norm(f, SobolevIndex{}); }

cplx inner_product(const SpectralField& f, const SpectralField& g) {
    if (f.num_modes() != g.num_modes()) throw std::invalid_argument("mode count mismatch");
    cplx sum = 0.0;
    const int n = f.num_modes();
    for (int k = -n; k <= n; ++k) sum += std::conj(f.mode(k)) * g.mode(k);
    return 2.0 * M_PI * sum;
}

SpectralField derivative(const SpectralField& f, int order) {
    if (order < 0) throw std::invalid_argument("derivative: order must be >= 0");
    SpectralField out = f;
    const int n = f.num_modes();
    for (int k = -n; k <= n; ++k) {
        cplx ik{0.0, static_cast<double>(k)};
        cplx factor = 1.0;
        for (int j = 0; j < order; ++j) factor *= ik;
        out.mode(k) *= factor;
    }
    return out;
}

double mollifier_gain_probe(const SpectralField& f, SobolevIndex s, Cutoff c) {
    if (c.is_infinite() || c.k_max < 1)
        throw std::invalid_argument("mollifier_gain_probe: needs a finite cutoff >= 1");
    const double l2 = l2_norm(f);
    if (l2 == 0.0) throw std::invalid_argument("mollifier_gain_probe: zero field");
    const double gain = hs_norm(project(f, c), s);
    return gain / (std::pow(static_cast<double>(c.k_max), s.s) * l2);
}

bool interpolation_check(const SpectralField& f, SobolevIndex m, SobolevIndex l) {
    if (m.s > l.s) throw std::invalid_argument("interpolation_check: requires m <= l");
    const double l2 = l2_norm(f);
    if (l2 == 0.0) throw std::invalid_argument("interpolation_check: zero field");
    if (l.s == 0.0) return true;  // m = l = 0, equality with c = sqrt(2)
    const double lhs = hs_norm(f, m);
    const double ratio = m.s / l.s;
    const double rhs = std::sqrt(2.0) * std::pow(hs_norm(f, l), ratio) * std::pow(l2, 1.0 - ratio);
    return lhs <= rhs;
}

SpectralField free_semigroup(const SpectralField& f, double t, Cutoff c) {
    SpectralField out = f;
    const int n = f.num_modes();
    for (int k = -n; k <= n; ++k) {
        if (!c.keeps(k)) continue;
        const double phase = -static_cast<double>(k) * k * t;
        out.mode(k) *= cplx(std::cos(phase), std::sin(phase));
    }
    return out;
}

}  // namespace gdnls
