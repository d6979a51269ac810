#include "atombs/linear_reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "atombs/quadrature.hpp"

namespace atombs {

namespace linear {

SinglePhotonResponse single_photon_response(double x) {
    const cd denom{x, 1.0};
    return {cd{0.0, -1.0} / denom, x / denom};
}

SpectralWindow spectral_window(const Pulse& pulse, double detuning, double gamma) {
    const double wide = std::max(pulse.bandwidth(), gamma);
    const double narrow = std::min(pulse.bandwidth(), gamma);
    // Square spectra fall off as 1/w^2; against the Lorentzian r this leaves
    // 1/w^4 tails, negligible beyond a few hundred bandwidths.
    const double half = 200.0 * wide + std::abs(detuning);
    return {half, quad::odd_sample_count(half, narrow / 40.0)};
}

double single_photon_reflection_coefficient(const Pulse& pulse, double detuning, double gamma) {
    return linear_coincidence_terms(pulse, detuning, gamma).reflection;
}

CoincidenceTerms linear_coincidence_terms(const Pulse& pulse, double detuning, double gamma) {
    const SpectralWindow win = spectral_window(pulse, detuning, gamma);
    const double h = win.step();
    std::vector<double> refl(win.samples);
    std::vector<cd> cross(win.samples);
    for (std::size_t k = 0; k < win.samples; ++k) {
        // Symmetric sample positions keep odd integrands cancelling exactly.
        const double w = (static_cast<double>(k) - static_cast<double>(win.samples / 2)) * h;
        const double weight = std::norm(pulse.spectral_amplitude(w));
        const auto resp = single_photon_response((w + detuning) / gamma);
        refl[k] = weight * std::norm(resp.reflection);
        cross[k] = weight * resp.transmission * std::conj(resp.reflection);
    }
    CoincidenceTerms out{};
    out.reflection = quad::simpson(std::span<const double>(refl), h);
    out.transmission = 1.0 - out.reflection;
    out.cross_integral = quad::simpson(std::span<const cd>(cross), h);
    out.coincidence = out.transmission * out.transmission + out.reflection * out.reflection +
                      2.0 * std::real(out.cross_integral * out.cross_integral);
    return out;
}

double linear_coincidence(const Pulse& pulse, double detuning, double gamma) {
    return linear_coincidence_terms(pulse, detuning, gamma).coincidence;
}

cd linear_joint_amplitude(const Pulse& pulse, double omega1, double omega2, double detuning, double gamma) {
    const auto r1 = single_photon_response((omega1 + detuning) / gamma);
    const auto r2 = single_photon_response((omega2 + detuning) / gamma);
    return pulse.spectral_amplitude(omega1) * pulse.spectral_amplitude(omega2) *
           (r1.transmission * r2.transmission + r1.reflection * r2.reflection);
}

JointDistribution2D linear_joint_spectrum(const Pulse& pulse, const Grid2D& grid, double detuning, double gamma) {
    JointDistribution2D out{grid, std::vector<double>(grid.size()), Domain::Frequency, 0.0, {}};
    const std::size_t nx = grid.x.points();
    const std::size_t ny = grid.y.points();
    std::vector<cd> fy(ny), ty(ny), ry(ny);
    for (std::size_t j = 0; j < ny; ++j) {
        fy[j] = pulse.spectral_amplitude(grid.y[j]);
        const auto resp = single_photon_response((grid.y[j] + detuning) / gamma);
        ty[j] = resp.transmission;
        ry[j] = resp.reflection;
    }
    for (std::size_t i = 0; i < nx; ++i) {
        const cd fx = pulse.spectral_amplitude(grid.x[i]);
        const auto rx = single_photon_response((grid.x[i] + detuning) / gamma);
        for (std::size_t j = 0; j < ny; ++j)
            out.values[grid.index(i, j)] =
                std::norm(fx * fy[j] * (rx.transmission * ty[j] + rx.reflection * ry[j]));
    }
    out.normalization = linear_coincidence(pulse, detuning, gamma);
    const double bare = integrate(grid, out.values);
    if (std::abs(bare - out.normalization) > 0.01 * out.normalization)
        out.warnings.push_back("grid too coarse or too narrow: integral " + std::to_string(bare) +
                               " vs linear coincidence " + std::to_string(out.normalization));
    return out;
}

double interference_locus(Interference kind, double omega1, double gamma) {
    if (omega1 == 0.0) throw std::domain_error("interference locus has no finite partner at w1 = w_A");
    const double partner = gamma * gamma / omega1;
    return kind == Interference::Destructive ? partner : -partner;
}

}  // namespace linear
}  // namespace atombs
