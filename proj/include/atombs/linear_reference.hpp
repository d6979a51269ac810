#pragma once

// Hypothetical linear beamsplitter with the atom's single-photon response.

#include <string>
#include <vector>

#include "atombs/core.hpp"
#include "atombs/distribution.hpp"
#include "atombs/pulse.hpp"

namespace atombs {

namespace linear {

struct SinglePhotonResponse {
    cd reflection;
    cd transmission;
};

/// r(x) = -i/(x+i), t(x) = x/(x+i) at x = (w - w_A)/gamma.
SinglePhotonResponse single_photon_response(double x);

/// Spectral quadrature window shared by the 1D integrals in this module.
struct SpectralWindow {
    double half_width;
    std::size_t samples;  // odd
    double step() const { return 2.0 * half_width / static_cast<double>(samples - 1); }
};
SpectralWindow spectral_window(const Pulse& pulse, double detuning, double gamma);

/// R = \int |f(w) r_w|^2 dw for the pulse at carrier detuning `detuning`.
double single_photon_reflection_coefficient(const Pulse& pulse, double detuning, double gamma = 1.0);

struct CoincidenceTerms {
    double reflection;    // R
    double transmission;  // T = 1 - R
    cd cross_integral;    // \int |f|^2 t r*
    double coincidence;   // T^2 + R^2 + 2 Re[cross^2]
};
CoincidenceTerms linear_coincidence_terms(const Pulse& pulse, double detuning, double gamma = 1.0);
double linear_coincidence(const Pulse& pulse, double detuning, double gamma = 1.0);

/// f(w1) f(w2) (t1 t2 + r1 r2); frequencies measured from the carrier.
cd linear_joint_amplitude(const Pulse& pulse, double omega1, double omega2, double detuning,
                          double gamma = 1.0);

/// |linear_joint_amplitude|^2 on the grid. `normalization` is the exact
/// full-plane integral linear_coincidence; a warning is added when the grid
/// integral is more than 1% away from it.
JointDistribution2D linear_joint_spectrum(const Pulse& pulse, const Grid2D& grid, double detuning = 0.0,
                                          double gamma = 1.0);

enum class Interference { Destructive, Constructive };

/// Partner frequency on (w1-w_A)(w2-w_A) = +gamma^2 (destructive) or
/// -gamma^2 (constructive). Both frequencies measured from w_A.
/// Throws std::domain_error for omega1 == 0.
double interference_locus(Interference kind, double omega1, double gamma = 1.0);

}  // namespace linear
}  // namespace atombs
