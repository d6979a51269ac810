#pragma once

// Coincidence-sector two-photon amplitude for identical, simultaneous pulses
// on resonance.
//
// Positions tau are measured from the pulse wavefront and coincide with the
// time at which that part of the pulse reaches the atom. The amplitude at
// running time t is
//
//   c_s = xi1 xi2 + th(t - tau2) [xi1 cA2 + 2 th(tau2 - tau1) cA1 cnl(tau2, tau1)] + (1 <-> 2)
//
// where cA is the linear reemission amplitude and cnl the same convolution
// started at tau1 instead of the wavefront. On the diagonal cnl vanishes, so
// the pair term only ever contributes with the later position; th(0) = 1.

#include <limits>
#include <optional>
#include <vector>

#include "atombs/core.hpp"
#include "atombs/distribution.hpp"
#include "atombs/pulse.hpp"

namespace atombs::amplitude {

/// Running time standing for "after the scattering is over".
inline constexpr double kAfterScattering = std::numeric_limits<double>::infinity();

/// Atomic: saturable two-level response. Linear: cnl replaced by cA, which is
/// the linear beamsplitter with the same single-photon response.
enum class Model { Atomic, Linear };

/// cA(tau) = -gamma \int_{start}^{tau} e^{-gamma (tau - s)} xi(s) ds.
cd linear_response(const Pulse& pulse, double tau, double gamma = 1.0);
/// cnl(tau2, tau1) = -gamma \int_{tau1}^{tau2} e^{-gamma (tau2 - s)} xi(s) ds.
cd nonlinear_response(const Pulse& pulse, double tau2, double tau1, double gamma = 1.0);

/// cA and cnl tabulated on a grid.
class AtomResponse {
  public:
    AtomResponse(const Pulse& pulse, const Grid1D& grid, double gamma = 1.0);

    const Grid1D& grid() const { return grid_; }
    double gamma() const { return gamma_; }
    cd linear(std::size_t i) const { return linear_[i]; }
    const std::vector<cd>& linear_values() const { return linear_; }
    /// cnl(tau_i2, tau_i1); only i1 <= i2 is stored. Throws std::out_of_range
    /// for i1 > i2.
    cd nonlinear(std::size_t i2, std::size_t i1) const;

  private:
    Grid1D grid_;
    double gamma_;
    std::vector<cd> linear_;
    std::vector<cd> nonlinear_;  // packed lower triangle, row i2 holds i1 = 0..i2
};

AtomResponse atom_response(const Pulse& pulse, const Grid1D& grid, double gamma = 1.0);

struct CoincidenceAmplitude {
    Grid2D grid;
    std::vector<cd> values;
    double time = kAfterScattering;

    cd at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
};

/// c_s on a symmetric grid. Nodes on a pulse edge use the mean of the two
/// one-sided limits of xi. Throws std::invalid_argument for x != y.
CoincidenceAmplitude coincidence_amplitude(const Pulse& pulse, const Grid2D& grid, double t = kAfterScattering,
                                           Model model = Model::Atomic, double gamma = 1.0);

/// |c_s|^2 on a symmetric grid. Nodes on a pulse edge hold the mean of the
/// densities built from each one-sided limit, which keeps the trapezoid
/// integral second order.
JointDistribution2D joint_time_distribution(const Pulse& pulse, double t, const Grid2D& grid,
                                            Model model = Model::Atomic, double gamma = 1.0);

struct PathAmplitudes {
    cd a;   // no interaction
    cd b1;  // photon 1 absorbed and reemitted
    cd b2;  // photon 2 absorbed and reemitted
    cd c1;  // both absorbed, reemitted in opposite directions
    cd c2;

    cd sum() const { return a + b1 + b2 + c1 + c2; }
};

/// The five coincidence paths at (tau1, tau2). Under Model::Atomic the (c)
/// paths carry the saturation correction.
PathAmplitudes path_decomposition(const Pulse& pulse, double tau1, double tau2, double t = kAfterScattering,
                                  Model model = Model::Atomic, double gamma = 1.0);

/// G(W) = \int dw f(w) f(W - w) r_w r_{W-w}, along the fixed-sum line.
cd fluorescence_integral(const Pulse& pulse, double total_frequency, double gamma = 1.0);

/// Post-scattering joint spectral amplitude at (w1, w2), frequencies measured
/// from the carrier (= atomic transition).
cd joint_spectrum_amplitude(const Pulse& pulse, double omega1, double omega2, Model model = Model::Atomic,
                            double gamma = 1.0);

/// |joint_spectrum_amplitude|^2 on the grid. `normalization` is the integral
/// over the whole plane: the exact linear part plus the grid integral of the
/// nonlinear remainder. A warning is added when the bare grid integral is
/// more than 1% away from it.
JointDistribution2D joint_spectrum(const Pulse& pulse, const Grid2D& grid, Model model = Model::Atomic,
                                   double gamma = 1.0);

struct MarginalDistribution {
    Grid1D grid;
    std::vector<double> density;
    std::optional<double> postselected;  // tau2 actually used, if any
};

/// Without postselection, \int dtau2 S(tau1, tau2) / normalization. With
/// postselection, the slice at the grid node nearest tau2, renormalized.
/// Throws std::invalid_argument for frequency-domain input and
/// std::domain_error when the slice norm is below 1e-12.
MarginalDistribution marginal_time_distribution(const JointDistribution2D& joint,
                                                std::optional<double> postselect_tau2 = std::nullopt);

/// Time axis over [min(-2/Omega, start), end + 12/gamma] with `points` nodes
/// and the pulse edges on nodes.
Grid1D default_time_axis(const Pulse& pulse, double gamma = 1.0, std::size_t points = 512);
/// Frequency axis over +-12 max(Omega, gamma).
Grid1D default_frequency_axis(const Pulse& pulse, double gamma = 1.0, std::size_t points = 512);

/// Propagates the amplitude equations with the emission at each grid node
/// applied as a jump. Independent of the quadrature route; meant for
/// validation on coarse grids.
CoincidenceAmplitude ode_oracle(const Pulse& pulse, const Grid1D& grid, double t = kAfterScattering,
                                double gamma = 1.0, std::size_t substeps = 8);

}  // namespace atombs::amplitude
