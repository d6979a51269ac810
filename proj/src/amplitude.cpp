#include "atombs/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "atombs/linear_reference.hpp"
#include "atombs/parallel.hpp"
#include "atombs/quadrature.hpp"

namespace atombs::amplitude {
namespace {

// Longest Gauss-Legendre panel, in units of the fastest time scale.
constexpr double kPanelFraction = 0.5;

double fastest_scale(const Pulse& pulse, double gamma) { return std::min(1.0 / gamma, 1.0 / pulse.bandwidth()); }

// -gamma \int_a^b e^{-gamma (b - s)} xi(s) ds, clipped to the pulse support.
cd emission_segment(const Pulse& pulse, double a, double b, double gamma) {
    const double lo = std::max(a, pulse.start_time());
    const double hi = std::min(b, pulse.end_time());
    if (!(hi > lo)) return 0.0;
    const double panel = kPanelFraction * fastest_scale(pulse, gamma);
    const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / panel));
    const cd integral = quad::gauss_legendre(
        [&](double s) { return std::exp(-gamma * (hi - s)) * pulse.time_profile(s); }, lo, hi,
        std::max<std::size_t>(panels, 1));
    return -gamma * std::exp(-gamma * (b - hi)) * integral;
}

struct EdgeValues {
    cd lower;  // left limit
    cd upper;  // right limit
    bool edge = false;
    cd mean() const { return edge ? (lower + upper) / 2.0 : lower; }
};

bool on_breakpoint(const Pulse& pulse, double tau, double h) {
    for (double b : pulse.breakpoints())
        if (std::abs(tau - b) <= 1e-9 * h) return true;
    return false;
}

std::vector<EdgeValues> node_profile(const Pulse& pulse, const Grid1D& axis) {
    std::vector<EdgeValues> out(axis.points());
    const double h = axis.spacing();
    for (std::size_t i = 0; i < axis.points(); ++i) {
        const double tau = axis[i];
        if (on_breakpoint(pulse, tau, h)) {
            const double eps = 1e-9 * h;
            out[i] = {pulse.time_profile(tau - eps), pulse.time_profile(tau + eps), true};
        } else {
            out[i] = {pulse.time_profile(tau), 0.0, false};
        }
    }
    return out;
}

void require_symmetric(const Grid2D& grid) {
    if (!grid.symmetric()) throw std::invalid_argument("time-domain grids must use the same axis for both photons");
}

cd pair_term(const AtomResponse& resp, std::size_t i, std::size_t j, Model model) {
    if (model == Model::Linear) return 2.0 * resp.linear(i) * resp.linear(j);
    if (i < j) return 2.0 * resp.linear(i) * resp.nonlinear(j, i);
    if (j < i) return 2.0 * resp.linear(j) * resp.nonlinear(i, j);
    return 0.0;
}

// Summation order is symmetric in (1, 2) so exchanged nodes agree exactly.
cd amplitude_at(cd x1, cd x2, cd a1, cd a2, cd pair, bool seen1, bool seen2) {
    const cd b2 = seen2 ? x1 * a2 : cd{};
    const cd b1 = seen1 ? x2 * a1 : cd{};
    return x1 * x2 + (b1 + b2) + (seen1 && seen2 ? pair : cd{});
}

cd reflection(double omega, double gamma) { return linear::single_photon_response(omega / gamma).reflection; }

}  // namespace

cd linear_response(const Pulse& pulse, double tau, double gamma) {
    return emission_segment(pulse, pulse.start_time(), tau, gamma);
}

cd nonlinear_response(const Pulse& pulse, double tau2, double tau1, double gamma) {
    if (tau2 <= tau1) return 0.0;
    return emission_segment(pulse, tau1, tau2, gamma);
}

AtomResponse::AtomResponse(const Pulse& pulse, const Grid1D& grid, double gamma)
    : grid_(grid), gamma_(gamma), linear_(grid.points()) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    const std::size_t n = grid.points();
    std::vector<cd> segment(n > 0 ? n - 1 : 0);
    std::vector<double> decay(segment.size());
    for (std::size_t k = 0; k + 1 < n; ++k) {
        segment[k] = emission_segment(pulse, grid[k], grid[k + 1], gamma);
        decay[k] = std::exp(-gamma * (grid[k + 1] - grid[k]));
    }
    linear_[0] = linear_response(pulse, grid[0], gamma);
    for (std::size_t k = 0; k + 1 < n; ++k) linear_[k + 1] = decay[k] * linear_[k] + segment[k];

    nonlinear_.assign(n * (n + 1) / 2, 0.0);
    for (std::size_t i1 = 0; i1 < n; ++i1) {
        cd v = 0.0;
        for (std::size_t k = i1; k + 1 < n; ++k) {
            v = decay[k] * v + segment[k];
            nonlinear_[(k + 1) * (k + 2) / 2 + i1] = v;
        }
    }
}

cd AtomResponse::nonlinear(std::size_t i2, std::size_t i1) const {
    if (i1 > i2 || i2 >= grid_.points()) throw std::out_of_range("nonlinear response is stored for i1 <= i2 only");
    return nonlinear_[i2 * (i2 + 1) / 2 + i1];
}

AtomResponse atom_response(const Pulse& pulse, const Grid1D& grid, double gamma) {
    return AtomResponse(pulse, grid, gamma);
}

CoincidenceAmplitude coincidence_amplitude(const Pulse& pulse, const Grid2D& grid, double t, Model model,
                                           double gamma) {
    require_symmetric(grid);
    const AtomResponse resp(pulse, grid.x, gamma);
    const auto xi = node_profile(pulse, grid.x);
    const std::size_t n = grid.x.points();
    CoincidenceAmplitude out{grid, std::vector<cd>(grid.size()), t};
    for (std::size_t i = 0; i < n; ++i) {
        const bool seen1 = t >= grid.x[i];
        for (std::size_t j = 0; j < n; ++j) {
            const bool seen2 = t >= grid.x[j];
            out.values[grid.index(i, j)] = amplitude_at(xi[i].mean(), xi[j].mean(), resp.linear(i), resp.linear(j),
                                                        pair_term(resp, i, j, model), seen1, seen2);
        }
    }
    return out;
}

JointDistribution2D joint_time_distribution(const Pulse& pulse, double t, const Grid2D& grid, Model model,
                                            double gamma) {
    require_symmetric(grid);
    const AtomResponse resp(pulse, grid.x, gamma);
    const auto xi = node_profile(pulse, grid.x);
    const std::size_t n = grid.x.points();
    JointDistribution2D out{grid, std::vector<double>(grid.size()), Domain::Time, 0.0, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const bool seen1 = t >= grid.x[i];
        const int vi = xi[i].edge ? 2 : 1;
        for (std::size_t j = 0; j < n; ++j) {
            const bool seen2 = t >= grid.x[j];
            const int vj = xi[j].edge ? 2 : 1;
            const cd pair = pair_term(resp, i, j, model);
            double t[2][2] = {};
            for (int a = 0; a < vi; ++a)
                for (int b = 0; b < vj; ++b) {
                    const cd x1 = a == 0 ? xi[i].lower : xi[i].upper;
                    const cd x2 = b == 0 ? xi[j].lower : xi[j].upper;
                    t[a][b] = std::norm(amplitude_at(x1, x2, resp.linear(i), resp.linear(j), pair, seen1, seen2));
                }
            const double sum = (t[0][0] + t[1][1]) + (t[0][1] + t[1][0]);
            out.values[grid.index(i, j)] = sum / static_cast<double>(vi * vj);
        }
    }
    out.normalization = integrate(grid, out.values);
    return out;
}

PathAmplitudes path_decomposition(const Pulse& pulse, double tau1, double tau2, double t, Model model,
                                  double gamma) {
    const cd x1 = pulse.time_profile(tau1);
    const cd x2 = pulse.time_profile(tau2);
    const cd a1 = linear_response(pulse, tau1, gamma);
    const cd a2 = linear_response(pulse, tau2, gamma);
    const bool seen1 = t >= tau1;
    const bool seen2 = t >= tau2;
    PathAmplitudes p{};
    p.a = x1 * x2;
    p.b1 = seen1 ? a1 * x2 : 0.0;
    p.b2 = seen2 ? x1 * a2 : 0.0;
    if (seen1 && seen2) {
        cd c = a1 * a2;
        if (model == Model::Atomic) {
            if (tau1 < tau2) c = a1 * nonlinear_response(pulse, tau2, tau1, gamma);
            else if (tau2 < tau1) c = a2 * nonlinear_response(pulse, tau1, tau2, gamma);
            else c = 0.0;
        }
        p.c1 = c;
        p.c2 = c;
    }
    return p;
}

cd fluorescence_integral(const Pulse& pulse, double total_frequency, double gamma) {
    const double wide = std::max(pulse.bandwidth(), gamma);
    const double narrow = std::min(pulse.bandwidth(), gamma);
    const double centre = total_frequency / 2.0;
    // Both factors peak inside [0, W]; the window is centred on W/2 so that
    // the w <-> W - w symmetry of the integrand is sampled exactly.
    const double half = 40.0 * wide + std::abs(centre);
    const std::size_t n = quad::odd_sample_count(half, narrow / 20.0);
    const double h = 2.0 * half / static_cast<double>(n - 1);
    std::vector<cd> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = centre + (static_cast<double>(k) - static_cast<double>(n / 2)) * h;
        const double w2 = total_frequency - w;
        y[k] = pulse.spectral_amplitude(w) * pulse.spectral_amplitude(w2) * reflection(w, gamma) *
               reflection(w2, gamma);
    }
    return quad::simpson(std::span<const cd>(y), h);
}

cd joint_spectrum_amplitude(const Pulse& pulse, double omega1, double omega2, Model model, double gamma) {
    const cd lin = linear::linear_joint_amplitude(pulse, omega1, omega2, 0.0, gamma);
    if (model == Model::Linear) return lin;
    const cd r1 = reflection(omega1, gamma);
    const cd r2 = reflection(omega2, gamma);
    return lin + (r1 + r2) / (std::numbers::pi * gamma) * fluorescence_integral(pulse, omega1 + omega2, gamma);
}

JointDistribution2D joint_spectrum(const Pulse& pulse, const Grid2D& grid, Model model, double gamma) {
    if (model == Model::Linear) return linear::linear_joint_spectrum(pulse, grid, 0.0, gamma);

    const std::size_t nx = grid.x.points();
    const std::size_t ny = grid.y.points();
    // G depends on w1 + w2 only; on a symmetric grid that is i + j.
    std::vector<cd> kernel;
    if (grid.symmetric()) {
        kernel = parallel_map(nx + ny - 1, [&](std::size_t s) {
            const std::size_t i = std::min(s, nx - 1);
            return fluorescence_integral(pulse, grid.x[i] + grid.y[s - i], gamma);
        });
    }
    JointDistribution2D out{grid, std::vector<double>(grid.size()), Domain::Frequency, 0.0, {}};
    std::vector<double> remainder(grid.size());
    for (std::size_t i = 0; i < nx; ++i) {
        const double w1 = grid.x[i];
        const cd r1 = reflection(w1, gamma);
        for (std::size_t j = 0; j < ny; ++j) {
            const double w2 = grid.y[j];
            const cd g = grid.symmetric() ? kernel[i + j] : fluorescence_integral(pulse, w1 + w2, gamma);
            const cd lin = linear::linear_joint_amplitude(pulse, w1, w2, 0.0, gamma);
            const cd nl = (r1 + reflection(w2, gamma)) / (std::numbers::pi * gamma) * g;
            out.values[grid.index(i, j)] = std::norm(lin + nl);
            remainder[grid.index(i, j)] = 2.0 * std::real(std::conj(lin) * nl) + std::norm(nl);
        }
    }
    out.normalization = linear::linear_coincidence(pulse, 0.0, gamma) + integrate(grid, remainder);
    const double bare = integrate(grid, out.values);
    if (std::abs(bare - out.normalization) > 0.01 * out.normalization)
        out.warnings.push_back("grid too coarse or too narrow: integral " + std::to_string(bare) +
                               " vs full-plane estimate " + std::to_string(out.normalization));
    return out;
}

MarginalDistribution marginal_time_distribution(const JointDistribution2D& joint,
                                                std::optional<double> postselect_tau2) {
    if (joint.domain != Domain::Time) throw std::invalid_argument("marginals are defined for time-domain densities");
    const Grid2D& g = joint.grid;
    const std::size_t nx = g.x.points();
    const std::size_t ny = g.y.points();
    MarginalDistribution out{g.x, std::vector<double>(nx), std::nullopt};
    if (postselect_tau2) {
        const std::size_t j = g.y.nearest_index(*postselect_tau2);
        for (std::size_t i = 0; i < nx; ++i) out.density[i] = joint.at(i, j);
        const double norm = quad::trapezoid(std::span<const double>(out.density), g.x.spacing());
        if (!(norm >= 1e-12))
            throw std::domain_error("postselected slice at tau2 = " + std::to_string(g.y[j]) + " is empty");
        for (double& v : out.density) v /= norm;
        out.postselected = g.y[j];
        return out;
    }
    if (!(joint.normalization >= 1e-12)) throw std::domain_error("joint density is empty");
    for (std::size_t i = 0; i < nx; ++i)
        out.density[i] = quad::trapezoid(std::span<const double>(joint.values.data() + i * ny, ny), g.y.spacing()) /
                         joint.normalization;
    return out;
}

Grid1D default_time_axis(const Pulse& pulse, double gamma, std::size_t points) {
    if (points < 2) throw std::invalid_argument("a grid needs at least two points");
    const double start = pulse.start_time();
    const double end = pulse.end_time();
    const double lower0 = std::min(-2.0 / pulse.bandwidth(), start);
    const double upper0 = end + 12.0 / gamma;
    const double h0 = (upper0 - lower0) / static_cast<double>(points - 1);
    // Largest spacing <= duration that puts both edges on nodes and still
    // reaches upper0 with `points` nodes.
    const double duration = end - start;
    const double cells = std::max(1.0, std::floor(duration / h0));
    const double h = duration / cells;
    const double lead = std::floor((start - lower0) / h + 1e-9);
    const double lower = start - lead * h;
    return Grid1D(lower, lower + static_cast<double>(points - 1) * h, points);
}

Grid1D default_frequency_axis(const Pulse& pulse, double gamma, std::size_t points) {
    const double half = 12.0 * std::max(pulse.bandwidth(), gamma);
    return Grid1D(-half, half, points);
}

CoincidenceAmplitude ode_oracle(const Pulse& pulse, const Grid1D& grid, double t, double gamma,
                                std::size_t substeps) {
    if (substeps == 0) throw std::invalid_argument("substeps must be positive");
    const std::size_t n = grid.points();
    const double sg = std::sqrt(gamma);
    const auto xi = node_profile(pulse, grid);

    // State: atomic amplitude e (cA = sqrt(gamma) e) followed by the
    // "photon at tau_i out, atom excited" amplitudes.
    std::vector<cd> y(n + 1, 0.0);
    y[0] = linear_response(pulse, grid[0], gamma) / sg;
    std::vector<cd> field(n);  // photon amplitude at tau_i in one direction
    for (std::size_t i = 0; i < n; ++i) {
        field[i] = xi[i].mean() / 2.0;
        y[i + 1] = xi[i].mean() * y[0];
    }
    CoincidenceAmplitude out{Grid2D{grid, grid}, std::vector<cd>(n * n), t};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.values[i * n + j] = xi[i].mean() * xi[j].mean();

    const auto rhs = [&](double time, const std::vector<cd>& s, std::vector<cd>& ds) {
        const cd drive = pulse.time_profile(time);
        ds[0] = -gamma * s[0] - sg * drive;
        for (std::size_t i = 0; i < n; ++i) ds[i + 1] = -gamma * s[i + 1] - 2.0 * sg * drive * field[i];
    };

    std::vector<cd> k1(n + 1), k2(n + 1), k3(n + 1), k4(n + 1), w(n + 1);
    const auto advance = [&](double a, double b) {
        const double h = (b - a) / static_cast<double>(substeps);
        const double nudge = 1e-9 * h;
        for (std::size_t s = 0; s < substeps; ++s) {
            const double t0 = a + static_cast<double>(s) * h;
            rhs(t0 + nudge, y, k1);
            for (std::size_t k = 0; k <= n; ++k) w[k] = y[k] + h / 2.0 * k1[k];
            rhs(t0 + h / 2.0, w, k2);
            for (std::size_t k = 0; k <= n; ++k) w[k] = y[k] + h / 2.0 * k2[k];
            rhs(t0 + h / 2.0, w, k3);
            for (std::size_t k = 0; k <= n; ++k) w[k] = y[k] + h * k3[k];
            rhs(t0 + h - nudge, w, k4);
            for (std::size_t k = 0; k <= n; ++k) y[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
    };

    for (std::size_t k = 0; k < n; ++k) {
        if (grid[k] > t) break;
        if (k > 0) {
            // Split the interval at any pulse edge strictly inside it.
            double a = grid[k - 1];
            for (double b : pulse.breakpoints())
                if (b > a && b < grid[k]) {
                    advance(a, b);
                    a = b;
                }
            advance(a, grid[k]);
        }
        // Emission into position tau_k: every pair containing k picks up the
        // amplitude of the partner photon with the atom excited.
        for (std::size_t i = 0; i < n; ++i) {
            out.values[i * n + k] += sg * y[i + 1];
            out.values[k * n + i] += sg * y[i + 1];
        }
        field[k] += sg * y[0];
    }
    return out;
}

}  // namespace atombs::amplitude
