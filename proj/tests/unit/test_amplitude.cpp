#include <doctest.h>

#include <cmath>
#include <numbers>

#include "atombs/amplitude.hpp"
#include "atombs/linear_reference.hpp"
#include "atombs/moments.hpp"
#include "atombs/quadrature.hpp"

using namespace atombs;
using namespace atombs::amplitude;

namespace {

Grid2D square_of(const Grid1D& axis) { return Grid2D{axis, axis}; }

bool on_edge(const Pulse& p, double tau, double h) {
    for (double b : p.breakpoints())
        if (std::abs(tau - b) < 1e-9 * std::max(1.0, h)) return true;
    return false;
}

double moments_coincidence(const Pulse& p) {
    ScatterParams params;
    params.bandwidth = p.bandwidth();
    params.pulse_kind = p.kind();
    return moments::asymptotic_coincidence(params, p);
}

}  // namespace

TEST_CASE("linear response of a square pulse") {
    const double bw = 0.7;
    const Pulse p = Pulse::square(bw);
    for (double tau : {0.1, 0.5, 1.0, 2.0, 2.85}) {
        const cd expected = -std::sqrt(bw / 2.0) * (1.0 - std::exp(-tau));
        CHECK(std::abs(linear_response(p, tau) - expected) < 1e-8);
    }
    CHECK(std::abs(linear_response(p, -1.0)) == 0.0);
    // Free decay after the pulse.
    const double end = p.end_time();
    CHECK(std::abs(linear_response(p, end + 3.0) - linear_response(p, end) * std::exp(-3.0)) < 1e-10);
    // Doubling gamma with the bandwidth keeps the response at rescaled times.
    const Pulse q = Pulse::square(2.0 * bw);
    CHECK(std::abs(linear_response(q, 0.4, 2.0) - std::sqrt(2.0) * linear_response(p, 0.8)) < 1e-10);
}

TEST_CASE("saturation kernel") {
    const Pulse p = Pulse::square(0.1);
    for (double tau : {0.3, 5.0, 19.0}) CHECK(std::abs(nonlinear_response(p, tau, tau)) < 1e-15);
    // Far apart inside the pulse the kernel forgets where it started.
    CHECK(std::abs(nonlinear_response(p, 15.0, 2.0) - linear_response(p, 15.0)) < 1e-5);
    // cnl(t2, t1) = cA(t2) - e^{-gamma (t2 - t1)} cA(t1).
    for (double t1 : {0.5, 3.0})
        for (double t2 : {4.0, 22.0}) {
            const cd rhs = linear_response(p, t2) - std::exp(-(t2 - t1)) * linear_response(p, t1);
            CHECK(std::abs(nonlinear_response(p, t2, t1) - rhs) < 1e-10);
        }
}

TEST_CASE("tabulated response agrees with direct evaluation") {
    const Pulse p = Pulse::gaussian(1.3);
    const Grid1D axis(-3.0, 10.0, 131);
    const AtomResponse r = atom_response(p, axis);
    CHECK(r.grid() == axis);
    for (std::size_t i : {0u, 17u, 40u, 90u, 130u}) CHECK(std::abs(r.linear(i) - linear_response(p, axis[i])) < 1e-9);
    for (auto [i2, i1] : {std::pair{40u, 10u}, std::pair{130u, 0u}, std::pair{50u, 49u}})
        CHECK(std::abs(r.nonlinear(i2, i1) - nonlinear_response(p, axis[i2], axis[i1])) < 1e-9);
    CHECK(r.nonlinear(33, 33) == cd{});
    CHECK_THROWS_AS(r.nonlinear(10, 11), std::out_of_range);
}

TEST_CASE("diagonal and off-diagonal valleys of a long pulse") {
    const double bw = 0.1;
    const Pulse p = Pulse::square(bw);
    const double h = std::log(2.0) / 8.0;
    const Grid1D axis(-8.0 * h, 400.0 * h, 409);
    const auto d = joint_time_distribution(p, kAfterScattering, square_of(axis));
    const double xi2 = bw / 2.0;
    for (std::size_t i = 1; i < axis.points(); ++i) {
        const double tau = axis[i];
        if (tau <= 0.0 || tau >= p.end_time() || on_edge(p, tau, h)) continue;
        // Exact for a square pulse: S(tau, tau) = xi^4 (2 e^{-tau} - 1)^2.
        CHECK(d.at(i, i) == doctest::Approx(xi2 * xi2 * std::pow(2.0 * std::exp(-tau) - 1.0, 2)).epsilon(1e-7));
    }
    const std::size_t zero = axis.nearest_index(std::log(2.0));
    CHECK(d.at(zero, zero) < 1e-12);
    // Deep inside the pulse the off-diagonal follows 1 - 2 e^{-|tau2 - tau1|}.
    const std::size_t i1 = axis.nearest_index(15.0);
    for (std::size_t k = 0; k < 40; ++k) {
        const std::size_t i2 = i1 + k;
        const double delta = axis[i2] - axis[i1];
        const double expected = xi2 * xi2 * std::pow(1.0 - 2.0 * std::exp(-delta), 2);
        CHECK(std::abs(d.at(i1, i2) - expected) < 1e-5 * xi2 * xi2);
        CHECK(d.at(i2, i1) == d.at(i1, i2));
    }
    CHECK(d.at(i1, i1 + 8) < 1e-4 * d.peak());
}

TEST_CASE("atom removed before arrival leaves the free product") {
    const Pulse p = Pulse::square(0.5);
    const Grid1D axis(-1.0, 6.0, 141);
    const auto d = joint_time_distribution(p, 0.0, square_of(axis));
    for (std::size_t i = 0; i < axis.points(); ++i)
        for (std::size_t j = 0; j < axis.points(); ++j) {
            if (on_edge(p, axis[i], axis.spacing()) || on_edge(p, axis[j], axis.spacing())) continue;
            CHECK(d.at(i, j) == doctest::Approx(std::norm(p.time_profile(axis[i]) * p.time_profile(axis[j]))));
        }
}

TEST_CASE("causality at finite running time") {
    const Pulse p = Pulse::gaussian(0.5);
    const Grid1D axis = default_time_axis(p, 1.0, 160);
    const double t = 0.7;
    const auto d = joint_time_distribution(p, t, square_of(axis));
    for (std::size_t i = 0; i < axis.points(); ++i)
        for (std::size_t j = 0; j < axis.points(); ++j) {
            if (axis[i] <= t || axis[j] <= t) continue;
            CHECK(d.at(i, j) == doctest::Approx(std::norm(p.time_profile(axis[i]) * p.time_profile(axis[j]))));
        }
}

TEST_CASE("no coincidences after a square pulse has passed") {
    for (double bw : {0.5, 1.0, 4.0}) {
        const Pulse p = Pulse::square(bw);
        const Grid1D axis = default_time_axis(p, 1.0, 256);
        const auto d = joint_time_distribution(p, kAfterScattering, square_of(axis));
        const double peak = d.peak();
        for (std::size_t i = 0; i < axis.points(); ++i)
            for (std::size_t j = 0; j < axis.points(); ++j)
                if (axis[i] > p.end_time() + 1e-9 && axis[j] > p.end_time() + 1e-9) CHECK(d.at(i, j) < 1e-10 * peak);
    }
}

TEST_CASE("densities are exchange symmetric and nonnegative") {
    for (const Pulse& p : {Pulse::square(1.0), Pulse::gaussian(2.0), Pulse::exp_rising(0.6)}) {
        const Grid1D axis = default_time_axis(p, 1.0, 96);
        for (double t : {kAfterScattering, 1.0}) {
            const auto d = joint_time_distribution(p, t, square_of(axis));
            for (std::size_t i = 0; i < axis.points(); ++i)
                for (std::size_t j = 0; j < i; ++j) {
                    CHECK(d.at(i, j) == d.at(j, i));
                    CHECK(d.at(i, j) >= 0.0);
                }
        }
        const Grid1D w(-6.0, 6.0, 41);
        const auto s = joint_spectrum(p, square_of(w));
        for (std::size_t i = 0; i < w.points(); ++i)
            for (std::size_t j = 0; j < i; ++j) CHECK(s.at(i, j) == doctest::Approx(s.at(j, i)).epsilon(1e-12));
    }
}

TEST_CASE("time-domain normalization equals the moments coincidence") {
    for (const Pulse& p : {Pulse::square(0.1), Pulse::square(1.0), Pulse::square(10.0), Pulse::gaussian(1.0),
                           Pulse::exp_rising(1.0)}) {
        CAPTURE(p.bandwidth());
        CAPTURE(to_string(p.kind()));
        const Grid1D axis = default_time_axis(p);
        const auto d = joint_time_distribution(p, kAfterScattering, square_of(axis));
        CHECK(d.normalization == doctest::Approx(moments_coincidence(p)).epsilon(0.01));
    }
}

TEST_CASE("the linear model reproduces the linear beamsplitter") {
    const Pulse p = Pulse::square(1.0);
    const Grid1D axis = default_time_axis(p);
    const auto d = joint_time_distribution(p, kAfterScattering, square_of(axis), Model::Linear);
    CHECK(d.normalization == doctest::Approx(linear::linear_coincidence(p, 0.0)).epsilon(0.01));
    const Grid1D w(-5.0, 5.0, 21);
    const auto a = joint_spectrum(p, square_of(w), Model::Linear);
    const auto b = linear::linear_joint_spectrum(p, square_of(w));
    CHECK(a.values == b.values);
    CHECK(joint_spectrum_amplitude(p, 0.3, -1.2, Model::Linear) == linear::linear_joint_amplitude(p, 0.3, -1.2, 0.0));
}

TEST_CASE("fluorescence integral by two routes") {
    // G(W) = \int f(w) f(W-w) r r dw = \int cA(u)^2 e^{iWu} du.
    for (const Pulse& p : {Pulse::square(1.0), Pulse::gaussian(3.0)}) {
        const double lo = p.start_time();
        const double hi = p.end_time() + 40.0;
        const std::size_t n = 8001;
        const Grid1D u(lo, hi, n);
        const AtomResponse r(p, u);
        for (double W : {0.0, 0.7, -2.0, 5.0}) {
            std::vector<cd> y(n);
            for (std::size_t k = 0; k < n; ++k) y[k] = r.linear(k) * r.linear(k) * std::exp(cd{0.0, W * u[k]});
            const cd time_route = quad::simpson(std::span<const cd>(y), u.spacing());
            CAPTURE(W);
            CHECK(std::abs(fluorescence_integral(p, W) - time_route) < 1e-5);
        }
    }
}

TEST_CASE("the fluorescence term depends on the frequency sum only") {
    const Pulse p = Pulse::square(2.0);
    const auto nl = [&](double w1, double w2) {
        const cd r1 = linear::single_photon_response(w1).reflection;
        const cd r2 = linear::single_photon_response(w2).reflection;
        return (joint_spectrum_amplitude(p, w1, w2) - joint_spectrum_amplitude(p, w1, w2, Model::Linear)) / (r1 + r2);
    };
    const cd base = nl(0.4, 1.1);
    for (double shift : {-2.0, -0.3, 0.35, 1.5}) CHECK(std::abs(nl(0.4 + shift, 1.1 - shift) - base) < 1e-12);
    CHECK(joint_spectrum_amplitude(p, 0.4, 1.1) == joint_spectrum_amplitude(p, 1.1, 0.4));
}

TEST_CASE("joint spectrum is the Fourier transform of the time amplitude") {
    const Pulse p = Pulse::square(1.0);
    const Grid1D axis = default_time_axis(p, 1.0, 384);
    const auto c = coincidence_amplitude(p, square_of(axis));
    const double h = axis.spacing();
    const std::size_t n = axis.points();
    const auto weight = [&](std::size_t i) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; };

    double peak = 0.0;
    for (int a = -20; a <= 20; ++a)
        for (int b = -20; b <= 20; ++b)
            peak = std::max(peak, std::norm(joint_spectrum_amplitude(p, 0.2 * a, 0.2 * b)));

    for (auto [w1, w2] : {std::pair{0.0, 0.0}, std::pair{1.0, 1.0}, std::pair{1.0, -1.0}, std::pair{0.5, -2.0},
                          std::pair{2.5, 0.3}, std::pair{-1.5, -1.5}}) {
        std::vector<cd> e1(n), e2(n);
        for (std::size_t i = 0; i < n; ++i) {
            e1[i] = weight(i) * std::exp(cd{0.0, w1 * axis[i]});
            e2[i] = weight(i) * std::exp(cd{0.0, w2 * axis[i]});
        }
        cd sum{};
        for (std::size_t i = 0; i < n; ++i) {
            cd row{};
            for (std::size_t j = 0; j < n; ++j) row += c.at(i, j) * e2[j];
            sum += e1[i] * row;
        }
        const cd ft = sum * h * h / (2.0 * std::numbers::pi);
        CAPTURE(w1);
        CAPTURE(w2);
        CHECK(std::abs(std::norm(ft) - std::norm(joint_spectrum_amplitude(p, w1, w2))) < 0.01 * peak);
    }
}

TEST_CASE("time and frequency densities satisfy Parseval") {
    for (double bw : {0.1, 1.0, 10.0}) {
        CAPTURE(bw);
        const Pulse p = Pulse::square(bw);
        const auto t = joint_time_distribution(p, kAfterScattering, square_of(default_time_axis(p)));
        const Grid1D w = default_frequency_axis(p, 1.0, 256);
        const auto s = joint_spectrum(p, square_of(w));
        CHECK(s.normalization == doctest::Approx(t.normalization).epsilon(0.01));
    }
}

TEST_CASE("a narrow pulse keeps its spectrum") {
    const Pulse p = Pulse::square(0.1);
    const Grid1D w(-0.5, 0.5, 41);
    const auto s = joint_spectrum(p, square_of(w));
    double dot = 0.0, ss = 0.0, ff = 0.0;
    for (std::size_t i = 0; i < w.points(); ++i)
        for (std::size_t j = 0; j < w.points(); ++j) {
            const double f = std::norm(p.spectral_amplitude(w[i]) * p.spectral_amplitude(w[j]));
            dot += f * s.at(i, j);
            ss += s.at(i, j) * s.at(i, j);
            ff += f * f;
        }
    CHECK(dot / std::sqrt(ss * ff) > 0.95);
}

TEST_CASE("reversed interference for broad pulses") {
    const Pulse p = Pulse::square(10.0);
    for (double x1 : {0.5, 1.0, 2.0, -1.0, -2.0}) {
        const double x2 = linear::interference_locus(linear::Interference::Constructive, x1);
        const double atomic = std::norm(joint_spectrum_amplitude(p, x1, x2));
        const double lin = std::norm(joint_spectrum_amplitude(p, x1, x2, Model::Linear));
        CAPTURE(x1);
        CHECK(atomic <= 0.1 * lin);
    }
}

TEST_CASE("path decomposition") {
    const Pulse p = Pulse::square(0.5);
    SUBCASE("diagonal") {
        for (double tau : {0.5, 1.0, 3.0}) {
            const auto a = path_decomposition(p, tau, tau);
            CHECK(a.c1 == cd{});
            CHECK(a.c2 == cd{});
            CHECK(std::abs(a.b1 + a.b2 + 2.0 * a.a * (1.0 - std::exp(-tau))) < 1e-9);
        }
    }
    SUBCASE("sum equals the coincidence amplitude") {
        const Grid1D axis(-1.0, 10.0, 111);
        for (double t : {kAfterScattering, 2.0}) {
            for (Model m : {Model::Atomic, Model::Linear}) {
                const auto c = coincidence_amplitude(p, square_of(axis), t, m);
                for (std::size_t i : {15u, 30u, 44u, 70u})
                    for (std::size_t j : {12u, 30u, 47u, 100u}) {
                        const auto pa = path_decomposition(p, axis[i], axis[j], t, m);
                        CHECK(std::abs(pa.sum() - c.at(i, j)) < 1e-8);
                    }
            }
        }
    }
    SUBCASE("linear row") {
        const auto lin = path_decomposition(p, 0.7, 2.9, kAfterScattering, Model::Linear);
        CHECK(lin.c1 == lin.c2);
        CHECK(std::abs(lin.c1 - linear_response(p, 0.7) * linear_response(p, 2.9)) < 1e-12);
        const auto before = path_decomposition(p, 0.7, 2.9, 1.0, Model::Linear);
        CHECK(before.b2 == cd{});
        CHECK(before.c1 == cd{});
        CHECK(before.b1 != cd{});
    }
}

TEST_CASE("marginals") {
    const Pulse p = Pulse::square(1.0);
    const Grid1D axis = default_time_axis(p, 1.0, 256);
    const auto d = joint_time_distribution(p, kAfterScattering, square_of(axis));
    const auto m = marginal_time_distribution(d);
    CHECK(quad::trapezoid(std::span<const double>(m.density), axis.spacing()) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(m.postselected.has_value());
    double l1 = 0.0;
    for (std::size_t i = 0; i < axis.points(); ++i) l1 += std::abs(m.density[i] - std::norm(p.time_profile(axis[i])));
    CHECK(l1 * axis.spacing() > 0.1);

    const auto ps = marginal_time_distribution(d, 1.03);
    REQUIRE(ps.postselected.has_value());
    CHECK(*ps.postselected == axis[axis.nearest_index(1.03)]);
    CHECK(quad::trapezoid(std::span<const double>(ps.density), axis.spacing()) == doctest::Approx(1.0).epsilon(1e-12));

    JointDistribution2D empty{square_of(axis), std::vector<double>(axis.points() * axis.points(), 0.0)};
    CHECK_THROWS_AS(marginal_time_distribution(empty, 1.0), std::domain_error);
    CHECK_THROWS_AS(marginal_time_distribution(empty), std::domain_error);
    JointDistribution2D spectral = d;
    spectral.domain = Domain::Frequency;
    CHECK_THROWS_AS(marginal_time_distribution(spectral), std::invalid_argument);
}

TEST_CASE("a very narrow pulse keeps its shape in the marginal") {
    const Pulse p = Pulse::square(0.01);
    const Grid1D axis = default_time_axis(p);
    const auto m = marginal_time_distribution(joint_time_distribution(p, kAfterScattering, square_of(axis)));
    double l1 = 0.0;
    for (std::size_t i = 0; i < axis.points(); ++i) {
        const double free = on_edge(p, axis[i], axis.spacing()) ? 0.5 * 0.005 : std::norm(p.time_profile(axis[i]));
        l1 += std::abs(m.density[i] - free);
    }
    CHECK(l1 * axis.spacing() < 0.02);
}

TEST_CASE("ODE oracle agrees with the quadrature") {
    const Pulse p = Pulse::square(1.0);
    const Grid1D axis = default_time_axis(p, 1.0, 64);
    for (double t : {kAfterScattering, 1.3}) {
        const auto q = coincidence_amplitude(p, square_of(axis), t);
        const auto o = ode_oracle(p, axis, t);
        double peak = 0.0, worst = 0.0;
        for (std::size_t k = 0; k < q.values.size(); ++k) {
            peak = std::max(peak, std::abs(q.values[k]));
            worst = std::max(worst, std::abs(q.values[k] - o.values[k]));
        }
        CHECK(worst < 1e-3 * peak);
    }
}

TEST_CASE("default axes") {
    for (const Pulse& p : {Pulse::square(0.3), Pulse::square(7.0), Pulse::gaussian(1.0), Pulse::exp_rising(2.0)}) {
        const Grid1D a = default_time_axis(p);
        CHECK(a.points() == 512);
        CHECK(a.lower() <= std::min(-2.0 / p.bandwidth(), p.start_time()) + 1e-9);
        CHECK(a.upper() >= p.end_time() + 12.0 - 1e-9);
        for (double b : p.breakpoints()) CHECK(std::abs(a[a.nearest_index(b)] - b) < 1e-9);
    }
    const Grid1D w = default_frequency_axis(Pulse::square(3.0));
    CHECK(w.lower() == -36.0);
    CHECK(w.upper() == 36.0);
    CHECK_THROWS_AS(default_time_axis(Pulse::square(1.0), 1.0, 1), std::invalid_argument);
}

TEST_CASE("asymmetric grids are rejected") {
    const Grid2D g{Grid1D(0.0, 1.0, 5), Grid1D(0.0, 2.0, 5)};
    CHECK_THROWS_AS(coincidence_amplitude(Pulse::square(1.0), g), std::invalid_argument);
    CHECK_THROWS_AS(joint_time_distribution(Pulse::square(1.0), kAfterScattering, g), std::invalid_argument);
    CHECK_NOTHROW(joint_spectrum(Pulse::square(1.0), g));
}
