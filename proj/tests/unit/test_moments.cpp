#include <doctest.h>

#include <cmath>
#include <set>

#include "atombs/linear_reference.hpp"
#include "atombs/moments.hpp"
#include "atombs/oracles.hpp"

using namespace atombs;
using namespace atombs::moments;

namespace {

ScatterParams resonant(double sigma, double detuning = 0.0) {
    ScatterParams p;
    p.bandwidth = sigma;
    p.detuning = detuning;
    return p;
}

MomentVector random_like(unsigned seed) {
    MomentVector y;
    for (std::size_t k = 0; k < kMembers; ++k) {
        const double a = std::sin(1.3 * (k + 1) * seed);
        const double b = std::cos(0.7 * (k + 2) * seed);
        y.values[k] = cd{a, b};
    }
    return y;
}

}  // namespace

TEST_CASE("closure layout") {
    const auto& m = members();
    std::size_t primary = 0;
    std::set<std::string> names;
    int last_level = 0;
    for (std::size_t k = 0; k < kMembers; ++k) {
        if (!m[k].mirror) ++primary;
        CHECK(m[k].level >= last_level);
        last_level = m[k].level;
        CHECK(member_index(m[k].op, m[k].mode, m[k].bra, m[k].ket) == static_cast<int>(k));
        names.insert(member_name(m[k]));
    }
    CHECK(primary == kClosureSize);
    CHECK(names.size() == kMembers);
    CHECK(last_level == kLevels - 1);
    CHECK(member_index(Operator::SigmaMinus, Mode::Atom, Ket::Vacuum, Ket::DropA) == -1);
}

TEST_CASE("element resolution") {
    const MomentVector y = random_like(3);
    const int k = member_index(Operator::SigmaPlus, Mode::Atom, Ket::DropA, Ket::Vacuum);
    REQUIRE(k >= 0);
    CHECK(y.element(Operator::SigmaMinus, Mode::Atom, Ket::Vacuum, Ket::DropA) == std::conj(y.values[k]));
    CHECK(y.element(Operator::SigmaZ, Mode::Atom, Ket::Vacuum, Ket::Vacuum) == cd{-1.0});
    CHECK(y.element(Operator::Number, Mode::A, Ket::Vacuum, Ket::Vacuum) == cd{});
    CHECK(y.element(Operator::Pair, Mode::A, Ket::DropA, Ket::DropA) == cd{});
    const MomentVector init = MomentVector::initial();
    CHECK(init.excitation() == 0.0);
    CHECK(init.coincidence() == 1.0);
    CHECK(init.number(Mode::A) == 1.0);
    CHECK(init.number(Mode::B) == 1.0);
}

TEST_CASE("each level depends only on itself and lower levels") {
    const Drive d{cd{0.4, -0.1}, cd{0.2, 0.3}};
    const MomentVector y = random_like(5);
    for (int level = 0; level < kLevels; ++level) {
        MomentVector base, perturbed_out;
        level_derivative(level, y, d, 1.0, true, base);
        MomentVector z = y;
        for (std::size_t k = 0; k < kMembers; ++k)
            if (members()[k].level > level) z.values[k] += cd{3.0, -2.0};
        level_derivative(level, z, d, 1.0, true, perturbed_out);
        for (std::size_t k = 0; k < kMembers; ++k) {
            if (members()[k].level != level) continue;
            CAPTURE(member_name(members()[k]));
            CHECK(base.values[k] == perturbed_out.values[k]);
        }
    }
}

TEST_CASE("vacuum sector decays freely without drive") {
    MomentVector y;
    const int k = member_index(Operator::SigmaPlus, Mode::Atom, Ket::DropA, Ket::Vacuum);
    y.values[k] = cd{1.0, 0.0};
    const MomentVector dy = derivative(y, Drive{}, 2.0, false);
    CHECK(dy.values[k] == cd{-2.0, 0.0});
}

TEST_CASE("square-pulse coincidence matches the closed form") {
    for (double sigma : {0.1, 0.25, 0.5, 1.0, 1.25, 2.0, 5.0, 10.0}) {
        CAPTURE(sigma);
        const double c = asymptotic_coincidence(resonant(sigma), Pulse::square(sigma));
        CHECK(std::abs(c - oracles::coincidence_square_resonant(sigma)) < 1e-3);
    }
}

TEST_CASE("excitation matches the closed form during the pulse") {
    for (double sigma : {0.1, 1.25, 10.0})
        for (double delta : {0.0, 1.0}) {
            CAPTURE(sigma);
            CAPTURE(delta);
            const auto tr = integrate_moments(resonant(sigma, delta), Pulse::square(sigma));
            const auto pe = excitation_probability(tr);
            CHECK(pe.front() == 0.0);
            double worst = 0.0;
            for (std::size_t i = 0; i < tr.times.size(); ++i) {
                const double t = tr.times[i];
                if (t > 2.0 / sigma) break;
                worst = std::max(worst, std::abs(pe[i] - oracles::excitation_square(sigma, delta, t)));
            }
            CHECK(worst < 1e-4);
        }
}

TEST_CASE("excitation stays a probability and is weak for narrow pulses") {
    const auto tr = integrate_moments(resonant(0.1), Pulse::square(0.1));
    double peak = 0.0;
    for (double p : tr.excitation) {
        CHECK(p >= -1e-12);
        CHECK(p <= 1.0);
        peak = std::max(peak, p);
    }
    CHECK(peak <= 0.1);
}

TEST_CASE("photon number and pair bookkeeping") {
    const Pulse p = Pulse::gaussian(0.8);
    const auto tr = integrate_moments(resonant(0.8, 0.4), p);
    for (std::size_t i = 0; i < tr.times.size(); i += 97)
        CHECK(tr.number_a[i] + tr.number_b[i] + tr.excitation[i] == doctest::Approx(2.0).epsilon(1e-9));
    // After the decay one photon in a means exactly one photon in each mode.
    const std::size_t n = tr.times.size() - 1;
    CHECK(std::abs(tr.coincidence[n] - (tr.number_a[n] - 2.0 * tr.pair_a[n])) < 1e-6);
    CHECK(std::abs(tr.pair_a[n] + tr.pair_b[n] + tr.coincidence[n] - 1.0) < 1e-12);
    CHECK(tr.pair_a[n] >= -1e-6);
    CHECK(tr.pair_b[n] >= -1e-6);
}

TEST_CASE("mode swap symmetry at zero delay") {
    MomentOptions o = default_options(resonant(1.0, 0.5), Pulse::exp_rising(1.0));
    o.explicit_mirror = true;
    const auto tr = integrate_moments(resonant(1.0, 0.5), Pulse::exp_rising(1.0), o);
    for (std::size_t i = 0; i < tr.times.size(); i += 31) {
        CHECK(std::abs(tr.pair_a[i] - tr.pair_b[i]) < 1e-12);
        CHECK(std::abs(tr.number_a[i] - tr.number_b[i]) < 1e-12);
    }
    const auto derived = integrate_moments(resonant(1.0, 0.5), Pulse::exp_rising(1.0));
    CHECK(derived.mirror_derived);
    CHECK_FALSE(tr.mirror_derived);
    CHECK(std::abs(derived.final_coincidence() - tr.final_coincidence()) < 1e-12);
    CHECK(std::abs(derived.excitation.back() - tr.excitation.back()) < 1e-12);
}

TEST_CASE("time-step convergence") {
    const ScatterParams p = resonant(1.25, 0.3);
    const Pulse pulse = Pulse::square(1.25);
    MomentOptions o = default_options(p, pulse);
    o.store_every = 0;
    const double c1 = integrate_moments(p, pulse, o).final_coincidence();
    o.dt /= 2.0;
    const double c2 = integrate_moments(p, pulse, o).final_coincidence();
    CHECK(std::abs(c1 - c2) < 1e-5);
}

TEST_CASE("rescaling gamma leaves dimensionless results unchanged") {
    ScatterParams p1 = resonant(0.9, 0.4);
    p1.delay = 1.0;
    ScatterParams p2 = p1;
    p2.gamma = 2.0;
    p2.bandwidth = 1.8;
    p2.detuning = 0.8;
    p2.delay = 0.5;
    for (PulseKind kind : {PulseKind::Square, PulseKind::Gaussian}) {
        p1.pulse_kind = p2.pulse_kind = kind;
        const double c1 = asymptotic_coincidence(p1, Pulse::from_params(p1));
        const double c2 = asymptotic_coincidence(p2, Pulse::from_params(p2));
        CHECK(c1 == doctest::Approx(c2).epsilon(1e-7));
    }
    const auto t1 = integrate_moments(resonant(1.25), Pulse::square(1.25));
    ScatterParams q = resonant(2.5);
    q.gamma = 2.0;
    const auto t2 = integrate_moments(q, Pulse::square(2.5));
    // Same step count; the second run covers each normalized time gamma t at half the time.
    REQUIRE(t1.times.size() == t2.times.size());
    for (std::size_t i = 0; i < t1.times.size(); i += 13) {
        CHECK(t2.times[i] == doctest::Approx(t1.times[i] / 2.0));
        CHECK(std::abs(t1.excitation[i] - t2.excitation[i]) < 1e-9);
    }
}

TEST_CASE("independent photons reproduce the linear coincidence") {
    for (const Pulse& pulse : {Pulse::square(0.7), Pulse::gaussian(1.3)}) {
        const auto tr = integrate_moments(resonant(pulse.bandwidth(), 0.5), pulse);
        const double lin = linear::linear_coincidence_terms(pulse, 0.5).reflection;
        CHECK(independent_photon_coincidence(tr) ==
              doctest::Approx(lin * lin + (1.0 - lin) * (1.0 - lin)).epsilon(1e-6));
    }
}

TEST_CASE("monochromatic regime") {
    // Deep in the HOM dip at |Delta| = gamma.
    CHECK(asymptotic_coincidence(resonant(0.02, 1.0), Pulse::square(0.02)) <= 0.05);
    CHECK(asymptotic_coincidence(resonant(0.02, -1.0), Pulse::square(0.02)) <= 0.05);
}

TEST_CASE("gaussian and exponential pulses violate the linear bound near sigma = 1") {
    for (const Pulse& pulse : {Pulse::gaussian(1.0), Pulse::exp_rising(1.0)}) {
        ScatterParams p = resonant(1.0);
        p.pulse_kind = pulse.kind();
        CHECK(asymptotic_coincidence(p, pulse) < 0.5);
        CHECK(linear::linear_coincidence(pulse, 0.0) >= 0.5);
    }
}

TEST_CASE("defaults converge and runs are deterministic") {
    const ScatterParams p = resonant(2.0, 0.7);
    const auto a = integrate_moments(p, Pulse::square(2.0));
    const auto b = integrate_moments(p, Pulse::square(2.0));
    CHECK(a.converged);
    CHECK(a.coincidence == b.coincidence);
    CHECK(a.excitation == b.excitation);
    CHECK(a.stored_times.size() == a.moments.size());
    MomentOptions o = default_options(p, Pulse::square(2.0));
    o.store_every = 0;
    const auto c = integrate_moments(p, Pulse::square(2.0), o);
    CHECK(c.moments.empty());
    CHECK(c.final_coincidence() == a.final_coincidence());
}

TEST_CASE("preconditions are enforced") {
    const ScatterParams p = resonant(1.0);
    const Pulse pulse = Pulse::square(1.0);
    const auto o = default_options(p, pulse);
    CHECK_THROWS_AS(integrate_moments(p, pulse, pulse.end_time() + 5.0, o.dt), std::invalid_argument);
    CHECK_THROWS_AS(integrate_moments(p, pulse, o.t_end, o.dt * 2.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate_moments(p, pulse, o.t_end, 0.0), std::invalid_argument);
    ScatterParams bad = p;
    bad.gamma = -1.0;
    CHECK_THROWS_AS(integrate_moments(bad, pulse), std::invalid_argument);
    const std::vector<double> delays{0.0, -1.0};
    CHECK_THROWS_AS(delay_scan(p, pulse, delays), std::invalid_argument);
}

TEST_CASE("delay scan") {
    const ScatterParams p = resonant(0.5, 1.0);
    const Pulse pulse = Pulse::square(0.5);
    const std::vector<double> delays{0.0, 1.0, 2.0, 4.0, 20.0};
    const auto serial = delay_scan(p, pulse, delays, 1);
    const auto parallel = delay_scan(p, pulse, delays, 3);
    REQUIRE(serial.size() == delays.size());
    for (std::size_t i = 0; i < delays.size(); ++i) {
        CHECK(serial[i].delay == delays[i]);
        CHECK(serial[i].coincidence == parallel[i].coincidence);
    }
    CHECK(serial.front().coincidence == asymptotic_coincidence(p, pulse));
    // No overlap at all: the photons scatter independently.
    ScatterParams far = p;
    far.delay = 20.0;
    const auto tr = integrate_moments(far, pulse);
    CHECK(serial.back().coincidence == doctest::Approx(independent_photon_coincidence(tr)).epsilon(1e-6));
}
