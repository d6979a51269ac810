#include "atombs/oracles.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace atombs::oracles {
namespace {

constexpr std::array kForms{
    ClosedForm{Formula::ReflectionMonochromatic, std::nullopt, false, false,
               "single-photon reflection, monochromatic limit"},
    ClosedForm{Formula::CoincidenceMonochromatic, std::nullopt, false, false,
               "two-photon coincidence, monochromatic limit"},
    ClosedForm{Formula::ReflectionSquare, PulseKind::Square, true, false,
               "single-photon reflection, resonant square pulse"},
    ClosedForm{Formula::CoincidenceSquare, PulseKind::Square, true, false,
               "two-photon coincidence, resonant square pulse"},
    ClosedForm{Formula::ExcitationSquare, PulseKind::Square, false, true,
               "atomic excitation during a square pulse"},
};

void require_positive(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::domain_error("normalized bandwidth must be positive, got " + std::to_string(sigma));
}

}  // namespace

const ClosedForm& closed_form(Formula tag) {
    for (const auto& f : kForms)
        if (f.tag == tag) return f;
    throw std::logic_error("unregistered closed form");
}

std::optional<Formula> coincidence_formula_for(const ScatterParams& params) {
    const double sigma = params.bandwidth / params.gamma;
    if (params.delay != 0.0) return std::nullopt;
    if (params.pulse_kind == PulseKind::Square && params.detuning == 0.0) return Formula::CoincidenceSquare;
    if (sigma <= kMonochromaticBandwidth && params.pulse_kind != PulseKind::Sampled)
        return Formula::CoincidenceMonochromatic;
    return std::nullopt;
}

double evaluate_coincidence(Formula tag, const ScatterParams& params) {
    switch (tag) {
        case Formula::CoincidenceMonochromatic: return coincidence_monochromatic(params.detuning / params.gamma);
        case Formula::CoincidenceSquare:
            if (params.detuning != 0.0 || params.pulse_kind != PulseKind::Square)
                throw std::domain_error("square-pulse coincidence is only known on resonance");
            return coincidence_square_resonant(params.bandwidth / params.gamma);
        default: break;
    }
    throw std::domain_error("formula does not give a coincidence");
}

double reflection_monochromatic(double detuning_ratio) {
    return 1.0 / (1.0 + detuning_ratio * detuning_ratio);
}

double coincidence_monochromatic(double detuning_ratio) {
    const double d2 = detuning_ratio * detuning_ratio;
    return 1.0 - 4.0 * d2 / ((1.0 + d2) * (1.0 + d2));
}

double reflection_square_resonant(double sigma) {
    require_positive(sigma);
    return 1.0 + std::expm1(-2.0 / sigma) * sigma / 2.0;
}

double coincidence_square_resonant(double sigma) {
    require_positive(sigma);
    return 1.0 - 3.0 * sigma * (1.0 - sigma + std::exp(-2.0 / sigma) * (1.0 + sigma));
}

double excitation_square_resonant(double sigma, double t) {
    require_positive(sigma);
    if (t < 0.0 || t > 2.0 / sigma * (1.0 + 1e-12))
        throw std::domain_error("excitation formula only holds during the pulse");
    return sigma * (1.0 - 2.0 * sigma + 2.0 * std::exp(-t) * (-1.0 + (-1.0 + t) * 4.0 * sigma) +
                    std::exp(-2.0 * t) * (1.0 + (5.0 + 2.0 * t) * 2.0 * sigma));
}

double excitation_square(double sigma, double delta, double t) {
    if (delta == 0.0) return excitation_square_resonant(sigma, t);
    require_positive(sigma);
    if (t < 0.0 || t > 2.0 / sigma * (1.0 + 1e-12))
        throw std::domain_error("excitation formula only holds during the pulse");

    const double d2 = delta * delta;
    const double p = d2 + 1.0;
    // The overall e^{-2t'} is distributed over the bracket to avoid overflow.
    const double e1 = std::exp(-t);
    const double e2 = e1 * e1;
    const double bracket =
        e2 * delta * (2.0 * sigma * ((2.0 * t - 3.0) * d2 + 2.0 * t + 5.0) + p * p) +
        (d2 * delta + delta) * (-2.0 * sigma + d2 + 1.0) -
        2.0 * e1 * delta * (p * p - 2.0 * sigma * ((t + 2.0) * d2 + t - 2.0)) * std::cos(t * delta) +
        4.0 * sigma * e1 * (t * d2 * d2 + (t - 3.0) * d2 + 1.0) * std::sin(t * delta);
    return sigma / (delta * p * p * p) * bracket;
}

}  // namespace atombs::oracles
