#pragma once

// Closed-form results for the atomic beamsplitter. Each formula is only
// evaluated inside its validity domain; anything else throws
// std::domain_error instead of extrapolating.

#include <optional>
#include <string_view>

#include "atombs/core.hpp"

namespace atombs::oracles {

enum class Formula {
    ReflectionMonochromatic,   // R^o = 1/(1+delta^2)
    CoincidenceMonochromatic,  // C^o = 1 - 4 R^o T^o
    ReflectionSquare,          // resonant square pulse
    CoincidenceSquare,         // resonant square pulse
    ExcitationSquare,          // square pulse, inside the pulse window
};

struct ClosedForm {
    Formula tag;
    std::optional<PulseKind> pulse;  // nullopt: any shape (monochromatic limit)
    bool resonant_only;
    bool pulse_window_only;
    std::string_view description;
};

const ClosedForm& closed_form(Formula tag);

/// Largest Omega/gamma for which the monochromatic formulas are offered as
/// a reference column.
inline constexpr double kMonochromaticBandwidth = 0.05;

/// Closed form covering the asymptotic coincidence for this configuration,
/// if any: the resonant square-pulse result first, then the monochromatic one.
std::optional<Formula> coincidence_formula_for(const ScatterParams& params);
double evaluate_coincidence(Formula tag, const ScatterParams& params);

double reflection_monochromatic(double detuning_ratio);
double coincidence_monochromatic(double detuning_ratio);

double reflection_square_resonant(double sigma);
double coincidence_square_resonant(double sigma);

/// Excitation probability during a square pulse at normalized time
/// t' = gamma (t - t0), detuning delta = Delta/gamma and bandwidth
/// sigma = Omega/gamma. Requires 0 <= t' <= 2/sigma.
double excitation_square(double sigma, double delta, double t_prime);

/// The resonant specialization written out explicitly.
double excitation_square_resonant(double sigma, double t_prime);

}  // namespace atombs::oracles
