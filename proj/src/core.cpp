#include "atombs/core.hpp"

#include <algorithm>
#include <cmath>

namespace atombs {

std::string_view to_string(PulseKind kind) {
    switch (kind) {
        case PulseKind::Square: return "square";
        case PulseKind::Gaussian: return "gaussian";
        case PulseKind::ExpRising: return "exprising";
        case PulseKind::Sampled: return "sampled";
    }
    return "unknown";
}

PulseKind parse_pulse_kind(std::string_view text) {
    if (text == "square") return PulseKind::Square;
    if (text == "gaussian") return PulseKind::Gaussian;
    if (text == "exprising" || text == "exp-rising") return PulseKind::ExpRising;
    if (text == "sampled") return PulseKind::Sampled;
    throw std::invalid_argument("unknown pulse kind: " + std::string(text));
}

void ScatterParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("gamma must be positive");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw std::invalid_argument("bandwidth must be positive");
    if (!(delay >= 0.0) || !std::isfinite(delay))
        throw std::invalid_argument("delay must be non-negative");
    if (!std::isfinite(detuning))
        throw std::invalid_argument("detuning must be finite");
}

Grid1D::Grid1D(double lower, double upper, std::size_t points)
    : lower_(lower), upper_(upper), points_(points) {
    if (points < 2) throw std::invalid_argument("grid needs at least two points");
    if (!(upper > lower) || !std::isfinite(lower) || !std::isfinite(upper))
        throw std::invalid_argument("grid bounds must be finite with upper > lower");
}

std::size_t Grid1D::nearest_index(double x) const {
    const double k = std::round((x - lower_) / spacing());
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(points_ - 1)));
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> out(points_);
    for (std::size_t i = 0; i < points_; ++i) out[i] = (*this)[i];
    return out;
}

}  // namespace atombs
