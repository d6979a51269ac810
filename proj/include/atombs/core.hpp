#pragma once

// Shared parameter record, pulse-family tags and uniform grids.
//
// Units: the atomic bandwidth gamma is 1 by convention. Every rate is
// expressed in units of gamma and every time in units of 1/gamma, but gamma
// is kept as an explicit field so that rescaling can be tested.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace atombs {

using cd = std::complex<double>;

enum class PulseKind { Square, Gaussian, ExpRising, Sampled };

std::string_view to_string(PulseKind kind);
PulseKind parse_pulse_kind(std::string_view text);

struct ScatterParams {
    double gamma = 1.0;      // atomic bandwidth (amplitude decay rate)
    double detuning = 0.0;   // pulse carrier minus atomic transition
    double bandwidth = 1.0;  // pulse bandwidth Omega
    double delay = 0.0;      // arrival delay of the b pulse after the a pulse
    PulseKind pulse_kind = PulseKind::Square;

    /// Throws std::invalid_argument unless gamma > 0, bandwidth > 0, delay >= 0.
    void validate() const;

    bool operator==(const ScatterParams&) const = default;
};

/// Uniform grid, inclusive of both bounds.
class Grid1D {
  public:
    Grid1D(double lower, double upper, std::size_t points);

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    std::size_t points() const { return points_; }
    double spacing() const { return (upper_ - lower_) / static_cast<double>(points_ - 1); }
    double operator[](std::size_t i) const {
        return i + 1 == points_ ? upper_ : lower_ + static_cast<double>(i) * spacing();
    }
    std::size_t nearest_index(double x) const;
    std::vector<double> nodes() const;

    bool operator==(const Grid1D&) const = default;

  private:
    double lower_;
    double upper_;
    std::size_t points_;
};

/// Cartesian product; x is the first (row) axis.
struct Grid2D {
    Grid1D x;
    Grid1D y;

    std::size_t size() const { return x.points() * y.points(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * y.points() + j; }
    bool symmetric() const { return x == y; }
};

/// Raised when an integration leaves the physically allowed range.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace atombs
