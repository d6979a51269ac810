#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "atombs/core.hpp"

namespace atombs {

/// Single-photon wavepacket with unit-norm temporal profile xi(tau) and
/// spectral amplitude f(w), w measured from the carrier frequency.
///
/// Conventions: xi(tau) = (2 pi)^-1/2 \int f(w) e^{-i w tau} dw, so that
/// f(w) = (2 pi)^-1/2 \int xi(tau) e^{+i w tau} dtau. Instances are immutable.
class Pulse {
  public:
    /// sqrt(Omega/2) on [start, start + 2/Omega].
    static Pulse square(double bandwidth, double start = 0.0);
    /// (4 Omega^2/pi)^{1/4} exp(-2 Omega^2 tau^2), centred on tau = 0.
    static Pulse gaussian(double bandwidth);
    /// sqrt(Omega) exp(Omega tau / 2) for tau < 0, zero afterwards.
    static Pulse exp_rising(double bandwidth);
    /// Uniformly sampled profile, linearly interpolated and renormalized.
    /// `bandwidth` is only used to pick integration steps; pass <= 0 to
    /// estimate it from the RMS spectral width, floored at 2/duration.
    static Pulse sampled(double tau0, double step, std::vector<cd> samples, double bandwidth = 0.0);

    /// Built-in family selected by params.pulse_kind (Sampled is rejected).
    static Pulse from_params(const ScatterParams& params);

    PulseKind kind() const { return kind_; }
    double bandwidth() const { return bandwidth_; }
    double start_time() const { return start_ + shift_; }
    double duration() const { return duration_; }
    double end_time() const { return start_time() + duration_; }

    cd time_profile(double tau) const;
    cd spectral_amplitude(double omega) const;

    /// Same pulse arriving `delay` later: xi(tau - delay).
    Pulse shifted(double delay) const;

    /// Times where xi is discontinuous (support edges), in increasing order.
    std::vector<double> breakpoints() const;

  private:
    struct Samples {
        double tau0;
        double step;
        std::vector<cd> values;
    };

    Pulse(PulseKind kind, double bandwidth, double start, double duration);

    PulseKind kind_;
    double bandwidth_;
    double start_;
    double duration_;
    double shift_ = 0.0;
    std::shared_ptr<const Samples> samples_;
};

/// Relative amplitude below which Gaussian and exponential tails are cut.
inline constexpr double kSupportCutoff = 1e-8;

/// Reads a `tau,re,im` CSV with a header row. Rows must be uniformly spaced.
Pulse load_sampled_pulse_csv(const std::filesystem::path& path, double bandwidth = 0.0);

/// (e^{ix} - 1)/(ix), with the removable singularity handled.
cd phase_ramp_average(double x);

}  // namespace atombs
