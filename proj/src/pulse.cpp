#include "atombs/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace atombs {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // (2 pi)^-1/2

// \int_0^1 s e^{ixs} ds
cd ramp_moment(double x) {
    if (std::abs(x) < 1e-4) return {0.5 - x * x / 8.0, x / 3.0};
    const cd ix{0.0, x};
    const cd e = std::exp(ix);
    return e / ix + (e - 1.0) / (x * x);
}

// Cut for |xi| < kSupportCutoff * max|xi|.
double gaussian_half_width(double bandwidth) {
    return std::sqrt(-std::log(kSupportCutoff) / 2.0) / bandwidth;
}

double exp_rising_length(double bandwidth) {
    return -2.0 * std::log(kSupportCutoff) / bandwidth;
}

void require_bandwidth(double bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw std::invalid_argument("pulse bandwidth must be positive");
}

}  // namespace

cd phase_ramp_average(double x) {
    if (std::abs(x) < 1e-4) return {1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0};
    const cd ix{0.0, x};
    return (std::exp(ix) - 1.0) / ix;
}

Pulse::Pulse(PulseKind kind, double bandwidth, double start, double duration)
    : kind_(kind), bandwidth_(bandwidth), start_(start), duration_(duration) {}

Pulse Pulse::square(double bandwidth, double start) {
    require_bandwidth(bandwidth);
    return Pulse(PulseKind::Square, bandwidth, start, 2.0 / bandwidth);
}

Pulse Pulse::gaussian(double bandwidth) {
    require_bandwidth(bandwidth);
    const double half = gaussian_half_width(bandwidth);
    return Pulse(PulseKind::Gaussian, bandwidth, -half, 2.0 * half);
}

Pulse Pulse::exp_rising(double bandwidth) {
    require_bandwidth(bandwidth);
    const double length = exp_rising_length(bandwidth);
    return Pulse(PulseKind::ExpRising, bandwidth, -length, length);
}

Pulse Pulse::sampled(double tau0, double step, std::vector<cd> samples, double bandwidth) {
    if (samples.size() < 2) throw std::invalid_argument("sampled pulse needs at least two samples");
    if (!(step > 0.0)) throw std::invalid_argument("sample step must be positive");

    // Exact norm of the piecewise-linear interpolant.
    double norm = 0.0;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        const cd a = samples[k];
        const cd b = samples[k + 1];
        norm += step * (std::norm(a) + std::real(a * std::conj(b)) + std::norm(b)) / 3.0;
    }
    if (!(norm > 0.0)) throw std::invalid_argument("sampled pulse has zero norm");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& v : samples) v *= scale;

    if (bandwidth <= 0.0) {
        // RMS spectral width from the slope energy. Flat profiles have no
        // slope, so the square-pulse value 2/duration is the floor.
        double slope = 0.0;
        for (std::size_t k = 0; k + 1 < samples.size(); ++k)
            slope += std::norm(samples[k + 1] - samples[k]) / step;
        bandwidth = std::max(std::sqrt(slope), 2.0 / (step * static_cast<double>(samples.size() - 1)));
    }
    const double duration = step * static_cast<double>(samples.size() - 1);
    Pulse p(PulseKind::Sampled, bandwidth, tau0, duration);
    p.samples_ = std::make_shared<const Samples>(Samples{tau0, step, std::move(samples)});
    return p;
}

Pulse Pulse::from_params(const ScatterParams& params) {
    switch (params.pulse_kind) {
        case PulseKind::Square: return square(params.bandwidth);
        case PulseKind::Gaussian: return gaussian(params.bandwidth);
        case PulseKind::ExpRising: return exp_rising(params.bandwidth);
        case PulseKind::Sampled: break;
    }
    throw std::invalid_argument("sampled pulses must be loaded from file");
}

Pulse Pulse::shifted(double delay) const {
    Pulse p = *this;
    p.shift_ += delay;
    return p;
}

cd Pulse::time_profile(double tau) const {
    const double t = tau - shift_;
    if (t < start_ || t > start_ + duration_) return 0.0;
    const double w = bandwidth_;
    switch (kind_) {
        case PulseKind::Square: return std::sqrt(w / 2.0);
        case PulseKind::Gaussian:
            return std::pow(4.0 * w * w / std::numbers::pi, 0.25) * std::exp(-2.0 * w * w * t * t);
        case PulseKind::ExpRising: return std::sqrt(w) * std::exp(w * t / 2.0);
        case PulseKind::Sampled: {
            const auto& s = *samples_;
            const double pos = (t - s.tau0) / s.step;
            const auto k = std::min(static_cast<std::size_t>(pos), s.values.size() - 2);
            const double frac = pos - static_cast<double>(k);
            return s.values[k] + frac * (s.values[k + 1] - s.values[k]);
        }
    }
    return 0.0;
}

cd Pulse::spectral_amplitude(double omega) const {
    const double w = bandwidth_;
    cd f = 0.0;
    switch (kind_) {
        case PulseKind::Square:
            f = kInvSqrt2Pi * std::sqrt(w / 2.0) * duration_ * std::exp(cd{0.0, omega * start_}) *
                phase_ramp_average(omega * duration_);
            break;
        case PulseKind::Gaussian:
            f = kInvSqrt2Pi * std::pow(4.0 * w * w / std::numbers::pi, 0.25) *
                std::sqrt(std::numbers::pi / (2.0 * w * w)) * std::exp(-omega * omega / (8.0 * w * w));
            break;
        case PulseKind::ExpRising:
            f = kInvSqrt2Pi * std::sqrt(w) / cd{w / 2.0, omega};
            break;
        case PulseKind::Sampled: {
            // Exact transform of the piecewise-linear interpolant.
            const auto& s = *samples_;
            const double h = s.step;
            const cd e1 = phase_ramp_average(omega * h);
            const cd e2 = ramp_moment(omega * h);
            for (std::size_t k = 0; k + 1 < s.values.size(); ++k) {
                const double tk = s.tau0 + static_cast<double>(k) * h;
                const cd a = s.values[k];
                const cd b = s.values[k + 1];
                f += std::exp(cd{0.0, omega * tk}) * (a * e1 + (b - a) * e2);
            }
            f *= kInvSqrt2Pi * h;
            break;
        }
    }
    return f * std::exp(cd{0.0, omega * shift_});
}

std::vector<double> Pulse::breakpoints() const {
    return {start_time(), end_time()};
}

Pulse load_sampled_pulse_csv(const std::filesystem::path& path, double bandwidth) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pulse file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("pulse file is empty: " + path.string());
    {
        std::string header;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) header.push_back(c);
        if (header != "tau,re,im")
            throw std::runtime_error("pulse file header must be 'tau,re,im', got '" + line + "'");
    }
    std::vector<double> taus;
    std::vector<cd> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double tau = 0.0, re = 0.0, im = 0.0;
        if (!(row >> tau >> re >> im))
            throw std::runtime_error("malformed pulse row at line " + std::to_string(lineno));
        taus.push_back(tau);
        values.emplace_back(re, im);
    }
    if (taus.size() < 2) throw std::runtime_error("pulse file needs at least two rows");
    const double step = (taus.back() - taus.front()) / static_cast<double>(taus.size() - 1);
    for (std::size_t k = 1; k < taus.size(); ++k) {
        if (!(step > 0.0) || std::abs(taus[k] - taus[k - 1] - step) > 1e-6 * step)
            throw std::runtime_error("pulse samples must be uniformly spaced");
    }
    return Pulse::sampled(taus.front(), step, std::move(values), bandwidth);
}

}  // namespace atombs
