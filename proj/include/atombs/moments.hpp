#pragma once

// Heisenberg-picture expectation-value hierarchy for two photons scattering
// on a two-level atom.
//
// Every tracked quantity is a matrix element <i|O(t)|j> between initial
// states obtained from the two-photon input |1_a,1_b,g> by removing photons:
//
//   Input  = |1_a,1_b,g>     DropA = |0_a,1_b,g>
//   DropB  = |1_a,0_b,g>     Vacuum = |0_a,0_b,g>
//
// The free input operators a_0, b_0 always act to the right on a ket (or to
// the left on a bra), replacing it by the photon-reduced state times the
// pulse envelope e^{-i Delta t} xi(t). This closes the hierarchy on 19
// members for mode a; the b-mode number operators add 11 mirror members.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "atombs/core.hpp"
#include "atombs/pulse.hpp"

namespace atombs::moments {

enum class Ket : std::uint8_t { Input, DropA, DropB, Vacuum };

enum class Operator : std::uint8_t {
    SigmaPlus,
    SigmaMinus,
    SigmaZ,
    Number,            // N_m
    NumberSigmaPlus,   // N_m sigma_+
    NumberSigmaMinus,  // N_m sigma_-
    NumberSigmaZ,      // N_m sigma_z
    Pair,              // C_mm = (N_m^2 - N_m)/2
};

enum class Mode : std::uint8_t { A, B, Atom };

struct Member {
    Operator op;
    Mode mode;
    Ket bra;
    Ket ket;
    int level;    // dependency level, vacuum-referenced members first
    bool mirror;  // b-mode counterpart of an a-mode member
};

inline constexpr std::size_t kMembers = 30;
inline constexpr std::size_t kClosureSize = 19;
inline constexpr int kLevels = 4;

/// Tracked members in dependency order.
const std::array<Member, kMembers>& members();
std::string member_name(const Member& m);
/// Storage slot of <bra|op|ket>, or -1 when the element is not stored.
int member_index(Operator op, Mode mode, Ket bra, Ket ket);

struct MomentVector {
    std::array<cd, kMembers> values{};

    /// Value of any element, stored or not: structural zeros, vacuum
    /// constants and Hermitian conjugates are resolved here.
    cd element(Operator op, Mode mode, Ket bra, Ket ket) const;

    double excitation() const;  // (<sigma_z> + 1)/2
    double pair(Mode m) const;  // P_mm
    double number(Mode m) const;
    double coincidence() const;  // 1 - P_aa - P_bb

    /// Atom in |g>, one photon in each mode.
    static MomentVector initial();
};

/// Source terms e^{-i Delta t} xi_a(t) and e^{-i Delta t} xi_b(t).
struct Drive {
    cd a;
    cd b;
};

/// Time derivative of the members on `level`; other slots of `out` are
/// left untouched. Mirror members are skipped unless `with_mirror`.
void level_derivative(int level, const MomentVector& y, const Drive& drive, double gamma, bool with_mirror,
                      MomentVector& out);
MomentVector derivative(const MomentVector& y, const Drive& drive, double gamma, bool with_mirror);

/// Fills the mirror members from the a-mode members assuming a <-> b symmetry.
void mirror_from_symmetry(MomentVector& y);

struct MomentOptions {
    double t_end = 0.0;
    double dt = 0.0;
    std::size_t store_every = 1;  // 0 keeps only the final moment vector
    bool explicit_mirror = false;  // integrate mirror members even without delay
};

/// dt = min(1/gamma, 1/Omega)/50, t_end = last pulse edge + 15/gamma.
MomentOptions default_options(const ScatterParams& params, const Pulse& pulse);

struct MomentTrace {
    std::vector<double> times;
    std::vector<double> excitation;
    std::vector<double> pair_a;
    std::vector<double> pair_b;
    std::vector<double> coincidence;
    std::vector<double> number_a;
    std::vector<double> number_b;

    std::vector<double> stored_times;
    std::vector<MomentVector> moments;
    MomentVector final_state;

    bool mirror_derived = false;
    bool converged = false;  // |dC/dt| < 1e-8 at the final time

    double final_coincidence() const { return coincidence.back(); }
};

/// Integrates the hierarchy with a fixed-step RK4 whose grid contains every
/// pulse edge. `pulse` is the a-mode envelope; the b-mode envelope is the
/// same pulse delayed by params.delay. Only gamma, detuning and delay are
/// read from `params`.
///
/// Throws std::invalid_argument when t_end does not reach 10/gamma past the
/// last pulse edge or dt exceeds min(1/gamma, 1/Omega)/50, and NumericalError
/// when the excitation or coincidence leaves [-1e-6, 1 + 1e-6].
MomentTrace integrate_moments(const ScatterParams& params, const Pulse& pulse, const MomentOptions& options);
MomentTrace integrate_moments(const ScatterParams& params, const Pulse& pulse, double t_end, double dt);
MomentTrace integrate_moments(const ScatterParams& params, const Pulse& pulse);

std::vector<double> excitation_probability(const MomentTrace& trace);

/// Asymptotic coincidence with default options, keeping no history.
double asymptotic_coincidence(const ScatterParams& params, const Pulse& pulse);

/// Coincidence of two photons that scatter independently, from the
/// single-photon members of the trace: R_a R_b + T_a T_b.
double independent_photon_coincidence(const MomentTrace& trace);

struct DelayPoint {
    double delay;
    double coincidence;
};

/// Asymptotic coincidence for each delay (each >= 0), run in parallel.
std::vector<DelayPoint> delay_scan(const ScatterParams& params, const Pulse& pulse, std::span<const double> delays,
                                   unsigned workers = 0);

}  // namespace atombs::moments
