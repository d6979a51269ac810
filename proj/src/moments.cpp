#include "atombs/moments.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "atombs/parallel.hpp"

namespace atombs::moments {
namespace {

using enum Operator;
constexpr Ket P = Ket::Input;
constexpr Ket A = Ket::DropA;
constexpr Ket B = Ket::DropB;
constexpr Ket V = Ket::Vacuum;

constexpr std::array<Member, kMembers> kLayout{{
    // level 0: single excitation against the vacuum
    {SigmaPlus, Mode::Atom, A, V, 0, false},
    {SigmaPlus, Mode::Atom, B, V, 0, false},
    // level 1: one-photon sector
    {SigmaZ, Mode::Atom, A, A, 1, false},
    {SigmaZ, Mode::Atom, B, B, 1, false},
    {SigmaZ, Mode::Atom, B, A, 1, false},
    {Number, Mode::A, A, A, 1, false},
    {Number, Mode::A, B, B, 1, false},
    {Number, Mode::A, B, A, 1, false},
    {NumberSigmaZ, Mode::A, A, A, 1, false},
    {NumberSigmaZ, Mode::A, B, B, 1, false},
    {NumberSigmaZ, Mode::A, B, A, 1, false},
    {Number, Mode::B, A, A, 1, true},
    {Number, Mode::B, B, B, 1, true},
    {Number, Mode::B, B, A, 1, true},
    {NumberSigmaZ, Mode::B, A, A, 1, true},
    {NumberSigmaZ, Mode::B, B, B, 1, true},
    {NumberSigmaZ, Mode::B, B, A, 1, true},
    // level 2: two-photon coherences
    {SigmaPlus, Mode::Atom, P, A, 2, false},
    {SigmaPlus, Mode::Atom, P, B, 2, false},
    {NumberSigmaPlus, Mode::A, P, A, 2, false},
    {NumberSigmaPlus, Mode::A, P, B, 2, false},
    {NumberSigmaPlus, Mode::B, P, A, 2, true},
    {NumberSigmaPlus, Mode::B, P, B, 2, true},
    // level 3: two-photon populations
    {SigmaZ, Mode::Atom, P, P, 3, false},
    {Number, Mode::A, P, P, 3, false},
    {NumberSigmaZ, Mode::A, P, P, 3, false},
    {Pair, Mode::A, P, P, 3, false},
    {Number, Mode::B, P, P, 3, true},
    {NumberSigmaZ, Mode::B, P, P, 3, true},
    {Pair, Mode::B, P, P, 3, true},
}};

constexpr std::size_t kOps = 8;
constexpr std::size_t kModes = 3;
constexpr std::size_t kKets = 4;

using IndexTable = std::array<int, kOps * kModes * kKets * kKets>;

constexpr std::size_t slot(Operator op, Mode m, Ket i, Ket j) {
    return ((static_cast<std::size_t>(op) * kModes + static_cast<std::size_t>(m)) * kKets +
            static_cast<std::size_t>(i)) * kKets + static_cast<std::size_t>(j);
}

constexpr IndexTable make_index() {
    IndexTable t{};
    for (auto& v : t) v = -1;
    for (std::size_t k = 0; k < kMembers; ++k) {
        const auto& m = kLayout[k];
        t[slot(m.op, m.mode, m.bra, m.ket)] = static_cast<int>(k);
    }
    return t;
}

constexpr IndexTable kIndex = make_index();

constexpr int excitations(Ket k) {
    switch (k) {
        case Ket::Input: return 2;
        case Ket::DropA:
        case Ket::DropB: return 1;
        case Ket::Vacuum: return 0;
    }
    return 0;
}

// State left after the free input operator of mode m acts on k.
constexpr std::optional<Ket> drop(Mode m, Ket k) {
    if (k == P) return m == Mode::A ? A : B;
    if (k == A && m == Mode::B) return V;
    if (k == B && m == Mode::A) return V;
    return std::nullopt;
}

constexpr Ket swap_modes(Ket k) { return k == A ? B : (k == B ? A : k); }

constexpr bool raising(Operator op) { return op == SigmaPlus || op == NumberSigmaPlus; }

cd vacuum_constant(Operator op) { return op == SigmaZ ? cd{-1.0} : cd{0.0}; }

// Derivative of a single member; helper closures mirror the operator
// equations term by term.
cd member_derivative(const Member& mem, const MomentVector& y, const Drive& drive, double gamma) {
    const double sg = std::sqrt(gamma);
    const Ket i = mem.bra;
    const Ket j = mem.ket;
    const Mode m = mem.mode;
    const auto source = [&](Mode k) { return k == Mode::A ? drive.a : drive.b; };
    const auto E = [&](Operator op, Mode md, Ket bra, Ket ket) { return y.element(op, md, bra, ket); };
    const auto delta = [](Ket bra, Ket ket) { return bra == ket ? 1.0 : 0.0; };
    // <bra| X a_k |ket>
    const auto right = [&](Operator op, Mode md, Ket bra, Ket ket, Mode k) -> cd {
        const auto r = drop(k, ket);
        return r ? source(k) * E(op, md, bra, *r) : cd{};
    };
    // <bra| a_k^dag X |ket>
    const auto left = [&](Mode k, Operator op, Mode md, Ket bra, Ket ket) -> cd {
        const auto r = drop(k, bra);
        return r ? std::conj(source(k)) * E(op, md, *r, ket) : cd{};
    };
    // <bra| a_k^dag (1 + sigma_z) |ket>
    const auto left_one_plus_z = [&](Mode k, Ket bra, Ket ket) -> cd {
        const auto r = drop(k, bra);
        return r ? std::conj(source(k)) * (delta(*r, ket) + E(SigmaZ, Mode::Atom, *r, ket)) : cd{};
    };
    constexpr Mode at = Mode::Atom;

    switch (mem.op) {
        case SigmaPlus:
            return -gamma * E(SigmaPlus, at, i, j) +
                   sg * (left(Mode::A, SigmaZ, at, i, j) + left(Mode::B, SigmaZ, at, i, j));
        case SigmaZ:
            return -2.0 * gamma * (delta(i, j) + E(SigmaZ, at, i, j)) -
                   2.0 * sg *
                       (right(SigmaPlus, at, i, j, Mode::A) + right(SigmaPlus, at, i, j, Mode::B) +
                        left(Mode::A, SigmaMinus, at, i, j) + left(Mode::B, SigmaMinus, at, i, j));
        case Number:
            return gamma / 2.0 * (delta(i, j) + E(SigmaZ, at, i, j)) +
                   sg * (right(SigmaPlus, at, i, j, m) + left(m, SigmaMinus, at, i, j));
        case NumberSigmaPlus:
            return -gamma * E(NumberSigmaPlus, m, i, j) +
                   sg * (left_one_plus_z(m, i, j) / 2.0 + left(Mode::A, NumberSigmaZ, m, i, j) +
                         left(Mode::B, NumberSigmaZ, m, i, j));
        case NumberSigmaZ:
            return -2.0 * gamma *
                       (E(NumberSigmaZ, m, i, j) + E(Number, m, i, j) +
                        (delta(i, j) + E(SigmaZ, at, i, j)) / 4.0) -
                   sg * (2.0 * right(NumberSigmaPlus, m, i, j, Mode::A) +
                         2.0 * right(NumberSigmaPlus, m, i, j, Mode::B) + right(SigmaPlus, at, i, j, m) +
                         2.0 * left(Mode::A, NumberSigmaMinus, m, i, j) +
                         2.0 * left(Mode::B, NumberSigmaMinus, m, i, j) + left(m, SigmaMinus, at, i, j));
        case Pair:
            return gamma / 2.0 * (E(Number, m, i, j) + E(NumberSigmaZ, m, i, j)) +
                   sg * (right(NumberSigmaPlus, m, i, j, m) + left(m, NumberSigmaMinus, m, i, j));
        case SigmaMinus:
        case NumberSigmaMinus: break;
    }
    throw std::logic_error("lowering operators are not stored");
}

void axpy(MomentVector& out, const MomentVector& x, double a, const MomentVector& y) {
    for (std::size_t k = 0; k < kMembers; ++k) out.values[k] = x.values[k] + a * y.values[k];
}

}  // namespace

const std::array<Member, kMembers>& members() { return kLayout; }

std::string member_name(const Member& m) {
    static constexpr const char* kets[] = {"in", "0a1b", "1a0b", "vac"};
    std::string op;
    const std::string mode = m.mode == Mode::A ? "a" : "b";
    switch (m.op) {
        case SigmaPlus: op = "sigma_plus"; break;
        case SigmaMinus: op = "sigma_minus"; break;
        case SigmaZ: op = "sigma_z"; break;
        case Number: op = "N_" + mode; break;
        case NumberSigmaPlus: op = "N_" + mode + "_sigma_plus"; break;
        case NumberSigmaMinus: op = "N_" + mode + "_sigma_minus"; break;
        case NumberSigmaZ: op = "N_" + mode + "_sigma_z"; break;
        case Pair: op = "C_" + mode + mode; break;
    }
    return std::string("<") + kets[static_cast<int>(m.bra)] + "|" + op + "|" + kets[static_cast<int>(m.ket)] + ">";
}

int member_index(Operator op, Mode mode, Ket bra, Ket ket) { return kIndex[slot(op, mode, bra, ket)]; }

cd MomentVector::element(Operator op, Mode mode, Ket bra, Ket ket) const {
    if (op == SigmaMinus) return std::conj(element(SigmaPlus, Mode::Atom, ket, bra));
    if (op == NumberSigmaMinus) return std::conj(element(NumberSigmaPlus, mode, ket, bra));
    if (op == SigmaPlus || op == SigmaZ) mode = Mode::Atom;

    if (raising(op)) {
        if (excitations(bra) != excitations(ket) + 1) return 0.0;
        const int k = member_index(op, mode, bra, ket);
        // Unstored raising elements, e.g. <0a1b|N_a sigma_+|vac>, vanish identically.
        return k < 0 ? cd{} : values[static_cast<std::size_t>(k)];
    }
    if (excitations(bra) != excitations(ket)) return 0.0;
    if (bra == V) return vacuum_constant(op);
    if (op == Pair && excitations(bra) < 2) return 0.0;
    if (const int k = member_index(op, mode, bra, ket); k >= 0) return values[static_cast<std::size_t>(k)];
    if (const int k = member_index(op, mode, ket, bra); k >= 0) return std::conj(values[static_cast<std::size_t>(k)]);
    throw std::logic_error("moment element outside the closure");
}

double MomentVector::excitation() const { return (element(SigmaZ, Mode::Atom, P, P).real() + 1.0) / 2.0; }
double MomentVector::pair(Mode m) const { return element(Pair, m, P, P).real(); }
double MomentVector::number(Mode m) const { return element(Number, m, P, P).real(); }
double MomentVector::coincidence() const { return 1.0 - pair(Mode::A) - pair(Mode::B); }

MomentVector MomentVector::initial() {
    MomentVector y;
    const auto set = [&](Operator op, Mode m, Ket i, Ket j, double v) {
        y.values[static_cast<std::size_t>(member_index(op, m, i, j))] = v;
    };
    for (Ket k : {P, A, B}) set(SigmaZ, Mode::Atom, k, k, -1.0);
    // DropA keeps only the b photon, DropB only the a photon.
    set(Number, Mode::A, P, P, 1.0);
    set(Number, Mode::A, B, B, 1.0);
    set(Number, Mode::B, P, P, 1.0);
    set(Number, Mode::B, A, A, 1.0);
    set(NumberSigmaZ, Mode::A, P, P, -1.0);
    set(NumberSigmaZ, Mode::A, B, B, -1.0);
    set(NumberSigmaZ, Mode::B, P, P, -1.0);
    set(NumberSigmaZ, Mode::B, A, A, -1.0);
    return y;
}

void level_derivative(int level, const MomentVector& y, const Drive& drive, double gamma, bool with_mirror,
                      MomentVector& out) {
    for (std::size_t k = 0; k < kMembers; ++k) {
        const auto& mem = kLayout[k];
        if (mem.level != level || (mem.mirror && !with_mirror)) continue;
        out.values[k] = member_derivative(mem, y, drive, gamma);
    }
}

MomentVector derivative(const MomentVector& y, const Drive& drive, double gamma, bool with_mirror) {
    MomentVector out;
    for (int level = 0; level < kLevels; ++level) level_derivative(level, y, drive, gamma, with_mirror, out);
    return out;
}

void mirror_from_symmetry(MomentVector& y) {
    for (std::size_t k = 0; k < kMembers; ++k) {
        const auto& mem = kLayout[k];
        if (!mem.mirror) continue;
        y.values[k] = y.element(mem.op, Mode::A, swap_modes(mem.bra), swap_modes(mem.ket));
    }
}

MomentOptions default_options(const ScatterParams& params, const Pulse& pulse) {
    const double last_edge = std::max(pulse.end_time(), pulse.end_time() + params.delay);
    MomentOptions o;
    o.dt = std::min(1.0 / params.gamma, 1.0 / pulse.bandwidth()) / 50.0;
    o.t_end = last_edge + 15.0 / params.gamma;
    return o;
}

MomentTrace integrate_moments(const ScatterParams& params, const Pulse& pulse, const MomentOptions& options) {
    params.validate();
    const double gamma = params.gamma;
    const Pulse pa = pulse;
    const Pulse pb = pulse.shifted(params.delay);
    const double t0 = std::min(pa.start_time(), pb.start_time());
    const double last_edge = std::max(pa.end_time(), pb.end_time());
    if (!(options.t_end >= last_edge + 10.0 / gamma - 1e-9))
        throw std::invalid_argument("t_end must reach at least 10/gamma past the last pulse edge");
    const double dt_max = std::min(1.0 / gamma, 1.0 / pulse.bandwidth()) / 50.0;
    if (!(options.dt > 0.0) || options.dt > dt_max * (1.0 + 1e-9))
        throw std::invalid_argument("dt must not exceed min(1/gamma, 1/Omega)/50");

    const bool with_mirror = options.explicit_mirror || params.delay != 0.0;

    // Step grid: every pulse edge is a node.
    std::vector<double> nodes{t0, options.t_end};
    for (const Pulse* p : {&pa, &pb})
        for (double b : p->breakpoints())
            if (b > t0 && b < options.t_end) nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); }),
                nodes.end());

    const auto drive_at = [&](double t) {
        const cd phase = std::exp(cd{0.0, -params.detuning * t});
        return Drive{phase * pa.time_profile(t), phase * pb.time_profile(t)};
    };

    MomentTrace trace;
    trace.mirror_derived = !with_mirror;
    MomentVector y = MomentVector::initial();
    MomentVector k1, k2, k3, k4, w;

    const auto record = [&](double t, const MomentVector& state, bool force_store) {
        MomentVector s = state;
        if (!with_mirror) mirror_from_symmetry(s);
        const double pe = s.excitation();
        const double c = s.coincidence();
        constexpr double tol = 1e-6;
        if (pe < -tol || pe > 1.0 + tol || c < -tol || c > 1.0 + tol)
            throw NumericalError("step rejected at t = " + std::to_string(t) + ": excitation " + std::to_string(pe) +
                                 ", coincidence " + std::to_string(c));
        trace.times.push_back(t);
        trace.excitation.push_back(pe);
        trace.pair_a.push_back(s.pair(Mode::A));
        trace.pair_b.push_back(s.pair(Mode::B));
        trace.coincidence.push_back(c);
        trace.number_a.push_back(s.number(Mode::A));
        trace.number_b.push_back(s.number(Mode::B));
        if (force_store) {
            trace.stored_times.push_back(t);
            trace.moments.push_back(s);
        }
        return s;
    };

    std::size_t step = 0;
    record(t0, y, options.store_every > 0);
    for (std::size_t seg = 0; seg + 1 < nodes.size(); ++seg) {
        const double a = nodes[seg];
        const double b = nodes[seg + 1];
        const auto n = static_cast<std::size_t>(std::ceil((b - a) / options.dt * (1.0 - 1e-12)));
        const double h = (b - a) / static_cast<double>(std::max<std::size_t>(n, 1));
        // Sources are sampled strictly inside each step so edge values are
        // the interior one-sided limits.
        const double nudge = 1e-9 * h;
        for (std::size_t s = 0; s < n; ++s) {
            const double t = a + static_cast<double>(s) * h;
            const double t_next = s + 1 == n ? b : t + h;
            const Drive d0 = drive_at(t + nudge);
            const Drive dm = drive_at(t + h / 2.0);
            const Drive d1 = drive_at(t_next - nudge);
            k1 = derivative(y, d0, gamma, with_mirror);
            axpy(w, y, h / 2.0, k1);
            k2 = derivative(w, dm, gamma, with_mirror);
            axpy(w, y, h / 2.0, k2);
            k3 = derivative(w, dm, gamma, with_mirror);
            axpy(w, y, h, k3);
            k4 = derivative(w, d1, gamma, with_mirror);
            for (std::size_t k = 0; k < kMembers; ++k)
                y.values[k] += h / 6.0 * (k1.values[k] + 2.0 * k2.values[k] + 2.0 * k3.values[k] + k4.values[k]);
            ++step;
            const bool last = seg + 2 == nodes.size() && s + 1 == n;
            const bool store = options.store_every > 0 && (step % options.store_every == 0 || last);
            const MomentVector full = record(t_next, y, store);
            if (last) trace.final_state = full;
        }
    }
    if (nodes.size() < 2 || trace.times.size() == 1) trace.final_state = y;

    // Asymptotic check: the coincidence must have stopped moving.
    MomentVector fin = y;
    const MomentVector rate = derivative(fin, drive_at(options.t_end), gamma, true);
    if (!with_mirror) mirror_from_symmetry(fin);
    const double dc = -(rate.values[static_cast<std::size_t>(member_index(Pair, Mode::A, P, P))].real() +
                        (with_mirror ? rate.values[static_cast<std::size_t>(member_index(Pair, Mode::B, P, P))].real()
                                     : rate.values[static_cast<std::size_t>(member_index(Pair, Mode::A, P, P))].real()));
    trace.converged = std::abs(dc) < 1e-8;
    return trace;
}

MomentTrace integrate_moments(const ScatterParams& params, const Pulse& pulse, double t_end, double dt) {
    MomentOptions o;
    o.t_end = t_end;
    o.dt = dt;
    return integrate_moments(params, pulse, o);
}

MomentTrace integrate_moments(const ScatterParams& params, const Pulse& pulse) {
    return integrate_moments(params, pulse, default_options(params, pulse));
}

std::vector<double> excitation_probability(const MomentTrace& trace) { return trace.excitation; }

double asymptotic_coincidence(const ScatterParams& params, const Pulse& pulse) {
    MomentOptions o = default_options(params, pulse);
    o.store_every = 0;
    return integrate_moments(params, pulse, o).final_coincidence();
}

double independent_photon_coincidence(const MomentTrace& trace) {
    const MomentVector& y = trace.final_state;
    // A lone b photon (DropA) ends in mode a with probability R_b, and vice versa.
    const double reflect_b = y.element(Number, Mode::A, A, A).real();
    const double reflect_a = y.element(Number, Mode::B, B, B).real();
    return reflect_a * reflect_b + (1.0 - reflect_a) * (1.0 - reflect_b);
}

std::vector<DelayPoint> delay_scan(const ScatterParams& params, const Pulse& pulse, std::span<const double> delays,
                                   unsigned workers) {
    for (double d : delays)
        if (!(d >= 0.0)) throw std::invalid_argument("delays must be non-negative");
    return parallel_map(
        delays.size(),
        [&](std::size_t k) {
            ScatterParams p = params;
            p.delay = delays[k];
            return DelayPoint{delays[k], asymptotic_coincidence(p, pulse)};
        },
        workers);
}

}  // namespace atombs::moments
