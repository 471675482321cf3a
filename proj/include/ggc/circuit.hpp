#pragma once

// Circuit-level compilation: one- and two-qubit logical gates mapped onto
// workspace positions, with base-shift insertions in shiftable-chain mode.

#include "ggc/refocus.hpp"
#include "ggc/shift.hpp"

namespace ggc {

struct CircuitGate {
    enum class Kind { LocalUnitary, PairPhase } kind = Kind::LocalUnitary;
    int q1 = 0, q2 = 0; // logical qubit indices
    MatC u2;            // LocalUnitary
    double T = 0;       // PairPhase
};

struct CircuitOptions {
    bool shiftable = false;      // chain mode with movable base
    CompileOptions compile;
    bool emit = true;            // attempt pulse emission per item
};

struct CircuitItem {
    enum class Kind { Gate, Shift, Refocus } kind = Kind::Gate;
    int gate_index = -1;
    bool emitted = false;
    std::string note;
    PulseSequence seq;   // Gate, when emitted
    ShiftPlan shift;     // Shift
    RefocusPlan refocus; // Refocus
};

struct CircuitPlan {
    std::vector<CircuitItem> items;
    double epsilon = 0;
    double per_gate_epsilon = 0;
    std::int64_t max_abs_offset = 0; // over every two-qubit-phase class touched
    bool fully_emitted = false;
};

/// Fixed-base compilation on an arbitrary certified scheme. Logical qubit i
/// is the i-th workspace point in canonical order.
CircuitPlan compile_circuit(const Scheme& scheme, const std::vector<CircuitGate>& gates,
                            double epsilon, const BalanceFunction& W,
                            const CircuitOptions& opts = {});

/// Shiftable-chain compilation: logical qubit j sits at position 4j; the base
/// R_ell moves so every one-qubit gate is compiled from a base within
/// distance nine, and every pulse class stays within offset 22.
CircuitPlan compile_circuit_shiftable(const Domain& window, const std::vector<CircuitGate>& gates,
                                      double epsilon, const BalanceFunction& W,
                                      const CircuitOptions& opts = {});

} // namespace ggc
