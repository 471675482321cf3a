#pragma once

// Selective recoupling: sign-patterned entangling segments interleaved with
// site flips so that every workspace coupling of the class cancels exactly
// except the target pair. Cancellation happens at the diagonal Hamiltonian
// level, so it is exact bookkeeping, not an approximation.

#include "ggc/compiler.hpp"

namespace ggc {

struct RefocusOp {
    enum class Kind { Segment, Flip } kind = Kind::Segment;
    double T = 0;        // Segment: entangling pulse duration
    Fraction frac;       // Segment: duration as an exact fraction of the request
    std::size_t site = 0; // Flip: index into flip_sites
};

struct RefocusPlan {
    Point p, q;
    OrbitKey key;
    double T_requested = 0;
    std::vector<Point> flip_sites;   // canonical order
    std::vector<RefocusOp> ops;      // time order; flips bracket the segments
    std::size_t flip_count = 0;
    std::size_t segment_count = 0;

    // Exact replay results (rational when the weights are integers).
    bool rational_ledger = false;
    bool couplings_cancel = false;   // every non-target config phase matches
    Fraction constant_phase;         // global phase per unit T (rational path)
    std::string ledger_summary;

    /// Entangling pulses only; flips are separate compiled-gate requests.
    std::vector<Pulse> segment_pulses() const;
};

/// Build and exactly verify a refocusing schedule landing controlled-phase(T)
/// on (p, q) within the class of (p, q). Requires the no-shared-distance
/// condition. Throws ResourceLimit when the flip set grows past 16 sites.
RefocusPlan refocus_pair(const Scheme& scheme, const Point& p, const Point& q, double T,
                         const BalanceFunction& W);

/// Diagonal simulation of the plan with ideal flips: returns the maximum
/// absolute deviation of the accumulated per-configuration phase from the
/// target controlled-phase (after removing the global constant).
double refocus_phase_deviation(const Scheme& scheme, const RefocusPlan& plan,
                               const BalanceFunction& W);

} // namespace ggc
