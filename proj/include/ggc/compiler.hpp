#pragma once

// Pulse-sequence compilation. Local one-qubit gates are synthesized as nested
// group-commutator products of executable global pulses; errors are budgeted
// per recursion level and recorded in the sequence's trace.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ggc/extraction.hpp"
#include "ggc/quantum.hpp"

namespace ggc {

/// Executable global pulse. TwoQubitPhase realizes exp(-i T A^C); the
/// OneQubitGlobal kind realizes exp(X(z)^diamond).
struct Pulse {
    enum class Kind { TwoQubitPhase, OneQubitGlobal } kind = Kind::OneQubitGlobal;
    OrbitKey key; // TwoQubitPhase only
    double T = 0; // TwoQubitPhase only
    cxd z = 0;    // OneQubitGlobal only
    int level = 0;

    static Pulse two_qubit(const OrbitKey& key, double T, int level = 0);
    static Pulse one_qubit(cxd z, int level = 0);
    Pulse inverse() const;
};

/// Sequence tree node: a pulse, or a repeated block. Nodes apply left to
/// right in time order.
struct SeqNode {
    Pulse pulse;                // leaf payload
    std::uint64_t repeat = 0;   // 0 = leaf, otherwise repeat count
    std::vector<SeqNode> body;  // repeated block

    static SeqNode leaf(Pulse p);
    static SeqNode repeated(std::uint64_t count, std::vector<SeqNode> body);
    bool is_leaf() const { return repeat == 0; }
};

double tree_flat_length(const std::vector<SeqNode>& nodes);

/// What the sequence is supposed to do on the admissible block.
struct TargetDescriptor {
    enum class Kind { Identity, LocalUnitary, PairPhase } kind = Kind::Identity;
    Point p, q;
    MatC u2;      // LocalUnitary
    double T = 0; // PairPhase
    double epsilon = 0;
};

struct LevelBudget {
    int level = 0;
    double eps = 0;          // error allotted to one gate at this level
    std::uint64_t N = 0;     // commutator periods
    double scale = 0;        // s_i: generator prefactor this level realizes
    double rebalance = 0;    // t_i applied to the diagonal side
    double x_norm = 0;       // ||A^C|| / W_i, unscaled
    double x_diff = 0;       // max flip difference of A^C / W_i
    double y_norm = 0;       // ||G_{i+1}||, unscaled
    double m_true = 0;       // rebalanced operator norm bound
    double m_eff = 0;        // structured size driving the drift estimate
    double drift = 0;        // c * m_eff^3 / sqrt(N)
};

struct BudgetTrace {
    std::string schedule;     // "commutator-drift" or "proof"
    double epsilon = 0;
    double c = 2.0;
    double margin = 2.0;
    double predicted_error = 0;
    double closed_form_length = 0;
    std::vector<LevelBudget> levels;
};

struct PulseSequence {
    std::vector<SeqNode> nodes;
    TargetDescriptor target;
    BudgetTrace trace;

    double flat_length() const { return tree_flat_length(nodes); }
    /// Materialize the flat pulse list; throws ResourceLimit beyond `cap`.
    std::vector<Pulse> flatten(std::uint64_t cap = 5'000'000) const;
};

/// Why a compile was refused, with the numbers that tripped the guard.
struct RefusalInfo {
    std::string reason;
    int level = 0;
    double required_N = 0;
    double cap = 0;
    double required_length = 0;
};

struct CompileRefused : std::runtime_error {
    RefusalInfo info;
    explicit CompileRefused(RefusalInfo i)
        : std::runtime_error("compile refused: " + i.reason), info(std::move(i))
    {
    }
};

struct CompileOptions {
    enum class Schedule {
        Proof,  ///< per-factor additivity: eps_{i+1} = eps_i / (4 N_i)
        Drift,  ///< exact-inverse pairing: sub-gate errors propagate through
                ///< the commutator, eps_{i+1} = eps_i_prop / (2 M_i sqrt(N_i))
    } schedule = Schedule::Drift;
    double c = 2.0;            // error constant; default per calibration policy
    double margin = 3.0;       // safety multiplier on required N
    double drift_share = 0.5;  // fraction of each level's budget given to drift
    std::uint64_t level_cap = 1'000'000;        // max N_i (flat emission)
    std::uint64_t structured_level_cap = 1ULL << 34;
    double flat_cap = 5'000'000;                // max flat pulses unless structured
    bool structured = false;   // allow repeat-tree output beyond flat_cap
};

/// Local gate exp(X(z)^p) on the admissible block, |z| <= 1.
PulseSequence compile_local_xy_gate(const Scheme& scheme, const Point& p,
                                    const std::vector<Point>& refs, cxd z, double epsilon,
                                    const BalanceFunction& W, const CompileOptions& opts = {});

/// Rotation-axis-in-the-xy-plane Euler decomposition U = Rx(c) Ry(b) Rx(a),
/// angles in (-2pi, 2pi]. Requires det U = 1.
std::array<double, 3> euler_xyx(const MatC& u);

/// Arbitrary special-unitary local gate via at most three xy-plane rotations,
/// each split so the per-call |z| stays within 1.
PulseSequence compile_local_unitary(const Scheme& scheme, const Point& p,
                                    const std::vector<Point>& refs, const MatC& u, double epsilon,
                                    const BalanceFunction& W, const CompileOptions& opts = {});

/// Admissible action of one entangling pulse: phases on every workspace pair
/// of the class, plus a constant from base-base members.
struct EntanglingInfo {
    Pulse pulse;
    OrbitKey key;
    std::vector<std::pair<Point, Point>> workspace_pairs; // unordered, canonical
    std::vector<double> pair_weights;                     // effective weights
    double constant_weight = 0; // base-base members: global phase on the block
    bool identity_on_admissible = false;
};

EntanglingInfo entangling_pulse(const Scheme& scheme, const Point& p, const Point& q, double T,
                                const BalanceFunction& W);

/// One 4N-factor group-commutator fragment approximating
/// exp([-i x_coeff A^C, -i Y]) given the four constituent gates.
SeqNode group_commutator_fragment(const Pulse& x_plus, const Pulse& x_minus,
                                  std::vector<SeqNode> y_plus, std::vector<SeqNode> y_minus,
                                  std::uint64_t N);

/// Dense-backend distance between the 4N-factor product and the commutator
/// exponential for Hermitian X, Y. Used by the convergence sweep.
double group_commutator_error_dense(const MatC& x, const MatC& y, std::uint64_t N);

struct SweepPoint {
    std::uint64_t N = 0;
    double error = 0;
    double m = 0;
};

struct SweepReport {
    std::vector<SweepPoint> points;
    double slope = 0;       // fitted log-log slope of error vs N
    double c_estimate = 0;  // max of error * sqrt(N) / M^3 over points
    double c_calibrated = 0; // c_estimate with the safety factor applied
};

/// Random Hermitian pairs on 2..3 qubits, errors across the given N grid.
SweepReport commutator_sweep(const std::vector<std::uint64_t>& Ns, int samples_per_size,
                             std::uint64_t seed);

} // namespace ggc
