#pragma once

// Sequence simulation. Small sequences apply pulse by pulse to admissible
// basis columns; repeated blocks above the threshold are powered through a
// Schur decomposition of the block unitary, which makes the cost logarithmic
// in the repeat count.

#include <memory>

#include "ggc/compiler.hpp"

namespace ggc {

struct SimOptions {
    std::uint64_t spectral_threshold = 64; // repeat counts >= this use spectral powering
    Eigen::Index spectral_max_dim = 4096;
    bool verbose = false;
};

struct SimReport {
    double distance = 0;       // admissible-block operator-norm error, phase-aligned
    double leakage = 0;        // max column norm outside the admissible subspace
    double align_phase = 0;
    double declared_epsilon = 0;
    bool within_budget = false;
    double wall_seconds = 0;
    double flat_length = 0;
};

class SequenceSimulator {
public:
    SequenceSimulator(const Scheme& scheme, const BalanceFunction& W, SimOptions opts = {});

    void apply(VecC& state, const Pulse& pulse);
    void apply(VecC& state, const std::vector<SeqNode>& nodes);

    /// Admissible-block matrix of the sequence unitary (column sweep or
    /// matrix path, chosen by the tree shape). leakage_out, when given,
    /// receives the worst column leakage.
    MatC admissible_block(const std::vector<SeqNode>& nodes, double* leakage_out = nullptr);

    /// Admissible-block matrix the target descriptor denotes.
    MatC target_matrix(const TargetDescriptor& target) const;

    /// Full sequence unitary through the matrix path (spectral powering for
    /// large repeats). Verification scale only.
    MatC full_unitary(const std::vector<SeqNode>& nodes);

    const AdmissibleSpace& space() const { return space_; }

private:
    const Scheme& scheme_;
    const BalanceFunction& W_;
    SimOptions opts_;
    AdmissibleSpace space_;
    std::unordered_map<OrbitKey, VecD, OrbitKeyHash> diag_cache_;

    // Powered repeat blocks, keyed by structural hash. A mirrored block (the
    // reversed sequence of inverted pulses) is served as the exact adjoint of
    // its partner, which preserves the inverse pairing the compiler relies on.
    struct CachedBlock {
        std::shared_ptr<MatC> m;
        bool adjoint = false;
    };
    std::unordered_map<std::uint64_t, CachedBlock> block_cache_;

    const VecD& class_diag(const OrbitKey& key);
    bool needs_matrix_path(const std::vector<SeqNode>& nodes) const;
    void apply_to_matrix(MatC& m, const std::vector<SeqNode>& nodes);
    MatC node_unitary(const SeqNode& node);
};

/// Structural hash of a sequence tree (exact bit patterns of parameters).
std::uint64_t sequence_tree_hash(const std::vector<SeqNode>& nodes);
/// The reversed sequence of inverted factors: the exact inverse unitary.
std::vector<SeqNode> inverse_sequence(const std::vector<SeqNode>& nodes);

/// ||b - e^{i phi} t|| minimized over the aligning phase phi.
double phase_aligned_distance(const MatC& b, const MatC& t, double* phase_out = nullptr);

/// Measure a compiled sequence against its declared target.
SimReport measure_sequence(const Scheme& scheme, const BalanceFunction& W,
                           const PulseSequence& seq, SimOptions opts = {});

/// U^n for unitary U through its Schur form; cost is one decomposition plus
/// two products, independent of n.
MatC spectral_unitary_power(const MatC& u, std::uint64_t n);

} // namespace ggc
