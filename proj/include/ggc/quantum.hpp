#pragma once

// Quantum backends. Basis labels are bit configurations over the domain's
// canonical point order, little-endian: domain index i <-> bit i, so the
// basis state with index a assigns a_p = (a >> index_of(p)) & 1.
//
// Matrix convention is the standard one throughout: E_{a,b} = |a><b|, and
// [A,B] = AB - BA. The elementary flip matrix with a_p = 1 therefore raises
// bit p: E_{a, del_p a} maps |del_p a> to |a>.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ggc/geometry.hpp"
#include "ggc/scheme.hpp"

namespace ggc {

using cxd = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using VecD = Eigen::VectorXd;

/// Dense verification backend refuses beyond this many qubits.
constexpr int kMaxDenseQubits = 14;

inline std::uint64_t delete_bit(std::uint64_t a, int i) { return a & ~(1ULL << i); }
inline int get_bit(std::uint64_t a, int i) { return int((a >> i) & 1ULL); }

/// Positive weights on sites and ordered pairs. W(p) is shorthand for W(p,p).
class BalanceFunction {
public:
    BalanceFunction() = default;
    static BalanceFunction constant(std::size_t n, double value = 1.0);
    static BalanceFunction uniform_random(std::size_t n, double lo, double hi,
                                          std::uint64_t seed);

    double pair(int p, int q) const { return w_(p, q); }
    double site(int p) const { return w_(p, p); }
    void set_pair(int p, int q, double v);
    std::size_t size() const { return std::size_t(w_.rows()); }
    /// max/min ratio over all pair values.
    double ratio() const;

private:
    Eigen::MatrixXd w_;
};

/// Admissible-subspace bookkeeping for a scheme materialized on its domain:
/// base bits pinned to one, bits outside P u R pinned to zero.
struct AdmissibleSpace {
    int n = 0;
    std::uint64_t base_mask = 0;
    std::uint64_t workspace_mask = 0;
    std::vector<int> workspace_bits; // domain indices of P, canonical order

    static AdmissibleSpace from_scheme(const Scheme& scheme);

    std::size_t dim() const { return std::size_t(1) << workspace_bits.size(); }
    bool is_admissible(std::uint64_t a) const
    {
        return (a & ~workspace_mask) == base_mask;
    }
    /// j-th admissible configuration (j little-endian over workspace bits).
    std::uint64_t config(std::uint64_t j) const;
    /// Inverse of config() for admissible a.
    std::uint64_t logical_index(std::uint64_t a) const;
};

/// Diagonal of the weighted global two-qubit phase generator for one class:
/// entry at a sums W(p,q) over class members with a_p = a_q = 1.
VecD build_class_diagonal(const GroupModel& model, const Domain& domain, const OrbitKey& key,
                          const BalanceFunction& W);

/// Dense weighted sum of single-site embeddings of a 2x2 operator.
MatC build_global_one_qubit_dense(const MatC& m2, const Domain& domain,
                                  const BalanceFunction& W);

/// Dense weighted sum of pair embeddings of a 4x4 operator over one class.
/// Pair index convention: (a_p, a_q) -> 2 a_p + a_q.
MatC build_global_two_qubit_dense(const MatC& m4, const GroupModel& model, const Domain& domain,
                                  const OrbitKey& key, const BalanceFunction& W);

/// In-place phase evolution v[a] *= exp(-i T d[a]).
void apply_two_qubit_phase(VecC& state, const VecD& diag, double T);

/// In-place application of exp(X(z)^diamond): per-site rotations with the
/// closed-form 2x2 exponential of [[0,z],[-conj(z),0]] scaled by W(p).
void apply_one_qubit_global(VecC& state, cxd z, const BalanceFunction& W);

/// Closed-form 2x2 exp of [[0,z],[-conj(z),0]].
MatC rotation_2x2(cxd z);

MatC commutator(const MatC& a, const MatC& b);
/// Fast path for a diagonal left operand: [diag, M]_{ab} = (d_a - d_b) M_{ab}.
MatC commutator_diag(const VecD& diag, const MatC& m);

/// Largest singular value. Exact SVD for small matrices, seeded power
/// iteration on M^dagger M above the crossover.
double operator_norm(const MatC& m);

/// exp(scale * G) for anti-Hermitian G via eigendecomposition of iG.
MatC exp_skew_hermitian(const MatC& g, double scale = 1.0);

bool is_unitary(const MatC& u, double tol = 1e-9);

/// Structured operator whose nonzero pattern is restricted to one-bit flips;
/// closed under commutators with diagonal operators. Backs the extraction
/// oracle and norm estimates up to simulation scale.
class FlipMatrix {
public:
    FlipMatrix() = default;
    FlipMatrix(int n);

    /// X(z)^diamond with per-site weights.
    static FlipMatrix one_qubit_global(int n, cxd z, const BalanceFunction& W);

    int qubits() const { return n_; }
    std::size_t dim() const { return std::size_t(1) << n_; }

    /// Coefficient of |del_q a><a| (requires bit q of a set).
    cxd lower(int q, std::uint64_t a) const { return lower_[q][a]; }
    /// Coefficient of |a><del_q a| (requires bit q of a set).
    cxd raise(int q, std::uint64_t a) const { return raise_[q][a]; }
    void set_lower(int q, std::uint64_t a, cxd v) { lower_[q][a] = v; }
    void set_raise(int q, std::uint64_t a, cxd v) { raise_[q][a] = v; }

    /// [diag, this] entrywise; the pattern is preserved.
    FlipMatrix commutator_with_diag(const VecD& diag) const;
    FlipMatrix scaled(cxd factor) const;
    FlipMatrix adjoint() const;

    VecC apply(const VecC& v) const;
    VecC apply_adjoint(const VecC& v) const;
    MatC to_dense() const;

    /// Operator norm by power iteration (deterministic seed).
    double norm(double tol = 1e-10, int max_iter = 4000) const;
    /// Largest |entry| over the flip pattern.
    double max_abs_entry() const;

private:
    int n_ = 0;
    std::vector<VecC> lower_, raise_;
};

} // namespace ggc
