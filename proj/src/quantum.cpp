#include "ggc/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ggc {

BalanceFunction BalanceFunction::constant(std::size_t n, double value)
{
    if (value <= 0) throw InvalidArgument("balance function must be positive");
    BalanceFunction w;
    w.w_ = Eigen::MatrixXd::Constant(Eigen::Index(n), Eigen::Index(n), value);
    return w;
}

BalanceFunction BalanceFunction::uniform_random(std::size_t n, double lo, double hi,
                                                std::uint64_t seed)
{
    if (lo <= 0 || hi < lo) throw InvalidArgument("balance function range must be positive");
    BalanceFunction w;
    w.w_.resize(Eigen::Index(n), Eigen::Index(n));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (Eigen::Index i = 0; i < w.w_.rows(); ++i)
        for (Eigen::Index j = 0; j < w.w_.cols(); ++j) w.w_(i, j) = dist(rng);
    return w;
}

void BalanceFunction::set_pair(int p, int q, double v)
{
    if (v <= 0) throw InvalidArgument("balance function must be positive");
    w_(p, q) = v;
}

double BalanceFunction::ratio() const
{
    double mx = w_.maxCoeff(), mn = w_.minCoeff();
    return mx / mn;
}

AdmissibleSpace AdmissibleSpace::from_scheme(const Scheme& scheme)
{
    AdmissibleSpace sp;
    sp.n = int(scheme.domain.size());
    for (const auto& r : scheme.base) sp.base_mask |= 1ULL << scheme.domain.index_of(r);
    for (const auto& p : scheme.workspace) {
        int i = scheme.domain.index_of(p);
        sp.workspace_mask |= 1ULL << i;
        sp.workspace_bits.push_back(i);
    }
    return sp;
}

std::uint64_t AdmissibleSpace::config(std::uint64_t j) const
{
    std::uint64_t a = base_mask;
    for (std::size_t b = 0; b < workspace_bits.size(); ++b)
        if ((j >> b) & 1ULL) a |= 1ULL << workspace_bits[b];
    return a;
}

std::uint64_t AdmissibleSpace::logical_index(std::uint64_t a) const
{
    std::uint64_t j = 0;
    for (std::size_t b = 0; b < workspace_bits.size(); ++b)
        if ((a >> workspace_bits[b]) & 1ULL) j |= 1ULL << b;
    return j;
}

VecD build_class_diagonal(const GroupModel& model, const Domain& domain, const OrbitKey& key,
                          const BalanceFunction& W)
{
    const int n = int(domain.size());
    if (n > 26) throw ResourceLimit("class diagonal: domain too large");
    VecD d = VecD::Zero(Eigen::Index(1) << n);
    for (const auto& [p, q] : class_members(model, domain, key)) {
        int ip = domain.index_of(p), iq = domain.index_of(q);
        std::uint64_t mask = (1ULL << ip) | (1ULL << iq);
        double w = W.pair(ip, iq);
        for (std::uint64_t a = 0; a < (1ULL << n); ++a)
            if ((a & mask) == mask) d[Eigen::Index(a)] += w;
    }
    return d;
}

MatC build_global_one_qubit_dense(const MatC& m2, const Domain& domain, const BalanceFunction& W)
{
    const int n = int(domain.size());
    if (n > kMaxDenseQubits) throw ResourceLimit("dense backend capped at 14 qubits");
    const std::uint64_t dim = 1ULL << n;
    MatC out = MatC::Zero(Eigen::Index(dim), Eigen::Index(dim));
    for (int p = 0; p < n; ++p) {
        double w = W.site(p);
        for (std::uint64_t b = 0; b < dim; ++b) {
            int bp = get_bit(b, p);
            for (int ap = 0; ap < 2; ++ap) {
                cxd v = m2(ap, bp);
                if (v == cxd(0, 0)) continue;
                std::uint64_t a = (b & ~(1ULL << p)) | (std::uint64_t(ap) << p);
                out(Eigen::Index(a), Eigen::Index(b)) += w * v;
            }
        }
    }
    return out;
}

MatC build_global_two_qubit_dense(const MatC& m4, const GroupModel& model, const Domain& domain,
                                  const OrbitKey& key, const BalanceFunction& W)
{
    const int n = int(domain.size());
    if (n > kMaxDenseQubits) throw ResourceLimit("dense backend capped at 14 qubits");
    const std::uint64_t dim = 1ULL << n;
    MatC out = MatC::Zero(Eigen::Index(dim), Eigen::Index(dim));
    for (const auto& [p, q] : class_members(model, domain, key)) {
        int ip = domain.index_of(p), iq = domain.index_of(q);
        double w = W.pair(ip, iq);
        for (std::uint64_t b = 0; b < dim; ++b) {
            int col = 2 * get_bit(b, ip) + get_bit(b, iq);
            for (int row = 0; row < 4; ++row) {
                cxd v = m4(row, col);
                if (v == cxd(0, 0)) continue;
                std::uint64_t a = b;
                a = (a & ~(1ULL << ip)) | (std::uint64_t((row >> 1) & 1) << ip);
                a = (a & ~(1ULL << iq)) | (std::uint64_t(row & 1) << iq);
                out(Eigen::Index(a), Eigen::Index(b)) += w * v;
            }
        }
    }
    return out;
}

void apply_two_qubit_phase(VecC& state, const VecD& diag, double T)
{
    if (state.size() != diag.size()) throw InvalidArgument("apply: dimension mismatch");
    for (Eigen::Index a = 0; a < state.size(); ++a)
        state[a] *= std::exp(cxd(0, -T * diag[a]));
}

MatC rotation_2x2(cxd z)
{
    MatC r(2, 2);
    double az = std::abs(z);
    if (az == 0.0) {
        r.setIdentity();
        return r;
    }
    double c = std::cos(az), s = std::sin(az);
    r(0, 0) = c;
    r(0, 1) = (z / az) * s;
    r(1, 0) = -(std::conj(z) / az) * s;
    r(1, 1) = c;
    return r;
}

void apply_one_qubit_global(VecC& state, cxd z, const BalanceFunction& W)
{
    const std::uint64_t dim = std::uint64_t(state.size());
    int n = 0;
    while ((1ULL << n) < dim) ++n;
    for (int q = 0; q < n; ++q) {
        MatC r = rotation_2x2(z * W.site(q));
        const std::uint64_t bit = 1ULL << q;
        for (std::uint64_t a = 0; a < dim; ++a) {
            if (a & bit) continue;
            cxd v0 = state[Eigen::Index(a)];
            cxd v1 = state[Eigen::Index(a | bit)];
            state[Eigen::Index(a)] = r(0, 0) * v0 + r(0, 1) * v1;
            state[Eigen::Index(a | bit)] = r(1, 0) * v0 + r(1, 1) * v1;
        }
    }
}

MatC commutator(const MatC& a, const MatC& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidArgument("commutator: dimension mismatch");
    return a * b - b * a;
}

MatC commutator_diag(const VecD& diag, const MatC& m)
{
    if (diag.size() != m.rows()) throw InvalidArgument("commutator: dimension mismatch");
    MatC out(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) = (diag[i] - diag[j]) * m(i, j);
    return out;
}

double operator_norm(const MatC& m)
{
    if (m.rows() <= 96) {
        Eigen::JacobiSVD<MatC> svd(m);
        return svd.singularValues()(0);
    }
    // Power iteration on M^dagger M, seeded for reproducibility.
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> nd;
    VecC v(m.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cxd(nd(rng), nd(rng));
    v.normalize();
    double prev = 0;
    for (int it = 0; it < 5000; ++it) {
        VecC w = m * v;
        double s2 = w.squaredNorm();
        v = m.adjoint() * w;
        double nv = v.norm();
        if (nv == 0) return 0;
        v /= nv;
        double s = std::sqrt(s2);
        if (it > 4 && std::abs(s - prev) <= 1e-12 * std::max(1.0, s)) return s;
        prev = s;
    }
    return prev;
}

MatC exp_skew_hermitian(const MatC& g, double scale)
{
    double herm_defect = (g + g.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > 1e-10)
        throw InvalidArgument("exp_skew_hermitian: input is not anti-Hermitian");
    MatC h = cxd(0, 1) * g; // Hermitian
    Eigen::SelfAdjointEigenSolver<MatC> es(h);
    VecC phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases[i] = std::exp(cxd(0, -scale * es.eigenvalues()[i]));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

bool is_unitary(const MatC& u, double tol)
{
    MatC d = u.adjoint() * u - MatC::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

FlipMatrix::FlipMatrix(int n) : n_(n)
{
    if (n > kMaxDenseQubits + 8) throw ResourceLimit("flip matrix: too many qubits");
    lower_.assign(n, VecC::Zero(Eigen::Index(1) << n));
    raise_.assign(n, VecC::Zero(Eigen::Index(1) << n));
}

FlipMatrix FlipMatrix::one_qubit_global(int n, cxd z, const BalanceFunction& W)
{
    FlipMatrix f(n);
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = 1ULL << q;
        for (std::uint64_t a = 0; a < f.dim(); ++a) {
            if (!(a & bit)) continue;
            f.lower_[q][a] = W.site(q) * z;
            f.raise_[q][a] = -W.site(q) * std::conj(z);
        }
    }
    return f;
}

FlipMatrix FlipMatrix::commutator_with_diag(const VecD& diag) const
{
    FlipMatrix out(n_);
    for (int q = 0; q < n_; ++q) {
        const std::uint64_t bit = 1ULL << q;
        for (std::uint64_t a = 0; a < dim(); ++a) {
            if (!(a & bit)) continue;
            double delta = diag[Eigen::Index(a)] - diag[Eigen::Index(a & ~bit)];
            out.lower_[q][a] = -delta * lower_[q][a];
            out.raise_[q][a] = delta * raise_[q][a];
        }
    }
    return out;
}

FlipMatrix FlipMatrix::scaled(cxd factor) const
{
    FlipMatrix out(n_);
    for (int q = 0; q < n_; ++q) {
        out.lower_[q] = lower_[q] * factor;
        out.raise_[q] = raise_[q] * factor;
    }
    return out;
}

FlipMatrix FlipMatrix::adjoint() const
{
    FlipMatrix out(n_);
    for (int q = 0; q < n_; ++q) {
        for (std::uint64_t a = 0; a < dim(); ++a) {
            if (!(a & (1ULL << q))) continue;
            out.lower_[q][a] = std::conj(raise_[q][a]);
            out.raise_[q][a] = std::conj(lower_[q][a]);
        }
    }
    return out;
}

VecC FlipMatrix::apply(const VecC& v) const
{
    VecC out = VecC::Zero(v.size());
    for (int q = 0; q < n_; ++q) {
        const std::uint64_t bit = 1ULL << q;
        for (std::uint64_t a = 0; a < dim(); ++a) {
            if (!(a & bit)) continue;
            std::uint64_t b = a & ~bit;
            out[Eigen::Index(b)] += lower_[q][a] * v[Eigen::Index(a)];
            out[Eigen::Index(a)] += raise_[q][a] * v[Eigen::Index(b)];
        }
    }
    return out;
}

VecC FlipMatrix::apply_adjoint(const VecC& v) const
{
    VecC out = VecC::Zero(v.size());
    for (int q = 0; q < n_; ++q) {
        const std::uint64_t bit = 1ULL << q;
        for (std::uint64_t a = 0; a < dim(); ++a) {
            if (!(a & bit)) continue;
            std::uint64_t b = a & ~bit;
            out[Eigen::Index(a)] += std::conj(lower_[q][a]) * v[Eigen::Index(b)];
            out[Eigen::Index(b)] += std::conj(raise_[q][a]) * v[Eigen::Index(a)];
        }
    }
    return out;
}

MatC FlipMatrix::to_dense() const
{
    if (n_ > kMaxDenseQubits) throw ResourceLimit("dense backend capped at 14 qubits");
    MatC out = MatC::Zero(Eigen::Index(dim()), Eigen::Index(dim()));
    for (int q = 0; q < n_; ++q) {
        const std::uint64_t bit = 1ULL << q;
        for (std::uint64_t a = 0; a < dim(); ++a) {
            if (!(a & bit)) continue;
            std::uint64_t b = a & ~bit;
            out(Eigen::Index(b), Eigen::Index(a)) += lower_[q][a];
            out(Eigen::Index(a), Eigen::Index(b)) += raise_[q][a];
        }
    }
    return out;
}

double FlipMatrix::norm(double tol, int max_iter) const
{
    std::mt19937_64 rng(0xf11bULL);
    std::normal_distribution<double> nd;
    VecC v = VecC::Zero(Eigen::Index(dim()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cxd(nd(rng), nd(rng));
    v.normalize();
    double prev = 0;
    for (int it = 0; it < max_iter; ++it) {
        VecC w = apply(v);
        double s = w.norm();
        v = apply_adjoint(w);
        double nv = v.norm();
        if (nv == 0) return 0;
        v /= nv;
        if (it > 4 && std::abs(s - prev) <= tol * std::max(1.0, s)) return s;
        prev = s;
    }
    return prev;
}

double FlipMatrix::max_abs_entry() const
{
    double m = 0;
    for (int q = 0; q < n_; ++q) {
        m = std::max(m, lower_[q].cwiseAbs().maxCoeff());
        m = std::max(m, raise_[q].cwiseAbs().maxCoeff());
    }
    return m;
}

} // namespace ggc
