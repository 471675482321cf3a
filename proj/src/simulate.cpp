#include "ggc/simulate.hpp"

#include <cblas.h>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <lapacke.h>
#include <memory>
#include <numbers>

namespace ggc {

namespace {

MatC blas_multiply(const MatC& a, const MatC& b)
{
    const int n = int(a.rows());
    MatC c(n, n);
    cxd one(1, 0), zero(0, 0);
    cblas_zgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, n, n, &one, a.data(), n, b.data(),
                n, &zero, c.data(), n);
    return c;
}

// Newton-Schulz projection onto the unitary manifold. Powering amplifies a
// unitarity defect delta into e^{N delta}, so blocks are re-unitarized before
// each spectral power; for near-unitary inputs one or two sweeps reach eps.
void unitarize(MatC& m)
{
    const Eigen::Index dim = m.rows();
    for (int it = 0; it < 4; ++it) {
        MatC g = blas_multiply(MatC(m.adjoint()), m);
        double defect = (g - MatC::Identity(dim, dim)).cwiseAbs().maxCoeff();
        if (defect < 1e-13) return;
        if (defect > 0.5)
            throw std::runtime_error("unitarize: block is far from unitary (defect " +
                                     std::to_string(defect) + ")");
        MatC corr = 1.5 * MatC::Identity(dim, dim) - 0.5 * g;
        m = blas_multiply(m, corr);
    }
}

} // namespace

MatC spectral_unitary_power(const MatC& u, std::uint64_t n)
{
    const int dim = int(u.rows());
    MatC t = u; // zgees overwrites with the Schur form
    MatC q(dim, dim);
    std::vector<cxd> w(static_cast<std::size_t>(dim));
    int sdim = 0;
    int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, dim,
                             reinterpret_cast<lapack_complex_double*>(t.data()), dim, &sdim,
                             reinterpret_cast<lapack_complex_double*>(w.data()),
                             reinterpret_cast<lapack_complex_double*>(q.data()), dim);
    if (info != 0) throw std::runtime_error("zgees failed: info = " + std::to_string(info));

    // The Schur form of a unitary matrix is diagonal in exact arithmetic, but
    // clustered spectra leave the computed triangle with off-diagonal mass
    // well above eps. Dropping it would cost O(n * offdiag) after powering,
    // so the triangle is powered too: to first order in the off-diagonal
    // part, (D+E)^n = D^n + DD .* E with the divided differences
    // DD_ij = (d_i^n - d_j^n)/(d_i - d_j) evaluated stably through sines.
    double offdiag = 0;
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < j; ++i) offdiag = std::max(offdiag, std::abs(t(i, j)));

    std::vector<double> theta(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) theta[static_cast<std::size_t>(i)] = std::arg(t(i, i));

    double first_order_residual = double(n) * offdiag;
    first_order_residual *= first_order_residual;
    MatC p;
    if (first_order_residual < 1e-8) {
        p = MatC::Zero(dim, dim);
        const double dn = double(n);
        for (int i = 0; i < dim; ++i) p(i, i) = std::polar(1.0, dn * theta[std::size_t(i)]);
        for (int j = 0; j < dim; ++j) {
            for (int i = 0; i < j; ++i) {
                cxd e = t(i, j);
                if (e == cxd(0, 0)) continue;
                double a = theta[std::size_t(i)], b = theta[std::size_t(j)];
                double half = 0.5 * (a - b);
                double mag;
                if (std::abs(std::sin(half)) < 1e-14)
                    mag = dn;
                else
                    mag = std::sin(dn * half) / std::sin(half);
                cxd dd = std::polar(mag, (dn - 1.0) * 0.5 * (a + b));
                p(i, j) = e * dd;
            }
        }
    } else {
        // Rare fallback: binary powering of the full triangle. Exact up to
        // eps * log2(n) regardless of clustering.
        p = MatC::Identity(dim, dim);
        MatC base = t;
        std::uint64_t e = n;
        while (e) {
            if (e & 1) p = blas_multiply(p, base);
            e >>= 1;
            if (e) base = blas_multiply(base, base);
        }
    }
    MatC qp = blas_multiply(q, p);
    return blas_multiply(qp, q.adjoint());
}

namespace {

std::uint64_t hash_u64(std::uint64_t h, std::uint64_t v)
{
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::uint64_t hash_double(std::uint64_t h, double d)
{
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    return hash_u64(h, bits);
}

std::uint64_t hash_pulse(std::uint64_t h, const Pulse& p)
{
    h = hash_u64(h, p.kind == Pulse::Kind::TwoQubitPhase ? 2 : 1);
    if (p.kind == Pulse::Kind::TwoQubitPhase) {
        h = hash_u64(h, p.key.is_offset ? 1 : 0);
        for (auto c : p.key.offset) h = hash_u64(h, std::uint64_t(c));
        h = hash_u64(h, std::uint64_t(p.key.sqdist));
        h = hash_double(h, p.T);
    } else {
        h = hash_double(h, p.z.real());
        h = hash_double(h, p.z.imag());
    }
    return h;
}

std::uint64_t hash_nodes(std::uint64_t h, const std::vector<SeqNode>& nodes)
{
    for (const auto& n : nodes) {
        if (n.is_leaf()) {
            h = hash_pulse(h, n.pulse);
        } else {
            h = hash_u64(h, 0x5e9e47ULL); // repeat tag
            h = hash_u64(h, n.repeat);
            h = hash_nodes(h, n.body);
        }
    }
    return h;
}

} // namespace

std::uint64_t sequence_tree_hash(const std::vector<SeqNode>& nodes)
{
    return hash_nodes(1469598103934665603ULL, nodes);
}

std::vector<SeqNode> inverse_sequence(const std::vector<SeqNode>& nodes)
{
    std::vector<SeqNode> out;
    out.reserve(nodes.size());
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        if (it->is_leaf()) {
            out.push_back(SeqNode::leaf(it->pulse.inverse()));
        } else {
            out.push_back(SeqNode::repeated(it->repeat, inverse_sequence(it->body)));
        }
    }
    return out;
}

SequenceSimulator::SequenceSimulator(const Scheme& scheme, const BalanceFunction& W,
                                     SimOptions opts)
    : scheme_(scheme), W_(W), opts_(opts), space_(AdmissibleSpace::from_scheme(scheme))
{
}

const VecD& SequenceSimulator::class_diag(const OrbitKey& key)
{
    auto it = diag_cache_.find(key);
    if (it != diag_cache_.end()) return it->second;
    VecD d = build_class_diagonal(scheme_.model, scheme_.domain, key, W_);
    return diag_cache_.emplace(key, std::move(d)).first->second;
}

void SequenceSimulator::apply(VecC& state, const Pulse& pulse)
{
    if (pulse.kind == Pulse::Kind::TwoQubitPhase)
        apply_two_qubit_phase(state, class_diag(pulse.key), pulse.T);
    else
        apply_one_qubit_global(state, pulse.z, W_);
}

void SequenceSimulator::apply(VecC& state, const std::vector<SeqNode>& nodes)
{
    for (const auto& n : nodes) {
        if (n.is_leaf()) {
            apply(state, n.pulse);
        } else {
            for (std::uint64_t r = 0; r < n.repeat; ++r) apply(state, n.body);
        }
    }
}

bool SequenceSimulator::needs_matrix_path(const std::vector<SeqNode>& nodes) const
{
    for (const auto& n : nodes) {
        if (n.is_leaf()) continue;
        if (n.repeat >= opts_.spectral_threshold) return true;
        if (needs_matrix_path(n.body)) return true;
    }
    return false;
}

MatC SequenceSimulator::node_unitary(const SeqNode& node)
{
    const Eigen::Index dim = Eigen::Index(1) << space_.n;
    MatC m = MatC::Identity(dim, dim);
    std::vector<SeqNode> single;
    single.push_back(node);
    apply_to_matrix(m, single);
    return m;
}

void SequenceSimulator::apply_to_matrix(MatC& m, const std::vector<SeqNode>& nodes)
{
    const Eigen::Index dim = m.rows();
    for (const auto& n : nodes) {
        if (n.is_leaf()) {
            if (n.pulse.kind == Pulse::Kind::TwoQubitPhase) {
                const VecD& d = class_diag(n.pulse.key);
                for (Eigen::Index i = 0; i < dim; ++i) {
                    cxd ph = std::exp(cxd(0, -n.pulse.T * d[i]));
                    m.row(i) *= ph;
                }
            } else {
                for (Eigen::Index j = 0; j < dim; ++j) {
                    VecC col = m.col(j);
                    apply_one_qubit_global(col, n.pulse.z, W_);
                    m.col(j) = col;
                }
            }
            continue;
        }
        if (n.repeat < opts_.spectral_threshold) {
            for (std::uint64_t r = 0; r < n.repeat; ++r) apply_to_matrix(m, n.body);
            continue;
        }
        if (dim > opts_.spectral_max_dim)
            throw ResourceLimit("simulate: spectral path capped at dimension " +
                                std::to_string(opts_.spectral_max_dim));
        std::vector<SeqNode> self = {n};
        std::uint64_t key = sequence_tree_hash(self);
        auto hit = block_cache_.find(key);
        if (hit == block_cache_.end()) {
            // Build the block unitary once, power it spectrally, and remember
            // both the block and its mirror (served as the exact adjoint).
            MatC block = MatC::Identity(dim, dim);
            apply_to_matrix(block, n.body);
            unitarize(block);
            if (opts_.verbose)
                std::fprintf(stderr, "[simulate] powering %llu-fold block at dim %lld\n",
                             (unsigned long long)n.repeat, (long long)dim);
            auto powered = std::make_shared<MatC>(spectral_unitary_power(block, n.repeat));
            block_cache_[key] = CachedBlock{powered, false};
            block_cache_[sequence_tree_hash(inverse_sequence(self))] =
                CachedBlock{powered, true};
            hit = block_cache_.find(key);
        }
        if (hit->second.adjoint)
            m = blas_multiply(MatC(hit->second.m->adjoint()), m);
        else
            m = blas_multiply(*hit->second.m, m);
    }
}

MatC SequenceSimulator::full_unitary(const std::vector<SeqNode>& nodes)
{
    const Eigen::Index dim = Eigen::Index(1) << space_.n;
    if (dim > opts_.spectral_max_dim)
        throw ResourceLimit("full_unitary: dimension exceeds the dense cap");
    MatC m = MatC::Identity(dim, dim);
    apply_to_matrix(m, nodes);
    return m;
}

MatC SequenceSimulator::admissible_block(const std::vector<SeqNode>& nodes, double* leakage_out)
{
    const Eigen::Index dim = Eigen::Index(1) << space_.n;
    const Eigen::Index adm = Eigen::Index(space_.dim());
    MatC block(adm, adm);
    double leak = 0;

    if (needs_matrix_path(nodes)) {
        MatC m = MatC::Identity(dim, dim);
        apply_to_matrix(m, nodes);
        for (Eigen::Index j = 0; j < adm; ++j) {
            Eigen::Index col = Eigen::Index(space_.config(std::uint64_t(j)));
            double inside = 0;
            for (Eigen::Index i = 0; i < adm; ++i) {
                cxd v = m(Eigen::Index(space_.config(std::uint64_t(i))), col);
                block(i, j) = v;
                inside += std::norm(v);
            }
            leak = std::max(leak, std::sqrt(std::max(0.0, m.col(col).squaredNorm() - inside)));
        }
    } else {
        for (Eigen::Index j = 0; j < adm; ++j) {
            VecC v = VecC::Zero(dim);
            v[Eigen::Index(space_.config(std::uint64_t(j)))] = 1.0;
            apply(v, nodes);
            double inside = 0;
            for (Eigen::Index i = 0; i < adm; ++i) {
                cxd amp = v[Eigen::Index(space_.config(std::uint64_t(i)))];
                block(i, j) = amp;
                inside += std::norm(amp);
            }
            leak = std::max(leak, std::sqrt(std::max(0.0, v.squaredNorm() - inside)));
        }
    }
    if (leakage_out) *leakage_out = leak;
    return block;
}

MatC SequenceSimulator::target_matrix(const TargetDescriptor& target) const
{
    const Eigen::Index adm = Eigen::Index(space_.dim());
    MatC t = MatC::Identity(adm, adm);
    switch (target.kind) {
    case TargetDescriptor::Kind::Identity:
        return t;
    case TargetDescriptor::Kind::LocalUnitary: {
        int bit = -1;
        for (std::size_t b = 0; b < space_.workspace_bits.size(); ++b)
            if (scheme_.domain.point(std::size_t(space_.workspace_bits[b])) == target.p)
                bit = int(b);
        if (bit < 0) throw InvalidArgument("target: point is not a workspace qubit");
        MatC out = MatC::Zero(adm, adm);
        for (Eigen::Index j = 0; j < adm; ++j) {
            int bj = get_bit(std::uint64_t(j), bit);
            for (int bi = 0; bi < 2; ++bi) {
                cxd v = target.u2(bi, bj);
                if (v == cxd(0, 0)) continue;
                std::uint64_t i = (std::uint64_t(j) & ~(1ULL << bit)) | (std::uint64_t(bi) << bit);
                out(Eigen::Index(i), j) += v;
            }
        }
        return out;
    }
    case TargetDescriptor::Kind::PairPhase: {
        int bp = -1, bq = -1;
        for (std::size_t b = 0; b < space_.workspace_bits.size(); ++b) {
            const Point& pt = scheme_.domain.point(std::size_t(space_.workspace_bits[b]));
            if (pt == target.p) bp = int(b);
            if (pt == target.q) bq = int(b);
        }
        if (bp < 0 || bq < 0) throw InvalidArgument("target: pair is not in the workspace");
        for (Eigen::Index j = 0; j < adm; ++j)
            if (get_bit(std::uint64_t(j), bp) && get_bit(std::uint64_t(j), bq))
                t(j, j) = std::exp(cxd(0, -target.T));
        return t;
    }
    }
    return t;
}

double phase_aligned_distance(const MatC& b, const MatC& t, double* phase_out)
{
    // Frobenius-optimal phase first, then a golden-section refinement of the
    // operator norm around it.
    cxd overlap = (t.adjoint() * b).trace();
    double phi0 = std::abs(overlap) > 0 ? std::arg(overlap) : 0.0;
    auto dist = [&](double phi) {
        return operator_norm(b - std::polar(1.0, phi) * t);
    };
    double best_phi = phi0, best = dist(phi0);
    for (int i = -8; i <= 8; ++i) {
        double phi = phi0 + i * (std::numbers::pi / 64.0);
        double d = dist(phi);
        if (d < best) {
            best = d;
            best_phi = phi;
        }
    }
    double lo = best_phi - std::numbers::pi / 64.0, hi = best_phi + std::numbers::pi / 64.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo), c = lo + gr * (hi - lo);
    double fa = dist(a), fc = dist(c);
    for (int it = 0; it < 48; ++it) {
        if (fa < fc) {
            hi = c;
            c = a;
            fc = fa;
            a = hi - gr * (hi - lo);
            fa = dist(a);
        } else {
            lo = a;
            a = c;
            fa = fc;
            c = lo + gr * (hi - lo);
            fc = dist(c);
        }
    }
    double phi = (lo + hi) / 2.0;
    double d = dist(phi);
    if (d < best) {
        best = d;
        best_phi = phi;
    }
    if (phase_out) *phase_out = best_phi;
    return best;
}

SimReport measure_sequence(const Scheme& scheme, const BalanceFunction& W,
                           const PulseSequence& seq, SimOptions opts)
{
    auto t0 = std::chrono::steady_clock::now();
    SequenceSimulator sim(scheme, W, opts);
    SimReport rep;
    rep.declared_epsilon = seq.target.epsilon;
    rep.flat_length = seq.flat_length();
    MatC block = sim.admissible_block(seq.nodes, &rep.leakage);
    MatC target = sim.target_matrix(seq.target);
    rep.distance = phase_aligned_distance(block, target, &rep.align_phase);
    rep.within_budget = rep.distance <= seq.target.epsilon + 1e-12;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace ggc
