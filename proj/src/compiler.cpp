#include "ggc/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

namespace ggc {

Pulse Pulse::two_qubit(const OrbitKey& key, double T, int level)
{
    Pulse p;
    p.kind = Kind::TwoQubitPhase;
    p.key = key;
    p.T = T;
    p.level = level;
    return p;
}

Pulse Pulse::one_qubit(cxd z, int level)
{
    Pulse p;
    p.kind = Kind::OneQubitGlobal;
    p.z = z;
    p.level = level;
    return p;
}

Pulse Pulse::inverse() const
{
    Pulse p = *this;
    if (kind == Kind::TwoQubitPhase)
        p.T = -T;
    else
        p.z = -z;
    return p;
}

SeqNode SeqNode::leaf(Pulse p)
{
    SeqNode n;
    n.pulse = std::move(p);
    return n;
}

SeqNode SeqNode::repeated(std::uint64_t count, std::vector<SeqNode> body)
{
    SeqNode n;
    n.repeat = count;
    n.body = std::move(body);
    return n;
}

double tree_flat_length(const std::vector<SeqNode>& nodes)
{
    double total = 0;
    for (const auto& n : nodes) {
        if (n.is_leaf())
            total += 1;
        else
            total += double(n.repeat) * tree_flat_length(n.body);
    }
    return total;
}

static void flatten_node(const SeqNode& n, std::vector<Pulse>& out, double cap)
{
    if (n.is_leaf()) {
        if (double(out.size()) + 1 > cap) throw ResourceLimit("flatten: pulse cap exceeded");
        out.push_back(n.pulse);
        return;
    }
    for (std::uint64_t r = 0; r < n.repeat; ++r)
        for (const auto& c : n.body) flatten_node(c, out, cap);
}

std::vector<Pulse> PulseSequence::flatten(std::uint64_t cap) const
{
    if (flat_length() > double(cap))
        throw ResourceLimit("flatten: sequence of " + std::to_string(flat_length()) +
                            " pulses exceeds cap " + std::to_string(cap));
    std::vector<Pulse> out;
    out.reserve(std::size_t(flat_length()));
    for (const auto& n : nodes) flatten_node(n, out, double(cap));
    return out;
}

SeqNode group_commutator_fragment(const Pulse& x_plus, const Pulse& x_minus,
                                  std::vector<SeqNode> y_plus, std::vector<SeqNode> y_minus,
                                  std::uint64_t N)
{
    // Time order: Y(+), X(-), Y(-), X(+); composed right-to-left this is the
    // group commutator e^{iX} e^{iY} e^{-iX} e^{-iY} per period, where Y(+)
    // realizes exp(-iY/sqrt(N)) and X(+) realizes exp(+iX/sqrt(N)).
    std::vector<SeqNode> period;
    for (auto& n : y_plus) period.push_back(std::move(n));
    period.push_back(SeqNode::leaf(x_minus));
    for (auto& n : y_minus) period.push_back(std::move(n));
    period.push_back(SeqNode::leaf(x_plus));
    return SeqNode::repeated(N, std::move(period));
}

namespace {

struct LevelData {
    OrbitKey key;
    double w_i = 0;      // reference weight normalizing A^C
    double a_norm = 0;   // ||A^C|| (sum of member weights)
    double a_diff = 0;   // max flip difference of A^C
    double y_norm = 0;   // ||G_{i+1}|| with z_inner folded in
};

double class_total_weight(const Scheme& scheme, const OrbitKey& key, const BalanceFunction& W)
{
    double total = 0;
    for (const auto& [u, v] : class_members(scheme.model, scheme.domain, key))
        total += W.pair(scheme.domain.index_of(u), scheme.domain.index_of(v));
    return total;
}

double class_max_flip_diff(const Scheme& scheme, const OrbitKey& key, const BalanceFunction& W)
{
    double best = 0;
    for (const auto& q : scheme.domain.points()) {
        double s = 0;
        for (const auto& x :
             neighbors_in_class(scheme.model, scheme.domain, key, q, scheme.domain.points()))
            s += modified_balance(scheme.model, scheme.domain, key, W, q, x);
        best = std::max(best, s);
    }
    return best;
}

// ||G_i|| for i = k+1 .. 2, exact on the flip backend when the domain is small
// enough, otherwise the crude doubling bound.
std::vector<double> chain_norms(const Scheme& scheme, const ExtractionPlan& plan,
                                const BalanceFunction& W, cxd z_inner,
                                const std::vector<LevelData>& lv)
{
    const int n = int(scheme.domain.size());
    const int k = int(plan.classes.size());
    std::vector<double> g_norm(k + 2, 0.0); // g_norm[i] = ||G_i||, valid for i >= 2
    if (n <= 16) {
        FlipMatrix g = FlipMatrix::one_qubit_global(n, z_inner, W);
        g_norm[k + 1] = g.norm();
        for (int i = k; i >= 2; --i) {
            VecD d = build_class_diagonal(scheme.model, scheme.domain, plan.classes[i - 1], W);
            g = g.commutator_with_diag(d).scaled(cxd(0, -1) / plan.ref_weights[i - 1]);
            g_norm[i] = g.norm();
        }
    } else {
        double base = 0;
        for (int q = 0; q < n; ++q) base += W.site(q) * std::abs(z_inner);
        g_norm[k + 1] = base;
        for (int i = k; i >= 2; --i)
            g_norm[i] = 2.0 * (lv[i - 1].a_norm / lv[i - 1].w_i) * g_norm[i + 1];
    }
    return g_norm;
}

} // namespace

PulseSequence compile_local_xy_gate(const Scheme& scheme, const Point& p,
                                    const std::vector<Point>& refs, cxd z, double epsilon,
                                    const BalanceFunction& W, const CompileOptions& opts)
{
    if (std::abs(z) > 1.0 + 1e-12)
        throw InvalidArgument("compile: |z| must be at most 1");
    if (!(epsilon > 0 && epsilon < 1))
        throw InvalidArgument("compile: epsilon must lie in (0,1)");

    PulseSequence seq;
    seq.target.kind = TargetDescriptor::Kind::LocalUnitary;
    seq.target.p = p;
    seq.target.u2 = rotation_2x2(z);
    seq.target.epsilon = epsilon;
    seq.trace.epsilon = epsilon;
    seq.trace.c = opts.c;
    seq.trace.margin = opts.margin;
    seq.trace.schedule =
        opts.schedule == CompileOptions::Schedule::Proof ? "proof" : "commutator-drift";

    if (std::abs(z) == 0.0) {
        seq.target.kind = TargetDescriptor::Kind::Identity;
        return seq; // identity target: empty sequence
    }

    AddressCertificate cert = is_addressable(scheme, p, refs);
    if (!cert.ok())
        throw InvalidArgument("compile: p is not addressable by the given references: " +
                              cert.describe());

    ExtractionPlan plan = make_extraction_plan(scheme, p, refs, W);
    const int k = int(refs.size());

    // Inner one-qubit-global parameter: the k nested commutators rotate the
    // phase by i^k and scale by W(p), so start from (-i)^k z / W(p).
    cxd z_inner = std::pow(cxd(0, -1), k) * z / plan.site_weight;

    std::vector<LevelData> lv(k + 1); // 1-based
    for (int i = 1; i <= k; ++i) {
        lv[i].key = plan.classes[i - 1];
        lv[i].w_i = plan.ref_weights[i - 1];
        lv[i].a_norm = class_total_weight(scheme, lv[i].key, W);
        lv[i].a_diff = class_max_flip_diff(scheme, lv[i].key, W);
    }
    std::vector<double> g_norm = chain_norms(scheme, plan, W, z_inner, lv);
    for (int i = 1; i <= k; ++i) lv[i].y_norm = g_norm[i + 1];

    const bool proof = opts.schedule == CompileOptions::Schedule::Proof;
    const std::uint64_t level_cap = opts.structured ? opts.structured_level_cap : opts.level_cap;

    // Plan N_i and the per-level scales top-down.
    double s = 1.0;     // generator prefactor realized at this level
    double eps_i = epsilon;
    std::vector<LevelBudget> levels;
    for (int i = 1; i <= k; ++i) {
        LevelBudget b;
        b.level = i;
        b.eps = eps_i;
        b.scale = s;
        b.x_norm = lv[i].a_norm / lv[i].w_i;
        b.x_diff = lv[i].a_diff / lv[i].w_i;
        b.y_norm = lv[i].y_norm;

        double m_true, m_eff, t;
        if (proof) {
            // Spec-literal: no rebalancing, norms as computed, floor at 1.
            t = 1.0;
            m_true = std::max({b.x_norm, s * b.y_norm, 1.0});
            m_eff = m_true;
        } else {
            // Equalize the two true norms; the product x * y is rebalance
            // invariant and the summed third-order terms are minimal there.
            t = std::sqrt(std::max(s * b.y_norm / std::max(b.x_norm, 1e-300), 1e-300));
            m_true = std::sqrt(s * b.x_norm * b.y_norm);
            m_eff = m_true;
        }
        b.rebalance = t;
        b.m_true = m_true;
        b.m_eff = m_eff;

        double drift_allot = (i == k) ? eps_i : eps_i * opts.drift_share;
        double needN = std::pow(opts.margin * opts.c * m_eff * m_eff * m_eff / drift_allot, 2.0);
        needN = std::max(needN, std::floor(m_true * m_true) + 1.0);
        needN = std::max(needN, 4.0);
        if (needN > double(level_cap)) {
            RefusalInfo info;
            info.reason = "level " + std::to_string(i) + " needs N = " + std::to_string(needN) +
                          " periods, cap is " + std::to_string(level_cap);
            info.level = i;
            info.required_N = needN;
            info.cap = double(level_cap);
            throw CompileRefused(info);
        }
        b.N = std::uint64_t(std::ceil(needN));
        b.drift = opts.c * m_eff * m_eff * m_eff / std::sqrt(double(b.N));
        levels.push_back(b);

        if (i < k) {
            double remaining = eps_i - drift_allot;
            if (proof)
                eps_i = eps_i / (4.0 * double(b.N));
            else
                eps_i = remaining / (2.0 * m_true * std::sqrt(double(b.N)));
            s = s / (t * std::sqrt(double(b.N)));
        } else {
            s = s / (t * std::sqrt(double(b.N))); // innermost pulse scale
        }
    }

    // Predicted error, folded bottom-up with the drift composition.
    double eta = 0.0;
    for (int i = k; i >= 1; --i) {
        const auto& b = levels[i - 1];
        eta = b.drift + 2.0 * b.m_true * std::sqrt(double(b.N)) * eta;
    }
    seq.trace.predicted_error = eta;
    seq.trace.levels = levels;

    // Emit the nested tree. build(i, sign) realizes exp(sign * s_i * G_i).
    std::vector<double> t_of(k + 1), s_of(k + 2);
    s_of[1] = 1.0;
    for (int i = 1; i <= k; ++i) {
        t_of[i] = levels[i - 1].rebalance;
        s_of[i + 1] = s_of[i] / (t_of[i] * std::sqrt(double(levels[i - 1].N)));
    }

    auto x_pulse = [&](int i, int sign) {
        // exp(sign * i t X_i / sqrt(N)) with X_i = A^C / W_i realized as
        // exp(-i T A^C), T = -sign * t / (W_i sqrt(N)).
        double T = -double(sign) * t_of[i] / (lv[i].w_i * std::sqrt(double(levels[i - 1].N)));
        return Pulse::two_qubit(lv[i].key, T, i);
    };

    // One period of the level-i product, written in time order (first factor
    // applied first): exp(-iY/sqrt(N)), exp(-iX/sqrt(N)), exp(+iY/sqrt(N)),
    // exp(+iX/sqrt(N)); as a composition that is the group commutator
    // e^{iX} e^{iY} e^{-iX} e^{-iY} whose N-th power tends to
    // exp([-iX, -iY]) = exp(s_i G_i). The Y slots hold exp(-+ s_{i+1} G_{i+1})
    // realized recursively; the negative branch emits the exact reversed
    // inverse so sub-gate errors cancel pairwise through the commutator.
    std::function<std::vector<SeqNode>(int, int)> build = [&](int i, int sign) {
        std::vector<SeqNode> out;
        if (i == k + 1) {
            out.push_back(SeqNode::leaf(Pulse::one_qubit(double(sign) * s_of[k + 1] * z_inner, k)));
            return out;
        }
        std::uint64_t N = levels[i - 1].N;
        std::vector<SeqNode> period;
        if (sign > 0) {
            for (auto& n : build(i + 1, +1)) period.push_back(std::move(n));
            period.push_back(SeqNode::leaf(x_pulse(i, -1)));
            for (auto& n : build(i + 1, -1)) period.push_back(std::move(n));
            period.push_back(SeqNode::leaf(x_pulse(i, +1)));
        } else {
            period.push_back(SeqNode::leaf(x_pulse(i, -1)));
            for (auto& n : build(i + 1, +1)) period.push_back(std::move(n));
            period.push_back(SeqNode::leaf(x_pulse(i, +1)));
            for (auto& n : build(i + 1, -1)) period.push_back(std::move(n));
        }
        out.push_back(SeqNode::repeated(N, std::move(period)));
        return out;
    };

    seq.nodes = build(1, +1);
    seq.trace.closed_form_length = tree_flat_length(seq.nodes);
    if (!opts.structured && seq.trace.closed_form_length > opts.flat_cap) {
        RefusalInfo info;
        info.reason = "sequence of " + std::to_string(seq.trace.closed_form_length) +
                      " pulses exceeds the flat emission cap " + std::to_string(opts.flat_cap);
        info.required_length = seq.trace.closed_form_length;
        info.cap = opts.flat_cap;
        throw CompileRefused(info);
    }
    return seq;
}

std::array<double, 3> euler_xyx(const MatC& u)
{
    if (u.rows() != 2 || u.cols() != 2) throw InvalidArgument("euler_xyx: need a 2x2 matrix");
    if (!is_unitary(u, 1e-9)) throw InvalidArgument("euler_xyx: input is not unitary");
    if (std::abs(u.determinant() - cxd(1, 0)) > 1e-9)
        throw InvalidArgument("euler_xyx: det must be 1");

    // Conjugate by the y-rotation carrying the z-axis onto the x-axis; the
    // problem becomes a standard zyz extraction.
    MatC c(2, 2);
    double r = std::numbers::sqrt2 / 2.0;
    c << cxd(r, 0), cxd(-r, 0), cxd(r, 0), cxd(r, 0); // exp(-i pi/4 sigma_y)
    MatC v = c.adjoint() * u * c;

    double cb = std::abs(v(0, 0));
    double sb = std::abs(v(1, 0));
    double beta = 2.0 * std::atan2(sb, cb);
    double gamma, alpha;
    if (sb < 1e-12) {
        // Pure x-rotation: emit one factor rather than an even split.
        alpha = -2.0 * std::arg(v(0, 0));
        gamma = 0.0;
    } else if (cb < 1e-12) {
        double diff = 2.0 * std::arg(v(1, 0));
        gamma = diff / 2.0;
        alpha = -diff / 2.0;
    } else {
        double sum = -2.0 * std::arg(v(0, 0));
        double diff = 2.0 * std::arg(v(1, 0));
        gamma = (sum + diff) / 2.0;
        alpha = (sum - diff) / 2.0;
    }

    auto rx = [](double t) {
        MatC m(2, 2);
        m << cxd(std::cos(t / 2), 0), cxd(0, -std::sin(t / 2)), cxd(0, -std::sin(t / 2)),
            cxd(std::cos(t / 2), 0);
        return m;
    };
    auto ry = [](double t) {
        MatC m(2, 2);
        m << cxd(std::cos(t / 2), 0), cxd(-std::sin(t / 2), 0), cxd(std::sin(t / 2), 0),
            cxd(std::cos(t / 2), 0);
        return m;
    };
    // Rx(gamma + 2pi) = -Rx(gamma) fixes the SU(2) sign ambiguity.
    MatC rebuilt = rx(gamma) * ry(beta) * rx(alpha);
    if ((rebuilt + u).cwiseAbs().maxCoeff() < (rebuilt - u).cwiseAbs().maxCoeff()) {
        gamma += 2.0 * std::numbers::pi;
        rebuilt = rx(gamma) * ry(beta) * rx(alpha);
    }
    if ((rebuilt - u).cwiseAbs().maxCoeff() > 1e-9)
        throw InvalidArgument("euler_xyx: decomposition failed to converge");

    // Reduce angles into (-2pi, 2pi] preferring the smaller magnitude; a 4pi
    // shift is the identity in SU(2).
    auto reduce = [](double t) {
        double m = std::fmod(t, 4.0 * std::numbers::pi);
        if (m > 2.0 * std::numbers::pi) m -= 4.0 * std::numbers::pi;
        if (m <= -2.0 * std::numbers::pi) m += 4.0 * std::numbers::pi;
        return m;
    };
    return {reduce(alpha), reduce(beta), reduce(gamma)};
}

PulseSequence compile_local_unitary(const Scheme& scheme, const Point& p,
                                    const std::vector<Point>& refs, const MatC& u, double epsilon,
                                    const BalanceFunction& W, const CompileOptions& opts)
{
    if (!is_unitary(u, 1e-9)) throw InvalidArgument("compile: target is not unitary");
    MatC su = u / std::sqrt(u.determinant()); // drop the global phase
    if (std::real(su(0, 0) + su(1, 1)) < 0) su = -su; // of the two roots take tr >= 0

    auto [alpha, beta, gamma] = euler_xyx(su);

    // Rotation list applied in time order: Rx(alpha), Ry(beta), Rx(gamma).
    struct Rot {
        double angle;
        bool about_y;
    };
    std::vector<Rot> rots;
    if (std::abs(alpha) > 1e-14) rots.push_back({alpha, false});
    if (std::abs(beta) > 1e-14) rots.push_back({beta, true});
    if (std::abs(gamma) > 1e-14) rots.push_back({gamma, false});

    // Split each rotation so the xy-gate parameter stays within |z| <= 1.
    struct Piece {
        cxd z;
    };
    std::vector<Piece> pieces;
    for (const auto& r : rots) {
        int m = std::max(1, int(std::ceil(std::abs(r.angle) / 2.0)));
        double step = r.angle / m;
        cxd z = r.about_y ? cxd(-step / 2.0, 0) : cxd(0, -step / 2.0);
        for (int i = 0; i < m; ++i) pieces.push_back({z});
    }

    PulseSequence seq;
    seq.target.kind = pieces.empty() ? TargetDescriptor::Kind::Identity
                                     : TargetDescriptor::Kind::LocalUnitary;
    seq.target.p = p;
    seq.target.u2 = su;
    seq.target.epsilon = epsilon;
    seq.trace.epsilon = epsilon;
    seq.trace.c = opts.c;
    seq.trace.margin = opts.margin;
    seq.trace.schedule = "euler-xyx";
    if (pieces.empty()) return seq;

    double eps_each = epsilon / double(pieces.size());
    for (const auto& piece : pieces) {
        PulseSequence part = compile_local_xy_gate(scheme, p, refs, piece.z, eps_each, W, opts);
        for (auto& n : part.nodes) seq.nodes.push_back(std::move(n));
        seq.trace.predicted_error += part.trace.predicted_error;
        for (auto& lb : part.trace.levels) seq.trace.levels.push_back(lb);
    }
    seq.trace.closed_form_length = tree_flat_length(seq.nodes);
    return seq;
}

EntanglingInfo entangling_pulse(const Scheme& scheme, const Point& p, const Point& q, double T,
                                const BalanceFunction& W)
{
    if (!scheme.in_workspace(p) || !scheme.in_workspace(q))
        throw InvalidArgument("entangling pulse: endpoints must lie in the workspace");
    std::vector<Point> witness;
    if (!check_condition5(scheme, &witness))
        throw InvalidArgument("entangling pulse: a workspace pair shares its class with a "
                              "workspace-base pair; refusing");

    EntanglingInfo info;
    info.key = class_of(scheme.model, p, q);
    info.pulse = Pulse::two_qubit(info.key, T);

    std::map<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>, double> collapsed;
    for (const auto& [u, v] : class_members(scheme.model, scheme.domain, info.key)) {
        double w = W.pair(scheme.domain.index_of(u), scheme.domain.index_of(v));
        bool u_ws = scheme.in_workspace(u), v_ws = scheme.in_workspace(v);
        bool u_b = scheme.in_base(u), v_b = scheme.in_base(v);
        if (u_ws && v_ws) {
            auto key = lex_less(u, v) ? std::make_pair(u, v) : std::make_pair(v, u);
            collapsed[key] += w;
        } else if (u_b && v_b) {
            info.constant_weight += w;
        }
        // members touching pinned-zero positions act trivially on the block
    }
    for (const auto& [pr, w] : collapsed) {
        info.workspace_pairs.emplace_back(pr.first, pr.second);
        info.pair_weights.push_back(w);
    }
    info.identity_on_admissible = info.workspace_pairs.empty() || T == 0.0;
    return info;
}

double group_commutator_error_dense(const MatC& x, const MatC& y, std::uint64_t N)
{
    double m = std::max({operator_norm(x), operator_norm(y), 1.0});
    if (double(N) <= m * m)
        throw InvalidArgument("group commutator: need N > M^2");
    double root = std::sqrt(double(N));
    MatC ex = exp_skew_hermitian(cxd(0, 1) * x / root, 1.0);  // exp(+iX/sqrt(N))
    MatC ey = exp_skew_hermitian(cxd(0, 1) * y / root, 1.0);
    MatC period = ex * ey * ex.adjoint() * ey.adjoint();
    MatC acc = MatC::Identity(x.rows(), x.cols());
    MatC base = period;
    std::uint64_t e = N;
    while (e) {
        if (e & 1) acc = acc * base;
        e >>= 1;
        if (e) base = base * base;
    }
    MatC target = exp_skew_hermitian(commutator(cxd(0, -1) * x, cxd(0, -1) * y), 1.0);
    return operator_norm(acc - target);
}

SweepReport commutator_sweep(const std::vector<std::uint64_t>& Ns, int samples_per_size,
                             std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    SweepReport report;

    std::vector<double> logN, logE;
    for (int qubits : {2, 3}) {
        const Eigen::Index dim = Eigen::Index(1) << qubits;
        for (int s = 0; s < samples_per_size; ++s) {
            MatC a(dim, dim), b(dim, dim);
            for (Eigen::Index j = 0; j < dim; ++j)
                for (Eigen::Index i = 0; i < dim; ++i) {
                    a(i, j) = cxd(nd(rng), nd(rng));
                    b(i, j) = cxd(nd(rng), nd(rng));
                }
            MatC x = (a + a.adjoint()) / 2.0;
            MatC y = (b + b.adjoint()) / 2.0;
            x /= operator_norm(x); // unit-norm Hermitian pair
            y /= operator_norm(y);
            double m = 1.0;
            for (auto N : Ns) {
                SweepPoint pt;
                pt.N = N;
                pt.m = m;
                pt.error = group_commutator_error_dense(x, y, N);
                report.points.push_back(pt);
                logN.push_back(std::log(double(N)));
                logE.push_back(std::log(std::max(pt.error, 1e-300)));
                report.c_estimate =
                    std::max(report.c_estimate, pt.error * std::sqrt(double(N)) / (m * m * m));
            }
        }
    }
    // Least-squares slope of log error against log N.
    double n = double(logN.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logN.size(); ++i) {
        sx += logN[i];
        sy += logE[i];
        sxx += logN[i] * logN[i];
        sxy += logN[i] * logE[i];
    }
    report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    report.c_calibrated = 2.0 * report.c_estimate;
    return report;
}

} // namespace ggc
