#include "ggc/refocus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace ggc {

namespace {

struct MemberPair {
    Point u, v;     // unordered, u < v lexicographically
    double weight;  // combined over both orders
    bool both_workspace;
    bool both_base;
};

std::vector<MemberPair> collapsed_members(const Scheme& scheme, const OrbitKey& key,
                                          const BalanceFunction& W)
{
    std::map<std::pair<Point, Point>, MemberPair> acc;
    for (const auto& [u, v] : class_members(scheme.model, scheme.domain, key)) {
        Point a = u, b = v;
        if (lex_less(b, a)) std::swap(a, b);
        auto& m = acc[{a, b}];
        m.u = a;
        m.v = b;
        m.weight += W.pair(scheme.domain.index_of(u), scheme.domain.index_of(v));
        m.both_workspace = scheme.in_workspace(a) && scheme.in_workspace(b);
        m.both_base = scheme.in_base(a) && scheme.in_base(b);
    }
    std::vector<MemberPair> out;
    for (auto& [k, m] : acc) out.push_back(m);
    return out;
}

bool near_integer(double x, long long& out)
{
    double r = std::round(x);
    if (std::abs(x - r) > 1e-12 || std::abs(r) > (1LL << 40)) return false;
    out = (long long)r;
    return true;
}

} // namespace

std::vector<Pulse> RefocusPlan::segment_pulses() const
{
    std::vector<Pulse> out;
    for (const auto& op : ops)
        if (op.kind == RefocusOp::Kind::Segment && op.T != 0.0)
            out.push_back(Pulse::two_qubit(key, op.T));
    return out;
}

RefocusPlan refocus_pair(const Scheme& scheme, const Point& p, const Point& q, double T,
                         const BalanceFunction& W)
{
    if (!scheme.in_workspace(p) || !scheme.in_workspace(q))
        throw InvalidArgument("refocus: target pair must lie in the workspace");
    if (p == q) throw InvalidArgument("refocus: target pair is diagonal");
    if (!check_condition5(scheme))
        throw InvalidArgument("refocus: scheme violates the no-shared-distance condition");

    RefocusPlan plan;
    plan.p = p;
    plan.q = q;
    plan.key = class_of(scheme.model, p, q);
    plan.T_requested = T;

    auto members = collapsed_members(scheme, plan.key, W);

    // Workspace coupling graph of the class.
    std::vector<MemberPair> couplings;
    double omega_pq = 0;
    for (const auto& m : members) {
        if (!m.both_workspace) continue;
        couplings.push_back(m);
        if ((m.u == p && m.v == q) || (m.u == q && m.v == p)) omega_pq = m.weight;
    }
    if (omega_pq <= 0)
        throw InvalidArgument("refocus: target pair is not coupled by its own class on this window");

    if (couplings.size() == 1) {
        // Only the target pair couples: a single entangling segment suffices.
        RefocusOp seg;
        seg.kind = RefocusOp::Kind::Segment;
        seg.T = T / omega_pq;
        long long w_int;
        if (near_integer(omega_pq, w_int) && w_int > 0) {
            plan.rational_ledger = true;
            seg.frac = Fraction(1, w_int);
        }
        plan.ops.push_back(seg);
        plan.segment_count = 1;
    } else {
        // Flip set: the pair itself plus every workspace neighbor it couples to.
        std::set<Point, bool (*)(const Point&, const Point&)> fs(lex_less);
        fs.insert(p);
        fs.insert(q);
        for (const auto& m : couplings) {
            if (m.u == p || m.u == q) fs.insert(m.v);
            if (m.v == p || m.v == q) fs.insert(m.u);
        }
        plan.flip_sites.assign(fs.begin(), fs.end());
        const int v = int(plan.flip_sites.size());
        if (v > 16) throw ResourceLimit("refocus: flip set exceeds 16 sites");

        auto site_index = [&](const Point& x) {
            auto it = std::find(plan.flip_sites.begin(), plan.flip_sites.end(), x);
            return it == plan.flip_sites.end() ? -1 : int(it - plan.flip_sites.begin());
        };
        const int bit_p = site_index(p);
        const int bit_q = site_index(q);

        // Weighted degree of the target endpoints within the flip set.
        double deg_p = 0, deg_q = 0;
        for (const auto& m : couplings) {
            if (m.u == p || m.v == p) deg_p += m.weight;
            if (m.u == q || m.v == q) deg_q += m.weight;
        }

        long long wi, dpi, dqi;
        bool rational = near_integer(omega_pq, wi) && near_integer(deg_p, dpi) &&
                        near_integer(deg_q, dqi) && wi > 0 && dpi > 0 && dqi > 0;
        plan.rational_ledger = rational;

        // Character coefficients: single characters at p and q carry T/deg,
        // the pair character carries T/omega; everything else vanishes,
        // including the constant, so untouched couplings integrate to zero.
        const double denom = double(1ULL << v);
        for (std::uint64_t m = 0; m < (1ULL << v); ++m) {
            std::uint64_t pattern = m ^ (m >> 1); // Gray order
            double sp = (pattern >> bit_p) & 1 ? -1.0 : 1.0;
            double sq = (pattern >> bit_q) & 1 ? -1.0 : 1.0;
            RefocusOp seg;
            seg.kind = RefocusOp::Kind::Segment;
            seg.T = (T / deg_p * sp + T / deg_q * sq + T / omega_pq * sp * sq) / denom;
            if (rational) {
                long long ip = (long long)sp, iq = (long long)sq;
                seg.frac = (Fraction(ip, dpi) + Fraction(iq, dqi) + Fraction(ip * iq, wi)) *
                           Fraction(1, (long long)denom);
            }
            plan.ops.push_back(seg);
            ++plan.segment_count;

            RefocusOp flip;
            flip.kind = RefocusOp::Kind::Flip;
            flip.site = std::size_t(gray_flip_bit(m, v));
            plan.ops.push_back(flip);
            ++plan.flip_count;
        }
    }

    // Exact replay: walk the schedule per configuration of the involved
    // workspace sites and compare against the target phase profile.
    std::set<Point, bool (*)(const Point&, const Point&)> involved(lex_less);
    for (const auto& m : couplings) {
        involved.insert(m.u);
        involved.insert(m.v);
    }
    std::vector<Point> sites(involved.begin(), involved.end());
    auto idx_of = [&](const Point& x) {
        return int(std::find(sites.begin(), sites.end(), x) - sites.begin());
    };
    const int ns = int(sites.size());
    if (ns > 20) throw ResourceLimit("refocus: too many coupled sites to replay");

    std::vector<int> flip_to_site(plan.flip_sites.size());
    for (std::size_t i = 0; i < plan.flip_sites.size(); ++i)
        flip_to_site[i] = idx_of(plan.flip_sites[i]);

    bool rational = plan.rational_ledger;
    std::vector<long long> wints(couplings.size(), 1);
    if (rational)
        for (std::size_t i = 0; i < couplings.size(); ++i)
            rational = rational && near_integer(couplings[i].weight, wints[i]);
    plan.rational_ledger = rational;

    bool cancel = true;
    Fraction constant;
    double float_constant = 0;
    double worst = 0;
    for (std::uint64_t x = 0; x < (1ULL << ns) && cancel; ++x) {
        Fraction acc_frac;
        double acc = 0;
        std::uint64_t flips = 0;
        for (const auto& op : plan.ops) {
            if (op.kind == RefocusOp::Kind::Flip) {
                flips ^= 1ULL << flip_to_site[op.site];
                continue;
            }
            std::uint64_t eff = x ^ flips;
            long long count = 0;
            double weighted = 0;
            for (std::size_t ci = 0; ci < couplings.size(); ++ci) {
                const auto& m = couplings[ci];
                bool on = ((eff >> idx_of(m.u)) & 1) && ((eff >> idx_of(m.v)) & 1);
                if (!on) continue;
                weighted += couplings[ci].weight;
                count += wints[ci];
            }
            acc += op.T * weighted;
            if (rational) acc_frac = acc_frac + op.frac * Fraction(count);
        }
        bool target_on = ((x >> idx_of(p)) & 1) && ((x >> idx_of(q)) & 1);
        if (rational) {
            if (x == 0) constant = acc_frac;
            Fraction want = target_on ? Fraction(1) : Fraction(0);
            if (!((acc_frac - constant - want).is_zero())) cancel = false;
        } else {
            if (x == 0) float_constant = acc;
            double base = target_on ? T : 0.0;
            worst = std::max(worst, std::abs(acc - float_constant - base));
        }
    }
    plan.couplings_cancel = rational ? cancel : (worst <= 1e-9 * std::max(1.0, std::abs(T)));
    plan.constant_phase = constant;

    std::ostringstream os;
    os << (plan.couplings_cancel ? "exact" : "MISMATCH") << " ledger ("
       << (rational ? "rational" : "floating") << "), " << plan.segment_count << " segments, "
       << plan.flip_count << " flips, constant " << constant.str();
    plan.ledger_summary = os.str();
    return plan;
}

double refocus_phase_deviation(const Scheme& scheme, const RefocusPlan& plan,
                               const BalanceFunction& W)
{
    // Full-domain diagonal simulation with ideal flips. Admissible basis
    // states only; the result is the max phase deviation from the target
    // profile after subtracting the all-zero-workspace constant.
    AdmissibleSpace space = AdmissibleSpace::from_scheme(scheme);
    VecD diag = build_class_diagonal(scheme.model, scheme.domain, plan.key, W);
    int ip = scheme.domain.index_of(plan.p);
    int iq = scheme.domain.index_of(plan.q);

    std::vector<int> flip_bits;
    for (const auto& s : plan.flip_sites) flip_bits.push_back(scheme.domain.index_of(s));

    double worst = 0;
    double constant = 0;
    for (std::uint64_t j = 0; j < space.dim(); ++j) {
        std::uint64_t a = space.config(j);
        double phase = 0;
        std::uint64_t mask = 0;
        for (const auto& op : plan.ops) {
            if (op.kind == RefocusOp::Kind::Flip) {
                mask ^= 1ULL << flip_bits[op.site];
                continue;
            }
            phase += op.T * diag[Eigen::Index(a ^ mask)];
        }
        if (j == 0) constant = phase - 0.0;
        bool on = ((a >> ip) & 1) && ((a >> iq) & 1);
        double want = on ? plan.T_requested : 0.0;
        worst = std::max(worst, std::abs(phase - constant - want));
    }
    return worst;
}

} // namespace ggc
