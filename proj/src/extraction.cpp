#include "ggc/extraction.hpp"

#include <sstream>

namespace ggc {

double modified_balance(const GroupModel& model, const Domain& domain, const OrbitKey& key,
                        const BalanceFunction& W, const Point& p, const Point& q)
{
    Point cp = model.canonicalize(p), cq = model.canonicalize(q);
    if (cp == cq) throw InvalidArgument("modified_balance: diagonal pair");
    bool fwd = class_of(model, cp, cq) == key;
    bool bwd = class_of(model, cq, cp) == key;
    if (!fwd && !bwd) return 0.0;
    int ip = domain.index_of(cp), iq = domain.index_of(cq);
    double v = 0;
    if (fwd) v += W.pair(ip, iq);
    if (bwd) v += W.pair(iq, ip);
    return v;
}

double ExtractionPlan::weight_product() const
{
    double prod = 1;
    for (double w : ref_weights) prod *= w;
    return prod;
}

ExtractionPlan make_extraction_plan(const Scheme& scheme, const Point& p,
                                    const std::vector<Point>& refs, const BalanceFunction& W)
{
    if (!scheme.in_workspace(p))
        throw InvalidArgument("extraction plan: p not in workspace");
    ExtractionPlan plan;
    plan.p = p;
    plan.refs = refs;
    plan.site_weight = W.site(scheme.domain.index_of(p));
    for (const auto& r : refs) {
        if (!scheme.in_base(r)) throw InvalidArgument("extraction plan: reference not in base");
        OrbitKey key = class_of(scheme.model, p, r);
        double wi = 0;
        for (const auto& rr : scheme.base)
            wi += modified_balance(scheme.model, scheme.domain, key, W, p, rr);
        if (wi <= 0) throw InvalidArgument("extraction plan: vanishing reference weight");
        plan.classes.push_back(key);
        plan.ref_weights.push_back(wi);
    }
    return plan;
}

double nested_commutator_on_elementary(const GroupModel& model, const Domain& domain,
                                       const std::vector<OrbitKey>& classes,
                                       const BalanceFunction& W, std::uint64_t a, const Point& p)
{
    int ip = domain.index_of(p);
    if (!get_bit(a, ip)) return 0.0;
    double scalar = 1.0;
    for (const auto& key : classes) {
        double coeff = 0;
        for (const auto& q :
             neighbors_in_class(model, domain, key, p, domain.points())) {
            if (!get_bit(a, domain.index_of(q))) continue;
            coeff += modified_balance(model, domain, key, W, p, q);
        }
        scalar *= coeff;
        if (scalar == 0) break;
    }
    return scalar;
}

std::string LemmaReport::summary() const
{
    std::ostringstream os;
    os << (passed ? "PASS" : "FAIL") << ": " << cases_checked << " cases, max deviation "
       << max_deviation << ", " << violations.size() << " violations";
    return os.str();
}

LemmaReport verify_extraction_lemma(const Scheme& scheme, const Point& p,
                                    const std::vector<Point>& refs, const BalanceFunction& W,
                                    double tol)
{
    ExtractionPlan plan = make_extraction_plan(scheme, p, refs, W);
    AdmissibleSpace space = AdmissibleSpace::from_scheme(scheme);
    const Domain& D = scheme.domain;

    std::vector<VecD> diags;
    for (const auto& key : plan.classes)
        diags.push_back(build_class_diagonal(scheme.model, D, key, W));

    LemmaReport report;
    double wprod = plan.weight_product();

    auto check_case = [&](std::uint64_t a, const Point& q, double expected) {
        double fast = nested_commutator_on_elementary(scheme.model, D, plan.classes, W, a, q);
        int iq = D.index_of(q);
        std::uint64_t b = delete_bit(a, iq);
        double oracle = 1.0;
        for (const auto& d : diags) oracle *= d[Eigen::Index(a)] - d[Eigen::Index(b)];
        if (!get_bit(a, iq)) oracle = 0.0; // E_{a,a} commutes with diagonals
        double dev = std::max(std::abs(fast - expected), std::abs(oracle - expected));
        report.max_deviation = std::max(report.max_deviation, dev);
        ++report.cases_checked;
        if (dev > tol) {
            LemmaCase c;
            c.config = a;
            c.q = q;
            c.expected = expected;
            c.fast_scalar = fast;
            c.oracle_scalar = oracle;
            if (report.violations.size() < 32) report.violations.push_back(c);
        }
    };

    for (std::uint64_t j = 0; j < space.dim(); ++j) {
        std::uint64_t a = space.config(j);
        for (const auto& q : D.points()) {
            double expected =
                (q == p && get_bit(a, D.index_of(p))) ? wprod : 0.0;
            check_case(a, q, expected);
        }
    }
    // Inadmissible a whose q-deletion is admissible: scalar must vanish.
    for (std::uint64_t j = 0; j < space.dim(); ++j) {
        std::uint64_t adm = space.config(j);
        for (const auto& q : D.points()) {
            int iq = D.index_of(q);
            if (get_bit(adm, iq)) continue;
            std::uint64_t a = adm | (1ULL << iq);
            if (space.is_admissible(a)) continue;
            check_case(a, q, 0.0);
        }
    }

    report.passed = report.violations.empty() && report.max_deviation <= tol;
    return report;
}

FlipMatrix nested_generator(const GroupModel& model, const Domain& domain,
                            const std::vector<OrbitKey>& classes,
                            const std::vector<double>& class_scales, const BalanceFunction& W,
                            cxd z)
{
    FlipMatrix g = FlipMatrix::one_qubit_global(int(domain.size()), z, W);
    for (std::size_t i = classes.size(); i-- > 0;) {
        VecD d = build_class_diagonal(model, domain, classes[i], W);
        g = g.commutator_with_diag(d).scaled(cxd(0, -1) * class_scales[i]);
    }
    return g;
}

std::string PropositionReport::summary() const
{
    std::ostringstream os;
    os << (passed ? "PASS" : "FAIL") << ": " << entries_checked << " entries, max deviation "
       << max_deviation << " (unconstrained block: " << unconstrained_max << ")";
    return os.str();
}

PropositionReport verify_extraction_proposition(const Scheme& scheme, const Point& p,
                                                const std::vector<Point>& refs,
                                                const BalanceFunction& W, cxd z, double tol)
{
    const Domain& D = scheme.domain;
    if (int(D.size()) > kMaxDenseQubits)
        throw ResourceLimit("extraction proposition: dense cap of 14 qubits exceeded");

    ExtractionPlan plan = make_extraction_plan(scheme, p, refs, W);
    AdmissibleSpace space = AdmissibleSpace::from_scheme(scheme);
    const int n = int(D.size());
    const int k = int(plan.classes.size());
    const int ip = D.index_of(p);

    std::vector<double> unit_scales(plan.classes.size(), 1.0);
    FlipMatrix g = nested_generator(scheme.model, D, plan.classes, unit_scales, W, z);

    // X~ = X(i^k z); the predicted operator is W(p) W_1...W_k X~ embedded at p.
    cxd zk = std::pow(cxd(0, 1), k) * z;
    double coeff = plan.site_weight * plan.weight_product();

    PropositionReport report;
    report.expected_coefficient = coeff;
    report.predicted_upper = zk;

    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = 1ULL << q;
        for (std::uint64_t a = 0; a < g.dim(); ++a) {
            if (!(a & bit)) continue;
            std::uint64_t b = a & ~bit;
            bool touching = space.is_admissible(a) || space.is_admissible(b);
            cxd want_lower, want_raise;
            if (k == 0) {
                want_lower = W.site(q) * z;
                want_raise = -W.site(q) * std::conj(z);
            } else if (q == ip) {
                want_lower = coeff * zk;
                want_raise = -coeff * std::conj(zk);
            } else {
                want_lower = 0;
                want_raise = 0;
            }
            double dev = std::max(std::abs(g.lower(q, a) - want_lower),
                                  std::abs(g.raise(q, a) - want_raise));
            if (touching) {
                ++report.entries_checked;
                report.max_deviation = std::max(report.max_deviation, dev);
            } else {
                report.unconstrained_max = std::max(report.unconstrained_max, dev);
            }
        }
    }
    report.passed = report.max_deviation <= tol;
    return report;
}

} // namespace ggc
