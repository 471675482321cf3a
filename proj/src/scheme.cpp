#include "ggc/scheme.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

namespace ggc {

void Scheme::validate() const
{
    std::unordered_set<Point, PointHash> ws(workspace.begin(), workspace.end());
    if (ws.size() != workspace.size()) throw InvalidArgument("scheme: duplicate workspace points");
    for (const auto& r : base)
        if (ws.count(r)) throw InvalidArgument("scheme: P and R overlap at " + point_str(r));
    for (const auto& p : workspace)
        if (!domain.contains(p))
            throw InvalidArgument("scheme: workspace point outside domain: " + point_str(p));
    for (const auto& r : base)
        if (!domain.contains(r))
            throw InvalidArgument("scheme: base point outside domain: " + point_str(r));
    if (base.empty()) throw InvalidArgument("scheme: empty base");
}

bool Scheme::in_workspace(const Point& p) const
{
    return std::find(workspace.begin(), workspace.end(), p) != workspace.end();
}

bool Scheme::in_base(const Point& p) const
{
    return std::find(base.begin(), base.end(), p) != base.end();
}

std::vector<Point> Scheme::support() const
{
    std::vector<Point> s = workspace;
    s.insert(s.end(), base.begin(), base.end());
    std::sort(s.begin(), s.end(), lex_less);
    return s;
}

std::string AddressCertificate::describe() const
{
    std::ostringstream os;
    switch (kind) {
    case Kind::Addressable: os << "addressable"; break;
    case Kind::Strict: os << "strictly addressable"; break;
    case Kind::Failure:
        os << "failure";
        if (bad_p) {
            os << " at p'=" << point_str(*bad_p) << " refs'=(";
            for (std::size_t i = 0; i < bad_refs.size(); ++i)
                os << (i ? "," : "") << point_str(bad_refs[i]);
            os << ")";
        }
        break;
    }
    os << ", " << tuples_checked << " tuples";
    if (condition5_checked) os << (condition5_holds ? ", condition5 holds" : ", condition5 FAILS");
    return os.str();
}

namespace {

struct SweepResult {
    bool failed = false;
    std::size_t fail_index = SIZE_MAX; // domain index of p'
    Point bad_p;
    std::vector<Point> bad_refs;
    std::size_t tuples = 0;
};

// Core sweep shared by the plain and strict checkers.
SweepResult sweep_point(const Scheme& scheme, const Point& p, const std::vector<Point>& refs,
                        bool strict, const std::vector<ClassAdjacency>& adj)
{
    const Domain& D = scheme.domain;
    const std::size_t k = refs.size();
    SweepResult res;

    std::vector<SweepResult> partial;
    partial.resize(D.size());

    parallel_for(D.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ip = lo; ip < hi; ++ip) {
            const Point& pprime = D.point(ip);
            std::vector<const std::vector<Point>*> S(k);
            bool all_nonempty = true;
            std::size_t tuple_count = 1;
            for (std::size_t i = 0; i < k; ++i) {
                S[i] = &adj[i].neighbors(pprime);
                if (S[i]->empty()) {
                    all_nonempty = false;
                    break;
                }
                tuple_count *= S[i]->size();
            }
            if (!all_nonempty) continue;
            partial[ip].tuples = tuple_count;

            bool ok = (pprime == p);
            std::vector<Point> witness(k);
            for (std::size_t i = 0; i < k; ++i) witness[i] = (*S[i])[0];
            if (ok) {
                for (std::size_t i = 0; i < k; ++i) {
                    for (const auto& x : *S[i]) {
                        bool good = strict ? (x == refs[i]) : scheme.in_base(x);
                        if (!good) {
                            ok = false;
                            witness[i] = x;
                            break;
                        }
                    }
                    if (!ok && !strict) break;
                }
            }
            if (!ok) {
                partial[ip].failed = true;
                partial[ip].fail_index = ip;
                partial[ip].bad_p = pprime;
                partial[ip].bad_refs = witness;
            }
        }
    });

    for (std::size_t ip = 0; ip < D.size(); ++ip) {
        res.tuples += partial[ip].tuples;
        if (partial[ip].failed && !res.failed) {
            res.failed = true;
            res.fail_index = ip;
            res.bad_p = partial[ip].bad_p;
            res.bad_refs = partial[ip].bad_refs;
        }
    }
    return res;
}

std::vector<ClassAdjacency> build_adjacencies(const Scheme& scheme, const Point& p,
                                              const std::vector<Point>& refs)
{
    std::vector<Point> supp = scheme.support();
    std::vector<ClassAdjacency> adj;
    adj.reserve(refs.size());
    for (const auto& r : refs)
        adj.emplace_back(scheme.model, scheme.domain, class_of(scheme.model, p, r), supp);
    return adj;
}

} // namespace

bool replay_counterexample(const Scheme& scheme, const Point& p, const std::vector<Point>& refs,
                           const AddressCertificate& cert, bool strict)
{
    if (!cert.bad_p || cert.bad_refs.size() != refs.size()) return false;
    std::vector<Point> supp = scheme.support();
    bool hypothesis = true;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        OrbitKey key = class_of(scheme.model, p, refs[i]);
        const Point& x = cert.bad_refs[i];
        if (std::find(supp.begin(), supp.end(), x) == supp.end()) return false;
        bool related = (*cert.bad_p != x) &&
                       (class_of(scheme.model, *cert.bad_p, x) == key ||
                        class_of(scheme.model, x, *cert.bad_p) == key);
        if (!related) hypothesis = false;
    }
    if (!hypothesis) return false;
    if (*cert.bad_p != p) return true;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        bool good = strict ? (cert.bad_refs[i] == refs[i]) : scheme.in_base(cert.bad_refs[i]);
        if (!good) return true;
    }
    return false;
}

static AddressCertificate run_point_check(const Scheme& scheme, const Point& p,
                                          const std::vector<Point>& refs, bool strict)
{
    scheme.validate();
    if (!scheme.in_workspace(p))
        throw InvalidArgument("addressability: p not in workspace: " + point_str(p));
    for (const auto& r : refs)
        if (!scheme.in_base(r))
            throw InvalidArgument("addressability: reference not in base: " + point_str(r));
    if (refs.empty()) throw InvalidArgument("addressability: empty reference list");

    auto adj = build_adjacencies(scheme, p, refs);
    SweepResult res = sweep_point(scheme, p, refs, strict, adj);

    AddressCertificate cert;
    cert.p = p;
    cert.refs = refs;
    cert.tuples_checked = res.tuples;
    if (res.failed) {
        cert.kind = AddressCertificate::Kind::Failure;
        cert.bad_p = res.bad_p;
        cert.bad_refs = res.bad_refs;
    } else {
        cert.kind = strict ? AddressCertificate::Kind::Strict : AddressCertificate::Kind::Addressable;
    }
    return cert;
}

AddressCertificate is_addressable(const Scheme& scheme, const Point& p,
                                  const std::vector<Point>& refs)
{
    return run_point_check(scheme, p, refs, false);
}

AddressCertificate is_point_strictly_addressable(const Scheme& scheme, const Point& p,
                                                 const std::vector<Point>& refs)
{
    return run_point_check(scheme, p, refs, true);
}

AddressCertificate is_strictly_addressable(const Scheme& scheme)
{
    scheme.validate();
    AddressCertificate whole;
    whole.kind = AddressCertificate::Kind::Strict;
    for (const auto& p : scheme.workspace) {
        AddressCertificate c = is_point_strictly_addressable(scheme, p, scheme.base);
        whole.tuples_checked += c.tuples_checked;
        if (!c.ok()) {
            whole.kind = AddressCertificate::Kind::Failure;
            whole.p = p;
            whole.refs = scheme.base;
            whole.bad_p = c.bad_p;
            whole.bad_refs = c.bad_refs;
            break;
        }
    }
    whole.condition5_checked = true;
    whole.condition5_holds = check_condition5(scheme, &whole.condition5_witness);
    return whole;
}

bool check_condition5(const Scheme& scheme, std::vector<Point>* witness)
{
    std::unordered_map<OrbitKey, std::pair<Point, Point>, OrbitKeyHash> pp_keys;
    for (const auto& u : scheme.workspace)
        for (const auto& v : scheme.workspace) {
            if (u == v) continue;
            pp_keys.emplace(class_of(scheme.model, u, v), std::make_pair(u, v));
        }
    for (const auto& p : scheme.workspace)
        for (const auto& r : scheme.base) {
            auto it = pp_keys.find(class_of(scheme.model, p, r));
            if (it != pp_keys.end()) {
                if (witness)
                    *witness = {it->second.first, it->second.second, p, r};
                return false;
            }
        }
    return true;
}

AddressCertificate is_addressable_naive(const Scheme& scheme, const Point& p,
                                        const std::vector<Point>& refs, bool strict)
{
    scheme.validate();
    const std::size_t k = refs.size();
    std::vector<Point> supp = scheme.support();
    std::vector<OrbitKey> keys;
    for (const auto& r : refs) keys.push_back(class_of(scheme.model, p, r));

    AddressCertificate cert;
    cert.p = p;
    cert.refs = refs;

    std::vector<std::size_t> idx(k, 0);
    for (const auto& pprime : scheme.domain.points()) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            bool hypothesis = true;
            for (std::size_t i = 0; i < k && hypothesis; ++i) {
                const Point& x = supp[idx[i]];
                hypothesis = (x != pprime) &&
                             (class_of(scheme.model, pprime, x) == keys[i] ||
                              class_of(scheme.model, x, pprime) == keys[i]);
            }
            if (hypothesis) {
                ++cert.tuples_checked;
                bool ok = (pprime == p);
                if (ok)
                    for (std::size_t i = 0; i < k; ++i) {
                        bool good = strict ? (supp[idx[i]] == refs[i]) : scheme.in_base(supp[idx[i]]);
                        if (!good) {
                            ok = false;
                            break;
                        }
                    }
                if (!ok) {
                    cert.kind = AddressCertificate::Kind::Failure;
                    cert.bad_p = pprime;
                    cert.bad_refs.clear();
                    for (std::size_t i = 0; i < k; ++i) cert.bad_refs.push_back(supp[idx[i]]);
                    return cert;
                }
            }
            std::size_t axis = 0;
            while (axis < k && ++idx[axis] == supp.size()) idx[axis++] = 0;
            if (axis == k) break;
        }
    }
    cert.kind = strict ? AddressCertificate::Kind::Strict : AddressCertificate::Kind::Addressable;
    return cert;
}

std::int64_t PhiDescriptor::apply_mod(const Point& g) const
{
    std::int64_t v = g[0] % modulus;
    return v < 0 ? v + modulus : v;
}

std::int64_t PhiDescriptor::apply_coord(const Point& g) const
{
    return g[std::size_t(axis)];
}

LiftResult lift_scheme(const PhiDescriptor& phi, const Scheme& base_scheme,
                       const std::vector<Point>& preimages, const GroupModel& target_model,
                       const Domain& window)
{
    if (preimages.size() != base_scheme.base.size())
        throw InvalidArgument("lift_scheme: need one preimage per base reference");

    AddressCertificate base_cert = is_strictly_addressable(base_scheme);
    if (!base_cert.ok())
        throw InvalidArgument("lift_scheme: base scheme is not strictly addressable: " +
                              base_cert.describe());

    auto phi_point = [&](const Point& g) -> Point {
        if (phi.kind == PhiDescriptor::Kind::ModReduce) return Point{phi.apply_mod(g)};
        return Point{phi.apply_coord(g)};
    };

    // phi must carry each chosen preimage onto its reference.
    for (std::size_t i = 0; i < preimages.size(); ++i) {
        Point img = base_scheme.model.canonicalize(phi_point(preimages[i]));
        if (img != base_scheme.base[i])
            throw InvalidArgument("lift_scheme: preimage " + point_str(preimages[i]) +
                                  " does not map onto " + point_str(base_scheme.base[i]));
    }

    // Degeneracy guard: 2 r_i must differ from 2 r_j for some i, j.
    bool doubled_ok = false;
    for (std::size_t i = 0; i < preimages.size() && !doubled_ok; ++i)
        for (std::size_t j = i + 1; j < preimages.size() && !doubled_ok; ++j) {
            Point di = target_model.canonicalize(point_scale(2, preimages[i]));
            Point dj = target_model.canonicalize(point_scale(2, preimages[j]));
            if (di != dj) doubled_ok = true;
        }
    if (!doubled_ok)
        throw InvalidArgument("lift_scheme: refused, 2 r_i = 2 r_j for every pair of preimages");

    Scheme lifted;
    lifted.model = target_model;
    lifted.domain = window;
    lifted.base = preimages;
    for (const auto& x : window.points()) {
        Point img = base_scheme.model.canonicalize(phi_point(x));
        if (!base_scheme.domain.contains(img))
            throw InvalidArgument("lift_scheme: window image leaves base domain at " +
                                  point_str(x) + "; enlarge the base window");
        if (base_scheme.in_workspace(img) &&
            std::find(preimages.begin(), preimages.end(), x) == preimages.end())
            lifted.workspace.push_back(x);
    }
    std::sort(lifted.workspace.begin(), lifted.workspace.end(), lex_less);

    LiftResult out;
    out.certificate = is_strictly_addressable(lifted);
    out.scheme = std::move(lifted);
    return out;
}

namespace {
std::int64_t mod4(const GroupModel& model, const Point& x)
{
    if (model.dim != 1) throw InvalidArgument("mod-4 classification needs a 1-D model");
    if (!model.moduli.empty() && model.moduli[0] > 0 && model.moduli[0] % 4 != 0)
        throw InvalidArgument("mod-4 classification needs 4 | modulus");
    std::int64_t v = x[0] % 4;
    return v < 0 ? v + 4 : v;
}
} // namespace

LiftResult build_z4_scheme(const GroupModel& model, const Domain& window, const Point& r1,
                           const Point& r2, const Point& r3)
{
    std::vector<Point> refs = {model.canonicalize(r1), model.canonicalize(r2),
                               model.canonicalize(r3)};
    std::set<std::int64_t> phis;
    for (const auto& r : refs) {
        std::int64_t v = mod4(model, r);
        if (v != 1 && v != 3)
            throw InvalidArgument("z4 scheme: reference " + point_str(r) + " has phi = " +
                                  std::to_string(v) + ", must be odd");
        phis.insert(v);
    }
    if (phis != std::set<std::int64_t>{1, 3})
        throw InvalidArgument("z4 scheme: phi(R) must equal {1,3}");

    // All ordered differences r_i - r_j must be pairwise distinct.
    std::vector<Point> diffs;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            if (i == j) continue;
            diffs.push_back(model.canonicalize(point_sub(refs[i], refs[j])));
        }
    std::sort(diffs.begin(), diffs.end(), lex_less);
    if (std::adjacent_find(diffs.begin(), diffs.end()) != diffs.end())
        throw InvalidArgument("z4 scheme: r_i - r_j collides with another difference");

    // Excluded points: 2p = r_i + r_j for some i < j.
    std::vector<Point> sums;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            sums.push_back(model.canonicalize(point_add(refs[i], refs[j])));

    Scheme scheme;
    scheme.model = model;
    scheme.domain = window;
    scheme.base = refs;
    for (const auto& p : window.points()) {
        if (mod4(model, p) != 0) continue;
        Point dbl = model.canonicalize(point_scale(2, p));
        if (std::find(sums.begin(), sums.end(), dbl) != sums.end()) continue;
        scheme.workspace.push_back(p);
    }

    LiftResult out;
    out.certificate = is_strictly_addressable(scheme);
    out.scheme = std::move(scheme);
    return out;
}

bool check_four_point(const GroupModel& model, const Point& r1, const Point& r2, const Point& r3,
                      const Point& r4, std::string* why)
{
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    std::vector<Point> rs = {model.canonicalize(r1), model.canonicalize(r2),
                             model.canonicalize(r3), model.canonicalize(r4)};
    std::set<std::int64_t> first_three;
    for (std::size_t i = 0; i < 4; ++i) {
        std::int64_t v = mod4(model, rs[i]);
        if (v != 1 && v != 3)
            return fail("r" + std::to_string(i + 1) + " not in phi^{-1}{1,3}");
        if (i < 3) first_three.insert(v);
    }
    if (first_three != std::set<std::int64_t>{1, 3}) return fail("phi({r1,r2,r3}) != {1,3}");

    Point triple_sum = model.canonicalize(
        point_add(point_add(rs[0], rs[1]), rs[2]));
    if (model.canonicalize(point_scale(3, rs[3])) == triple_sum)
        return fail("3 r4 = r1 + r2 + r3");

    std::vector<Point> diffs;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            if (i == j) continue;
            diffs.push_back(model.canonicalize(point_sub(rs[i], rs[j])));
        }
    std::sort(diffs.begin(), diffs.end(), lex_less);
    if (std::adjacent_find(diffs.begin(), diffs.end()) != diffs.end())
        return fail("difference collision among {r1,r2,r3,r4}");
    return true;
}

EuclideanSearchResult search_euclidean_scheme(int s, const Domain& window, std::size_t trials,
                                              std::uint64_t seed)
{
    if (s < 2) throw InvalidArgument("euclidean search: s >= 2 (use the mod-4 construction for s=1)");
    GroupModel model = GroupModel::euclidean(s);

    auto residue_pool = [&](std::int64_t m, std::int64_t first_axis_residue) {
        std::vector<Point> pool;
        for (const auto& x : window.points()) {
            bool ok = (((x[0] - first_axis_residue) % m) == 0);
            for (int a = 1; a < s && ok; ++a) ok = (x[a] % m) == 0;
            if (ok) pool.push_back(x);
        }
        return pool;
    };

    std::vector<Point> pool_r1 = residue_pool(8, 1);
    std::vector<Point> pool_r2 = residue_pool(8, 5);
    std::vector<Point> pool_tail = residue_pool(4, 1);
    std::vector<Point> p0 = residue_pool(8, 0);

    EuclideanSearchResult best;
    if (pool_r1.empty() || pool_r2.empty() || p0.empty()) return best;

    std::mt19937_64 rng(seed);
    const int base_size = s + 1;

    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<Point> refs;
        refs.push_back(pool_r1[rng() % pool_r1.size()]);
        refs.push_back(pool_r2[rng() % pool_r2.size()]);
        std::set<std::vector<std::int64_t>> used(refs.begin(), refs.end());
        bool stuck = false;
        while (int(refs.size()) < base_size) {
            if (pool_tail.size() <= used.size()) {
                stuck = true;
                break;
            }
            Point cand = pool_tail[rng() % pool_tail.size()];
            if (used.count(cand)) continue;
            used.insert(cand);
            refs.push_back(cand);
        }
        if (stuck) continue;
        std::sort(refs.begin() + 2, refs.end(), lex_less);

        // Rigidity pre-filter: pairwise squared distances must be distinct.
        std::set<std::int64_t> dists;
        bool rigid = true;
        for (std::size_t i = 0; i < refs.size() && rigid; ++i)
            for (std::size_t j = i + 1; j < refs.size() && rigid; ++j) {
                std::int64_t d2 = 0;
                for (int a = 0; a < s; ++a) {
                    std::int64_t d = refs[i][a] - refs[j][a];
                    d2 += d * d;
                }
                rigid = dists.insert(d2).second;
            }
        if (!rigid) continue;

        Scheme cand;
        cand.model = model;
        cand.domain = window;
        cand.base = refs;
        cand.workspace = p0;

        // Prune workspace points whose distance fingerprint is ambiguous.
        while (!cand.workspace.empty()) {
            std::vector<Point> keep;
            for (const auto& p : cand.workspace)
                if (is_point_strictly_addressable(cand, p, cand.base).ok()) keep.push_back(p);
            if (keep.size() == cand.workspace.size()) break;
            cand.workspace = std::move(keep);
        }
        if (cand.workspace.empty()) continue;

        AddressCertificate cert = is_strictly_addressable(cand);
        if (!cert.ok()) continue;

        bool better = false;
        if (!best.found)
            better = true;
        else if (cand.workspace.size() != best.scheme.workspace.size())
            better = cand.workspace.size() > best.scheme.workspace.size();
        else
            better = std::lexicographical_compare(
                cand.base.begin(), cand.base.end(), best.scheme.base.begin(),
                best.scheme.base.end(),
                [](const Point& a, const Point& b) { return lex_less(a, b); });
        if (better) {
            best.found = true;
            best.scheme = cand;
            best.certificate = cert;
            best.workspace_density = double(cand.workspace.size()) / double(p0.size());
        }
    }
    best.trials_used = trials;
    return best;
}

} // namespace ggc
