#include "ggc/io.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

namespace ggc {

json model_to_json(const GroupModel& model)
{
    json j;
    j["kind"] = model.kind == GroupKind::TranslationLattice ? "translation" : "euclidean";
    j["dim"] = model.dim;
    if (!model.moduli.empty()) j["moduli"] = model.moduli;
    return j;
}

GroupModel model_from_json(const json& j)
{
    std::string kind = j.at("kind").get<std::string>();
    int dim = j.at("dim").get<int>();
    if (kind == "translation") {
        std::vector<std::int64_t> moduli;
        if (j.contains("moduli")) moduli = j["moduli"].get<std::vector<std::int64_t>>();
        return GroupModel::translation(dim, moduli);
    }
    if (kind == "euclidean") return GroupModel::euclidean(dim);
    throw InvalidArgument("unknown model kind: " + kind);
}

json point_to_json(const Point& p) { return json(p); }

Point point_from_json(const json& j)
{
    if (j.is_number_integer()) return Point{j.get<std::int64_t>()};
    return j.get<Point>();
}

Domain domain_from_json(const GroupModel& model, const json& j)
{
    if (j.contains("full_modular") && j["full_modular"].get<bool>())
        return Domain::full_modular(model);
    if (j.contains("points")) {
        std::vector<Point> pts;
        for (const auto& p : j["points"]) pts.push_back(point_from_json(p));
        return Domain(model, std::move(pts));
    }
    if (!j.contains("lo") || !j.contains("hi"))
        throw InvalidArgument("window: need lo/hi bounds, points, or full_modular");
    return Domain::box(model, point_from_json(j["lo"]), point_from_json(j["hi"]));
}

json scheme_to_json(const Scheme& scheme)
{
    json j;
    j["model"] = model_to_json(scheme.model);
    // Serialized faithfully as the explicit point list; domains are not
    // always boxes.
    json win;
    json pts = json::array();
    for (const auto& p : scheme.domain.points()) pts.push_back(point_to_json(p));
    win["points"] = pts;
    j["window"] = win;
    json ws = json::array();
    for (const auto& p : scheme.workspace) ws.push_back(point_to_json(p));
    j["workspace"] = {{"kind", "explicit"}, {"points", ws}};
    json base = json::array();
    for (const auto& r : scheme.base) base.push_back(point_to_json(r));
    j["base"] = base;
    return j;
}

Scheme scheme_from_json(const json& j)
{
    Scheme s;
    s.model = model_from_json(j.at("model"));
    s.domain = domain_from_json(s.model, j.at("window"));
    const json& ws = j.at("workspace");
    if (ws.contains("kind") && ws["kind"] == "residue") {
        std::vector<std::int64_t> moduli = ws.at("moduli").get<std::vector<std::int64_t>>();
        Point residue = point_from_json(ws.at("residue"));
        std::vector<Point> excl;
        if (ws.contains("exclude"))
            for (const auto& e : ws["exclude"]) excl.push_back(point_from_json(e));
        for (const auto& x : s.domain.points()) {
            bool ok = true;
            for (int a = 0; a < s.model.dim && ok; ++a) {
                if (moduli[std::size_t(a)] == 0) continue;
                std::int64_t m = moduli[std::size_t(a)];
                ok = (((x[std::size_t(a)] - residue[std::size_t(a)]) % m) + m) % m == 0;
            }
            if (ok && std::find(excl.begin(), excl.end(), x) == excl.end())
                s.workspace.push_back(x);
        }
    } else {
        for (const auto& p : ws.at("points")) s.workspace.push_back(point_from_json(p));
    }
    for (const auto& r : j.at("base")) s.base.push_back(point_from_json(r));
    // Residue workspaces may sweep up base points; keep them disjoint.
    std::erase_if(s.workspace,
                  [&](const Point& p) { return s.in_base(p); });
    std::sort(s.workspace.begin(), s.workspace.end(), lex_less);
    s.validate();
    return s;
}

Scheme make_builtin_scheme(const std::string& name, int s)
{
    if (name == "z14") {
        Scheme sc;
        sc.model = GroupModel::translation(1, {14});
        sc.domain = Domain::full_modular(sc.model);
        sc.workspace = {Point{0}};
        sc.base = {Point{1}, Point{3}, Point{7}};
        return sc;
    }
    if (name == "z-139") {
        Scheme sc;
        sc.model = GroupModel::translation(1);
        sc.domain = Domain::box(sc.model, Point{-64}, Point{64});
        for (std::int64_t x = -64; x <= 64; ++x)
            if (((x % 4) + 4) % 4 == 0) sc.workspace.push_back(Point{x});
        sc.base = {Point{1}, Point{3}, Point{9}};
        return sc;
    }
    if (name == "zs-lifted") {
        if (s < 2 || s > 3) throw InvalidArgument("zs-lifted: s must be 2 or 3");
        Scheme sc;
        sc.model = GroupModel::translation(s);
        if (s == 2)
            sc.domain = Domain::box(sc.model, Point{-10, -10}, Point{10, 10});
        else
            sc.domain = Domain::box(sc.model, Point{-6, -3, -3}, Point{10, 3, 3});
        Point r1(std::size_t(s), 0), r2(std::size_t(s), 0), r3(std::size_t(s), 0);
        r1[0] = 1;
        r2[0] = 3;
        r3[0] = 9;
        sc.base = {r1, r2, r3};
        for (const auto& x : sc.domain.points())
            if (((x[0] % 4) + 4) % 4 == 0) sc.workspace.push_back(x);
        return sc;
    }
    if (name == "euclid-s2") {
        GroupModel model = GroupModel::euclidean(2);
        Domain window = Domain::box(model, Point{0, 0}, Point{23, 23});
        EuclideanSearchResult r = search_euclidean_scheme(2, window, 60, 0xE0C11DULL);
        if (!r.found) throw std::runtime_error("euclid-s2: builtin search found no scheme");
        return r.scheme;
    }
    if (name == "shiftable-chain") {
        Scheme sc;
        sc.model = GroupModel::translation(1);
        sc.domain = Domain::box(sc.model, Point{-11}, Point{39});
        for (std::int64_t x = -11; x <= 39; ++x)
            if (((x % 4) + 4) % 4 == 0) sc.workspace.push_back(Point{x});
        sc.base = {Point{1}, Point{3}, Point{9}};
        return sc;
    }
    if (name == "chain-12") {
        // The 12-qubit verification chain.
        Scheme sc;
        sc.model = GroupModel::translation(1);
        sc.domain = Domain::box(sc.model, Point{0}, Point{11});
        sc.workspace = {Point{0}, Point{4}, Point{8}};
        sc.base = {Point{1}, Point{3}, Point{9}};
        return sc;
    }
    if (name == "chain-13") {
        // The [0,12] extraction-identity chain.
        Scheme sc;
        sc.model = GroupModel::translation(1);
        sc.domain = Domain::box(sc.model, Point{0}, Point{12});
        sc.workspace = {Point{0}, Point{4}, Point{8}};
        sc.base = {Point{1}, Point{3}, Point{9}};
        return sc;
    }
    if (name == "line-k3") {
        // Certified three-reference scheme small enough for dense end-to-end
        // measurement: one workspace point on a ten-site segment.
        Scheme sc;
        sc.model = GroupModel::translation(1);
        sc.domain = Domain::box(sc.model, Point{0}, Point{9});
        sc.workspace = {Point{0}};
        sc.base = {Point{1}, Point{3}, Point{9}};
        return sc;
    }
    if (name == "mini-k2") {
        // Smallest window where a two-reference base is strict: D = {0,1,3}.
        Scheme sc;
        sc.model = GroupModel::translation(1);
        sc.domain = Domain(sc.model, {Point{0}, Point{1}, Point{3}});
        sc.workspace = {Point{0}};
        sc.base = {Point{1}, Point{3}};
        return sc;
    }
    throw InvalidArgument("unknown builtin scheme: " + name);
}

json certificate_to_json(const AddressCertificate& cert)
{
    json j;
    switch (cert.kind) {
    case AddressCertificate::Kind::Addressable: j["kind"] = "addressable"; break;
    case AddressCertificate::Kind::Strict: j["kind"] = "strict"; break;
    case AddressCertificate::Kind::Failure: j["kind"] = "failure"; break;
    }
    if (!cert.p.empty()) j["p"] = point_to_json(cert.p);
    if (!cert.refs.empty()) {
        json refs = json::array();
        for (const auto& r : cert.refs) refs.push_back(point_to_json(r));
        j["refs"] = refs;
    }
    if (cert.bad_p) {
        json cx;
        cx["p"] = point_to_json(*cert.bad_p);
        json refs = json::array();
        for (const auto& r : cert.bad_refs) refs.push_back(point_to_json(r));
        cx["refs"] = refs;
        j["counterexample"] = cx;
    }
    j["tuples_checked"] = cert.tuples_checked;
    if (cert.condition5_checked) {
        json c5;
        c5["holds"] = cert.condition5_holds;
        if (!cert.condition5_witness.empty()) {
            json w = json::array();
            for (const auto& x : cert.condition5_witness) w.push_back(point_to_json(x));
            c5["witness"] = w;
        }
        j["condition5"] = c5;
    }
    return j;
}

BalanceFunction balance_from_json(const json& j, std::size_t n)
{
    if (j.is_null()) return BalanceFunction::constant(n);
    std::string kind = j.value("kind", "constant");
    if (kind == "constant") return BalanceFunction::constant(n, j.value("value", 1.0));
    if (kind == "uniform")
        return BalanceFunction::uniform_random(n, j.value("lo", 1.0), j.value("hi", 2.0),
                                               j.value("seed", std::uint64_t(1)));
    throw InvalidArgument("unknown balance kind: " + kind);
}

json balance_spec_echo(const json& j)
{
    if (j.is_null()) return json{{"kind", "constant"}, {"value", 1.0}};
    return j;
}

json pulse_to_json(const Pulse& p)
{
    json j;
    if (p.kind == Pulse::Kind::TwoQubitPhase) {
        j["kind"] = "two_qubit_phase";
        if (p.key.is_offset)
            j["offset"] = p.key.offset;
        else
            j["sqdist"] = p.key.sqdist;
        j["T"] = p.T;
    } else {
        j["kind"] = "one_qubit_global";
        j["z"] = {p.z.real(), p.z.imag()};
    }
    j["level"] = p.level;
    return j;
}

Pulse pulse_from_json(const json& j)
{
    std::string kind = j.at("kind").get<std::string>();
    Pulse p;
    p.level = j.value("level", 0);
    if (kind == "two_qubit_phase") {
        p.kind = Pulse::Kind::TwoQubitPhase;
        if (j.contains("offset")) {
            p.key.is_offset = true;
            p.key.offset = j["offset"].get<Point>();
        } else {
            p.key.is_offset = false;
            p.key.sqdist = j.at("sqdist").get<std::int64_t>();
        }
        p.T = j.at("T").get<double>();
    } else if (kind == "one_qubit_global") {
        p.kind = Pulse::Kind::OneQubitGlobal;
        auto z = j.at("z");
        p.z = cxd(z.at(0).get<double>(), z.at(1).get<double>());
    } else {
        throw InvalidArgument("unknown pulse kind: " + kind);
    }
    return p;
}

static json target_to_json(const TargetDescriptor& t)
{
    json j;
    switch (t.kind) {
    case TargetDescriptor::Kind::Identity: j["kind"] = "identity"; break;
    case TargetDescriptor::Kind::LocalUnitary: {
        j["kind"] = "local_unitary";
        j["p"] = point_to_json(t.p);
        json m = json::array();
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                m.push_back({t.u2(r, c).real(), t.u2(r, c).imag()});
        j["matrix"] = m;
        break;
    }
    case TargetDescriptor::Kind::PairPhase:
        j["kind"] = "pair_phase";
        j["p"] = point_to_json(t.p);
        j["q"] = point_to_json(t.q);
        j["T"] = t.T;
        break;
    }
    j["epsilon"] = t.epsilon;
    return j;
}

TargetDescriptor target_from_json(const json& j)
{
    TargetDescriptor t;
    std::string kind = j.value("kind", "identity");
    t.epsilon = j.value("epsilon", 0.0);
    if (kind == "identity") {
        t.kind = TargetDescriptor::Kind::Identity;
    } else if (kind == "local_unitary") {
        t.kind = TargetDescriptor::Kind::LocalUnitary;
        t.p = point_from_json(j.at("p"));
        t.u2.resize(2, 2);
        const auto& m = j.at("matrix");
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                const auto& e = m.at(std::size_t(2 * r + c));
                t.u2(r, c) = cxd(e.at(0).get<double>(), e.at(1).get<double>());
            }
    } else if (kind == "pair_phase") {
        t.kind = TargetDescriptor::Kind::PairPhase;
        t.p = point_from_json(j.at("p"));
        t.q = point_from_json(j.at("q"));
        t.T = j.at("T").get<double>();
    } else {
        throw InvalidArgument("unknown target kind: " + kind);
    }
    return t;
}

json budget_trace_to_json(const BudgetTrace& trace)
{
    json j;
    j["schedule"] = trace.schedule;
    j["epsilon"] = trace.epsilon;
    j["c"] = trace.c;
    j["margin"] = trace.margin;
    j["predicted_error"] = trace.predicted_error;
    j["closed_form_length"] = trace.closed_form_length;
    json levels = json::array();
    for (const auto& b : trace.levels) {
        json l;
        l["level"] = b.level;
        l["eps"] = b.eps;
        l["N"] = b.N;
        l["scale"] = b.scale;
        l["rebalance"] = b.rebalance;
        l["x_norm"] = b.x_norm;
        l["x_diff"] = b.x_diff;
        l["y_norm"] = b.y_norm;
        l["m_true"] = b.m_true;
        l["m_eff"] = b.m_eff;
        l["drift"] = b.drift;
        levels.push_back(l);
    }
    j["levels"] = levels;
    return j;
}

void write_pulse_file(const std::string& path, const PulseSequence& seq, const Scheme& scheme,
                      const json& balance_spec, std::uint64_t flat_cap)
{
    std::vector<Pulse> flat = seq.flatten(flat_cap);
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot open pulse file for writing: " + path);
    json header;
    header["format"] = "ggc-pulses";
    header["version"] = 1;
    header["scheme"] = scheme_to_json(scheme);
    header["balance"] = balance_spec_echo(balance_spec);
    header["target"] = target_to_json(seq.target);
    header["budget_trace"] = budget_trace_to_json(seq.trace);
    header["pulse_count"] = flat.size();
    out << header.dump() << "\n";
    for (const auto& p : flat) out << pulse_to_json(p).dump() << "\n";
}

LoadedPulses read_pulse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open pulse file: " + path);
    LoadedPulses lp;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const std::exception& e) {
            throw InvalidArgument("pulse file " + path + ": corrupted line " +
                                  std::to_string(lineno) + ": " + e.what());
        }
        if (lineno == 1) {
            if (j.value("format", "") != "ggc-pulses")
                throw InvalidArgument("pulse file " + path + ": bad header on line 1");
            lp.header = j;
            lp.scheme = scheme_from_json(j.at("scheme"));
            lp.target = target_from_json(j.at("target"));
            continue;
        }
        try {
            lp.pulses.push_back(pulse_from_json(j));
        } catch (const std::exception& e) {
            throw InvalidArgument("pulse file " + path + ": corrupted line " +
                                  std::to_string(lineno) + ": " + e.what());
        }
    }
    if (lineno == 0) throw InvalidArgument("pulse file " + path + ": empty file");
    return lp;
}

static json tree_to_json(const std::vector<SeqNode>& nodes)
{
    json arr = json::array();
    for (const auto& n : nodes) {
        if (n.is_leaf()) {
            arr.push_back(pulse_to_json(n.pulse));
        } else {
            json r;
            r["repeat"] = n.repeat;
            r["body"] = tree_to_json(n.body);
            arr.push_back(r);
        }
    }
    return arr;
}

json sequence_tree_to_json(const PulseSequence& seq)
{
    json j;
    j["format"] = "ggc-pulse-tree";
    j["version"] = 1;
    j["target"] = target_to_json(seq.target);
    j["budget_trace"] = budget_trace_to_json(seq.trace);
    j["flat_length"] = seq.flat_length();
    j["tree"] = tree_to_json(seq.nodes);
    return j;
}

json sim_report_to_json(const SimReport& rep)
{
    json j;
    j["distance"] = rep.distance;
    j["leakage"] = rep.leakage;
    j["align_phase"] = rep.align_phase;
    j["declared_epsilon"] = rep.declared_epsilon;
    j["within_budget"] = rep.within_budget;
    j["flat_length"] = rep.flat_length;
    j["timing"] = {{"wall_seconds", rep.wall_seconds}};
    return j;
}

json lemma_report_to_json(const LemmaReport& rep)
{
    json j;
    j["passed"] = rep.passed;
    j["cases_checked"] = rep.cases_checked;
    j["max_deviation"] = rep.max_deviation;
    json v = json::array();
    for (const auto& c : rep.violations) {
        v.push_back({{"config", c.config},
                     {"q", point_to_json(c.q)},
                     {"expected", c.expected},
                     {"fast", c.fast_scalar},
                     {"oracle", c.oracle_scalar}});
    }
    j["violations"] = v;
    return j;
}

json proposition_report_to_json(const PropositionReport& rep)
{
    json j;
    j["passed"] = rep.passed;
    j["entries_checked"] = rep.entries_checked;
    j["max_deviation"] = rep.max_deviation;
    j["unconstrained_max"] = rep.unconstrained_max;
    j["expected_coefficient"] = rep.expected_coefficient;
    j["predicted_upper"] = {rep.predicted_upper.real(), rep.predicted_upper.imag()};
    return j;
}

json sweep_report_to_json(const SweepReport& rep)
{
    json j;
    j["slope"] = rep.slope;
    j["c_estimate"] = rep.c_estimate;
    j["c_calibrated"] = rep.c_calibrated;
    json pts = json::array();
    for (const auto& p : rep.points)
        pts.push_back({{"N", p.N}, {"error", p.error}, {"M", p.m}});
    j["points"] = pts;
    return j;
}

std::string sweep_report_to_csv(const SweepReport& rep)
{
    std::ostringstream os;
    os << "N,error,M\n";
    for (const auto& p : rep.points) os << p.N << "," << p.error << "," << p.m << "\n";
    return os.str();
}

json shift_validation_to_json(const ShiftValidation& v)
{
    json j;
    j["ell"] = v.ell;
    j["all_ok"] = v.all_ok;
    j["bit_trace_ok"] = v.bit_trace_ok;
    j["max_dist"] = v.max_dist;
    json steps = json::array();
    for (const auto& s : v.steps) {
        json st;
        st["step"] = s.step;
        st["refs"] = {s.refs[0], s.refs[1], s.refs[2]};
        st["flip"] = s.flip;
        st["flip_up"] = s.flip_up;
        st["four_point_ok"] = s.four_point_ok;
        if (!s.four_point_why.empty()) st["why"] = s.four_point_why;
        st["dists_match_table"] = s.dists_match_table;
        st["max_dist"] = s.max_dist;
        st["refs_sum"] = s.refs_sum;
        st["triple_flip"] = s.triple_flip;
        st["window_certified"] = s.window_certified;
        steps.push_back(st);
    }
    j["steps"] = steps;
    return j;
}

json refocus_plan_to_json(const RefocusPlan& plan)
{
    json j;
    j["p"] = point_to_json(plan.p);
    j["q"] = point_to_json(plan.q);
    j["T"] = plan.T_requested;
    j["segments"] = plan.segment_count;
    j["flips"] = plan.flip_count;
    j["rational_ledger"] = plan.rational_ledger;
    j["couplings_cancel"] = plan.couplings_cancel;
    j["constant_phase"] = plan.constant_phase.str();
    j["summary"] = plan.ledger_summary;
    json sites = json::array();
    for (const auto& s : plan.flip_sites) sites.push_back(point_to_json(s));
    j["flip_sites"] = sites;
    json ops = json::array();
    for (const auto& op : plan.ops) {
        if (op.kind == RefocusOp::Kind::Segment)
            ops.push_back({{"segment_T", op.T}, {"fraction", op.frac.str()}});
        else
            ops.push_back({{"flip_site", op.site}});
    }
    j["ops"] = ops;
    return j;
}

json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InvalidArgument("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

} // namespace ggc
