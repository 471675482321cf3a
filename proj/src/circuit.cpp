#include "ggc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ggc {

namespace {

std::int64_t key_abs_offset(const OrbitKey& key)
{
    if (!key.is_offset) return 0;
    std::int64_t m = 0;
    for (auto c : key.offset) m = std::max(m, std::abs(c));
    return m;
}

void fold_offsets(const PulseSequence& seq, std::int64_t& max_off)
{
    std::function<void(const std::vector<SeqNode>&)> walk = [&](const std::vector<SeqNode>& ns) {
        for (const auto& n : ns) {
            if (n.is_leaf()) {
                if (n.pulse.kind == Pulse::Kind::TwoQubitPhase)
                    max_off = std::max(max_off, key_abs_offset(n.pulse.key));
            } else {
                walk(n.body);
            }
        }
    };
    walk(seq.nodes);
}

} // namespace

CircuitPlan compile_circuit(const Scheme& scheme, const std::vector<CircuitGate>& gates,
                            double epsilon, const BalanceFunction& W, const CircuitOptions& opts)
{
    if (!(epsilon > 0 && epsilon < 1))
        throw InvalidArgument("compile_circuit: epsilon must lie in (0,1)");
    CircuitPlan plan;
    plan.epsilon = epsilon;
    plan.per_gate_epsilon = gates.empty() ? epsilon : epsilon / double(gates.size());
    plan.fully_emitted = true;

    for (std::size_t gi = 0; gi < gates.size(); ++gi) {
        const auto& g = gates[gi];
        CircuitItem item;
        item.gate_index = int(gi);
        if (g.kind == CircuitGate::Kind::LocalUnitary) {
            if (g.q1 < 0 || std::size_t(g.q1) >= scheme.workspace.size())
                throw InvalidArgument("compile_circuit: logical qubit out of workspace");
            const Point& p = scheme.workspace[std::size_t(g.q1)];
            item.kind = CircuitItem::Kind::Gate;
            if (opts.emit) {
                try {
                    item.seq = compile_local_unitary(scheme, p, scheme.base, g.u2,
                                                     plan.per_gate_epsilon, W, opts.compile);
                    item.emitted = true;
                    fold_offsets(item.seq, plan.max_abs_offset);
                } catch (const CompileRefused& e) {
                    item.note = e.info.reason;
                    plan.fully_emitted = false;
                }
            } else {
                plan.fully_emitted = false;
            }
        } else {
            if (g.q1 < 0 || g.q2 < 0 || std::size_t(g.q1) >= scheme.workspace.size() ||
                std::size_t(g.q2) >= scheme.workspace.size() || g.q1 == g.q2)
                throw InvalidArgument("compile_circuit: bad pair gate qubits");
            item.kind = CircuitItem::Kind::Refocus;
            item.refocus = refocus_pair(scheme, scheme.workspace[std::size_t(g.q1)],
                                        scheme.workspace[std::size_t(g.q2)], g.T, W);
            plan.max_abs_offset = std::max(plan.max_abs_offset, key_abs_offset(item.refocus.key));
            item.emitted = item.refocus.flip_count == 0; // bare segments need no flips
            item.note = item.refocus.ledger_summary;
            if (!item.emitted) plan.fully_emitted = false;
        }
        plan.items.push_back(std::move(item));
    }
    return plan;
}

CircuitPlan compile_circuit_shiftable(const Domain& window, const std::vector<CircuitGate>& gates,
                                      double epsilon, const BalanceFunction& W,
                                      const CircuitOptions& opts)
{
    if (!(epsilon > 0 && epsilon < 1))
        throw InvalidArgument("compile_circuit: epsilon must lie in (0,1)");
    GroupModel model = GroupModel::translation(1);

    CircuitPlan plan;
    plan.epsilon = epsilon;
    plan.per_gate_epsilon = gates.empty() ? epsilon : epsilon / double(gates.size());
    plan.fully_emitted = !gates.empty() ? false : true; // chain gates need k=3 bases

    ShiftState state; // base starts at ell = 0

    auto scheme_at = [&](std::int64_t ell) {
        Scheme sc;
        sc.model = model;
        sc.domain = window;
        for (const auto& x : window.points())
            if (((x[0] % 4) + 4) % 4 == 0) sc.workspace.push_back(x);
        sc.base = {Point{4 * ell + 1}, Point{4 * ell + 3}, Point{4 * ell + 9}};
        for (const auto& r : sc.base)
            if (!window.contains(r))
                throw InvalidArgument("compile_circuit: base leaves the window at ell = " +
                                      std::to_string(ell));
        return sc;
    };

    for (std::size_t gi = 0; gi < gates.size(); ++gi) {
        const auto& g = gates[gi];
        // A base at ell serves positions 4*ell and 4*(ell+1).
        std::int64_t want_ell;
        if (g.kind == CircuitGate::Kind::LocalUnitary)
            want_ell = std::clamp<std::int64_t>(state.ell, g.q1 - 1, g.q1);
        else
            want_ell = std::clamp<std::int64_t>(state.ell, std::min(g.q1, g.q2) - 1,
                                                std::min(g.q1, g.q2));
        while (state.ell != want_ell) {
            CircuitItem mv;
            mv.kind = CircuitItem::Kind::Shift;
            mv.shift = shift_base(state, state.ell < want_ell ? +1 : -1, window);
            // Flip references sit within distance 22 of every flip target.
            for (const auto& f : mv.shift.flips)
                for (const auto& r : f.refs)
                    plan.max_abs_offset =
                        std::max<std::int64_t>(plan.max_abs_offset, std::llabs(f.site[0] - r[0]));
            mv.note = "base " + std::to_string(mv.shift.from_ell) + " -> " +
                      std::to_string(mv.shift.to_ell);
            plan.items.push_back(std::move(mv));
        }

        Scheme sc = scheme_at(state.ell);
        CircuitItem item;
        item.gate_index = int(gi);
        if (g.kind == CircuitGate::Kind::LocalUnitary) {
            item.kind = CircuitItem::Kind::Gate;
            const Point p{4 * std::int64_t(g.q1)};
            // Record the classes a compile would pulse; emission at chain
            // scale is refused by the budget guards, the plan stays valid.
            for (const auto& r : sc.base)
                plan.max_abs_offset =
                    std::max<std::int64_t>(plan.max_abs_offset, std::llabs(p[0] - r[0]));
            if (opts.emit) {
                try {
                    item.seq = compile_local_unitary(sc, p, sc.base, g.u2, plan.per_gate_epsilon,
                                                     W, opts.compile);
                    item.emitted = true;
                    fold_offsets(item.seq, plan.max_abs_offset);
                } catch (const CompileRefused& e) {
                    item.note = e.info.reason;
                }
            }
        } else {
            item.kind = CircuitItem::Kind::Refocus;
            const Point p{4 * std::int64_t(g.q1)}, q{4 * std::int64_t(g.q2)};
            item.refocus = refocus_pair(sc, p, q, g.T, W);
            plan.max_abs_offset = std::max(plan.max_abs_offset, key_abs_offset(item.refocus.key));
            item.note = item.refocus.ledger_summary;
        }
        plan.items.push_back(std::move(item));
    }
    return plan;
}

} // namespace ggc
