#include <doctest.h>

#include <numbers>
#include <set>

#include "ggc/circuit.hpp"
#include "ggc/io.hpp"
#include "ggc/refocus.hpp"
#include "ggc/shift.hpp"
#include "ggc/simulate.hpp"

using namespace ggc;

namespace {

Scheme three_site_chain(std::int64_t hi = 9)
{
    Scheme sc;
    sc.model = GroupModel::translation(1);
    sc.domain = Domain::box(sc.model, Point{0}, Point{hi});
    sc.workspace = {Point{0}, Point{4}, Point{8}};
    sc.base = {Point{1}, Point{3}, Point{9}};
    return sc;
}

} // namespace

TEST_CASE("lone coupled pair needs a single entangling segment")
{
    // Offset 8 couples only {0, 8} among the workspace sites.
    Scheme sc = three_site_chain();
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    RefocusPlan plan = refocus_pair(sc, Point{0}, Point{8}, 1.1, W);
    CHECK(plan.segment_count == 1);
    CHECK(plan.flip_count == 0);
    CHECK(plan.rational_ledger);
    CHECK(plan.couplings_cancel);
    CHECK(refocus_phase_deviation(sc, plan, W) < 1e-12);
}

TEST_CASE("three collinear sites refocus exactly")
{
    // Offset 4 couples {0,4} and {4,8}; isolating (0,4) flips the third site.
    Scheme sc = three_site_chain();
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    double T = std::numbers::pi / 3.0;
    RefocusPlan plan = refocus_pair(sc, Point{0}, Point{4}, T, W);
    CHECK(plan.flip_sites.size() == 3);
    CHECK(plan.segment_count == 8);
    CHECK(plan.rational_ledger);
    CHECK(plan.couplings_cancel);
    CHECK(plan.ledger_summary.find("exact") == 0);
    CHECK(refocus_phase_deviation(sc, plan, W) < 1e-12);
}

TEST_CASE("four coupled sites refocus exactly")
{
    Scheme sc;
    sc.model = GroupModel::translation(1);
    sc.domain = Domain::box(sc.model, Point{0}, Point{13});
    sc.workspace = {Point{0}, Point{4}, Point{8}, Point{12}};
    sc.base = {Point{1}, Point{3}, Point{9}};
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    RefocusPlan plan = refocus_pair(sc, Point{4}, Point{8}, 0.9, W);
    CHECK(plan.flip_sites.size() == 4);
    CHECK(plan.segment_count == 16);
    CHECK(plan.couplings_cancel);
    CHECK(refocus_phase_deviation(sc, plan, W) < 1e-12);
}

TEST_CASE("refocusing carries non-integer weights through the float ledger")
{
    Scheme sc = three_site_chain();
    BalanceFunction W = BalanceFunction::uniform_random(sc.domain.size(), 1.0, 2.0, 77);
    RefocusPlan plan = refocus_pair(sc, Point{0}, Point{4}, 0.8, W);
    CHECK_FALSE(plan.rational_ledger);
    CHECK(plan.couplings_cancel); // still exact up to floating round-off
    CHECK(refocus_phase_deviation(sc, plan, W) < 1e-9);
}

TEST_CASE("refocusing requires the no-shared-distance condition")
{
    Scheme sc;
    sc.model = GroupModel::translation(1);
    sc.domain = Domain::box(sc.model, Point{0}, Point{16});
    sc.workspace = {Point{0}, Point{4}, Point{8}};
    sc.base = {Point{3}, Point{9}, Point{12}};
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    CHECK_THROWS_AS(refocus_pair(sc, Point{0}, Point{4}, 1.0, W), InvalidArgument);
}

TEST_CASE("gray walk returns every flip site to its rest state")
{
    Scheme sc = three_site_chain();
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    RefocusPlan plan = refocus_pair(sc, Point{0}, Point{4}, 1.0, W);
    std::uint64_t mask = 0;
    for (const auto& op : plan.ops)
        if (op.kind == RefocusOp::Kind::Flip) mask ^= 1ULL << op.site;
    CHECK(mask == 0);
}

TEST_CASE("shift schedule validates at every offset")
{
    for (std::int64_t ell = -3; ell <= 3; ++ell) {
        ShiftValidation v = validate_shift(ell, /*cross_validate=*/true);
        CHECK(v.all_ok);
        CHECK(v.bit_trace_ok);
        CHECK(v.max_dist == 22);
        for (const auto& s : v.steps) {
            CHECK(s.four_point_ok);
            CHECK(s.dists_match_table);
            CHECK(s.window_certified);
            CHECK(s.refs_sum != s.triple_flip);
        }
    }
}

TEST_CASE("shift schedule distance table matches the printed sets")
{
    const auto& table = shift_schedule();
    CHECK(table[0].refs == std::array<std::int64_t, 3>{1, 3, 9});
    CHECK(table[0].flip == 23);
    CHECK(table[0].ref_dists == std::array<std::int64_t, 3>{2, 6, 8});
    CHECK(table[0].flip_dists == std::array<std::int64_t, 3>{22, 20, 14});
    CHECK(table[3].refs == std::array<std::int64_t, 3>{3, 5, 23});
    CHECK(table[3].flip == 9);
    CHECK(table[3].ref_dists == std::array<std::int64_t, 3>{2, 18, 20});
    CHECK(table[3].flip_dists == std::array<std::int64_t, 3>{6, 4, 14});
    for (int s = 0; s < 6; ++s) {
        CHECK(table[s + 6].flip == table[s].flip + 2);
        CHECK(table[s + 6].ref_dists == table[s].ref_dists);
        CHECK(table[s + 6].flip_dists == table[s].flip_dists);
    }
}

TEST_CASE("tampered schedules fail validation")
{
    GroupModel z = GroupModel::translation(1);
    std::string why;
    // refs sum 1+3+5 = 9 = 3*3: the triple-sum hypothesis breaks.
    CHECK_FALSE(check_four_point(z, Point{1}, Point{3}, Point{5}, Point{3}, &why));
}

TEST_CASE("shift_base walks the state and flips in order")
{
    GroupModel z = GroupModel::translation(1);
    Domain window = Domain::box(z, Point{-11}, Point{39});
    ShiftState state;
    ShiftPlan up = shift_base(state, +1, window);
    CHECK(state.ell == 1);
    CHECK(up.flips.size() == 12);
    CHECK(up.flips[0].site == Point{23});
    CHECK(up.flips[0].flip_up);
    CHECK(up.flips[11].site == Point{25});
    CHECK_FALSE(up.flips[11].flip_up);

    ShiftPlan down = shift_base(state, -1, window);
    CHECK(state.ell == 0);
    // The inverse walk undoes the last flip first.
    CHECK(down.flips[0].site == Point{25});
    CHECK(down.flips[0].flip_up);

    ShiftState far{9};
    CHECK_THROWS_AS(shift_base(far, +1, window), InvalidArgument);
}

TEST_CASE("fixed-base circuit compiles gate lists end to end")
{
    Scheme sc = make_builtin_scheme("mini-k2");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    CircuitOptions opts;
    opts.compile.c = 0.5;
    opts.compile.margin = 2.0;
    opts.compile.structured = true;

    CHECK(compile_circuit(sc, {}, 0.3, W, opts).items.empty());

    std::vector<CircuitGate> gates(2);
    gates[0].kind = CircuitGate::Kind::LocalUnitary;
    gates[0].q1 = 0;
    gates[0].u2 = rotation_2x2(cxd(0, -0.3));
    gates[1] = gates[0];
    CircuitPlan plan = compile_circuit(sc, gates, 0.3, W, opts);
    CHECK(plan.items.size() == 2);
    CHECK(plan.fully_emitted);
    CHECK(plan.per_gate_epsilon == doctest::Approx(0.15));

    PulseSequence both;
    both.target.kind = TargetDescriptor::Kind::LocalUnitary;
    both.target.p = Point{0};
    both.target.u2 = rotation_2x2(cxd(0, -0.3)) * rotation_2x2(cxd(0, -0.3));
    both.target.epsilon = 0.3;
    for (const auto& item : plan.items)
        for (const auto& node : item.seq.nodes) both.nodes.push_back(node);
    SimReport rep = measure_sequence(sc, W, both);
    CHECK(rep.distance <= 0.3);
}

TEST_CASE("circuit pair gates become refocus plans")
{
    Scheme sc = three_site_chain();
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    std::vector<CircuitGate> gates(1);
    gates[0].kind = CircuitGate::Kind::PairPhase;
    gates[0].q1 = 0;
    gates[0].q2 = 1; // workspace points 0 and 4
    gates[0].T = 0.5;
    CircuitOptions opts;
    CircuitPlan plan = compile_circuit(sc, gates, 0.3, W, opts);
    REQUIRE(plan.items.size() == 1);
    CHECK(plan.items[0].kind == CircuitItem::Kind::Refocus);
    CHECK(plan.items[0].refocus.couplings_cancel);
    CHECK(plan.max_abs_offset == 4);
}

TEST_CASE("shiftable circuit interleaves base moves and respects the bounds")
{
    GroupModel z = GroupModel::translation(1);
    Domain window = Domain::box(z, Point{-11}, Point{43});
    std::vector<CircuitGate> gates(2);
    gates[0].kind = CircuitGate::Kind::LocalUnitary;
    gates[0].q1 = 0;
    gates[0].u2 = rotation_2x2(cxd(0, -0.3));
    gates[1].kind = CircuitGate::Kind::LocalUnitary;
    gates[1].q1 = 2; // position 8: the base must move
    gates[1].u2 = rotation_2x2(cxd(0, -0.3));

    CircuitOptions opts;
    opts.emit = false; // plan-level: chain gates cannot emit at desk scale
    BalanceFunction W = BalanceFunction::constant(window.size());
    CircuitPlan plan = compile_circuit_shiftable(window, gates, 0.4, W, opts);

    std::size_t shifts = 0;
    for (const auto& item : plan.items)
        if (item.kind == CircuitItem::Kind::Shift) ++shifts;
    CHECK(shifts == 1); // ell = 0 serves positions 0 and 4; one move reaches 8
    CHECK(plan.max_abs_offset <= 22);
    CHECK(plan.max_abs_offset >= 9);
    CHECK_FALSE(plan.fully_emitted);
}

TEST_CASE("single-gate shiftable circuit keeps pulse classes within nine")
{
    GroupModel z = GroupModel::translation(1);
    Domain window = Domain::box(z, Point{-11}, Point{39});
    std::vector<CircuitGate> gates(1);
    gates[0].kind = CircuitGate::Kind::LocalUnitary;
    gates[0].q1 = 0;
    gates[0].u2 = rotation_2x2(cxd(0, -0.3));
    CircuitOptions opts;
    opts.emit = false;
    BalanceFunction W = BalanceFunction::constant(window.size());
    CircuitPlan plan = compile_circuit_shiftable(window, gates, 0.4, W, opts);
    CHECK(plan.max_abs_offset <= 9);
    CHECK(plan.items.size() == 1); // no shifts
}
