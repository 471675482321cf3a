#include "ggc/shift.hpp"

#include <algorithm>
#include <set>

namespace ggc {

const std::array<ShiftStepSpec, 12>& shift_schedule()
{
    // Steps 7-12 repeat steps 1-6 with every position moved by +2.
    static const std::array<ShiftStepSpec, 12> table = [] {
        std::array<ShiftStepSpec, 12> t{};
        t[0] = {{1, 3, 9}, 23, true, {2, 6, 8}, {22, 20, 14}};
        t[1] = {{3, 9, 23}, 1, false, {6, 14, 20}, {2, 8, 22}};
        t[2] = {{3, 9, 23}, 5, true, {6, 14, 20}, {2, 4, 18}};
        t[3] = {{3, 5, 23}, 9, false, {2, 18, 20}, {6, 4, 14}};
        t[4] = {{3, 5, 23}, 11, true, {2, 18, 20}, {8, 6, 12}};
        t[5] = {{3, 5, 11}, 23, false, {2, 6, 8}, {20, 18, 12}};
        for (int i = 0; i < 6; ++i) {
            t[i + 6] = t[i];
            for (auto& r : t[i + 6].refs) r += 2;
            t[i + 6].flip += 2;
        }
        return t;
    }();
    return table;
}

ShiftValidation validate_shift(std::int64_t ell, bool cross_validate)
{
    GroupModel model = GroupModel::translation(1);
    ShiftValidation v;
    v.ell = ell;
    v.all_ok = true;

    // Bit-level trace over the touched positions, starting from R_ell.
    std::set<std::int64_t> ones = {4 * ell + 1, 4 * ell + 3, 4 * ell + 9};

    for (int s = 0; s < 12; ++s) {
        const auto& spec = shift_schedule()[s];
        ShiftStepCheck chk;
        chk.step = s + 1;
        for (int i = 0; i < 3; ++i) chk.refs[i] = 4 * ell + spec.refs[i];
        chk.flip = 4 * ell + spec.flip;
        chk.flip_up = spec.flip_up;

        chk.four_point_ok = check_four_point(model, Point{chk.refs[0]}, Point{chk.refs[1]},
                                             Point{chk.refs[2]}, Point{chk.flip},
                                             &chk.four_point_why);

        // Distances must reproduce the schedule table exactly.
        std::multiset<std::int64_t> want_ref(spec.ref_dists.begin(), spec.ref_dists.end());
        std::multiset<std::int64_t> want_flip(spec.flip_dists.begin(), spec.flip_dists.end());
        std::multiset<std::int64_t> got_ref, got_flip;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) got_ref.insert(std::abs(chk.refs[i] - chk.refs[j]));
        for (int i = 0; i < 3; ++i) got_flip.insert(std::abs(chk.flip - chk.refs[i]));
        chk.dists_match_table = (got_ref == want_ref) && (got_flip == want_flip);
        chk.max_dist = std::max(*got_ref.rbegin(), *got_flip.rbegin());
        v.max_dist = std::max(v.max_dist, chk.max_dist);

        chk.refs_sum = chk.refs[0] + chk.refs[1] + chk.refs[2];
        chk.triple_flip = 3 * chk.flip;

        // The schedule only flips a qubit whose references currently read one
        // and whose own bit matches the announced direction.
        bool refs_lit = ones.count(chk.refs[0]) && ones.count(chk.refs[1]) &&
                        ones.count(chk.refs[2]);
        bool state_matches = chk.flip_up ? !ones.count(chk.flip) : ones.count(chk.flip) > 0;
        if (!refs_lit || !state_matches) v.all_ok = false;
        if (chk.flip_up)
            ones.insert(chk.flip);
        else
            ones.erase(chk.flip);

        if (cross_validate) {
            // Exhaustive strict check of the flip target on a window: the
            // workspace is the even-mod-4 sublattice plus the flip site.
            std::int64_t lo = 4 * ell - 11, hi = 4 * ell + 39;
            Domain window = Domain::box(model, Point{lo}, Point{hi});
            Scheme sc;
            sc.model = model;
            sc.domain = window;
            for (std::int64_t x = lo; x <= hi; ++x)
                if (((x % 4) + 4) % 4 == 0) sc.workspace.push_back(Point{x});
            sc.workspace.push_back(Point{chk.flip});
            std::sort(sc.workspace.begin(), sc.workspace.end(), lex_less);
            for (int i = 0; i < 3; ++i) sc.base.push_back(Point{chk.refs[i]});
            chk.window_certified =
                is_point_strictly_addressable(sc, Point{chk.flip}, sc.base).ok();
        }

        if (!chk.four_point_ok || !chk.dists_match_table ||
            (cross_validate && !chk.window_certified))
            v.all_ok = false;
        v.steps.push_back(chk);
    }

    // After twelve steps the ones must read R_{ell+1} exactly.
    std::set<std::int64_t> want = {4 * (ell + 1) + 1, 4 * (ell + 1) + 3, 4 * (ell + 1) + 9};
    v.bit_trace_ok = (ones == want);
    if (!v.bit_trace_ok) v.all_ok = false;
    if (v.max_dist != 22) v.all_ok = false;
    return v;
}

ShiftPlan shift_base(ShiftState& state, int direction, const Domain& window)
{
    if (direction != 1 && direction != -1)
        throw InvalidArgument("shift_base: direction must be +1 or -1");

    // Moving down from ell is the inverse of the (ell-1) -> ell schedule.
    std::int64_t ell = direction > 0 ? state.ell : state.ell - 1;

    std::int64_t lo = 4 * ell + 1, hi = 4 * ell + 27;
    if (!window.contains(Point{lo}) || !window.contains(Point{hi}))
        throw InvalidArgument("shift_base: window must cover positions " + std::to_string(lo) +
                              " .. " + std::to_string(hi));

    ShiftPlan plan;
    plan.from_ell = state.ell;
    plan.to_ell = state.ell + direction;
    plan.validation = validate_shift(ell, false);
    if (!plan.validation.all_ok)
        throw InvalidArgument("shift_base: schedule validation failed at ell = " +
                              std::to_string(ell));

    for (int s = 0; s < 12; ++s) {
        const auto& chk = plan.validation.steps[std::size_t(s)];
        FlipRequest fr;
        fr.site = Point{chk.flip};
        for (auto r : chk.refs) fr.refs.push_back(Point{r});
        fr.flip_up = chk.flip_up;
        plan.flips.push_back(fr);
    }
    if (direction < 0) {
        std::reverse(plan.flips.begin(), plan.flips.end());
        for (auto& f : plan.flips) f.flip_up = !f.flip_up;
    }
    state.ell = plan.to_ell;
    return plan;
}

} // namespace ggc
