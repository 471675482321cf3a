#pragma once

// Shiftable base on the chain: the twelve-step flip schedule relocating the
// reference pattern R_ell = {4l+1, 4l+3, 4l+9} to R_{l+1}, every step
// validated against the four-point flip rule and the distance-22 bound.

#include <array>
#include <cstdint>

#include "ggc/compiler.hpp"

namespace ggc {

/// One schedule entry at base offset l = 0; general l adds 4l to every value.
struct ShiftStepSpec {
    std::array<std::int64_t, 3> refs;
    std::int64_t flip;
    bool flip_up; // false: 1 -> 0
    std::array<std::int64_t, 3> ref_dists;  // |r_i - r_j| among the refs
    std::array<std::int64_t, 3> flip_dists; // |r4 - r_i|
};

const std::array<ShiftStepSpec, 12>& shift_schedule();

struct ShiftStepCheck {
    int step = 0;
    std::array<std::int64_t, 3> refs{};
    std::int64_t flip = 0;
    bool flip_up = false;
    bool four_point_ok = false;
    std::string four_point_why;
    bool dists_match_table = false;
    std::int64_t max_dist = 0;
    std::int64_t refs_sum = 0;
    std::int64_t triple_flip = 0; // 3 r4
    bool window_certified = false; // exhaustive cross-validation
};

struct ShiftValidation {
    std::int64_t ell = 0;
    std::vector<ShiftStepCheck> steps;
    bool bit_trace_ok = false;
    std::int64_t max_dist = 0;
    bool all_ok = false;
};

/// Validate the full 12-step schedule at base offset ell. With
/// `cross_validate` the four-point conclusion is additionally certified by
/// the exhaustive checker on a finite window around the touched positions.
ShiftValidation validate_shift(std::int64_t ell, bool cross_validate);

struct ShiftState {
    std::int64_t ell = 0;
};

/// A flip request the compiler resolves into pulses: invert the qubit at
/// `site` using the three references as the temporary base.
struct FlipRequest {
    Point site;
    std::vector<Point> refs;
    bool flip_up = false;
};

struct ShiftPlan {
    std::int64_t from_ell = 0, to_ell = 0;
    ShiftValidation validation;
    std::vector<FlipRequest> flips; // 12, in execution order
};

/// Advance the base one position in either direction. The window must cover
/// every position the schedule touches. Throws on validation failure.
ShiftPlan shift_base(ShiftState& state, int direction, const Domain& window);

} // namespace ggc
