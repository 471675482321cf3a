#pragma once

// Workspace-base schemes and their certification: k-addressability, strict
// addressability, the no-shared-distance condition for entangling pulses, and
// the explicit scheme constructions (modular, lifted, congruence-filtered,
// randomized Euclidean search).

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ggc/geometry.hpp"

namespace ggc {

/// Disjoint workspace P and ordered base R inside a finite domain.
struct Scheme {
    GroupModel model;
    Domain domain;
    std::vector<Point> workspace; // canonical order
    std::vector<Point> base;      // order is part of the scheme identity

    void validate() const;
    bool in_workspace(const Point& p) const;
    bool in_base(const Point& p) const;
    /// P union R in canonical order.
    std::vector<Point> support() const;
};

/// Outcome of an exhaustive addressability sweep. A failure certificate stores
/// a replayable counterexample tuple (p', r_1'..r_k').
struct AddressCertificate {
    enum class Kind { Addressable, Strict, Failure } kind = Kind::Failure;
    Point p;                         // workspace point checked (empty for whole-scheme)
    std::vector<Point> refs;         // references used
    std::optional<Point> bad_p;      // counterexample p'
    std::vector<Point> bad_refs;     // counterexample r_i'
    std::size_t tuples_checked = 0;
    bool condition5_checked = false;
    bool condition5_holds = false;
    std::vector<Point> condition5_witness; // {p,q,p',r} when violated

    bool ok() const { return kind != Kind::Failure; }
    std::string describe() const;
};

/// Does the counterexample stored in `cert` really satisfy every class
/// condition while violating the conclusion? Used to replay certificates.
bool replay_counterexample(const Scheme& scheme, const Point& p, const std::vector<Point>& refs,
                           const AddressCertificate& cert, bool strict);

/// Exhaustive test of "p is addressable by refs": for every p' in D, whenever
/// every S_i(p') is nonempty, p' = p and S_i(p') is contained in R.
AddressCertificate is_addressable(const Scheme& scheme, const Point& p,
                                  const std::vector<Point>& refs);

/// Strict variant for a single point: S_i(p') must equal {r_i} exactly.
AddressCertificate is_point_strictly_addressable(const Scheme& scheme, const Point& p,
                                                 const std::vector<Point>& refs);

/// Whole-scheme strict addressability (every p in P against the full ordered
/// base). Also runs the independent no-shared-distance check, which strictness
/// is expected to imply.
AddressCertificate is_strictly_addressable(const Scheme& scheme);

/// The no-shared-distance condition: no class of a workspace pair may coincide
/// with the class of any (workspace, base) pair.
bool check_condition5(const Scheme& scheme, std::vector<Point>* witness = nullptr);

/// Test oracle: the naive |D| * |P u R|^k tuple enumeration. Small windows only.
AddressCertificate is_addressable_naive(const Scheme& scheme, const Point& p,
                                        const std::vector<Point>& refs, bool strict);

/// Surjective homomorphism descriptors used by the lifting constructions.
struct PhiDescriptor {
    enum class Kind {
        ModReduce,  ///< Z -> Z_m on axis 0 (1-D models)
        CoordProj,  ///< Z^s -> Z, keep one coordinate
    } kind = Kind::ModReduce;
    std::int64_t modulus = 0; // ModReduce
    int axis = 0;             // CoordProj

    std::int64_t apply_mod(const Point& g) const;    // value in Z_m
    std::int64_t apply_coord(const Point& g) const;  // value in Z
};

struct LiftResult {
    Scheme scheme;
    AddressCertificate certificate;
};

/// Lift a strictly addressable base scheme through phi onto a window of G.
/// `preimages` picks one preimage per base reference; a lift is refused unless
/// 2 r_i != 2 r_j for some pair.
LiftResult lift_scheme(const PhiDescriptor& phi, const Scheme& base_scheme,
                       const std::vector<Point>& preimages, const GroupModel& target_model,
                       const Domain& window);

/// Construction from the mod-4 classification: workspace = phi^{-1}(0) minus
/// the points p with 2p = r_i + r_j, base = (r1, r2, r3) with phi(R) = {1, 3}
/// and pairwise-distinct ordered differences. Certified on the window.
LiftResult build_z4_scheme(const GroupModel& model, const Domain& window, const Point& r1,
                           const Point& r2, const Point& r3);

/// Hypotheses of the four-point flip rule: all four in phi^{-1}{1,3},
/// phi({r1,r2,r3}) = {1,3}, 3 r4 != r1+r2+r3, and all ordered differences
/// among the four pairwise distinct.
bool check_four_point(const GroupModel& model, const Point& r1, const Point& r2, const Point& r3,
                      const Point& r4, std::string* why = nullptr);

struct EuclideanSearchResult {
    bool found = false;
    Scheme scheme;
    AddressCertificate certificate;
    std::size_t trials_used = 0;
    double workspace_density = 0.0; // |P| / |8Z^s points in window|
};

/// Randomized search for a strictly addressable scheme under the Euclidean
/// model on Z^s (s >= 2): base points on the shifted sublattices
/// 4Z^s+(1,0,..), with r1 on 8Z^s+(1,0,..) and r2 on 8Z^s+(5,0,..), workspace
/// pruned from 8Z^s. Certification is exhaustive on the window; among
/// certified candidates the largest workspace wins, ties broken by
/// lexicographically smallest base.
EuclideanSearchResult search_euclidean_scheme(int s, const Domain& window, std::size_t trials,
                                              std::uint64_t seed);

} // namespace ggc
