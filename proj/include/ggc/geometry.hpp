#pragma once

// Lattice geometry: finite domains inside a group orbit, and the equivalence
// classes the group action induces on ordered pairs of positions.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ggc/util.hpp"

namespace ggc {

/// Lattice position with exact integer coordinates.
using Point = std::vector<std::int64_t>;

std::string point_str(const Point& p);
Point point_add(const Point& a, const Point& b);
Point point_sub(const Point& a, const Point& b);
Point point_scale(std::int64_t k, const Point& a);
bool lex_less(const Point& a, const Point& b);

struct PointHash {
    std::size_t operator()(const Point& p) const
    {
        std::size_t h = 1469598103934665603ULL;
        for (auto c : p) h = hash_combine(h, std::hash<std::int64_t>()(c));
        return h;
    }
};

enum class GroupKind {
    TranslationLattice, ///< shifts of Z^s, optionally modular per axis
    EuclideanIsometry,  ///< isometries of R^s restricted to Z^s points
};

/// Which group acts, and on what. For TranslationLattice, moduli[i] > 0 makes
/// axis i the cyclic group Z_m (m >= 2); moduli[i] == 0 leaves it infinite.
struct GroupModel {
    GroupKind kind = GroupKind::TranslationLattice;
    int dim = 1;
    std::vector<std::int64_t> moduli; // empty = all axes infinite

    static GroupModel translation(int dim, std::vector<std::int64_t> moduli = {});
    static GroupModel euclidean(int dim);

    bool modular() const;
    /// Componentwise reduction into canonical residues on modular axes.
    Point canonicalize(const Point& p) const;
};

/// Canonical label of a non-diagonal pair class. Translation classes carry the
/// reduced offset p-q; Euclidean classes carry the exact squared distance.
struct OrbitKey {
    bool is_offset = true;
    Point offset;              // translation models
    std::int64_t sqdist = 0;   // Euclidean models

    bool operator==(const OrbitKey& o) const;
    std::string str() const;
};

struct OrbitKeyHash {
    std::size_t operator()(const OrbitKey& k) const;
};

/// Finite set of distinct positions in canonical (lexicographic) order.
class Domain {
public:
    Domain() = default;
    Domain(const GroupModel& model, std::vector<Point> points);

    /// Axis-aligned box [lo, hi] (inclusive), canonicalized under the model.
    static Domain box(const GroupModel& model, const Point& lo, const Point& hi);
    /// Every residue of a fully modular translation model.
    static Domain full_modular(const GroupModel& model);

    std::size_t size() const { return points_.size(); }
    const std::vector<Point>& points() const { return points_; }
    const Point& point(std::size_t i) const { return points_[i]; }
    bool contains(const Point& p) const { return index_.count(p) != 0; }
    int index_of(const Point& p) const;

private:
    std::vector<Point> points_;
    std::unordered_map<Point, int, PointHash> index_;
};

/// Class of the ordered pair (p, q). Requires p != q.
OrbitKey class_of(const GroupModel& model, const Point& p, const Point& q);

/// All ordered pairs (p, q) in D x D belonging to the class, in canonical
/// order. May be empty.
std::vector<std::pair<Point, Point>> class_members(const GroupModel& model, const Domain& domain,
                                                   const OrbitKey& key);

/// All q in `support` with (p,q) or (q,p) in the class.
std::vector<Point> neighbors_in_class(const GroupModel& model, const Domain& domain,
                                      const OrbitKey& key, const Point& p,
                                      const std::vector<Point>& support);

/// Precomputed neighbor lookup used by the certification sweeps: for a fixed
/// class, lists every support point class-related to a query point.
class ClassAdjacency {
public:
    ClassAdjacency(const GroupModel& model, const Domain& domain, const OrbitKey& key,
                   const std::vector<Point>& support);

    /// Neighbors of p within the support set (canonical order).
    const std::vector<Point>& neighbors(const Point& p) const;

private:
    std::vector<std::vector<Point>> lists_;
    std::unordered_map<Point, int, PointHash> slot_;
    std::vector<Point> empty_;
};

} // namespace ggc
