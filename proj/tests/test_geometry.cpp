#include <doctest.h>

#include <set>

#include "ggc/geometry.hpp"

using namespace ggc;

TEST_CASE("translation class keys are reduced offsets")
{
    GroupModel z = GroupModel::translation(1);
    CHECK(class_of(z, Point{5}, Point{1}).offset == Point{4});
    CHECK(class_of(z, Point{1}, Point{5}).offset == Point{-4});

    GroupModel z14 = GroupModel::translation(1, {14});
    CHECK(class_of(z14, Point{1}, Point{12}).offset == Point{3}); // -11 mod 14
    CHECK(class_of(z14, Point{12}, Point{1}).offset == Point{11});
}

TEST_CASE("euclidean keys are exact squared distances")
{
    GroupModel e2 = GroupModel::euclidean(2);
    CHECK(class_of(e2, Point{0, 0}, Point{3, 4}).sqdist == 25);
    CHECK(class_of(e2, Point{3, 4}, Point{0, 0}).sqdist == 25); // symmetric
}

TEST_CASE("diagonal pairs are rejected")
{
    GroupModel z = GroupModel::translation(1);
    CHECK_THROWS_AS(class_of(z, Point{3}, Point{3}), InvalidArgument);
    GroupModel z14 = GroupModel::translation(1, {14});
    CHECK_THROWS_AS(class_of(z14, Point{15}, Point{1}), InvalidArgument); // equal residues
}

TEST_CASE("class members on a line window")
{
    GroupModel z = GroupModel::translation(1);
    Domain d = Domain::box(z, Point{0}, Point{5});
    OrbitKey k4{true, Point{4}, 0};
    auto members = class_members(z, d, k4);
    REQUIRE(members.size() == 2);
    CHECK(members[0] == std::make_pair(Point{4}, Point{0}));
    CHECK(members[1] == std::make_pair(Point{5}, Point{1}));

    OrbitKey k7{true, Point{7}, 0};
    CHECK(class_members(z, d, k7).empty());
}

TEST_CASE("class members in the euclidean unit square")
{
    GroupModel e2 = GroupModel::euclidean(2);
    Domain d = Domain::box(e2, Point{0, 0}, Point{1, 1});
    OrbitKey k2{false, {}, 2};
    auto members = class_members(e2, d, k2);
    REQUIRE(members.size() == 4);
    std::set<std::pair<Point, Point>> got(members.begin(), members.end());
    std::set<std::pair<Point, Point>> want = {
        {{0, 0}, {1, 1}}, {{1, 1}, {0, 0}}, {{0, 1}, {1, 0}}, {{1, 0}, {0, 1}}};
    CHECK(got == want);
}

TEST_CASE("neighbors_in_class matches the two-sided membership test")
{
    GroupModel z = GroupModel::translation(1);
    Domain d = Domain::box(z, Point{0}, Point{12});
    OrbitKey k4{true, Point{4}, 0};
    CHECK(neighbors_in_class(z, d, k4, Point{4}, {Point{0}, Point{8}}) ==
          std::vector<Point>{Point{0}, Point{8}});
    CHECK(neighbors_in_class(z, d, k4, Point{4}, {Point{1}}).empty());

    GroupModel e2 = GroupModel::euclidean(2);
    Domain sq = Domain::box(e2, Point{0, 0}, Point{5, 5});
    OrbitKey k25{false, {}, 25};
    auto nbrs = neighbors_in_class(e2, sq, k25, Point{0, 0},
                                   {Point{3, 4}, Point{5, 0}, Point{4, 4}});
    CHECK(nbrs == std::vector<Point>{Point{3, 4}, Point{5, 0}});
}

TEST_CASE("translation classes partition the off-diagonal pairs")
{
    GroupModel z = GroupModel::translation(1);
    Domain d = Domain::box(z, Point{-4}, Point{4});
    std::size_t total = 0;
    std::set<std::pair<Point, Point>> seen;
    for (std::int64_t g = -8; g <= 8; ++g) {
        if (g == 0) continue;
        for (const auto& pr : class_members(z, d, OrbitKey{true, Point{g}, 0})) {
            CHECK(seen.insert(pr).second);
            ++total;
        }
    }
    CHECK(total == d.size() * (d.size() - 1));
}

TEST_CASE("equivalence soundness by exhaustive pairs")
{
    GroupModel z14 = GroupModel::translation(1, {14});
    Domain d = Domain::full_modular(z14);
    for (const auto& p : d.points())
        for (const auto& q : d.points()) {
            if (p == q) continue;
            for (const auto& r : d.points())
                for (const auto& t : d.points()) {
                    if (r == t) continue;
                    bool same_key = class_of(z14, p, q) == class_of(z14, r, t);
                    bool same_offset =
                        z14.canonicalize(point_sub(p, q)) == z14.canonicalize(point_sub(r, t));
                    CHECK(same_key == same_offset);
                }
        }
}

TEST_CASE("euclidean symmetry and translation antisymmetry")
{
    GroupModel e2 = GroupModel::euclidean(2);
    Domain sq = Domain::box(e2, Point{0, 0}, Point{3, 3});
    for (const auto& p : sq.points())
        for (const auto& q : sq.points()) {
            if (p == q) continue;
            CHECK(class_of(e2, p, q) == class_of(e2, q, p));
        }

    GroupModel z = GroupModel::translation(1);
    for (std::int64_t a = -5; a <= 5; ++a)
        for (std::int64_t b = -5; b <= 5; ++b) {
            if (a == b) continue;
            OrbitKey fwd = class_of(z, Point{a}, Point{b});
            OrbitKey bwd = class_of(z, Point{b}, Point{a});
            CHECK(bwd.offset == point_scale(-1, fwd.offset));
        }
}

TEST_CASE("domain ordering is canonical and stable")
{
    GroupModel e2 = GroupModel::euclidean(2);
    Domain a(e2, {Point{1, 0}, Point{0, 1}, Point{0, 0}});
    Domain b(e2, {Point{0, 0}, Point{0, 1}, Point{1, 0}});
    CHECK(a.points() == b.points());
    CHECK(a.index_of(Point{0, 1}) == 1);
}
