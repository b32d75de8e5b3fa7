#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fillab/complex.hpp"
#include "fillab/models.hpp"

using namespace fillab;

namespace {

std::vector<Simplex> octahedron_triangles() {
    // antipodal pairs (0,1), (2,3), (4,5)
    return {{0, 2, 4}, {0, 2, 5}, {0, 3, 4}, {0, 3, 5},
            {1, 2, 4}, {1, 2, 5}, {1, 3, 4}, {1, 3, 5}};
}

}  // namespace

TEST_CASE("single triangle") {
    auto X = build_complex({{0, 1, 2}});
    CHECK(X.dimension() == 2);
    CHECK(X.chamber_count() == 1);
    CHECK(X.vertex_count() == 3);
    CHECK(X.edge_count() == 3);
    CHECK(X.has_simplex({0, 1}));
    CHECK(X.has_simplex({0, 1, 2}));
    CHECK_FALSE(X.has_simplex({0, 3}));
}

TEST_CASE("octahedron counts and adjacency") {
    auto X = build_complex(octahedron_triangles());
    CHECK(X.chamber_count() == 8);
    CHECK(X.edge_count() == 12);
    CHECK(X.vertex_count() == 6);
    for (ChamberId c = 0; c < 8; ++c) CHECK(X.adjacent_chambers(c).size() == 3);
}

TEST_CASE("purity violation rejected") {
    CHECK_THROWS_AS(build_complex({{0, 1, 2}, {2, 3}}), NonPureComplex);
}

TEST_CASE("dangling vertex rejected") {
    CHECK_THROWS_AS(build_complex({{0, 1, 3}}), DanglingVertex);
}

TEST_CASE("octahedron distances") {
    auto X = build_complex(octahedron_triangles());
    CHECK(skeleton_distance(X, 0, 1) == 2);  // antipodal
    CHECK(skeleton_distance(X, 2, 3) == 2);
    CHECK(skeleton_distance(X, 0, 2) == 1);
    CHECK(skeleton_distance(X, 4, 4) == 0);
}

TEST_CASE("grid diagonal distance") {
    Model m = generate({.kind = ModelKind::grid2, .size = 8, .margin = 0});
    CHECK(skeleton_distance(*m.X, m.vertex_at(0, 0), m.vertex_at(8, 8)) == 8);
    CHECK(skeleton_distance(*m.X, m.vertex_at(0, 8), m.vertex_at(8, 0)) == 16);
}

TEST_CASE("gallery component") {
    auto X = build_complex(octahedron_triangles());
    ChamberSet all = ChamberSet::all(8);
    CHECK(gallery_component(X, 0, all).count() == 8);

    ChamberSet just_seed(8);
    just_seed.set(3);
    CHECK(gallery_component(X, 3, just_seed).count() == 1);

    // two non-adjacent chambers
    ChamberSet two(8);
    two.set(0);
    // find a chamber not adjacent to 0
    ChamberId far = -1;
    for (ChamberId c = 1; c < 8; ++c) {
        const auto& nb = X.adjacent_chambers(0);
        if (std::find(nb.begin(), nb.end(), c) == nb.end()) {
            far = c;
            break;
        }
    }
    REQUIRE(far >= 0);
    two.set(far);
    CHECK(gallery_component(X, 0, two).count() == 1);

    ChamberSet empty(8);
    CHECK_THROWS_AS(gallery_component(X, 0, empty), SeedNotAllowed);
}

TEST_CASE("metric ball") {
    Model m = generate({.kind = ModelKind::grid2, .size = 8, .margin = 0});
    VertexId c = m.vertex_at(4, 4);
    CHECK(metric_ball(*m.X, c, 0) == std::vector<VertexId>{c});
    CHECK(metric_ball(*m.X, c, -1).empty());
    // Freudenthal interior vertex has degree 6
    CHECK(metric_ball(*m.X, c, 1).size() == 7);
    CHECK(m.X->neighbors(c).size() == 6);
}

TEST_CASE("ball nesting and triangle inequality") {
    Model m = generate({.kind = ModelKind::grid2, .size = 6, .margin = 0});
    Metric1Skeleton metric(*m.X);
    VertexId c = m.vertex_at(3, 3);
    for (Length r = 0; r < 5; ++r) {
        auto b1 = metric_ball(*m.X, c, r);
        auto b2 = metric_ball(*m.X, c, r + 1);
        CHECK(std::includes(b2.begin(), b2.end(), b1.begin(), b1.end()));
    }
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, m.X->vertex_count() - 1);
    for (int t = 0; t < 200; ++t) {
        VertexId u = pick(rng), v = pick(rng), w = pick(rng);
        CHECK(metric.distance(u, w) <= metric.distance(u, v) + metric.distance(v, w));
    }
}

TEST_CASE("gallery component monotone in allowed") {
    Model m = generate({.kind = ModelKind::grid2, .size = 4, .margin = 0});
    const auto& X = *m.X;
    std::mt19937 rng(11);
    for (int t = 0; t < 20; ++t) {
        ChamberSet small(X.chamber_count()), large(X.chamber_count());
        for (ChamberId c = 0; c < static_cast<ChamberId>(X.chamber_count()); ++c) {
            if (rng() % 2) small.set(c);
            if (small.test(c) || rng() % 2) large.set(c);
        }
        small.set(0);
        large.set(0);
        auto cs = gallery_component(X, 0, small);
        auto cl = gallery_component(X, 0, large);
        CHECK(cs.is_subset_of(cl));
        // idempotence
        CHECK(gallery_component(X, 0, cs) == cs);
    }
}

TEST_CASE("scx round trip") {
    auto X = build_complex(octahedron_triangles());
    std::string text = to_scx_string(X, {"test comment"});
    std::vector<std::string> comments;
    auto Y = from_scx_string(text, &comments);
    CHECK(Y.chambers() == X.chambers());
    REQUIRE(comments.size() == 1);
    CHECK(comments[0] == "test comment");
}
