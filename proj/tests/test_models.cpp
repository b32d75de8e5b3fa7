#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fillab/models.hpp"

using namespace fillab;

TEST_CASE("grid2 counts") {
    Model m = generate({.kind = ModelKind::grid2, .size = 4, .margin = 0});
    CHECK(m.X->chamber_count() == 32);
    CHECK(m.X->vertex_count() == 25);
}

TEST_CASE("grid3 counts") {
    Model m = generate({.kind = ModelKind::grid3, .size = 2, .margin = 0});
    CHECK(m.X->chamber_count() == 48);
    CHECK(m.X->vertex_count() == 27);
}

TEST_CASE("sphere2-subdiv") {
    Model m0 = generate({.kind = ModelKind::sphere2_subdiv, .size = 0});
    CHECK(m0.X->chamber_count() == 8);
    Model m2 = generate({.kind = ModelKind::sphere2_subdiv, .size = 2});
    CHECK(m2.X->chamber_count() == 8 * 16);
    CHECK(is_closed_manifold(*m2.X));
    CHECK(euler_characteristic(*m2.X) == 2);
}

TEST_CASE("margin map is 1-Lipschitz and zero on the boundary") {
    Model m = generate({.kind = ModelKind::grid2, .size = 6, .margin = 1});
    const auto& d = m.margin_map.dist_to_boundary;
    CHECK(d[m.vertex_at(0, 3)] == 0);
    CHECK(d[m.vertex_at(3, 3)] == 3);
    for (VertexId v = 0; v < m.X->vertex_count(); ++v) {
        for (VertexId w : m.X->neighbors(v)) {
            CHECK(std::abs(d[v] - d[w]) <= 1);
        }
    }
}

TEST_CASE("punctured grid2") {
    ModelSpec spec{.kind = ModelKind::punctured_grid2, .size = 12, .margin = 2};
    spec.removal = Removal{{6, 6, 0}, 1};
    Model m = generate(spec);
    Model full = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    CHECK(m.X->chamber_count() < full.X->chamber_count());
    CHECK_FALSE(m.has_vertex_at(6, 6));

    // removal not strictly inside the margin
    ModelSpec bad = spec;
    bad.removal = Removal{{2, 6, 0}, 1};
    CHECK_THROWS_AS(generate(bad), RemovalOutOfBounds);
}

TEST_CASE("square loop") {
    Model m = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 4);
    CHECK(h.map.domain->chamber_count() == 16);
    CHECK(volume(h) == 16);
    CHECK(is_closed_manifold(*h.map.domain));
    CHECK_THROWS_AS(square_loop(m, m.vertex_at(4, 4), 0), DegenerateInput);
    CHECK_THROWS_AS(square_loop(m, m.vertex_at(1, 1), 4), EscapesMargin);
}

TEST_CASE("boundary sphere") {
    Model m = generate({.kind = ModelKind::grid3, .size = 6, .margin = 1});
    Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), 2);
    CHECK(h.map.domain->chamber_count() == 48);
    CHECK(volume(h) == 48);
    CHECK(is_closed_manifold(*h.map.domain));
    CHECK(euler_characteristic(*h.map.domain) == 2);
    CHECK(diameter(h) == 4);
}

TEST_CASE("dumbbell sphere") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 10, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 6});
    CHECK(is_closed_manifold(*h.map.domain));
    CHECK(euler_characteristic(*h.map.domain) == 2);
    // two bulbs of 12 triangles minus one square (2 triangles) each, plus
    // 2 non-collapsed junction triangles where each band ring cones to a
    // hole corner
    CHECK(volume(h) == 24);
    CHECK(diameter(h) >= 6);
}

TEST_CASE("model metadata round trip") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 3, .margin = 0};
    Model m = generate(spec);
    std::string text = to_scx_string(*m.X, model_comments(m));
    std::vector<std::string> comments;
    auto X = std::make_shared<SimplicialComplex>(from_scx_string(text, &comments));
    Model back = model_from_scx_comments(X, comments);
    CHECK(back.spec.kind == ModelKind::grid3);
    CHECK(back.X->chambers() == m.X->chambers());
    CHECK(back.coords == m.coords);
}

TEST_CASE("perturbed sphere stays a sphere") {
    Model m = generate({.kind = ModelKind::grid3, .size = 8, .margin = 1});
    size_t base = volume(boundary_sphere(m, m.vertex_at(2, 2, 2), 4));
    int changed = 0;
    for (uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        Hypersurface h = perturbed_sphere(m, m.vertex_at(2, 2, 2), 4, seed);
        CHECK(is_closed_manifold(*h.map.domain));
        CHECK(euler_characteristic(*h.map.domain) == 2);
        CHECK(volume(h) > 0);
        if (volume(h) != base) ++changed;
        // determinism per seed
        Hypersurface again = perturbed_sphere(m, m.vertex_at(2, 2, 2), 4, seed);
        CHECK(again.map.domain->chambers() == h.map.domain->chambers());
        CHECK(again.map.vertex_image == h.map.vertex_image);
    }
    CHECK(changed >= 1);  // the bumps actually deform some samples
}
