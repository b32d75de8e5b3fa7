#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fillab/hypersurface.hpp"
#include "fillab/models.hpp"

using namespace fillab;

namespace {

Hypersurface octahedron_identity() {
    Model m = generate({.kind = ModelKind::sphere2_subdiv, .size = 0});
    Hypersurface h;
    h.k = 2;
    h.model = SurfaceModel::sphere;
    h.map.domain = m.X;
    h.map.ambient = m.X;
    h.map.vertex_image.resize(m.X->vertex_count());
    for (VertexId v = 0; v < m.X->vertex_count(); ++v) h.map.vertex_image[v] = v;
    return h;
}

}  // namespace

TEST_CASE("volume: identity, constant, dumbbell") {
    Hypersurface id = octahedron_identity();
    CHECK(volume(id) == 8);

    Hypersurface constant = id;
    constant.map.vertex_image.assign(id.map.domain->vertex_count(), 0);
    CHECK(volume(constant) == 0);

    ModelSpec spec{.kind = ModelKind::grid3, .size = 10, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface dumb = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 6});
    CHECK(volume(dumb) == 24);  // band collapses except 2 junction triangles per end
}

TEST_CASE("diameter") {
    Model m = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 4);
    CHECK(diameter(h) == 8);  // opposite corners via diagonals

    Hypersurface c = h;
    c.map.vertex_image.assign(h.map.domain->vertex_count(), m.vertex_at(4, 4));
    CHECK(diameter(c) == 0);
}

TEST_CASE("roundness") {
    Hypersurface id = octahedron_identity();
    CHECK(is_round(id, 0.71));  // 2 <= 0.71*sqrt(8)
    CHECK_FALSE(is_round(id, 0.70));

    Model m = generate({.kind = ModelKind::grid2, .size = 20, .margin = 2});
    for (int s : {2, 4, 8}) {
        Hypersurface h = square_loop(m, m.vertex_at(5, 5), s);
        CHECK(diameter(h) <= 1.0 * volume(h));  // diam 2s vs length 4s
        CHECK(is_round(h, 1.0));
    }

    ModelSpec dspec{.kind = ModelKind::grid3, .size = 24, .size_y = 3, .size_z = 3, .margin = 1};
    Model dm = generate(dspec);
    Hypersurface dumb = dumbbell_sphere(dm, {.bulb_side = 1, .neck_length = 20});
    CHECK_FALSE(is_round(dumb, 1.0));  // diam grows with neck, Vol fixed
}

TEST_CASE("restrict on a square loop") {
    Model m = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 4);
    Metric1Skeleton metric(*m.X);

    SUBCASE("big radius swallows everything") {
        auto sub = restrict(h.map, 0, diameter(h, metric) + 1, metric);
        CHECK(sub.chambers.count() == h.map.domain->chamber_count());
        CHECK(sub.boundary.empty());
    }
    SUBCASE("corner radius 2") {
        // domain vertex 0 sits at the loop corner
        auto sub = restrict(h.map, 0, 2, metric);
        CHECK(sub.chambers.count() == 4);
        CHECK(sub.boundary.size() == 2);
    }
    SUBCASE("monotone in r, saturates") {
        size_t prev = 0;
        for (Length r = 0; r <= 10; ++r) {
            auto sub = restrict(h.map, 0, r, metric);
            size_t vol = volume_of(h.map, sub.chambers);
            CHECK(vol >= prev);
            prev = vol;
        }
        CHECK(prev == volume(h));
    }
    SUBCASE("profile matches pointwise restriction") {
        auto profile = restriction_volume_profile(h.map, 0, 12, metric);
        for (Length r = 0; r <= 12; ++r) {
            auto sub = restrict(h.map, 0, r, metric);
            CHECK(profile[r] == volume_of(h.map, sub.chambers));
        }
    }
}

TEST_CASE("restrict in a collapsed band") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 14, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 10});
    Metric1Skeleton metric(*m.X);
    // find a mid-band domain vertex (collapsed ring)
    VertexId band_v = -1;
    for (VertexId v = 0; v < h.map.domain->vertex_count(); ++v) {
        bool all_collapsed = true;
        for (ChamberId c : h.map.domain->star_chambers(v)) {
            if (!h.map.chamber_collapsed(c)) all_collapsed = false;
        }
        // pick a band vertex whose image is far from both bulbs
        if (all_collapsed) {
            auto [x, y, z] = m.coords[h.map.image_of(v)];
            if (x == 7) {
                band_v = v;
                break;
            }
        }
    }
    REQUIRE(band_v >= 0);
    auto sub = restrict(h.map, band_v, 1, metric);
    CHECK(sub.chambers.count() > 0);
    CHECK(volume_of(h.map, sub.chambers) == 0);  // only collapsed band chambers
}

TEST_CASE("cut: manifold input unchanged") {
    Model m = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 3);
    auto sub = restrict(h.map, 0, 2);
    auto cr = cut(sub);
    CHECK(cr.complex.chamber_count() == sub.chambers.count());
    CHECK(cr.complex.vertex_count() == static_cast<int>(cr.glue.size()));
    // re-glue soundness: images agree with the original restriction
    for (VertexId v = 0; v < cr.complex.vertex_count(); ++v) {
        CHECK(cr.map.image_of(v) == h.map.image_of(cr.glue[v]));
    }
}

TEST_CASE("cut: pinched vertex duplicated") {
    // two triangles sharing only vertex 2
    auto X = std::make_shared<SimplicialComplex>(
        build_complex({{0, 1, 2}, {2, 3, 4}}));
    SimplicialMap f;
    f.domain = X;
    f.ambient = X;
    f.vertex_image = {0, 1, 2, 3, 4};
    auto cr = cut(f, ChamberSet::all(2));
    CHECK(cr.complex.chamber_count() == 2);
    CHECK(cr.complex.vertex_count() == 6);  // vertex 2 duplicated
    int copies = 0;
    for (VertexId v : cr.glue) {
        if (v == 2) ++copies;
    }
    CHECK(copies == 2);
}

TEST_CASE("cut: k=1 wedge point duplicated") {
    // two arcs crossing at vertex 0 (degree 4)
    auto X = std::make_shared<SimplicialComplex>(
        build_complex({{0, 1}, {0, 2}, {0, 3}, {0, 4}}));
    SimplicialMap f;
    f.domain = X;
    f.ambient = X;
    f.vertex_image = {0, 1, 2, 3, 4};
    auto cr = cut(f, ChamberSet::all(4));
    int copies = 0;
    for (VertexId v : cr.glue) {
        if (v == 0) ++copies;
    }
    CHECK(copies == 2);
    for (VertexId v = 0; v < cr.complex.vertex_count(); ++v) {
        CHECK(cr.complex.neighbors(v).size() <= 2);
    }
}

TEST_CASE("folded set") {
    SUBCASE("unfolded boundary sphere") {
        Model m = generate({.kind = ModelKind::grid3, .size = 8, .margin = 1});
        Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), 4);
        auto fs = folded_set(h, 0.5, 4);
        CHECK(fs.vertices.empty());
    }
    SUBCASE("monotone in eps and rho") {
        ModelSpec spec{.kind = ModelKind::grid3, .size = 90, .size_y = 3, .size_z = 3,
                       .margin = 1};
        Model m = generate(spec);
        Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 84});
        Metric1Skeleton metric(*m.X, 0);
        auto f1 = folded_set(h, 0.5, 80, metric);
        auto f2 = folded_set(h, 0.9, 80, metric);
        auto f3 = folded_set(h, 0.5, 82, metric);
        CHECK(std::includes(f2.vertices.begin(), f2.vertices.end(), f1.vertices.begin(),
                            f1.vertices.end()));
        CHECK(std::includes(f3.vertices.begin(), f3.vertices.end(), f1.vertices.begin(),
                            f1.vertices.end()));
    }
    SUBCASE("long-neck dumbbell is folded at large scale") {
        ModelSpec spec{.kind = ModelKind::grid3, .size = 90, .size_y = 3, .size_z = 3,
                       .margin = 1};
        Model m = generate(spec);
        Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 84});
        Metric1Skeleton metric(*m.X, 0);
        auto fs = folded_set(h, 0.9, 80, metric);
        CHECK_FALSE(fs.vertices.empty());
        // witness radii satisfy the membership inequality
        for (size_t i = 0; i < fs.vertices.size(); ++i) {
            Length r = fs.witness_radius[i];
            auto sub = restrict(h.map, fs.vertices[i], r, metric);
            CHECK(static_cast<double>(volume_of(h.map, sub.chambers)) <=
                  folded_threshold(0.9, r, 2));
        }
    }
}

TEST_CASE("hsf round trip") {
    Model m = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 3);
    std::string text = to_hsf_string(h);
    Hypersurface back = from_hsf_string(text, m.X);
    CHECK(back.k == 1);
    CHECK(back.model == SurfaceModel::sphere);
    CHECK(back.map.domain->chambers() == h.map.domain->chambers());
    CHECK(back.map.vertex_image == h.map.vertex_image);
}
