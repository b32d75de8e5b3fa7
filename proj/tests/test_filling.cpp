#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fillab/filling.hpp"

using namespace fillab;

TEST_CASE("combing on a grid patch") {
    Model m = generate({.kind = ModelKind::grid2, .size = 16, .margin = 0});
    Combing comb = build_combing(m.X, m.vertex_at(0, 0));
    CHECK(comb.depth[m.vertex_at(5, 3)] == 5);  // diagonal steps cover both axes
    CHECK(comb.depth[m.vertex_at(16, 16)] == 16);

    auto path = comb.path_of(m.vertex_at(7, 2));
    CHECK(path.size() == 8);
    CHECK(path.front() == m.vertex_at(7, 2));
    CHECK(path.back() == m.vertex_at(0, 0));
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        CHECK(skeleton_distance(*m.X, path[i], path[i + 1]) == 1);
    }

    // adjacent targets comb through layerwise-adjacent paths
    CHECK(comb.measuredL <= 0.5);
    CHECK(comb.measuredC == 0);
}

TEST_CASE("oracle: square loops fill their interior") {
    Model m = generate({.kind = ModelKind::grid2, .size = 20, .margin = 2});
    for (int s : {1, 2, 4, 8}) {
        Hypersurface h = square_loop(m, m.vertex_at(5, 5), s);
        FillResult fr = oracle_fill(h, m);
        CHECK(fr.finite);
        CHECK(fr.vol == static_cast<size_t>(2 * s * s));
        CHECK(fr.chain.has_value());
        CHECK(fr.chain->total_volume() == fr.vol);
    }
}

TEST_CASE("oracle: boundary spheres fill their box") {
    Model m = generate({.kind = ModelKind::grid3, .size = 8, .margin = 1});
    for (int s : {1, 2, 3}) {
        Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), s);
        FillResult fr = oracle_fill(h, m);
        CHECK(fr.finite);
        CHECK(fr.vol == static_cast<size_t>(6 * s * s * s));
    }
}

TEST_CASE("oracle: loop around a puncture has no filling") {
    ModelSpec spec{.kind = ModelKind::punctured_grid2, .size = 12, .margin = 2};
    spec.removal = Removal{{6, 6, 0}, 1};
    Model m = generate(spec);
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 4);
    FillResult fr = oracle_fill(h, m);
    CHECK_FALSE(fr.finite);

    // a loop beside the puncture still fills
    Hypersurface ok = square_loop(m, m.vertex_at(8, 3), 1);
    CHECK(oracle_fill(ok, m).finite);
}

TEST_CASE("oracle with forbidden chambers") {
    Model m = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    Hypersurface h = square_loop(m, m.vertex_at(5, 5), 2);
    // every interior triangle is forced to multiplicity 1, so banning one
    // kills the filling
    Simplex tri{m.vertex_at(5, 5), m.vertex_at(6, 5), m.vertex_at(6, 6)};
    std::sort(tri.begin(), tri.end());
    const auto& inc = m.X->incident_chambers(tri);
    REQUIRE(inc.size() == 1);
    ChamberSet forbidden(m.X->chamber_count());
    forbidden.set(inc[0]);
    FillResult fr = oracle_fill(h, m, &forbidden);
    CHECK_FALSE(fr.finite);
}

TEST_CASE("exhaustive certification") {
    SUBCASE("k=1 minimality") {
        Model m = generate({.kind = ModelKind::grid2, .size = 10, .margin = 2});
        Hypersurface h = square_loop(m, m.vertex_at(4, 4), 2);
        FillResult fr = oracle_fill(h, m);
        auto cert = certify_oracle(h, m, fr);
        CHECK(cert.attempted);
        CHECK(cert.verified);
    }
    SUBCASE("k=2 minimality") {
        Model m = generate({.kind = ModelKind::grid3, .size = 2, .margin = 0});
        Hypersurface h = boundary_sphere(m, m.vertex_at(0, 0, 0), 1);
        FillResult fr = oracle_fill(h, m);
        CHECK(fr.vol == 6);
        auto cert = certify_oracle(h, m, fr, nullptr, 48);
        CHECK(cert.attempted);
        CHECK(cert.verified);
    }
    SUBCASE("infeasibility is certified") {
        ModelSpec spec{.kind = ModelKind::punctured_grid2, .size = 12, .margin = 2};
        spec.removal = Removal{{6, 6, 0}, 1};
        Model m = generate(spec);
        Hypersurface h = square_loop(m, m.vertex_at(4, 4), 4);
        FillResult fr = oracle_fill(h, m);
        auto cert = certify_oracle(h, m, fr, nullptr, 400);
        CHECK(cert.attempted);
        CHECK(cert.verified);
    }
    SUBCASE("large patches are skipped") {
        Model m = generate({.kind = ModelKind::grid2, .size = 20, .margin = 2});
        Hypersurface h = square_loop(m, m.vertex_at(5, 5), 2);
        auto cert = certify_oracle(h, m, oracle_fill(h, m));
        CHECK_FALSE(cert.attempted);
    }
}

TEST_CASE("cone fill of a square loop") {
    Model m = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 4);
    VertexId apex = h.map.image_vertices().front();
    Combing comb = build_combing(m.X, apex);
    FillResult fr = cone_fill(h, comb, apex, &m);

    CHECK(fr.finite);
    REQUIRE(fr.domain.has_value());
    const FillingDomain& dom = *fr.domain;
    CHECK(fr.vol == volume(dom.map));
    CHECK(fr.vol >= 2 * 4 * 4);  // at least the minimal filling
    CHECK(boundary_faces(*dom.map.domain).size() == h.map.domain->chamber_count());
    // the boundary restriction is the original loop
    for (VertexId dv = 0; dv < h.map.domain->vertex_count(); ++dv) {
        CHECK(dom.map.image_of(dom.boundary_vertex_map[dv]) == h.map.image_of(dv));
    }
    CHECK(fr.cone_ratio > 0);

    SUBCASE("normalization preserves volume and boundary") {
        FillingDomain norm = normalize_domain(dom);
        CHECK(volume(norm.map) == fr.vol);
        CHECK(boundary_faces(*norm.map.domain).size() == h.map.domain->chamber_count());
    }
    SUBCASE("apex must sit on the image") {
        Combing off = build_combing(m.X, m.vertex_at(3, 3));
        CHECK_THROWS_AS(cone_fill(h, off, m.vertex_at(3, 3), &m), InvalidArgument);
    }
}

TEST_CASE("cone fill of a boundary sphere") {
    Model m = generate({.kind = ModelKind::grid3, .size = 8, .margin = 1});
    Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), 3);
    VertexId apex = h.map.image_vertices().front();
    Combing comb = build_combing(m.X, apex);
    FillResult fr = cone_fill(h, comb, apex, &m);

    CHECK(fr.finite);
    REQUIRE(fr.domain.has_value());
    CHECK(boundary_faces(*fr.domain->map.domain).size() == h.map.domain->chamber_count());
    CHECK(fr.vol >= 6 * 3 * 3 * 3);
    for (VertexId dv = 0; dv < h.map.domain->vertex_count(); ++dv) {
        CHECK(fr.domain->map.image_of(fr.domain->boundary_vertex_map[dv]) == h.map.image_of(dv));
    }
}

TEST_CASE("cone fill of a collapsed cycle") {
    // dumbbell band vertices give hypersurfaces with repeated images; the
    // cone construction must tolerate them
    Model m = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 1);
    // collapse the loop onto one edge of the ambient
    Hypersurface squashed = h;
    squashed.map.vertex_image = {m.vertex_at(4, 4), m.vertex_at(5, 4), m.vertex_at(4, 4),
                                 m.vertex_at(5, 4)};
    VertexId apex = m.vertex_at(4, 4);
    Combing comb = build_combing(m.X, apex);
    FillResult fr = cone_fill(squashed, comb, apex, &m);
    CHECK(fr.finite);
    CHECK(boundary_faces(*fr.domain->map.domain).size() == 4);
}

TEST_CASE("embedded domain from an oracle chain") {
    Model m = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 4);
    FillResult fr = oracle_fill(h, m);
    REQUIRE(fr.chain.has_value());
    FillingDomain dom = domain_from_chain(h, *fr.chain);
    CHECK(volume(dom.map) == fr.vol);
    CHECK(boundary_faces(*dom.map.domain).size() == h.map.domain->chamber_count());
    for (VertexId dv = 0; dv < h.map.domain->vertex_count(); ++dv) {
        CHECK(dom.map.image_of(dom.boundary_vertex_map[dv]) == h.map.image_of(dv));
    }
}

TEST_CASE("filling radius") {
    Model m = generate({.kind = ModelKind::grid2, .size = 12, .margin = 2});
    Metric1Skeleton metric(*m.X);
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 4);
    FillResult fr = oracle_fill(h, m);
    fr.radius = filling_radius(fr, h, metric);
    CHECK(fr.radius == 2);  // the box center is 2 away from the loop

    ModelSpec pspec{.kind = ModelKind::punctured_grid2, .size = 12, .margin = 2};
    pspec.removal = Removal{{6, 6, 0}, 1};
    Model pm = generate(pspec);
    Metric1Skeleton pmetric(*pm.X);
    Hypersurface around = square_loop(pm, pm.vertex_at(4, 4), 4);
    FillResult inf = oracle_fill(around, pm);
    CHECK(filling_radius(inf, around, pmetric) == kInfLength);
}

TEST_CASE("radius growth of a minimal filling") {
    Model m = generate({.kind = ModelKind::grid2, .size = 14, .margin = 2});
    Metric1Skeleton metric(*m.X);
    Hypersurface h = square_loop(m, m.vertex_at(4, 4), 6);
    FillingDomain dom = domain_from_chain(h, *oracle_fill(h, m).chain);
    // grow from the center of the filled box
    VertexId center = -1;
    for (VertexId v = 0; v < dom.map.domain->vertex_count(); ++v) {
        if (dom.map.image_of(v) == m.vertex_at(7, 7)) center = v;
    }
    REQUIRE(center >= 0);
    auto profile = radius_growth_profile(dom, center, metric);
    REQUIRE(profile.size() >= 3);
    CHECK(profile.back().vol == volume(dom.map));
    CHECK(profile.back().boundary_vol == 0);
    for (size_t i = 0; i + 1 < profile.size(); ++i) {
        // each step absorbs at least 1/(k+1) of the internal frontier
        CHECK(static_cast<double>(profile[i + 1].vol) >=
              static_cast<double>(profile[i].vol) +
                  static_cast<double>(profile[i].boundary_vol) / 2.0);
    }
}

TEST_CASE("isoperimetric profile of square loops") {
    Model m = generate({.kind = ModelKind::grid2, .size = 20, .margin = 2});
    std::vector<std::pair<int, Hypersurface>> family;
    for (int s : {1, 2, 4, 8}) {
        family.push_back({s, square_loop(m, m.vertex_at(5, 5), s)});
    }

    SUBCASE("oracle exponent is quadratic") {
        IsoProfile prof = iso_profile(m, family, FillMethod::oracle);
        REQUIRE(prof.records.size() == 4);
        CHECK(prof.records[3].fill_vol == 128);
        CHECK(prof.exponent == doctest::Approx(2.0).epsilon(0.01));
    }
    SUBCASE("heuristic never beats the oracle from below") {
        IsoProfile cone = iso_profile(m, family, FillMethod::cone);
        IsoProfile heur = iso_profile(m, family, FillMethod::heuristic);
        IsoProfile oracle = iso_profile(m, family, FillMethod::oracle);
        for (size_t i = 0; i < family.size(); ++i) {
            CHECK(heur.records[i].fill_vol <= cone.records[i].fill_vol);
            CHECK(heur.records[i].fill_vol >= oracle.records[i].fill_vol);
        }
    }
    SUBCASE("empty family rejected") {
        CHECK_THROWS_AS(iso_profile(m, {}, FillMethod::oracle), EmptyFamily);
    }
}
