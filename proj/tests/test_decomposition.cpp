#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fillab/decomposition.hpp"

using namespace fillab;

namespace {

// Two hypersurfaces over the same ambient, glued into one map with a
// disconnected domain.
Hypersurface disjoint_union(const Hypersurface& a, const Hypersurface& b) {
    REQUIRE(a.map.ambient == b.map.ambient);
    std::vector<Simplex> chambers = a.map.domain->chambers();
    VertexId off = a.map.domain->vertex_count();
    for (Simplex s : b.map.domain->chambers()) {
        for (VertexId& v : s) v += off;
        chambers.push_back(std::move(s));
    }
    Hypersurface h = a;
    h.map.domain = std::make_shared<SimplicialComplex>(build_complex(chambers));
    h.map.vertex_image.insert(h.map.vertex_image.end(), b.map.vertex_image.begin(),
                              b.map.vertex_image.end());
    return h;
}

}  // namespace

TEST_CASE("zero-volume input is kept whole") {
    Model m = generate({.kind = ModelKind::grid3, .size = 6, .margin = 1});
    Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), 2);
    h.map.vertex_image.assign(h.map.domain->vertex_count(), m.vertex_at(2, 2, 2));

    PartitionCertificate cert = round_partition_step(h, 0.5);
    CHECK(cert.pieces.size() == 1);
    CHECK(cert.remainder_index() == 0);
    CHECK(cert.contour_count() == 0);
    CHECK(cert.all_pass());
    CHECK(check_certificate(cert).empty());
}

TEST_CASE("r0 radius swallows a round sphere") {
    Model m = generate({.kind = ModelKind::grid3, .size = 8, .margin = 1});
    Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), 4);
    Metric1Skeleton metric(*m.X);
    VertexId y = volume_vertices(h.map).front();
    Length r = r0_radius(h, y, 0.25, metric);
    CHECK(r >= diameter(h, metric));
    CHECK(r0_radius(h, y, 0.05, metric) >= r);  // monotone in lambda
    CHECK_THROWS_AS(r0_radius(h, y, 0.0, metric), InvalidArgument);
}

TEST_CASE("round step: boundary sphere is the particular case") {
    Model m = generate({.kind = ModelKind::grid3, .size = 8, .margin = 1});
    Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), 4);

    PartitionCertificate cert = round_partition_step(h, 0.5);
    CHECK(cert.particular_case);
    CHECK(cert.contour_count() == 1);
    CHECK(cert.remainder_index() == -1);
    CHECK(cert.caps.empty());
    CHECK(cert.all_pass());
    CHECK(check_certificate(cert).empty());
    CHECK(volume(cert.pieces[0].h) == volume(h));
}

TEST_CASE("round step: long dumbbell splits into two bulbs") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 48, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 40});
    REQUIRE(volume(h) == 24);

    PartitionCertificate cert = round_partition_step(h, 0.5);
    CHECK(cert.contour_count() == 2);
    CHECK(cert.caps.size() == 2);
    CHECK(cert.all_pass());
    CHECK(check_certificate(cert).empty());
    for (const auto& p : cert.pieces) {
        if (p.is_contour) CHECK(volume(p.h) == 12);
    }
    // the remainder is the volume-free middle band
    int ri = cert.remainder_index();
    REQUIRE(ri >= 0);
    CHECK(volume(cert.pieces[ri].h) == 0);
}

TEST_CASE("round full: iterates and stays checkable") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 24, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 20});

    PartitionCertificate cert = round_partition_full(h, 0.5);
    CHECK(cert.contour_count() >= 2);
    int ri = cert.remainder_index();
    if (ri >= 0) CHECK(volume(cert.pieces[ri].h) == 0);
    CHECK(cert.all_pass());
    CHECK(check_certificate(cert).empty());
    size_t contour_sum = 0;
    for (const auto& p : cert.pieces) {
        if (p.is_contour) contour_sum += volume(p.h);
    }
    CHECK(contour_sum <= 2 * 216 * volume(h));
}

TEST_CASE("critical radius on a folded dumbbell") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 90, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 84});
    Metric1Skeleton metric(*m.X, 0);
    FoldedSet fs = folded_set(h, 0.9, 80, metric);
    REQUIRE_FALSE(fs.vertices.empty());

    CriticalRadii crit = critical_radius(h, fs.vertices.front(), 0.9, 80, metric);
    CHECK(crit.r == crit.r_star + 1);
    CHECK(12 * crit.r_star < crit.R_star);
    CHECK(crit.b1);
    CHECK(crit.b2);
    CHECK(crit.b3);
}

TEST_CASE("critical radius rejects an unfolded vertex") {
    Model m = generate({.kind = ModelKind::grid3, .size = 8, .margin = 1});
    Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), 4);
    Metric1Skeleton metric(*m.X);
    REQUIRE(folded_set(h, 0.5, 4, metric).vertices.empty());
    CHECK_THROWS_AS(critical_radius(h, volume_vertices(h.map).front(), 0.5, 4, metric),
                    NotFoldedVertex);
}

TEST_CASE("remove_folded carves the folded bulbs") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 90, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 84});

    PartitionCertificate cert = remove_folded(h, 0.9, 80);
    CHECK(cert.contour_count() >= 1);
    CHECK(cert.all_pass());
    CHECK(check_certificate(cert).empty());
    for (const auto& p : cert.pieces) {
        if (!p.is_contour) continue;
        double v = static_cast<double>(volume(p.h));
        CHECK(v > 0);
        CHECK(v <= 2 * 0.9 * 80.0 * 80.0 / 36.0);
    }
    CHECK(cert.constants.count("sigma") == 1);
}

TEST_CASE("remove_folded with an empty folded set is the identity") {
    Model m = generate({.kind = ModelKind::grid3, .size = 8, .margin = 1});
    Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), 4);
    PartitionCertificate cert = remove_folded(h, 0.5, 4);
    CHECK(cert.contour_count() == 0);
    CHECK(cert.pieces.size() == 1);
    CHECK(check_certificate(cert).empty());
}

TEST_CASE("folded/unfolded decomposition terminates unfolded") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 90, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 84});

    SUBCASE("small delta: already unfolded at its own scale") {
        PartitionCertificate cert = folded_unfolded_decomposition(h, 0.9, 0.5);
        CHECK(cert.all_pass());
        CHECK(check_certificate(cert).empty());
    }
    SUBCASE("large delta: folded bulbs removed, remainder unfolded") {
        PartitionCertificate cert = folded_unfolded_decomposition(h, 0.9, 2.8);
        CHECK(cert.contour_count() >= 1);
        CHECK(cert.all_pass());
        CHECK(check_certificate(cert).empty());
        int ri = cert.remainder_index();
        if (ri >= 0) {
            size_t rvol = volume(cert.pieces[ri].h);
            Length rho = std::max<Length>(
                1, static_cast<Length>(std::ceil(6 * 2.8 * std::sqrt(double(rvol)))));
            CHECK(folded_set(cert.pieces[ri].h, 0.9, rho).vertices.empty());
        }
    }
}

TEST_CASE("unfolded_to_round: one sphere comes back whole") {
    Model m = generate({.kind = ModelKind::grid3, .size = 8, .margin = 1});
    Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), 4);
    PartitionCertificate cert = unfolded_to_round(h, 0.5, 0.1);
    CHECK(cert.contour_count() == 1);
    CHECK(cert.pieces.size() == 1);
    CHECK(cert.all_pass());
    CHECK(check_certificate(cert).empty());
    CHECK(volume(cert.pieces[0].h) == volume(h));
}

TEST_CASE("unfolded_to_round: far-apart spheres split in two") {
    Model m = generate({.kind = ModelKind::grid3, .size = 16, .margin = 2});
    Hypersurface a = boundary_sphere(m, m.vertex_at(3, 3, 3), 2);
    Hypersurface b = boundary_sphere(m, m.vertex_at(11, 11, 11), 2);
    Hypersurface h = disjoint_union(a, b);
    REQUIRE(volume(h) == 96);

    PartitionCertificate cert = unfolded_to_round(h, 0.5, 0.1);
    CHECK(cert.pieces.size() == 2);
    CHECK(cert.all_pass());
    CHECK(check_certificate(cert).empty());
    for (const auto& p : cert.pieces) CHECK(volume(p.h) == 48);
}

TEST_CASE("unfolded_to_round rejects volumes below the splitting scale") {
    Model m = generate({.kind = ModelKind::grid3, .size = 6, .margin = 1});
    Hypersurface h = boundary_sphere(m, m.vertex_at(2, 2, 2), 1);  // Vol 6
    CHECK_THROWS_AS(unfolded_to_round(h, 0.5, 0.01), InvalidArgument);
}

TEST_CASE("pipeline: sphere fill reassembles exactly") {
    Model m = generate({.kind = ModelKind::grid3, .size = 8, .margin = 1});
    Hypersurface h = boundary_sphere(m, m.vertex_at(3, 3, 3), 2);
    PipelineResult res = pipeline_fill(h, {}, m);
    CHECK(res.finite);
    CHECK(res.all_pass());
    CHECK(res.oracle_vol == 48);
    CHECK(res.assembled_vol >= res.oracle_vol);
    CHECK(res.terminal_pieces >= 1);
}

TEST_CASE("pipeline: dumbbell assembles at least the oracle fill") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 24, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 20});
    PipelineResult res = pipeline_fill(h, {}, m);
    CHECK(res.finite);
    CHECK(res.all_pass());
    CHECK(res.assembled_vol >= res.oracle_vol);
    CHECK(res.ratio >= 1.0);
}

TEST_CASE("certificate serialization round-trips") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 48, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 40});
    PartitionCertificate cert = round_partition_full(h, 0.5);

    std::string text = to_cert_string(cert);
    PartitionCertificate back = from_cert_string(text, m.X);
    CHECK(back.pieces.size() == cert.pieces.size());
    CHECK(back.caps.size() == cert.caps.size());
    CHECK(back.constants == cert.constants);
    CHECK(back.particular_case == cert.particular_case);
    CHECK(back.all_pass() == cert.all_pass());
    CHECK(check_certificate(back).empty());

    CHECK_THROWS_AS(from_cert_string("not a certificate", m.X), FormatError);
}

TEST_CASE("checker flags a corrupted certificate") {
    ModelSpec spec{.kind = ModelKind::grid3, .size = 48, .size_y = 3, .size_z = 3, .margin = 1};
    Model m = generate(spec);
    Hypersurface h = dumbbell_sphere(m, {.bulb_side = 1, .neck_length = 40});
    PartitionCertificate cert = round_partition_step(h, 0.5);
    REQUIRE(check_certificate(cert).empty());

    SUBCASE("double-used source chamber") {
        cert.pieces[0].origin[0].id = cert.pieces[0].origin[1].id;
        CHECK_FALSE(check_certificate(cert).empty());
    }
    SUBCASE("cap side flipped") {
        for (auto& p : cert.pieces) {
            for (auto& pr : p.origin) {
                if (pr.is_cap) {
                    pr.side = 1 - pr.side;
                    CHECK_FALSE(check_certificate(cert).empty());
                    return;
                }
            }
        }
    }
    SUBCASE("piece image tampered") {
        cert.pieces[0].h.map.vertex_image[0] =
            cert.pieces[0].h.map.vertex_image[1];
        CHECK_FALSE(check_certificate(cert).empty());
    }
}
