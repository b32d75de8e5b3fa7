#pragma once

// Deterministic model-complex generators (Freudenthal/Kuhn grid patches,
// subdivided octahedra, punctured variants) and test hypersurfaces with
// known ground truth (square loops, boundary spheres, dumbbell spheres).
//
// Finite-patch semantics: a patch stands in for an infinite ambient space;
// the margin band near the patch boundary is off limits, and any construction
// that would enter it raises EscapesMargin instead of silently reflecting.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fillab/hypersurface.hpp"

namespace fillab {

enum class ModelKind { grid2, grid3, sphere2_subdiv, punctured_grid2, ball_removed_grid3 };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct Removal {
    std::array<int, 3> center{0, 0, 0};  // grid coordinates
    Length radius = 0;
};

struct ModelSpec {
    ModelKind kind = ModelKind::grid2;
    int size = 0;                 // cells per side (subdivision rounds for sphere2_subdiv)
    int size_y = -1, size_z = -1;  // optional anisotropic sides; default = size
    int margin = -1;              // band width in cells; default = size/4
    std::optional<Removal> removal;

    int sx() const { return size; }
    int sy() const { return size_y < 0 ? size : size_y; }
    int sz() const { return size_z < 0 ? size : size_z; }
    int margin_width() const { return margin < 0 ? size / 4 : margin; }
};

struct MarginMap {
    std::vector<Length> dist_to_boundary;  // per ambient vertex; kInfLength if closed
};

struct Model {
    ComplexPtr X;
    MarginMap margin_map;
    ModelSpec spec;
    std::vector<std::array<int, 3>> coords;  // per-vertex grid coordinates (z = 0 in 2d)
    std::unordered_map<int64_t, VertexId> coord_index;

    bool has_vertex_at(int x, int y, int z = 0) const;
    VertexId vertex_at(int x, int y, int z = 0) const;
    bool inside_margin(VertexId v) const {
        Length d = margin_map.dist_to_boundary[v];
        return d == kInfLength || d >= spec.margin_width();
    }
    // Throws EscapesMargin if any vertex is inside the margin band.
    void require_inside_margin(const std::vector<VertexId>& verts, const std::string& what) const;
};

Model generate(const ModelSpec& spec);

// Axis-aligned square loop of side `s` cells with lower-left corner at
// `corner`; combinatorial length 4s.
Hypersurface square_loop(const Model& m, VertexId corner, int s);

// Triangulated boundary of an s x s x s sub-box with lowest corner at
// `corner`; 12 s^2 triangles.
Hypersurface boundary_sphere(const Model& m, VertexId corner, int s);

struct DumbbellParams {
    int bulb_side = 1;    // side of each bulb box (cells)
    int neck_length = 4;  // combinatorial length of the collapsed band's image path
};

// Randomly bumped s-box sphere: unit cubes are attached to / carved from the
// box surface, keeping the boundary a connected closed genus-0 surface at
// every step (invalid bumps are rejected and retried). Deterministic per
// seed. `bumps` < 0 picks a default of max(2, s/2) accepted bumps.
Hypersurface perturbed_sphere(const Model& m, VertexId corner, int s, uint64_t seed,
                              int bumps = -1);

// Two box-sphere bulbs, each missing one unit square, joined by a cylinder
// band whose map collapses onto a path in the ambient 1-skeleton. The band
// manipulates the local volume growth seen by the folded-set definition.
// Requires a grid3-kind ambient long enough in x to hold both bulbs and the
// neck inside the margin.
Hypersurface dumbbell_sphere(const Model& m, const DumbbellParams& params);

// Model metadata comments for .scx round-trips.
std::vector<std::string> model_comments(const Model& m);
// Rebuilds coordinate/margin data for a complex read back from .scx whose
// comments carry model metadata. Throws FormatError if absent.
Model model_from_scx_comments(ComplexPtr X, const std::vector<std::string>& comments);

}  // namespace fillab
