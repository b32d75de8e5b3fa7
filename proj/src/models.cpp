#include "fillab/models.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace fillab {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::grid2: return "grid2";
        case ModelKind::grid3: return "grid3";
        case ModelKind::sphere2_subdiv: return "sphere2-subdiv";
        case ModelKind::punctured_grid2: return "punctured-grid2";
        case ModelKind::ball_removed_grid3: return "ball-removed-grid3";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "grid2") return ModelKind::grid2;
    if (s == "grid3") return ModelKind::grid3;
    if (s == "sphere2-subdiv") return ModelKind::sphere2_subdiv;
    if (s == "punctured-grid2") return ModelKind::punctured_grid2;
    if (s == "ball-removed-grid3") return ModelKind::ball_removed_grid3;
    throw InvalidArgument("unknown model kind '" + s + "'");
}

namespace {

int64_t coord_key(int x, int y, int z) {
    return (static_cast<int64_t>(z) << 42) | (static_cast<int64_t>(y) << 21) |
           static_cast<int64_t>(x);
}

struct GridBuilder {
    std::vector<std::array<int, 3>> coords;
    std::unordered_map<int64_t, VertexId> index;
    std::vector<Simplex> chambers;

    VertexId vertex(int x, int y, int z) {
        int64_t k = coord_key(x, y, z);
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        VertexId id = static_cast<VertexId>(coords.size());
        coords.push_back({x, y, z});
        index.emplace(k, id);
        return id;
    }
};

void add_grid2_cell(GridBuilder& b, int x, int y) {
    VertexId a = b.vertex(x, y, 0);
    VertexId c = b.vertex(x + 1, y, 0);
    VertexId d = b.vertex(x + 1, y + 1, 0);
    VertexId e = b.vertex(x, y + 1, 0);
    b.chambers.push_back({a, c, d});
    b.chambers.push_back({a, e, d});
}

void add_grid3_cell(GridBuilder& b, int x, int y, int z) {
    // Kuhn subdivision: one tetrahedron per axis permutation.
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (auto& p : perms) {
        int c[3] = {x, y, z};
        Simplex tet;
        tet.push_back(b.vertex(c[0], c[1], c[2]));
        for (int step = 0; step < 3; ++step) {
            c[p[step]] += 1;
            tet.push_back(b.vertex(c[0], c[1], c[2]));
        }
        b.chambers.push_back(tet);
    }
}

MarginMap margin_from_boundary(const SimplicialComplex& X,
                               const std::vector<VertexId>& boundary) {
    MarginMap m;
    if (boundary.empty()) {
        m.dist_to_boundary.assign(X.vertex_count(), kInfLength);
        return m;
    }
    Metric1Skeleton metric(X, 0);
    m.dist_to_boundary = metric.distances_from_set(boundary);
    return m;
}

Model finish_grid_model(GridBuilder&& b, const ModelSpec& spec) {
    Model m;
    m.spec = spec;
    auto X = std::make_shared<SimplicialComplex>(build_complex(b.chambers));
    m.X = X;
    m.coords = std::move(b.coords);
    m.coord_index = std::move(b.index);
    std::vector<VertexId> boundary;
    const int sx = spec.sx(), sy = spec.sy(), sz = spec.sz();
    const bool is3d = spec.kind == ModelKind::grid3 || spec.kind == ModelKind::ball_removed_grid3;
    for (VertexId v = 0; v < X->vertex_count(); ++v) {
        auto [x, y, z] = m.coords[v];
        bool bd = x == 0 || x == sx || y == 0 || y == sy;
        if (is3d) bd = bd || z == 0 || z == sz;
        if (bd) boundary.push_back(v);
    }
    m.margin_map = margin_from_boundary(*X, boundary);
    return m;
}

Model generate_sphere2(const ModelSpec& spec) {
    // Octahedron with edge-midpoint subdivision rounds.
    std::vector<Simplex> tris = {{0, 2, 4}, {0, 2, 5}, {0, 3, 4}, {0, 3, 5},
                                 {1, 2, 4}, {1, 2, 5}, {1, 3, 4}, {1, 3, 5}};
    int nv = 6;
    for (int round = 0; round < spec.size; ++round) {
        std::map<std::pair<VertexId, VertexId>, VertexId> midpoint;
        auto mid = [&](VertexId a, VertexId b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            VertexId id = nv++;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<Simplex> next;
        for (auto& t : tris) {
            VertexId ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ac = mid(t[0], t[2]);
            next.push_back({t[0], ab, ac});
            next.push_back({t[1], ab, bc});
            next.push_back({t[2], ac, bc});
            next.push_back({ab, bc, ac});
        }
        for (auto& t : next) std::sort(t.begin(), t.end());
        tris = std::move(next);
    }
    Model m;
    m.spec = spec;
    m.X = std::make_shared<SimplicialComplex>(build_complex(tris));
    m.margin_map.dist_to_boundary.assign(m.X->vertex_count(), kInfLength);
    m.coords.assign(m.X->vertex_count(), {0, 0, 0});
    return m;
}

Model remove_ball(Model&& full, const ModelSpec& spec) {
    const Removal& rem = *spec.removal;
    auto [cx, cy, cz] = rem.center;
    if (!full.has_vertex_at(cx, cy, cz)) {
        throw RemovalOutOfBounds("generate: removal center outside patch");
    }
    VertexId center = full.vertex_at(cx, cy, cz);
    Metric1Skeleton metric(*full.X, 0);
    const auto& dist = metric.distances_from(center);
    // The removal ball (plus its one-chamber fringe) must stay strictly
    // inside the patch minus margin.
    ChamberSet kept(full.X->chamber_count());
    std::vector<Simplex> new_chambers;
    std::vector<ChamberId> kept_ids;
    for (ChamberId c = 0; c < static_cast<ChamberId>(full.X->chamber_count()); ++c) {
        bool meets = false;
        for (VertexId v : full.X->chamber(c)) {
            if (dist[v] <= rem.radius) {
                meets = true;
                break;
            }
        }
        if (!meets) kept_ids.push_back(c);
    }
    if (kept_ids.size() == full.X->chamber_count()) {
        throw RemovalOutOfBounds("generate: removal ball meets no chamber");
    }
    for (VertexId v = 0; v < full.X->vertex_count(); ++v) {
        if (dist[v] <= rem.radius + 1 && !full.inside_margin(v)) {
            throw RemovalOutOfBounds("generate: removal ball not strictly inside margin");
        }
    }
    // Re-index to dense vertex ids.
    std::vector<VertexId> remap(full.X->vertex_count(), -1);
    Model out;
    out.spec = spec;
    for (ChamberId c : kept_ids) {
        Simplex nc;
        for (VertexId v : full.X->chamber(c)) {
            if (remap[v] < 0) {
                remap[v] = static_cast<VertexId>(out.coords.size());
                out.coords.push_back(full.coords[v]);
                out.coord_index.emplace(
                    coord_key(full.coords[v][0], full.coords[v][1], full.coords[v][2]), remap[v]);
            }
            nc.push_back(remap[v]);
        }
        std::sort(nc.begin(), nc.end());
        new_chambers.push_back(std::move(nc));
    }
    out.X = std::make_shared<SimplicialComplex>(build_complex(new_chambers));
    out.margin_map.dist_to_boundary.resize(out.X->vertex_count());
    for (VertexId v = 0; v < full.X->vertex_count(); ++v) {
        if (remap[v] >= 0) {
            out.margin_map.dist_to_boundary[remap[v]] = full.margin_map.dist_to_boundary[v];
        }
    }
    return out;
}

}  // namespace

bool Model::has_vertex_at(int x, int y, int z) const {
    return coord_index.count(coord_key(x, y, z)) > 0;
}

VertexId Model::vertex_at(int x, int y, int z) const {
    auto it = coord_index.find(coord_key(x, y, z));
    if (it == coord_index.end()) {
        throw InvalidArgument("vertex_at: no vertex at (" + std::to_string(x) + "," +
                              std::to_string(y) + "," + std::to_string(z) + ")");
    }
    return it->second;
}

void Model::require_inside_margin(const std::vector<VertexId>& verts,
                                  const std::string& what) const {
    for (VertexId v : verts) {
        if (!inside_margin(v)) {
            throw EscapesMargin(what + ": vertex " + std::to_string(v) +
                                " lies inside the margin band");
        }
    }
}

Model generate(const ModelSpec& spec) {
    if (spec.kind == ModelKind::sphere2_subdiv) {
        if (spec.size < 0) throw InvalidArgument("generate: negative subdivision count");
        return generate_sphere2(spec);
    }
    if (spec.size < 2) throw InvalidArgument("generate: size must be >= 2");
    GridBuilder b;
    const bool is2d =
        spec.kind == ModelKind::grid2 || spec.kind == ModelKind::punctured_grid2;
    if (is2d) {
        for (int y = 0; y < spec.sy(); ++y) {
            for (int x = 0; x < spec.sx(); ++x) add_grid2_cell(b, x, y);
        }
    } else {
        for (int z = 0; z < spec.sz(); ++z) {
            for (int y = 0; y < spec.sy(); ++y) {
                for (int x = 0; x < spec.sx(); ++x) add_grid3_cell(b, x, y, z);
            }
        }
    }
    Model m = finish_grid_model(std::move(b), spec);
    if (spec.kind == ModelKind::punctured_grid2 || spec.kind == ModelKind::ball_removed_grid3) {
        if (!spec.removal) throw InvalidArgument("generate: punctured model needs a removal");
        return remove_ball(std::move(m), spec);
    }
    return m;
}

Hypersurface square_loop(const Model& m, VertexId corner, int s) {
    if (s < 1) throw DegenerateInput("square_loop: side must be >= 1");
    if (m.spec.kind != ModelKind::grid2 && m.spec.kind != ModelKind::punctured_grid2) {
        throw InvalidArgument("square_loop: ambient must be a grid2 model");
    }
    auto [x0, y0, z0] = m.coords[corner];
    std::vector<VertexId> loop;
    auto push = [&](int x, int y) {
        if (!m.has_vertex_at(x, y)) throw EscapesMargin("square_loop: loop exits the patch");
        loop.push_back(m.vertex_at(x, y));
    };
    for (int i = 0; i < s; ++i) push(x0 + i, y0);
    for (int i = 0; i < s; ++i) push(x0 + s, y0 + i);
    for (int i = 0; i < s; ++i) push(x0 + s - i, y0 + s);
    for (int i = 0; i < s; ++i) push(x0, y0 + s - i);
    m.require_inside_margin(loop, "square_loop");

    const int n = 4 * s;
    std::vector<Simplex> edges;
    for (int i = 0; i < n; ++i) {
        Simplex e{static_cast<VertexId>(i), static_cast<VertexId>((i + 1) % n)};
        std::sort(e.begin(), e.end());
        edges.push_back(e);
    }
    Hypersurface h;
    h.k = 1;
    h.model = SurfaceModel::sphere;
    h.map.domain = std::make_shared<SimplicialComplex>(build_complex(edges));
    h.map.ambient = m.X;
    h.map.vertex_image = loop;
    validate_simplicial(h.map);
    return h;
}

Hypersurface boundary_sphere(const Model& m, VertexId corner, int s) {
    if (s < 1) throw DegenerateInput("boundary_sphere: side must be >= 1");
    if (m.spec.kind != ModelKind::grid3 && m.spec.kind != ModelKind::ball_removed_grid3) {
        throw InvalidArgument("boundary_sphere: ambient must be a grid3 model");
    }
    auto [x0, y0, z0] = m.coords[corner];
    std::map<std::array<int, 3>, VertexId> dom_index;
    std::vector<VertexId> image;
    auto dom_vertex = [&](int x, int y, int z) {
        std::array<int, 3> key{x, y, z};
        auto it = dom_index.find(key);
        if (it != dom_index.end()) return it->second;
        if (!m.has_vertex_at(x, y, z)) {
            throw EscapesMargin("boundary_sphere: sphere exits the patch");
        }
        VertexId id = static_cast<VertexId>(image.size());
        dom_index.emplace(key, id);
        image.push_back(m.vertex_at(x, y, z));
        return id;
    };
    std::vector<Simplex> tris;
    auto add_square = [&](std::array<int, 3> a, std::array<int, 3> u, std::array<int, 3> v) {
        // two triangles of the unit square at a spanned by +u and +v,
        // matching the ambient Freudenthal diagonals
        VertexId p = dom_vertex(a[0], a[1], a[2]);
        VertexId pu = dom_vertex(a[0] + u[0], a[1] + u[1], a[2] + u[2]);
        VertexId pv = dom_vertex(a[0] + v[0], a[1] + v[1], a[2] + v[2]);
        VertexId puv = dom_vertex(a[0] + u[0] + v[0], a[1] + u[1] + v[1], a[2] + u[2] + v[2]);
        Simplex t1{p, pu, puv}, t2{p, pv, puv};
        std::sort(t1.begin(), t1.end());
        std::sort(t2.begin(), t2.end());
        tris.push_back(t1);
        tris.push_back(t2);
    };
    for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) {
            add_square({x0, y0 + a, z0 + b}, {0, 1, 0}, {0, 0, 1});      // x- face
            add_square({x0 + s, y0 + a, z0 + b}, {0, 1, 0}, {0, 0, 1});  // x+ face
            add_square({x0 + a, y0, z0 + b}, {1, 0, 0}, {0, 0, 1});      // y- face
            add_square({x0 + a, y0 + s, z0 + b}, {1, 0, 0}, {0, 0, 1});  // y+ face
            add_square({x0 + a, y0 + b, z0}, {1, 0, 0}, {0, 1, 0});      // z- face
            add_square({x0 + a, y0 + b, z0 + s}, {1, 0, 0}, {0, 1, 0});  // z+ face
        }
    }
    m.require_inside_margin(image, "boundary_sphere");
    Hypersurface h;
    h.k = 2;
    h.model = SurfaceModel::sphere;
    h.map.domain = std::make_shared<SimplicialComplex>(build_complex(tris));
    h.map.ambient = m.X;
    h.map.vertex_image = image;
    validate_simplicial(h.map);
    return h;
}

namespace {

using Cell = std::array<int, 3>;

// Boundary surface of a voxel region, triangulated with the min->max corner
// diagonals so every triangle exists in the ambient Kuhn patch.
Hypersurface voxel_boundary(const Model& m, const std::set<Cell>& region) {
    std::map<Cell, VertexId> dom_index;
    std::vector<VertexId> image;
    auto dom_vertex = [&](int x, int y, int z) {
        Cell key{x, y, z};
        auto it = dom_index.find(key);
        if (it != dom_index.end()) return it->second;
        VertexId id = static_cast<VertexId>(image.size());
        dom_index.emplace(key, id);
        image.push_back(m.vertex_at(x, y, z));
        return id;
    };
    std::vector<Simplex> tris;
    auto add_square = [&](Cell a, Cell u, Cell v) {
        VertexId p = dom_vertex(a[0], a[1], a[2]);
        VertexId pu = dom_vertex(a[0] + u[0], a[1] + u[1], a[2] + u[2]);
        VertexId pv = dom_vertex(a[0] + v[0], a[1] + v[1], a[2] + v[2]);
        VertexId puv = dom_vertex(a[0] + u[0] + v[0], a[1] + u[1] + v[1], a[2] + u[2] + v[2]);
        Simplex t1{p, pu, puv}, t2{p, pv, puv};
        std::sort(t1.begin(), t1.end());
        std::sort(t2.begin(), t2.end());
        tris.push_back(t1);
        tris.push_back(t2);
    };
    for (const Cell& c : region) {
        auto [x, y, z] = c;
        if (!region.count({x - 1, y, z})) add_square({x, y, z}, {0, 1, 0}, {0, 0, 1});
        if (!region.count({x + 1, y, z})) add_square({x + 1, y, z}, {0, 1, 0}, {0, 0, 1});
        if (!region.count({x, y - 1, z})) add_square({x, y, z}, {1, 0, 0}, {0, 0, 1});
        if (!region.count({x, y + 1, z})) add_square({x, y + 1, z}, {1, 0, 0}, {0, 0, 1});
        if (!region.count({x, y, z - 1})) add_square({x, y, z}, {1, 0, 0}, {0, 1, 0});
        if (!region.count({x, y, z + 1})) add_square({x, y, z + 1}, {1, 0, 0}, {0, 1, 0});
    }
    Hypersurface h;
    h.k = 2;
    h.model = SurfaceModel::sphere;
    h.map.domain = std::make_shared<SimplicialComplex>(build_complex(tris));
    h.map.ambient = m.X;
    h.map.vertex_image = image;
    return h;
}

bool sphere_boundary_ok(const Hypersurface& h) {
    const SimplicialComplex& D = *h.map.domain;
    if (!is_closed_manifold(D)) return false;
    if (euler_characteristic(D) != 2) return false;
    ChamberSet comp = gallery_component(D, 0, ChamberSet::all(D.chamber_count()));
    return comp.count() == D.chamber_count();
}

}  // namespace

Hypersurface perturbed_sphere(const Model& m, VertexId corner, int s, uint64_t seed,
                              int bumps) {
    if (s < 2) throw DegenerateInput("perturbed_sphere: side must be >= 2");
    if (m.spec.kind != ModelKind::grid3) {
        throw InvalidArgument("perturbed_sphere: ambient must be a grid3 model");
    }
    if (bumps < 0) bumps = std::max(2, s / 2);
    auto [x0, y0, z0] = m.coords[corner];

    // a candidate cell must keep all eight corners inside the usable patch
    auto cell_allowed = [&](const Cell& c) {
        for (int dx = 0; dx <= 1; ++dx) {
            for (int dy = 0; dy <= 1; ++dy) {
                for (int dz = 0; dz <= 1; ++dz) {
                    if (!m.has_vertex_at(c[0] + dx, c[1] + dy, c[2] + dz)) return false;
                    if (!m.inside_margin(m.vertex_at(c[0] + dx, c[1] + dy, c[2] + dz))) {
                        return false;
                    }
                }
            }
        }
        return true;
    };

    std::set<Cell> region;
    for (int x = 0; x < s; ++x) {
        for (int y = 0; y < s; ++y) {
            for (int z = 0; z < s; ++z) region.insert({x0 + x, y0 + y, z0 + z});
        }
    }
    std::mt19937_64 rng(seed);
    const Cell dirs[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    int accepted = 0;
    for (int attempt = 0; attempt < 40 * bumps && accepted < bumps; ++attempt) {
        std::vector<Cell> cells(region.begin(), region.end());
        const Cell& base = cells[rng() % cells.size()];
        const Cell& d = dirs[rng() % 6];
        Cell outside{base[0] + d[0], base[1] + d[1], base[2] + d[2]};
        bool add = rng() % 2 == 0;
        Cell target = add ? outside : base;
        if (add) {
            if (region.count(target) || !cell_allowed(target)) continue;
            region.insert(target);
        } else {
            if (region.size() <= 2) continue;
            region.erase(target);
        }
        Hypersurface trial = voxel_boundary(m, region);
        if (sphere_boundary_ok(trial)) {
            ++accepted;
        } else {
            if (add) {
                region.erase(target);
            } else {
                region.insert(target);
            }
        }
    }
    Hypersurface h = voxel_boundary(m, region);
    if (!sphere_boundary_ok(h)) {
        throw NonTerminating("perturbed_sphere: no valid bump sequence found");
    }
    m.require_inside_margin(h.map.vertex_image, "perturbed_sphere");
    validate_simplicial(h.map);
    return h;
}

Hypersurface dumbbell_sphere(const Model& m, const DumbbellParams& params) {
    if (m.spec.kind != ModelKind::grid3) {
        throw InvalidArgument("dumbbell_sphere: ambient must be a grid3 model");
    }
    const int b = params.bulb_side, neck = params.neck_length;
    if (b < 1 || neck < 0) throw DegenerateInput("dumbbell_sphere: bad parameters");
    const int w = m.spec.margin_width();
    if (m.spec.sx() < 2 * w + 2 * b + neck || m.spec.sy() < 2 * w + b ||
        m.spec.sz() < 2 * w + b) {
        throw EscapesMargin("dumbbell_sphere: patch too small for bulbs + neck + margin");
    }
    const int x1 = w;                 // bulb 1 lowest corner
    const int x2 = w + b + neck;      // bulb 2 lowest corner
    const int y0 = w, z0 = w;

    // Assemble the domain directly: bulb surfaces minus one hole square each,
    // joined by a cylinder of collapsed rings.
    std::map<std::array<int, 4>, VertexId> dom_index;  // (tag,x,y,z) tag 0 = surface vertex
    std::vector<VertexId> image;
    std::vector<Simplex> tris;
    auto dom_vertex = [&](std::array<int, 4> key, VertexId img) {
        auto it = dom_index.find(key);
        if (it != dom_index.end()) return it->second;
        VertexId id = static_cast<VertexId>(image.size());
        dom_index.emplace(key, id);
        image.push_back(img);
        return id;
    };
    auto surf_vertex = [&](int x, int y, int z) {
        return dom_vertex({0, x, y, z}, m.vertex_at(x, y, z));
    };
    auto add_square = [&](std::array<int, 3> a, std::array<int, 3> u, std::array<int, 3> v) {
        VertexId p = surf_vertex(a[0], a[1], a[2]);
        VertexId pu = surf_vertex(a[0] + u[0], a[1] + u[1], a[2] + u[2]);
        VertexId pv = surf_vertex(a[0] + v[0], a[1] + v[1], a[2] + v[2]);
        VertexId puv = surf_vertex(a[0] + u[0] + v[0], a[1] + u[1] + v[1], a[2] + u[2] + v[2]);
        Simplex t1{p, pu, puv}, t2{p, pv, puv};
        std::sort(t1.begin(), t1.end());
        std::sort(t2.begin(), t2.end());
        tris.push_back(t1);
        tris.push_back(t2);
    };
    auto add_bulb = [&](int bx, int hole_face_sign) {
        for (int a = 0; a < b; ++a) {
            for (int c = 0; c < b; ++c) {
                // x faces; skip the hole square (the (0,0) square of the
                // neck-facing face)
                bool hole_minus = hole_face_sign < 0 && a == 0 && c == 0;
                bool hole_plus = hole_face_sign > 0 && a == 0 && c == 0;
                if (!hole_minus) add_square({bx, y0 + a, z0 + c}, {0, 1, 0}, {0, 0, 1});
                if (!hole_plus) add_square({bx + b, y0 + a, z0 + c}, {0, 1, 0}, {0, 0, 1});
                add_square({bx + a, y0, z0 + c}, {1, 0, 0}, {0, 0, 1});
                add_square({bx + a, y0 + b, z0 + c}, {1, 0, 0}, {0, 0, 1});
                add_square({bx + a, y0 + c, z0}, {1, 0, 0}, {0, 1, 0});
                add_square({bx + a, y0 + c, z0 + b}, {1, 0, 0}, {0, 1, 0});
            }
        }
    };
    add_bulb(x1, +1);  // hole on the x+ face, at (y0,z0)
    add_bulb(x2, -1);  // hole on the x- face, at (y0,z0)

    // Cylinder rings. Ring 0 / ring R are the hole circles; rings in between
    // are fresh vertices all collapsing onto the ambient path p_0..p_neck,
    // where p_j = (x1+b+j, y0, z0). p_0 is bulb 1's hole corner and p_neck is
    // bulb 2's.
    const int hx1 = x1 + b, hx2 = x2;
    auto ring_circle = [&](int hx) {
        return std::array<VertexId, 4>{surf_vertex(hx, y0, z0), surf_vertex(hx, y0 + 1, z0),
                                       surf_vertex(hx, y0 + 1, z0 + 1),
                                       surf_vertex(hx, y0, z0 + 1)};
    };
    const int R = neck + 2;  // ring count is R+1 (rings 0..R)
    std::vector<std::array<VertexId, 4>> rings(R + 1);
    rings[0] = ring_circle(hx1);
    rings[R] = ring_circle(hx2);
    for (int j = 1; j < R; ++j) {
        VertexId img = m.vertex_at(hx1 + std::min(j - 1, neck), y0, z0);
        for (int i = 0; i < 4; ++i) {
            rings[j][i] = dom_vertex({1, j, i, 0}, img);
        }
    }
    for (int j = 0; j < R; ++j) {
        for (int i = 0; i < 4; ++i) {
            VertexId a = rings[j][i], c = rings[j][(i + 1) % 4];
            VertexId aq = rings[j + 1][i], cq = rings[j + 1][(i + 1) % 4];
            Simplex t1{a, c, cq}, t2{a, cq, aq};
            std::sort(t1.begin(), t1.end());
            std::sort(t2.begin(), t2.end());
            tris.push_back(t1);
            tris.push_back(t2);
        }
    }
    m.require_inside_margin(image, "dumbbell_sphere");
    Hypersurface h;
    h.k = 2;
    h.model = SurfaceModel::sphere;
    h.map.domain = std::make_shared<SimplicialComplex>(build_complex(tris));
    h.map.ambient = m.X;
    h.map.vertex_image = image;
    validate_simplicial(h.map);
    return h;
}

std::vector<std::string> model_comments(const Model& m) {
    std::ostringstream os;
    os << "fillab-model kind=" << to_string(m.spec.kind) << " size=" << m.spec.size
       << " size_y=" << m.spec.sy() << " size_z=" << m.spec.sz()
       << " margin=" << m.spec.margin_width();
    if (m.spec.removal) {
        os << " removal=" << m.spec.removal->center[0] << "," << m.spec.removal->center[1] << ","
           << m.spec.removal->center[2] << "," << m.spec.removal->radius;
    }
    return {os.str()};
}

Model model_from_scx_comments(ComplexPtr X, const std::vector<std::string>& comments) {
    for (const auto& c : comments) {
        if (c.rfind("fillab-model ", 0) != 0) continue;
        ModelSpec spec;
        std::istringstream is(c.substr(13));
        std::string tok;
        while (is >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "kind") {
                spec.kind = model_kind_from_string(val);
            } else if (key == "size") {
                spec.size = std::stoi(val);
            } else if (key == "size_y") {
                spec.size_y = std::stoi(val);
            } else if (key == "size_z") {
                spec.size_z = std::stoi(val);
            } else if (key == "margin") {
                spec.margin = std::stoi(val);
            } else if (key == "removal") {
                Removal r;
                std::replace(val.begin(), val.end(), ',', ' ');
                std::istringstream rs(val);
                rs >> r.center[0] >> r.center[1] >> r.center[2] >> r.radius;
                spec.removal = r;
            }
        }
        Model regenerated = generate(spec);
        if (regenerated.X->chambers() != X->chambers()) {
            throw FormatError("model_from_scx_comments: complex does not match its metadata");
        }
        return regenerated;
    }
    throw FormatError("model_from_scx_comments: no fillab-model comment found");
}

}  // namespace fillab
