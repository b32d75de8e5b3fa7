#pragma once

// Simplicial maps, hypersurfaces and filling domains, together with the
// volume / diameter / roundness measurements, the ball restriction C(v,r),
// the cut-to-manifold construction and folded sets.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fillab/complex.hpp"

namespace fillab {

using ComplexPtr = std::shared_ptr<const SimplicialComplex>;

struct SimplicialMap {
    ComplexPtr domain;
    ComplexPtr ambient;
    std::vector<VertexId> vertex_image;  // indexed by domain vertex id

    VertexId image_of(VertexId v) const { return vertex_image[v]; }
    // Distinct image vertices of a domain chamber, sorted.
    Simplex chamber_image(ChamberId c) const;
    bool chamber_collapsed(ChamberId c) const;
    std::vector<VertexId> image_vertices() const;  // distinct, sorted
};

// Throws InvalidArgument if some domain simplex's image does not span an
// ambient simplex (after deduplication).
void validate_simplicial(const SimplicialMap& f);

enum class SurfaceModel { sphere, surface };

struct Hypersurface {
    SimplicialMap map;
    int k = 0;  // domain dimension
    SurfaceModel model = SurfaceModel::sphere;
    int genus = 0;
};

// A (k+1)-domain filling a hypersurface. boundary_vertex_map sends each
// vertex of the hypersurface's domain to the corresponding vertex of the
// filling domain's boundary.
struct FillingDomain {
    SimplicialMap map;
    Hypersurface boundary_of;
    std::vector<VertexId> boundary_vertex_map;
};

struct FoldedSet {
    double eps = 0;
    Length rho = 0;
    std::vector<VertexId> vertices;              // members of the folded part
    std::vector<Length> witness_radius;          // parallel to `vertices`
};

// ---- measurements ----

size_t volume(const SimplicialMap& f);
inline size_t volume(const Hypersurface& h) { return volume(h.map); }
inline size_t volume(const FillingDomain& d) { return volume(d.map); }

Length diameter(const Hypersurface& h, const Metric1Skeleton& metric);
Length diameter(const Hypersurface& h);

bool is_round(const Hypersurface& h, double eta, const Metric1Skeleton& metric);
bool is_round(const Hypersurface& h, double eta);

// Vertices lying in some non-collapsed domain chamber (M_Vol).
std::vector<VertexId> volume_vertices(const SimplicialMap& f);

// ---- restriction and cut ----

struct Restriction {
    const SimplicialMap* source = nullptr;
    VertexId center = -1;   // domain vertex the restriction is seeded at
    Length radius = -1;
    ChamberSet chambers;            // domain chambers of C(v,r)
    std::vector<Simplex> boundary;  // internal frontier (k-1)-faces
};

// C(v,r): gallery closure, within the set of domain chambers all of whose
// vertex images lie in the closed ball around f(v) of radius r, of the
// chambers containing v. The boundary is the internal frontier only: faces
// in exactly one chamber of C(v,r) but two chambers of the domain.
Restriction restrict(const SimplicialMap& f, VertexId v, Length r,
                     const Metric1Skeleton& metric);
Restriction restrict(const SimplicialMap& f, VertexId v, Length r);

size_t volume_of(const SimplicialMap& f, const ChamberSet& chambers);

// Non-collapsed-volume growth V_v(r) for r = 0..max_r, computed with a single
// ambient BFS and incremental gallery growth.
std::vector<size_t> restriction_volume_profile(const SimplicialMap& f, VertexId v,
                                               Length max_r, const Metric1Skeleton& metric);

struct CutResult {
    SimplicialComplex complex;              // manifold (with boundary) of dimension k
    std::vector<VertexId> glue;             // G^cut: new vertex -> original domain vertex
    std::vector<ChamberId> chamber_origin;  // new chamber -> original domain chamber
    SimplicialMap map;                      // restricted map precomposed with G^cut
};

// Cuts a restriction along its non-manifold simplices so every (k-1)-face
// lies in at most two chambers and vertex stars are connected. k <= 2 only.
CutResult cut(const Restriction& sub);
CutResult cut(const SimplicialMap& f, const ChamberSet& chambers);

// ---- folded sets ----

FoldedSet folded_set(const Hypersurface& h, double eps, Length rho,
                     const Metric1Skeleton& metric);
FoldedSet folded_set(const Hypersurface& h, double eps, Length rho);

// Folded-part volume threshold: eps * r^k / (2 * 12^k).
double folded_threshold(double eps, Length r, int k);

// ---- domain normalization ----

// Contracts interior edges with equal endpoint images until none remain.
// Volume, image and boundary restriction are preserved. At the fixpoint every
// chamber is non-collapsed or touches the boundary.
FillingDomain normalize_domain(const FillingDomain& d);

// ---- structure checks ----

// Every (k-1)-face lies in exactly two chambers.
bool is_closed_manifold(const SimplicialComplex& X);
// Faces lying in exactly one chamber.
std::vector<Simplex> boundary_faces(const SimplicialComplex& X);
long euler_characteristic(const SimplicialComplex& X);
// Consistent chamber orientations (+1/-1 per chamber relative to the sorted
// vertex order); empty if non-orientable or dimension 0.
std::vector<int> orient_manifold(const SimplicialComplex& X);

// ---- .hsf serialization ----

void write_hsf(std::ostream& os, const Hypersurface& h,
               const std::vector<std::string>& extra_comments = {});
Hypersurface read_hsf(std::istream& is, ComplexPtr ambient);
std::string to_hsf_string(const Hypersurface& h);
Hypersurface from_hsf_string(const std::string& text, ComplexPtr ambient);

}  // namespace fillab
