#pragma once

// Constructive fillings (combing cone), the exact chain oracle on grid
// models, filling volume / radius measurement and isoperimetric profiles.

#include <optional>
#include <vector>

#include "fillab/hypersurface.hpp"
#include "fillab/models.hpp"

namespace fillab {

// BFS shortest-path tree from a basepoint, lowest-vertex-id parent
// tie-break. Paths are exact geodesics; measuredL is the smallest L with
// layerwise distance <= L * (dist(y,a) + 1) over the sampled pairs.
struct Combing {
    ComplexPtr X;
    VertexId basepoint = -1;
    std::vector<VertexId> parent;  // parent[basepoint] == basepoint
    std::vector<Length> depth;
    double measuredL = 0;
    double measuredC = 0;

    std::vector<VertexId> path_of(VertexId v) const;  // v, ..., basepoint
};

// `measure` = false skips the rung-constant sweep (used for throwaway
// combings built per cap fill).
Combing build_combing(ComplexPtr X, VertexId basepoint, bool measure = true);

// Integer chain over ambient chambers whose algebraic boundary equals the
// oriented image cycle of a hypersurface.
struct ChainFill {
    ComplexPtr ambient;
    std::vector<int64_t> coeff;  // per ambient chamber
    size_t total_volume() const;
    std::vector<ChamberId> support() const;
};

enum class FillMethod { cone, oracle, heuristic };

std::string to_string(FillMethod m);
FillMethod fill_method_from_string(const std::string& s);

struct OptimalityCertificate {
    bool attempted = false;
    bool verified = false;      // exhaustive search found no smaller chain
    size_t chambers_touched = 0;
};

struct FillResult {
    FillMethod method = FillMethod::oracle;
    bool finite = true;  // false is the infinite-fill marker
    size_t vol = 0;
    Length radius = -1;  // set by filling_radius
    double cone_ratio = 0;  // vol / ((Vol(h)+1) * (apex eccentricity + 1))
    std::optional<FillingDomain> domain;
    std::optional<ChainFill> chain;
    OptimalityCertificate certificate;
    double runtime_ms = 0;
};

// Cone filling over the combing: each domain simplex of h sweeps a ladder of
// cells between the combing paths of its vertex images, closed by a collapsed
// cap at the basepoint. Requires comb.basepoint == apex and apex on h's
// image. Works for k in {1,2}. If `margin_model` is given, the construction
// must stay inside the patch minus margin.
FillResult cone_fill(const Hypersurface& h, const Combing& comb, VertexId apex,
                     const Model* margin_model = nullptr);

// Exact minimal homological filling on grid models, by signed multiplicity
// propagation from the outer face/cell. Returns the infinite marker when the
// image cycle is not null-homologous in the patch.
// `forbidden` chambers are constrained to coefficient zero (used by
// divergence queries).
FillResult oracle_fill(const Hypersurface& h, const Model& m,
                       const ChamberSet* forbidden = nullptr);

// Re-derives the oracle value by a complete depth-first search with unit
// propagation over the chain constraint system (branching only where
// propagation leaves freedom), and confirms no smaller chain exists.
OptimalityCertificate certify_oracle(const Hypersurface& h, const Model& m,
                                     const FillResult& fill,
                                     const ChamberSet* forbidden = nullptr,
                                     size_t chamber_cap = 200);

// Builds an embedded FillingDomain (inclusion map) from a +-1 oracle chain.
// Requires h to embed its domain (injective vertex images).
FillingDomain domain_from_chain(const Hypersurface& h, const ChainFill& chain);

Length filling_radius(const FillResult& fill, const Hypersurface& h,
                      const Metric1Skeleton& metric);

struct GrowthPoint {
    Length i = 0;
    size_t vol = 0;           // Vol(d(v,i))
    size_t boundary_vol = 0;  // Vol(boundary of d(v,i))
};

// Per-radius volumes of the restrictions d(v,i) of a filling domain,
// reported up to the radius where d(v,i) covers the whole domain.
std::vector<GrowthPoint> radius_growth_profile(const FillingDomain& fill, VertexId v,
                                               const Metric1Skeleton& metric);

struct IsoRecord {
    int size = 0;
    size_t vol = 0;
    Length diam = 0;
    bool finite = true;
    size_t fill_vol = 0;
    Length fill_rad = 0;
    double runtime_ms = 0;
};

struct IsoProfile {
    std::vector<IsoRecord> records;
    double exponent = 0;
    double intercept = 0;
    double residual = 0;
};

// Max observed filling volume per size plus a log-log exponent fit of
// fill volume against the size parameter.
IsoProfile iso_profile(const Model& m, const std::vector<std::pair<int, Hypersurface>>& family,
                       FillMethod method);

}  // namespace fillab
