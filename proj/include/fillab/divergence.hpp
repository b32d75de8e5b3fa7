#pragma once

// Divergence estimation: shortest ball-avoiding paths (dimension 0),
// ball-avoiding fillings (codimension 1, exact on grid models), profile
// sweeps over declared finite families, and the assembled transfer that
// reduces a general query to round pieces.
//
// The avoided ball is always the open ball on the ambient 1-skeleton; a
// chamber is forbidden iff any of its vertices lies strictly inside it.
// Infinity is a first-class result value, never an error.

#include <optional>

#include "fillab/decomposition.hpp"

namespace fillab {

struct Div0Result {
    bool finite = true;
    Length length = 0;             // kInfLength mirror lives in `finite`
    Length dist_ab = 0;
    double ball_radius = 0;        // delta * dist(c, {a,b})
    std::vector<VertexId> path;    // a .. b when finite
};

// Shortest path from a to b in the 1-skeleton with the open ball around c
// of radius delta*dist(c,{a,b}) deleted.
Div0Result div0(const SimplicialComplex& X, VertexId a, VertexId b, VertexId c,
                double delta);

// Chambers with some vertex strictly inside B(c, radius).
ChamberSet forbidden_chambers(const SimplicialComplex& X, VertexId c, double radius);

struct DivergenceQuery {
    Hypersurface h;
    VertexId c = -1;
    Length r = 0;     // must be <= dist(c, image 1-skeleton)
    double delta = 0.25;
};

struct DivkResult {
    bool finite = true;
    size_t value = 0;
    FillMethod method = FillMethod::oracle;
    size_t forbidden_count = 0;
    bool unrestricted_finite = true;
    size_t unrestricted_vol = 0;
    // the unrestricted minimal fill already avoids the ball, so the two
    // values coincide
    bool ball_disjoint_from_min_fill = false;
    FillResult fill;
    double runtime_ms = 0;
};

// Ball-avoiding filling volume div(h, c; r, delta). Oracle method is exact
// (forbidden chambers constrained to zero); cone method is an upper bound
// with the apex chosen farthest from c, falling back to the oracle when the
// cone enters the ball; heuristic takes the smaller of the two.
DivkResult divk(const DivergenceQuery& q, const Model& m,
                FillMethod method = FillMethod::oracle);

struct DivSample {
    int sample_id = 0;
    DivergenceQuery q;
};

struct Div0Sample {
    int sample_id = 0;
    Length n = 0;  // declared size parameter of the pair (a,b)
    VertexId a = -1, b = -1, c = -1;
};

struct RoundRestriction {
    double eta = 1.0;
    double A = 1.0;  // volume cap 2*A*r^k
};

struct DivPoint {
    Length r = 0;
    size_t value = 0;      // max over finite sample values at this r
    bool finite = false;   // some sample value was finite
    int infinite_count = 0;
    int error_count = 0;   // samples rejected (margin escapes etc.)
    int sample_count = 0;
};

struct DivergenceProfile {
    std::vector<DivPoint> points;
    bool fitted = false;
    double exponent = 0;
    double intercept = 0;
    double residual = 0;
};

// Per-r supremum of divk over the declared sample family; infinite values
// are excluded from the sup and counted. Restricted mode keeps only
// eta-round samples of volume <= 2*A*r^k.
DivergenceProfile div_profile(const Model& m, const std::vector<DivSample>& family,
                              FillMethod method = FillMethod::oracle,
                              const std::optional<RoundRestriction>& restricted = {});

DivergenceProfile div0_profile(const SimplicialComplex& X,
                               const std::vector<Div0Sample>& family, double delta);

struct DivRoundTransfer {
    bool finite = true;
    size_t total_vol = 0;
    int round_pieces = 0;  // pieces above the eps*r^k volume threshold
    int small_pieces = 0;  // set-aside pieces, filled without the restriction
    bool exact_finite = true;
    size_t exact_value = 0;  // divk at the shrunken delta, for comparison
    PartitionCertificate cert;
    std::vector<std::pair<std::string, bool>> assertions;

    bool all_pass() const;
};

// Assembles a ball-avoiding filling of a general h from its round partition:
// pieces of volume <= eps*r^k are filled freely (their fills are measured to
// stay clear), the remaining round pieces are filled avoiding
// B(c, delta*(1-eps)*r). k=1 inputs skip the partition and reduce to divk.
DivRoundTransfer divround_transfer(const Hypersurface& h, VertexId c, Length r,
                                   double delta, double eps, const Model& m);

}  // namespace fillab
