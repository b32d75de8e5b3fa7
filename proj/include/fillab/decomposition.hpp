#pragma once

// Partition pipelines over k=2 hypersurfaces: greedy carving into round
// pieces, folded-part removal, folded/unfolded splitting, annulus splitting
// into round pieces, and the assembled end-to-end filling.
//
// Every producer emits a PartitionCertificate whose piece chambers carry
// provenance: either a chamber of the source domain (used exactly once
// across all pieces) or one copy of a shared cap disk (used exactly twice,
// on opposite sides, with identical images). The checker below validates
// this independently of the producer, which is what makes re-assembly of
// the pieces a filling-composition witness.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fillab/filling.hpp"

namespace fillab {

struct Provenance {
    bool is_cap = false;
    int id = -1;    // source chamber id, or cap id
    int sub = 0;    // chamber index within the cap
    int side = 0;   // 0 / 1: the two mirror copies of a cap
};

struct CertPiece {
    Hypersurface h;
    std::vector<Provenance> origin;  // per chamber of h.map.domain
    bool is_contour = false;         // false = remainder
    VertexId center = -1;            // greedy selection data (contours)
    Length radius = -1;
};

struct CapRecord {
    // sorted-by-value image tuple (with multiplicity) per cap chamber
    std::vector<Simplex> chamber_images;
    size_t volume = 0;
};

struct PartitionCertificate {
    Hypersurface source;
    std::vector<CertPiece> pieces;
    std::vector<CapRecord> caps;
    std::map<std::string, double> constants;
    std::vector<std::pair<std::string, bool>> assertions;
    bool particular_case = false;  // greedy stopped after a single ball

    bool all_pass() const;
    size_t contour_count() const;
    // Index of the remainder piece, or -1.
    int remainder_index() const;
};

// Structural soundness: every piece a closed manifold mapped simplicially,
// every source chamber used exactly once with matching images, every cap
// used exactly twice on opposite sides. Returns human-readable problems
// (empty = valid).
std::vector<std::string> check_certificate(const PartitionCertificate& cert);

// Largest r >= 1 with Vol(h(y,r)) >= lambda * r^k.
Length r0_radius(const Hypersurface& h, VertexId y, double lambda,
                 const Metric1Skeleton& metric);

struct CriticalRadii {
    Length R_star = 0;  // first scale where the folded threshold bites
    Length r_star = 0;  // last scale of >= eps r^k growth below R_star
    Length r = 0;       // r_star + 1, the carving radius
    size_t vol_r = 0;
    size_t vol_6r = 0;
    size_t boundary_vol = 0;
    bool b1 = false;  // V(6r) <= 12^k V(r)
    bool b2 = false;  // V(r) <= eps r^k
    bool b3 = false;  // Vol(boundary) <= C_k eps^{1/k} V(r)^{(k-1)/k}
};

CriticalRadii critical_radius(const Hypersurface& h, VertexId y, double eps, Length rho,
                              const Metric1Skeleton& metric);

// One greedy carving round: maximal-r0 balls with 6r exclusion, boundary
// circles capped by cone disks. lambda starts at 2^{-k} and halves (at most
// 20 times) until the output bounds hold.
PartitionCertificate round_partition_step(const Hypersurface& h, double eps,
                                          const Model* margin = nullptr);

// Iterates the round step on the remainder until its volume is zero.
PartitionCertificate round_partition_full(const Hypersurface& h, double eps,
                                          const Model* margin = nullptr);

// Carves the eps-folded part at scale rho into small contours.
PartitionCertificate remove_folded(const Hypersurface& h, double eps, Length rho,
                                   const Model* margin = nullptr);

// Iterates remove_folded at scale 6*delta*Vol(remainder)^{1/k} until the
// remainder is unfolded.
PartitionCertificate folded_unfolded_decomposition(const Hypersurface& h, double eps,
                                                   double delta,
                                                   const Model* margin = nullptr);

// Splits an unfolded union of spheres/surfaces along volume-free annuli
// into pieces of comparable volume.
PartitionCertificate unfolded_to_round(const Hypersurface& h, double eps, double delta,
                                       const Model* margin = nullptr);

struct PipelineParams {
    double eps_round = 0.5;
    double eps_folded = 0.1;
    double delta = 0.1;
    bool split_round = true;  // run unfolded_to_round when its scale permits
};

struct PipelineResult {
    bool finite = true;
    size_t assembled_vol = 0;
    size_t oracle_vol = 0;
    double ratio = 0;  // assembled / oracle
    int terminal_pieces = 0;
    std::vector<std::pair<std::string, bool>> assertions;

    bool all_pass() const;
};

// Full decomposition route: round partition, folded removal, round split,
// then oracle fills of the terminal pieces, summed into a filling of h.
PipelineResult pipeline_fill(const Hypersurface& h, const PipelineParams& params,
                             const Model& m);

// ---- .cert serialization (JSON) ----

void write_cert(std::ostream& os, const PartitionCertificate& cert);
PartitionCertificate read_cert(std::istream& is, ComplexPtr ambient);
std::string to_cert_string(const PartitionCertificate& cert);
PartitionCertificate from_cert_string(const std::string& text, ComplexPtr ambient);

}  // namespace fillab
