#pragma once

// Finite pure simplicial complexes: chambers, gallery adjacency, and the
// unit-length shortest-path metric on the 1-skeleton.
//
// Conventions:
//  - Vertex ids are dense 0..V-1. Simplices are sorted vertex tuples.
//  - A chamber is a top-dimensional simplex; two chambers are adjacent iff
//    they share a codimension-1 face (gallery adjacency).
//  - Distances are nonnegative integers; kInfLength marks "disconnected".

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "fillab/errors.hpp"

namespace fillab {

using VertexId = int32_t;
using ChamberId = int32_t;
using Length = int32_t;

inline constexpr Length kInfLength = std::numeric_limits<Length>::max();

using Simplex = std::vector<VertexId>;  // always sorted ascending

struct SimplexHash {
    size_t operator()(const Simplex& s) const {
        size_t h = 1469598103934665603ull;
        for (VertexId v : s) {
            h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

// Subset of chambers as a bitset.
class ChamberSet {
  public:
    ChamberSet() = default;
    explicit ChamberSet(size_t n) : size_(n), words_((n + 63) / 64, 0) {}

    size_t universe_size() const { return size_; }
    bool test(ChamberId c) const {
        return (words_[static_cast<size_t>(c) >> 6] >> (c & 63)) & 1u;
    }
    void set(ChamberId c) { words_[static_cast<size_t>(c) >> 6] |= (1ull << (c & 63)); }
    void reset(ChamberId c) { words_[static_cast<size_t>(c) >> 6] &= ~(1ull << (c & 63)); }
    size_t count() const;
    bool empty() const { return count() == 0; }
    bool is_subset_of(const ChamberSet& o) const;
    ChamberSet& operator|=(const ChamberSet& o);
    ChamberSet& operator&=(const ChamberSet& o);
    ChamberSet& subtract(const ChamberSet& o);
    bool operator==(const ChamberSet& o) const { return size_ == o.size_ && words_ == o.words_; }
    std::vector<ChamberId> to_vector() const;

    static ChamberSet all(size_t n);

  private:
    size_t size_ = 0;
    std::vector<uint64_t> words_;
};

class SimplicialComplex {
  public:
    int dimension() const { return dimension_; }
    int vertex_count() const { return vertex_count_; }
    size_t chamber_count() const { return chambers_.size(); }
    const Simplex& chamber(ChamberId c) const { return chambers_[c]; }
    const std::vector<Simplex>& chambers() const { return chambers_; }

    bool has_simplex(const Simplex& sorted_vertices) const;
    // Chambers incident to a face (empty if the face is absent).
    const std::vector<ChamberId>& incident_chambers(const Simplex& face) const;
    const std::vector<std::pair<ChamberId, ChamberId>>& chamber_adjacency() const {
        return chamber_adjacency_;
    }
    const std::vector<ChamberId>& adjacent_chambers(ChamberId c) const {
        return chamber_neighbors_[c];
    }
    // Chambers containing a vertex (its closed star, as chamber ids).
    const std::vector<ChamberId>& star_chambers(VertexId v) const { return vertex_star_[v]; }

    const std::vector<VertexId>& neighbors(VertexId v) const { return neighbors_[v]; }
    size_t edge_count() const { return edge_count_; }
    // All faces of a given dimension (deduplicated, sorted tuples).
    std::vector<Simplex> faces_of_dimension(int d) const;

    friend SimplicialComplex build_complex(const std::vector<Simplex>& maximal_simplices);

  private:
    int dimension_ = -1;
    int vertex_count_ = 0;
    size_t edge_count_ = 0;
    std::vector<Simplex> chambers_;
    std::unordered_map<Simplex, std::vector<ChamberId>, SimplexHash> face_index_;
    std::vector<std::pair<ChamberId, ChamberId>> chamber_adjacency_;
    std::vector<std::vector<ChamberId>> chamber_neighbors_;
    std::vector<std::vector<ChamberId>> vertex_star_;
    std::vector<std::vector<VertexId>> neighbors_;
};

// Builds the complex, computing face closure and gallery adjacency.
// Throws NonPureComplex for mixed maximal dimensions, DanglingVertex if the
// dense id range 0..max contains an unused vertex.
SimplicialComplex build_complex(const std::vector<Simplex>& maximal_simplices);

// Lazy BFS metric on the 1-skeleton. Thread-safe; per-source results are
// memoized, and a full table is precomputed when the vertex count is small.
class Metric1Skeleton {
  public:
    explicit Metric1Skeleton(const SimplicialComplex& X, int all_pairs_cap = 4096);

    Length distance(VertexId u, VertexId v) const;
    // Distances from one source to every vertex (kInfLength when unreachable).
    const std::vector<Length>& distances_from(VertexId source) const;
    // Multi-source BFS; not cached.
    std::vector<Length> distances_from_set(const std::vector<VertexId>& sources) const;
    Length eccentricity(VertexId v) const;

  private:
    const SimplicialComplex& X_;
    mutable std::mutex mu_;
    mutable std::map<VertexId, std::vector<Length>> cache_;
};

Length skeleton_distance(const SimplicialComplex& X, VertexId u, VertexId v);

// Maximal subset of `allowed` reachable from `seed` through gallery adjacency.
ChamberSet gallery_component(const SimplicialComplex& X, ChamberId seed, const ChamberSet& allowed);

// Closed metric ball; empty for r < 0.
std::vector<VertexId> metric_ball(const SimplicialComplex& X, VertexId center, Length r);
std::vector<VertexId> metric_ball(const Metric1Skeleton& metric, VertexId center, Length r);

// .scx serialization. Comment lines (leading '#') survive a round-trip only
// via the `extra_comments` hook, which generators use for model metadata.
void write_scx(std::ostream& os, const SimplicialComplex& X,
               const std::vector<std::string>& extra_comments = {});
SimplicialComplex read_scx(std::istream& is, std::vector<std::string>* comments = nullptr);
std::string to_scx_string(const SimplicialComplex& X,
                          const std::vector<std::string>& extra_comments = {});
SimplicialComplex from_scx_string(const std::string& text,
                                  std::vector<std::string>* comments = nullptr);

}  // namespace fillab
