#include "fillab/complex.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <sstream>

namespace fillab {

size_t ChamberSet::count() const {
    size_t n = 0;
    for (uint64_t w : words_) n += std::popcount(w);
    return n;
}

bool ChamberSet::is_subset_of(const ChamberSet& o) const {
    for (size_t i = 0; i < words_.size(); ++i) {
        if (words_[i] & ~o.words_[i]) return false;
    }
    return true;
}

ChamberSet& ChamberSet::operator|=(const ChamberSet& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
}

ChamberSet& ChamberSet::operator&=(const ChamberSet& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
}

ChamberSet& ChamberSet::subtract(const ChamberSet& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
}

std::vector<ChamberId> ChamberSet::to_vector() const {
    std::vector<ChamberId> out;
    out.reserve(count());
    for (size_t wi = 0; wi < words_.size(); ++wi) {
        uint64_t w = words_[wi];
        while (w) {
            int b = std::countr_zero(w);
            out.push_back(static_cast<ChamberId>(wi * 64 + b));
            w &= w - 1;
        }
    }
    return out;
}

ChamberSet ChamberSet::all(size_t n) {
    ChamberSet s(n);
    for (size_t i = 0; i < n; ++i) s.set(static_cast<ChamberId>(i));
    return s;
}

namespace {

void enumerate_subsets(const Simplex& simplex, std::vector<Simplex>& out) {
    // all nonempty proper+improper faces
    const size_t n = simplex.size();
    for (uint32_t mask = 1; mask < (1u << n); ++mask) {
        Simplex f;
        for (size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) f.push_back(simplex[i]);
        }
        out.push_back(std::move(f));
    }
}

}  // namespace

bool SimplicialComplex::has_simplex(const Simplex& s) const {
    return face_index_.find(s) != face_index_.end();
}

const std::vector<ChamberId>& SimplicialComplex::incident_chambers(const Simplex& face) const {
    static const std::vector<ChamberId> kEmpty;
    auto it = face_index_.find(face);
    return it == face_index_.end() ? kEmpty : it->second;
}

std::vector<Simplex> SimplicialComplex::faces_of_dimension(int d) const {
    std::vector<Simplex> out;
    for (const auto& [face, _] : face_index_) {
        if (static_cast<int>(face.size()) == d + 1) out.push_back(face);
    }
    std::sort(out.begin(), out.end());
    return out;
}

SimplicialComplex build_complex(const std::vector<Simplex>& maximal_simplices) {
    SimplicialComplex X;
    if (maximal_simplices.empty()) {
        throw DegenerateInput("build_complex: empty simplex list");
    }
    const size_t arity = maximal_simplices.front().size();
    VertexId max_id = -1;
    for (const auto& s : maximal_simplices) {
        if (s.size() != arity) {
            throw NonPureComplex("build_complex: maximal simplices of mixed dimension");
        }
        Simplex sorted = s;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 0; i + 1 < sorted.size(); ++i) {
            if (sorted[i] == sorted[i + 1]) {
                throw DegenerateInput("build_complex: repeated vertex in simplex");
            }
        }
        if (sorted.front() < 0) throw InvalidArgument("build_complex: negative vertex id");
        max_id = std::max(max_id, sorted.back());
        X.chambers_.push_back(std::move(sorted));
    }
    X.dimension_ = static_cast<int>(arity) - 1;
    X.vertex_count_ = max_id + 1;

    std::vector<char> used(X.vertex_count_, 0);
    for (const auto& c : X.chambers_) {
        for (VertexId v : c) used[v] = 1;
    }
    for (VertexId v = 0; v < X.vertex_count_; ++v) {
        if (!used[v]) {
            throw DanglingVertex("build_complex: unused vertex id " + std::to_string(v));
        }
    }

    std::vector<Simplex> faces;
    for (ChamberId c = 0; c < static_cast<ChamberId>(X.chambers_.size()); ++c) {
        faces.clear();
        enumerate_subsets(X.chambers_[c], faces);
        for (auto& f : faces) X.face_index_[std::move(f)].push_back(c);
    }

    X.vertex_star_.resize(X.vertex_count_);
    X.neighbors_.resize(X.vertex_count_);
    for (const auto& [face, incident] : X.face_index_) {
        if (face.size() == 1) {
            X.vertex_star_[face[0]] = incident;
        }
        if (face.size() == 2) {
            X.neighbors_[face[0]].push_back(face[1]);
            X.neighbors_[face[1]].push_back(face[0]);
            ++X.edge_count_;
        }
        if (static_cast<int>(face.size()) == X.dimension_) {
            // codimension-1 faces define gallery adjacency
            for (size_t i = 0; i < incident.size(); ++i) {
                for (size_t j = i + 1; j < incident.size(); ++j) {
                    X.chamber_adjacency_.emplace_back(incident[i], incident[j]);
                }
            }
        }
    }
    if (X.dimension_ == 0) X.chamber_adjacency_.clear();
    for (auto& nb : X.neighbors_) std::sort(nb.begin(), nb.end());
    std::sort(X.chamber_adjacency_.begin(), X.chamber_adjacency_.end());
    X.chamber_adjacency_.erase(
        std::unique(X.chamber_adjacency_.begin(), X.chamber_adjacency_.end()),
        X.chamber_adjacency_.end());
    X.chamber_neighbors_.resize(X.chambers_.size());
    for (auto [a, b] : X.chamber_adjacency_) {
        X.chamber_neighbors_[a].push_back(b);
        X.chamber_neighbors_[b].push_back(a);
    }
    for (auto& cn : X.chamber_neighbors_) std::sort(cn.begin(), cn.end());
    return X;
}

Metric1Skeleton::Metric1Skeleton(const SimplicialComplex& X, int all_pairs_cap) : X_(X) {
    if (X.vertex_count() <= all_pairs_cap) {
        for (VertexId v = 0; v < X.vertex_count(); ++v) distances_from(v);
    }
}

const std::vector<Length>& Metric1Skeleton::distances_from(VertexId source) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find(source);
        if (it != cache_.end()) return it->second;
    }
    std::vector<Length> dist(X_.vertex_count(), kInfLength);
    std::deque<VertexId> q;
    dist[source] = 0;
    q.push_back(source);
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop_front();
        for (VertexId w : X_.neighbors(u)) {
            if (dist[w] == kInfLength) {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
        }
    }
    std::lock_guard<std::mutex> lk(mu_);
    return cache_.emplace(source, std::move(dist)).first->second;
}

std::vector<Length> Metric1Skeleton::distances_from_set(const std::vector<VertexId>& sources) const {
    std::vector<Length> dist(X_.vertex_count(), kInfLength);
    std::deque<VertexId> q;
    for (VertexId s : sources) {
        if (dist[s] != 0) {
            dist[s] = 0;
            q.push_back(s);
        }
    }
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop_front();
        for (VertexId w : X_.neighbors(u)) {
            if (dist[w] == kInfLength) {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
        }
    }
    return dist;
}

Length Metric1Skeleton::distance(VertexId u, VertexId v) const {
    if (u == v) return 0;
    return distances_from(u)[v];
}

Length Metric1Skeleton::eccentricity(VertexId v) const {
    Length m = 0;
    for (Length d : distances_from(v)) {
        if (d != kInfLength) m = std::max(m, d);
    }
    return m;
}

Length skeleton_distance(const SimplicialComplex& X, VertexId u, VertexId v) {
    if (u < 0 || v < 0 || u >= X.vertex_count() || v >= X.vertex_count()) {
        throw InvalidArgument("skeleton_distance: vertex id out of range");
    }
    if (u == v) return 0;
    std::vector<Length> dist(X.vertex_count(), kInfLength);
    std::deque<VertexId> q;
    dist[u] = 0;
    q.push_back(u);
    while (!q.empty()) {
        VertexId x = q.front();
        q.pop_front();
        for (VertexId w : X.neighbors(x)) {
            if (dist[w] == kInfLength) {
                if (w == v) return dist[x] + 1;
                dist[w] = dist[x] + 1;
                q.push_back(w);
            }
        }
    }
    return kInfLength;
}

ChamberSet gallery_component(const SimplicialComplex& X, ChamberId seed, const ChamberSet& allowed) {
    if (!allowed.test(seed)) throw SeedNotAllowed("gallery_component: seed not in allowed set");
    ChamberSet out(X.chamber_count());
    std::deque<ChamberId> q;
    out.set(seed);
    q.push_back(seed);
    while (!q.empty()) {
        ChamberId c = q.front();
        q.pop_front();
        for (ChamberId n : X.adjacent_chambers(c)) {
            if (allowed.test(n) && !out.test(n)) {
                out.set(n);
                q.push_back(n);
            }
        }
    }
    return out;
}

std::vector<VertexId> metric_ball(const SimplicialComplex& X, VertexId center, Length r) {
    if (r < 0) return {};
    std::vector<Length> dist(X.vertex_count(), kInfLength);
    std::deque<VertexId> q;
    dist[center] = 0;
    q.push_back(center);
    std::vector<VertexId> out{center};
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop_front();
        if (dist[u] == r) continue;
        for (VertexId w : X.neighbors(u)) {
            if (dist[w] == kInfLength) {
                dist[w] = dist[u] + 1;
                out.push_back(w);
                q.push_back(w);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VertexId> metric_ball(const Metric1Skeleton& metric, VertexId center, Length r) {
    if (r < 0) return {};
    const auto& dist = metric.distances_from(center);
    std::vector<VertexId> out;
    for (VertexId v = 0; v < static_cast<VertexId>(dist.size()); ++v) {
        if (dist[v] <= r) out.push_back(v);
    }
    return out;
}

void write_scx(std::ostream& os, const SimplicialComplex& X,
               const std::vector<std::string>& extra_comments) {
    for (const auto& c : extra_comments) os << "# " << c << "\n";
    os << "dim " << X.dimension() << "\n";
    os << "vertices " << X.vertex_count() << "\n";
    for (const auto& ch : X.chambers()) {
        os << "s";
        for (VertexId v : ch) os << " " << v;
        os << "\n";
    }
}

SimplicialComplex read_scx(std::istream& is, std::vector<std::string>* comments) {
    std::string line;
    int dim = -2;
    int vertices = -1;
    std::vector<Simplex> maximal;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (comments) {
                size_t p = line.find_first_not_of(" \t", 1);
                comments->push_back(p == std::string::npos ? "" : line.substr(p));
            }
            continue;
        }
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "dim") {
            ls >> dim;
        } else if (tag == "vertices") {
            ls >> vertices;
        } else if (tag == "s") {
            Simplex s;
            VertexId v;
            while (ls >> v) s.push_back(v);
            maximal.push_back(std::move(s));
        } else {
            throw FormatError("read_scx: unknown line tag '" + tag + "'");
        }
    }
    if (dim < 0 || vertices < 0) throw FormatError("read_scx: missing dim/vertices header");
    SimplicialComplex X = build_complex(maximal);
    if (X.dimension() != dim) throw FormatError("read_scx: declared dim mismatch");
    if (X.vertex_count() != vertices) throw FormatError("read_scx: declared vertex count mismatch");
    return X;
}

std::string to_scx_string(const SimplicialComplex& X,
                          const std::vector<std::string>& extra_comments) {
    std::ostringstream os;
    write_scx(os, X, extra_comments);
    return os.str();
}

SimplicialComplex from_scx_string(const std::string& text, std::vector<std::string>* comments) {
    std::istringstream is(text);
    return read_scx(is, comments);
}

}  // namespace fillab
