#include "fillab/filling.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <deque>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "fillab/harness.hpp"

namespace fillab {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool adjacent_or_equal(const SimplicialComplex& X, VertexId a, VertexId b) {
    if (a == b) return true;
    const auto& nb = X.neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
}

}  // namespace

// ---- combing ----

std::vector<VertexId> Combing::path_of(VertexId v) const {
    std::vector<VertexId> path;
    if (depth[v] == kInfLength) throw InvalidArgument("combing: vertex unreachable from basepoint");
    for (VertexId cur = v;; cur = parent[cur]) {
        path.push_back(cur);
        if (cur == basepoint) break;
    }
    return path;
}

Combing build_combing(ComplexPtr X, VertexId basepoint, bool measure) {
    if (basepoint < 0 || basepoint >= X->vertex_count()) {
        throw InvalidArgument("combing basepoint out of range");
    }
    Combing comb;
    comb.X = X;
    comb.basepoint = basepoint;
    comb.parent.assign(X->vertex_count(), -1);
    comb.depth.assign(X->vertex_count(), kInfLength);
    comb.parent[basepoint] = basepoint;
    comb.depth[basepoint] = 0;

    // layer-by-layer in ascending vertex id, so the first discovery of a
    // vertex comes from its lowest-id neighbor in the previous layer
    std::vector<VertexId> layer{basepoint};
    while (!layer.empty()) {
        std::vector<VertexId> next;
        for (VertexId v : layer) {
            for (VertexId w : X->neighbors(v)) {
                if (comb.depth[w] == kInfLength) {
                    comb.depth[w] = comb.depth[v] + 1;
                    comb.parent[w] = v;
                    next.push_back(w);
                }
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        layer = std::move(next);
    }

    // measure the rung constant over ambient edges: layerwise distance of the
    // two combing paths, padded at the outer end
    double worst = 0;
    for (VertexId v = 0; measure && v < X->vertex_count(); ++v) {
        if (comb.depth[v] == kInfLength) continue;
        for (VertexId w : X->neighbors(v)) {
            if (w < v || comb.depth[w] == kInfLength) continue;
            std::vector<VertexId> pv = comb.path_of(v);  // v..basepoint
            std::vector<VertexId> pw = comb.path_of(w);
            std::reverse(pv.begin(), pv.end());
            std::reverse(pw.begin(), pw.end());
            size_t len = std::max(pv.size(), pw.size());
            Length rung_max = 0;
            for (size_t j = 0; j < len; ++j) {
                VertexId a = pv[std::min(j, pv.size() - 1)];
                VertexId b = pw[std::min(j, pw.size() - 1)];
                Length d;
                if (a == b) {
                    d = 0;
                } else if (adjacent_or_equal(*X, a, b)) {
                    d = 1;
                } else {
                    d = skeleton_distance(*X, a, b);
                }
                rung_max = std::max(rung_max, d);
            }
            worst = std::max(worst, static_cast<double>(rung_max) / 2.0);  // dist(v,w)+1 == 2
        }
    }
    comb.measuredL = worst;
    comb.measuredC = 0;  // combing paths are exact geodesics
    return comb;
}

// ---- chain fills ----

size_t ChainFill::total_volume() const {
    size_t s = 0;
    for (int64_t c : coeff) s += static_cast<size_t>(std::abs(c));
    return s;
}

std::vector<ChamberId> ChainFill::support() const {
    std::vector<ChamberId> out;
    for (ChamberId c = 0; c < static_cast<ChamberId>(coeff.size()); ++c) {
        if (coeff[c] != 0) out.push_back(c);
    }
    return out;
}

std::string to_string(FillMethod m) {
    switch (m) {
        case FillMethod::cone: return "cone";
        case FillMethod::oracle: return "oracle";
        case FillMethod::heuristic: return "heuristic";
    }
    return "?";
}

FillMethod fill_method_from_string(const std::string& s) {
    if (s == "cone") return FillMethod::cone;
    if (s == "oracle") return FillMethod::oracle;
    if (s == "heuristic") return FillMethod::heuristic;
    throw InvalidArgument("unknown fill method: " + s);
}

// ---- the chain constraint system ----
//
// Variables are signed chamber multiplicities relative to the sorted vertex
// order. Every codimension-1 constraint involves at most two chambers, so
// the system is solved by unit propagation from the patch boundary; grid
// patches have trivial top homology, which makes the solution unique.

namespace {

struct ChainEq {
    std::array<int, 2> var{-1, -1};
    std::array<int, 2> sgn{0, 0};
    int nterms = 0;
    int64_t rhs = 0;
};

struct ChainSystem {
    size_t nvars = 0;
    std::vector<ChainEq> eqs;
    std::vector<std::vector<int>> var_eqs;
    bool infeasible = false;  // an equation with no variables and nonzero rhs

    void add_term(ChainEq& eq, int var, int sgn) {
        if (eq.nterms == 2) throw InvalidArgument("ambient face lies in more than two chambers");
        eq.var[eq.nterms] = var;
        eq.sgn[eq.nterms] = sgn;
        ++eq.nterms;
    }
    void push(ChainEq eq) {
        if (eq.nterms == 0) {
            if (eq.rhs != 0) infeasible = true;
            return;
        }
        int id = static_cast<int>(eqs.size());
        eqs.push_back(eq);
        for (int t = 0; t < eq.nterms; ++t) var_eqs[eq.var[t]].push_back(id);
    }
};

struct ChainSolution {
    bool consistent = false;
    bool unique = false;
    std::vector<int64_t> x;
};

ChainSolution solve_chain_system(const ChainSystem& sys) {
    ChainSolution out;
    out.x.assign(sys.nvars, 0);
    if (sys.infeasible) return out;

    std::vector<char> assigned(sys.nvars, 0);
    std::vector<char> inq(sys.eqs.size(), 1);
    std::deque<int> queue(sys.eqs.size());
    std::iota(queue.begin(), queue.end(), 0);

    auto wake_var = [&](int v) {
        for (int e : sys.var_eqs[v]) {
            if (!inq[e]) {
                inq[e] = 1;
                queue.push_back(e);
            }
        }
    };
    auto propagate = [&]() -> bool {
        while (!queue.empty()) {
            int ei = queue.front();
            queue.pop_front();
            inq[ei] = 0;
            const ChainEq& eq = sys.eqs[ei];
            int64_t residual = eq.rhs;
            int unknown = -1, usign = 0, count = 0;
            for (int t = 0; t < eq.nterms; ++t) {
                if (assigned[eq.var[t]]) {
                    residual -= eq.sgn[t] * out.x[eq.var[t]];
                } else {
                    unknown = eq.var[t];
                    usign = eq.sgn[t];
                    ++count;
                }
            }
            if (count == 0) {
                if (residual != 0) return false;
            } else if (count == 1) {
                out.x[unknown] = residual * usign;  // usign is +-1
                assigned[unknown] = 1;
                wake_var(unknown);
            }
        }
        return true;
    };
    if (!propagate()) return out;

    // remaining variables form 1-parameter families x = c + g*t linked by
    // two-unknown equations; a cross equation either fixes t or must agree
    out.unique = true;
    std::vector<int64_t> c(sys.nvars, 0);
    std::vector<int> g(sys.nvars, 0);
    for (size_t root = 0; root < sys.nvars; ++root) {
        if (assigned[root] || g[root] != 0) continue;
        std::vector<int> comp;
        bool t_fixed = false;
        int64_t t_val = 0;
        c[root] = 0;
        g[root] = 1;
        std::deque<int> bfs{static_cast<int>(root)};
        comp.push_back(static_cast<int>(root));
        while (!bfs.empty()) {
            int v = bfs.front();
            bfs.pop_front();
            for (int ei : sys.var_eqs[v]) {
                const ChainEq& eq = sys.eqs[ei];
                if (eq.nterms != 2) continue;
                int other = eq.var[0] == v ? 1 : 0;
                int w = eq.var[other];
                if (assigned[w]) continue;  // would have been a unit equation
                int sv = eq.sgn[1 - other], sw = eq.sgn[other];
                int64_t cw = sw * (eq.rhs - sv * c[v]);
                int gw = -sw * sv * g[v];
                if (g[w] == 0) {
                    c[w] = cw;
                    g[w] = gw;
                    comp.push_back(w);
                    bfs.push_back(w);
                } else if (g[w] == gw) {
                    if (c[w] != cw) return out;  // inconsistent cycle
                } else {
                    // c[w] + g[w] t == cw + gw t with gw == -g[w]
                    int64_t diff = cw - c[w];
                    if (diff % 2 != 0) return out;
                    int64_t t = g[w] * (diff / 2);
                    if (t_fixed && t != t_val) return out;
                    t_fixed = true;
                    t_val = t;
                }
            }
        }
        if (!t_fixed) {
            // free family: minimize sum |c_i + g_i t| at the median
            std::vector<int64_t> z;
            z.reserve(comp.size());
            for (int v : comp) z.push_back(-static_cast<int64_t>(g[v]) * c[v]);
            std::sort(z.begin(), z.end());
            t_val = z[z.size() / 2];
            out.unique = false;
        }
        for (int v : comp) {
            out.x[v] = c[v] + g[v] * t_val;
            assigned[v] = 1;
            wake_var(v);
        }
        if (!propagate()) return out;
    }
    // final audit
    for (const ChainEq& eq : sys.eqs) {
        int64_t s = 0;
        for (int t = 0; t < eq.nterms; ++t) s += eq.sgn[t] * out.x[eq.var[t]];
        if (s != eq.rhs) return out;
    }
    out.consistent = true;
    return out;
}

// Oriented boundary multiplicities of h's image cycle, keyed by sorted
// ambient (k-1+1)-tuples (edges for k=1, triangles for k=2).
std::unordered_map<Simplex, int64_t, SimplexHash> image_cycle(const Hypersurface& h) {
    const SimplicialComplex& D = *h.map.domain;
    if (!is_closed_manifold(D)) throw InvalidArgument("hypersurface domain is not closed");
    std::vector<int> orient = orient_manifold(D);
    if (orient.empty()) throw InvalidArgument("hypersurface domain is not orientable");

    std::unordered_map<Simplex, int64_t, SimplexHash> m;
    for (ChamberId ch = 0; ch < static_cast<ChamberId>(D.chamber_count()); ++ch) {
        const Simplex& s = D.chamber(ch);
        Simplex img(s.size());
        for (size_t i = 0; i < s.size(); ++i) img[i] = h.map.image_of(s[i]);
        // parity of the sort permutation; duplicates mean a collapsed chamber
        int sign = orient[ch];
        bool collapsed = false;
        Simplex sorted = img;
        for (size_t i = 0; i + 1 < sorted.size() && !collapsed; ++i) {
            for (size_t j = 0; j + 1 < sorted.size() - i; ++j) {
                if (sorted[j] == sorted[j + 1]) collapsed = true;
                if (sorted[j] > sorted[j + 1]) {
                    std::swap(sorted[j], sorted[j + 1]);
                    sign = -sign;
                }
            }
        }
        if (sorted.back() == sorted[sorted.size() - 2]) collapsed = true;
        if (collapsed) continue;
        m[sorted] += sign;
    }
    for (auto it = m.begin(); it != m.end();) {
        it = it->second == 0 ? m.erase(it) : std::next(it);
    }
    return m;
}

ChainSystem build_chain_system(const Hypersurface& h, const Model& model,
                               const ChamberSet* forbidden) {
    const SimplicialComplex& A = *model.X;
    if (h.map.ambient.get() != model.X.get()) {
        throw InvalidArgument("oracle fill: hypersurface not mapped into the given model");
    }
    bool ok_kind = (h.k == 1 && (model.spec.kind == ModelKind::grid2 ||
                                 model.spec.kind == ModelKind::punctured_grid2)) ||
                   (h.k == 2 && (model.spec.kind == ModelKind::grid3 ||
                                 model.spec.kind == ModelKind::ball_removed_grid3));
    if (!ok_kind) throw InvalidArgument("oracle fill: unsupported model kind for this k");
    if (A.dimension() != h.k + 1) throw InvalidArgument("oracle fill: ambient dimension mismatch");

    auto m = image_cycle(h);

    ChainSystem sys;
    sys.nvars = A.chamber_count();
    sys.var_eqs.resize(sys.nvars);

    // one equation per codimension-1 ambient face
    std::unordered_map<Simplex, int, SimplexHash> face_eq;
    std::vector<ChainEq> pending;
    for (ChamberId ch = 0; ch < static_cast<ChamberId>(A.chamber_count()); ++ch) {
        const Simplex& s = A.chamber(ch);
        bool banned = forbidden && forbidden->test(ch);
        for (size_t i = 0; i < s.size(); ++i) {
            Simplex face;
            face.reserve(s.size() - 1);
            for (size_t j = 0; j < s.size(); ++j) {
                if (j != i) face.push_back(s[j]);
            }
            auto [it, fresh] = face_eq.try_emplace(face, static_cast<int>(pending.size()));
            if (fresh) {
                ChainEq eq;
                auto mit = m.find(face);
                eq.rhs = mit == m.end() ? 0 : mit->second;
                pending.push_back(eq);
            }
            if (!banned) {
                sys.add_term(pending[it->second], static_cast<int>(ch), i % 2 == 0 ? 1 : -1);
            }
        }
        if (banned) {
            ChainEq zero;
            sys.add_term(zero, static_cast<int>(ch), 1);
            sys.push(zero);
        }
    }
    for (ChainEq& eq : pending) sys.push(eq);
    return sys;
}

}  // namespace

// ---- oracle fill ----

FillResult oracle_fill(const Hypersurface& h, const Model& m, const ChamberSet* forbidden) {
    auto t0 = Clock::now();
    ChainSystem sys = build_chain_system(h, m, forbidden);
    ChainSolution sol = solve_chain_system(sys);

    FillResult out;
    out.method = FillMethod::oracle;
    if (!sol.consistent) {
        out.finite = false;  // image cycle not null-homologous in the patch
        out.runtime_ms = ms_since(t0);
        return out;
    }
    ChainFill chain;
    chain.ambient = m.X;
    chain.coeff = std::move(sol.x);
    out.vol = chain.total_volume();

    std::vector<char> used(m.X->vertex_count(), 0);
    for (ChamberId c : chain.support()) {
        for (VertexId v : m.X->chamber(c)) used[v] = 1;
    }
    for (VertexId v = 0; v < m.X->vertex_count(); ++v) {
        if (used[v] && !m.inside_margin(v)) {
            throw EscapesMargin("oracle fill support reaches the margin band");
        }
    }
    out.chain = std::move(chain);
    out.runtime_ms = ms_since(t0);
    return out;
}

// ---- exhaustive certification ----

namespace {

struct ExhaustiveSearch {
    const ChainSystem& sys;
    int64_t budget;  // search strictly below this total
    std::vector<int64_t> x;
    std::vector<char> assigned;
    size_t assigned_count = 0;
    int64_t partial = 0;
    bool found_smaller = false;
    bool aborted = false;
    size_t nodes = 0;
    static constexpr size_t kNodeCap = 50'000'000;

    explicit ExhaustiveSearch(const ChainSystem& s, int64_t b)
        : sys(s), budget(b), x(s.nvars, 0), assigned(s.nvars, 0) {}

    bool set(int v, int64_t val, std::vector<int>& trail) {
        partial += std::abs(val);
        x[v] = val;
        assigned[v] = 1;
        ++assigned_count;
        trail.push_back(v);
        return partial < budget;
    }
    void undo(std::vector<int>& trail, size_t mark) {
        while (trail.size() > mark) {
            int v = trail.back();
            trail.pop_back();
            partial -= std::abs(x[v]);
            assigned[v] = 0;
            --assigned_count;
        }
    }
    // repeatedly applies unit equations; false on contradiction or budget
    bool propagate(std::vector<int>& trail) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const ChainEq& eq : sys.eqs) {
                int64_t residual = eq.rhs;
                int unknown = -1, usign = 0, count = 0;
                for (int t = 0; t < eq.nterms; ++t) {
                    if (assigned[eq.var[t]]) {
                        residual -= eq.sgn[t] * x[eq.var[t]];
                    } else {
                        unknown = eq.var[t];
                        usign = eq.sgn[t];
                        ++count;
                    }
                }
                if (count == 0) {
                    if (residual != 0) return false;
                } else if (count == 1) {
                    if (!set(unknown, residual * usign, trail)) return false;
                    changed = true;
                }
            }
        }
        return true;
    }
    void search(std::vector<int>& trail) {
        if (found_smaller || aborted) return;
        if (++nodes > kNodeCap) {
            aborted = true;
            return;
        }
        size_t mark = trail.size();
        if (!propagate(trail)) {
            undo(trail, mark);
            return;
        }
        if (assigned_count == sys.nvars) {
            found_smaller = true;  // complete chain strictly below the budget
            undo(trail, mark);
            return;
        }
        int branch = -1;
        for (size_t v = 0; v < sys.nvars; ++v) {
            if (!assigned[v]) {
                branch = static_cast<int>(v);
                break;
            }
        }
        for (int64_t mag = 0; partial + mag < budget; ++mag) {
            for (int sign : {1, -1}) {
                if (mag == 0 && sign < 0) break;
                size_t m2 = trail.size();
                if (set(branch, sign * mag, trail)) search(trail);
                undo(trail, m2);
                if (found_smaller || aborted) {
                    undo(trail, mark);
                    return;
                }
            }
        }
        undo(trail, mark);
    }
};

}  // namespace

OptimalityCertificate certify_oracle(const Hypersurface& h, const Model& m,
                                     const FillResult& fill, const ChamberSet* forbidden,
                                     size_t chamber_cap) {
    OptimalityCertificate cert;
    if (m.X->chamber_count() > chamber_cap) return cert;  // attempted == false
    cert.attempted = true;
    cert.chambers_touched = m.X->chamber_count();

    ChainSystem sys = build_chain_system(h, m, forbidden);
    if (!fill.finite) {
        // propagation derives the contradiction; that is the infeasibility proof
        ChainSolution sol = solve_chain_system(sys);
        cert.verified = !sol.consistent;
        return cert;
    }
    if (fill.vol == 0) {
        cert.verified = true;  // nothing is below an empty chain
        return cert;
    }
    ExhaustiveSearch dfs(sys, static_cast<int64_t>(fill.vol));
    std::vector<int> trail;
    dfs.search(trail);
    cert.verified = !dfs.aborted && !dfs.found_smaller;
    return cert;
}

// ---- cone fill ----

namespace {

// token key: (kind, a, b, layer); kind 0 = surface column over domain vertex
// a, kind 1 = ladder center for domain edge (a,b), kind 2 = prism center for
// domain chamber a, kind 3 = the closing cap vertex
struct DomainBuilder {
    std::map<std::tuple<int, int, int, int>, VertexId> tokens;
    std::vector<VertexId> image;
    std::vector<Simplex> chambers;

    VertexId vertex(int kind, int a, int b, int layer, VertexId img) {
        auto [it, fresh] = tokens.try_emplace({kind, a, b, layer}, -1);
        if (fresh) {
            it->second = static_cast<VertexId>(image.size());
            image.push_back(img);
        }
        return it->second;
    }
    void add(std::initializer_list<VertexId> verts) {
        Simplex s(verts);
        std::sort(s.begin(), s.end());
        chambers.push_back(std::move(s));
    }
};

// layered combing position of an ambient vertex: steps 0..depth walk toward
// the basepoint, then stay there
VertexId layered(const Combing& comb, const std::vector<std::vector<VertexId>>& paths,
                 VertexId u, int j) {
    (void)comb;
    const std::vector<VertexId>& p = paths[u];
    return p[std::min<size_t>(j, p.size() - 1)];
}

std::vector<VertexId> circle_order(const SimplicialComplex& D) {
    if (D.dimension() != 1) throw InvalidArgument("cone fill: k=1 domain must be a circle");
    for (VertexId v = 0; v < D.vertex_count(); ++v) {
        if (D.neighbors(v).size() != 2) {
            throw InvalidArgument("cone fill: k=1 domain must be a single circle");
        }
    }
    std::vector<VertexId> cyc{0, D.neighbors(0).front()};
    while (true) {
        VertexId cur = cyc.back(), prev = cyc[cyc.size() - 2];
        const auto& nb = D.neighbors(cur);
        VertexId next = nb[0] == prev ? nb[1] : nb[0];
        if (next == 0) break;
        cyc.push_back(next);
    }
    if (cyc.size() != static_cast<size_t>(D.vertex_count())) {
        throw InvalidArgument("cone fill: k=1 domain is disconnected");
    }
    return cyc;
}

// triangulates the square between two adjacent columns at layers j, j+1;
// the rule depends only on the four ambient images, so prisms sharing the
// square produce identical triangles
struct QuadCell {
    std::array<std::array<VertexId, 3>, 4> tri{};
    int ntri = 0;
};

QuadCell fill_quad(const SimplicialComplex& A, DomainBuilder& b, VertexId lo_col, VertexId hi_col,
                   VertexId lo_col1, VertexId hi_col1, VertexId imA, VertexId imB, VertexId imA1,
                   VertexId imB1, int edge_id, int layer) {
    QuadCell q;
    auto push = [&](VertexId x, VertexId y, VertexId z) {
        q.tri[q.ntri++] = {x, y, z};
    };
    if (!adjacent_or_equal(A, imA, imB) || !adjacent_or_equal(A, imA1, imB1)) {
        throw RectangleNotStarFillable("combing rung exceeds one step");
    }
    if (adjacent_or_equal(A, imA, imB1)) {
        push(lo_col, hi_col, hi_col1);
        push(lo_col, hi_col1, lo_col1);
    } else if (adjacent_or_equal(A, imB, imA1)) {
        push(lo_col, hi_col, lo_col1);
        push(hi_col, hi_col1, lo_col1);
    } else {
        // no diagonal spans a simplex; subdivide inside a shared vertex star
        VertexId center = -1;
        for (VertexId w : A.neighbors(imA)) {
            if (adjacent_or_equal(A, w, imB) && adjacent_or_equal(A, w, imA1) &&
                adjacent_or_equal(A, w, imB1)) {
                center = w;
                break;
            }
        }
        if (center < 0) throw RectangleNotStarFillable("square admits no star center");
        VertexId c = b.vertex(1, edge_id, 0, layer, center);
        push(lo_col, hi_col, c);
        push(hi_col, hi_col1, c);
        push(hi_col1, lo_col1, c);
        push(lo_col1, lo_col, c);
    }
    return q;
}

}  // namespace

FillResult cone_fill(const Hypersurface& h, const Combing& comb, VertexId apex,
                     const Model* margin_model) {
    auto t0 = Clock::now();
    if (h.k != 1 && h.k != 2) throw UnsupportedDimension("cone fill supports k in {1,2}");
    if (comb.X.get() != h.map.ambient.get()) {
        throw InvalidArgument("cone fill: combing is over a different ambient complex");
    }
    if (comb.basepoint != apex) throw InvalidArgument("cone fill: apex must be the combing basepoint");
    std::vector<VertexId> image = h.map.image_vertices();
    if (!std::binary_search(image.begin(), image.end(), apex)) {
        throw InvalidArgument("cone fill: apex must lie on the hypersurface image");
    }
    const SimplicialComplex& A = *h.map.ambient;
    const SimplicialComplex& D = *h.map.domain;

    std::vector<std::vector<VertexId>> paths(A.vertex_count());
    int L = 0;
    for (VertexId u : image) {
        paths[u] = comb.path_of(u);
        L = std::max<int>(L, comb.depth[u]);
    }

    DomainBuilder b;
    auto col = [&](VertexId dv, int j) {
        return b.vertex(0, dv, 0, j, layered(comb, paths, h.map.image_of(dv), j));
    };
    VertexId omega = b.vertex(3, 0, 0, 0, apex);

    std::vector<VertexId> boundary_vertex_map(D.vertex_count(), -1);

    if (h.k == 1) {
        std::vector<VertexId> cyc = circle_order(D);
        int n = static_cast<int>(cyc.size());
        for (int i = 0; i < n; ++i) boundary_vertex_map[cyc[i]] = col(cyc[i], 0);
        for (int i = 0; i < n; ++i) {
            VertexId a = cyc[i], c = cyc[(i + 1) % n];
            VertexId ua = h.map.image_of(a), uc = h.map.image_of(c);
            for (int j = 0; j < L; ++j) {
                QuadCell q = fill_quad(A, b, col(a, j), col(c, j), col(a, j + 1), col(c, j + 1),
                                       layered(comb, paths, ua, j), layered(comb, paths, uc, j),
                                       layered(comb, paths, ua, j + 1),
                                       layered(comb, paths, uc, j + 1), i, j);
                for (int t = 0; t < q.ntri; ++t) b.add({q.tri[t][0], q.tri[t][1], q.tri[t][2]});
            }
            b.add({col(a, L), col(c, L), omega});
        }
    } else {
        // canonical square fillings shared between neighbouring prisms
        std::vector<Simplex> edges = D.faces_of_dimension(1);
        std::map<std::pair<VertexId, VertexId>, int> edge_id;
        for (size_t i = 0; i < edges.size(); ++i) edge_id[{edges[i][0], edges[i][1]}] = static_cast<int>(i);
        std::map<std::pair<int, int>, QuadCell> quads;  // (edge id, layer)
        auto quad_of = [&](VertexId a, VertexId c, int j) -> const QuadCell& {
            int e = edge_id.at({a, c});
            auto it = quads.find({e, j});
            if (it != quads.end()) return it->second;
            VertexId ua = h.map.image_of(a), uc = h.map.image_of(c);
            QuadCell q = fill_quad(A, b, col(a, j), col(c, j), col(a, j + 1), col(c, j + 1),
                                   layered(comb, paths, ua, j), layered(comb, paths, uc, j),
                                   layered(comb, paths, ua, j + 1), layered(comb, paths, uc, j + 1),
                                   e, j);
            return quads.emplace(std::make_pair(e, j), q).first->second;
        };

        for (VertexId v = 0; v < D.vertex_count(); ++v) boundary_vertex_map[v] = col(v, 0);
        for (ChamberId t = 0; t < static_cast<ChamberId>(D.chamber_count()); ++t) {
            const Simplex& s = D.chamber(t);
            for (int j = 0; j < L; ++j) {
                // prism boundary triangles: top copy, bottom copy, three squares
                std::vector<std::array<VertexId, 3>> faces;
                faces.push_back({col(s[0], j), col(s[1], j), col(s[2], j)});
                faces.push_back({col(s[0], j + 1), col(s[1], j + 1), col(s[2], j + 1)});
                for (auto [a, c] : {std::pair{s[0], s[1]}, {s[0], s[2]}, {s[1], s[2]}}) {
                    const QuadCell& q = quad_of(a, c, j);
                    for (int ti = 0; ti < q.ntri; ++ti) faces.push_back(q.tri[ti]);
                }
                // cone the prism from a vertex whose image sees every face
                std::vector<VertexId> imgs;
                for (const auto& f : faces) {
                    for (VertexId dv : f) imgs.push_back(b.image[dv]);
                }
                std::sort(imgs.begin(), imgs.end());
                imgs.erase(std::unique(imgs.begin(), imgs.end()), imgs.end());
                auto sees_all = [&](VertexId w) {
                    for (VertexId u : imgs) {
                        if (!adjacent_or_equal(A, w, u)) return false;
                    }
                    return true;
                };
                VertexId center_img = -1;
                for (VertexId w : imgs) {
                    if (sees_all(w)) {
                        center_img = w;
                        break;
                    }
                }
                if (center_img < 0) {
                    for (VertexId w : A.neighbors(imgs[0])) {
                        if (sees_all(w)) {
                            center_img = w;
                            break;
                        }
                    }
                }
                if (center_img < 0) throw RectangleNotStarFillable("prism admits no star center");
                VertexId center = b.vertex(2, static_cast<int>(t), 0, j, center_img);
                for (const auto& f : faces) b.add({center, f[0], f[1], f[2]});
            }
            b.add({col(s[0], L), col(s[1], L), col(s[2], L), omega});
        }
    }

    FillingDomain dom;
    dom.map.domain = std::make_shared<SimplicialComplex>(build_complex(b.chambers));
    dom.map.ambient = h.map.ambient;
    dom.map.vertex_image = std::move(b.image);
    dom.boundary_of = h;
    dom.boundary_vertex_map = std::move(boundary_vertex_map);

    validate_simplicial(dom.map);
    if (boundary_faces(*dom.map.domain).size() != D.chamber_count()) {
        throw InvalidArgument("cone fill: boundary does not match the hypersurface");
    }
    if (margin_model) {
        std::vector<VertexId> used = dom.map.image_vertices();
        margin_model->require_inside_margin(used, "cone fill");
    }

    FillResult out;
    out.method = FillMethod::cone;
    out.vol = volume(dom.map);
    Length ecc = 0;
    for (VertexId u : image) ecc = std::max(ecc, comb.depth[u]);
    out.cone_ratio = static_cast<double>(out.vol) /
                     (static_cast<double>(volume(h) + 1) * static_cast<double>(ecc + 1));
    out.domain = std::move(dom);
    out.runtime_ms = ms_since(t0);
    return out;
}

// ---- chain -> embedded domain ----

FillingDomain domain_from_chain(const Hypersurface& h, const ChainFill& chain) {
    const SimplicialComplex& A = *chain.ambient;
    std::vector<Simplex> support_chambers;
    for (ChamberId c : chain.support()) {
        int64_t v = chain.coeff[c];
        if (v != 1 && v != -1) {
            throw InvalidArgument("domain_from_chain: chain has multiplicity > 1");
        }
        support_chambers.push_back(A.chamber(c));
    }
    if (support_chambers.empty()) {
        throw InvalidArgument("domain_from_chain: empty chain");
    }
    // dense re-index of the support's vertices
    std::vector<VertexId> verts;
    for (const Simplex& s : support_chambers) verts.insert(verts.end(), s.begin(), s.end());
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    std::unordered_map<VertexId, VertexId> to_new;
    for (size_t i = 0; i < verts.size(); ++i) to_new[verts[i]] = static_cast<VertexId>(i);
    for (Simplex& s : support_chambers) {
        for (VertexId& v : s) v = to_new.at(v);
    }

    FillingDomain dom;
    dom.map.domain = std::make_shared<SimplicialComplex>(build_complex(support_chambers));
    dom.map.ambient = chain.ambient;
    dom.map.vertex_image = verts;
    dom.boundary_of = h;
    dom.boundary_vertex_map.assign(h.map.domain->vertex_count(), -1);
    for (VertexId dv = 0; dv < h.map.domain->vertex_count(); ++dv) {
        auto it = to_new.find(h.map.image_of(dv));
        if (it == to_new.end()) {
            throw InvalidArgument("domain_from_chain: hypersurface image not covered by the chain");
        }
        dom.boundary_vertex_map[dv] = it->second;
    }
    // the inclusion only represents h's boundary when h embeds
    std::vector<VertexId> image = h.map.image_vertices();
    if (image.size() != static_cast<size_t>(h.map.domain->vertex_count())) {
        throw InvalidArgument("domain_from_chain: hypersurface must embed its domain");
    }
    return dom;
}

// ---- radii and profiles ----

Length filling_radius(const FillResult& fill, const Hypersurface& h,
                      const Metric1Skeleton& metric) {
    if (!fill.finite) return kInfLength;
    std::vector<Length> dist = metric.distances_from_set(h.map.image_vertices());
    std::vector<VertexId> used;
    if (fill.domain) {
        used = fill.domain->map.image_vertices();
    } else if (fill.chain) {
        std::vector<char> seen(fill.chain->ambient->vertex_count(), 0);
        for (ChamberId c : fill.chain->support()) {
            for (VertexId v : fill.chain->ambient->chamber(c)) seen[v] = 1;
        }
        for (VertexId v = 0; v < fill.chain->ambient->vertex_count(); ++v) {
            if (seen[v]) used.push_back(v);
        }
    } else {
        return 0;  // empty filling
    }
    Length r = 0;
    for (VertexId v : used) r = std::max(r, dist[v]);
    return r;
}

std::vector<GrowthPoint> radius_growth_profile(const FillingDomain& fill, VertexId v,
                                               const Metric1Skeleton& metric) {
    std::vector<GrowthPoint> out;
    size_t total = fill.map.domain->chamber_count();
    for (Length i = 0;; ++i) {
        Restriction sub = restrict(fill.map, v, i, metric);
        GrowthPoint gp;
        gp.i = i;
        gp.vol = volume_of(fill.map, sub.chambers);
        for (const Simplex& f : sub.boundary) {
            Simplex img(f.size());
            for (size_t j = 0; j < f.size(); ++j) img[j] = fill.map.image_of(f[j]);
            std::sort(img.begin(), img.end());
            if (std::unique(img.begin(), img.end()) == img.end()) ++gp.boundary_vol;
        }
        out.push_back(gp);
        if (sub.chambers.count() == total) break;
        if (i > 4 * fill.map.domain->vertex_count()) {
            throw NonTerminating("radius growth profile failed to saturate");
        }
    }
    return out;
}

// ---- isoperimetric profiles ----

IsoProfile iso_profile(const Model& m, const std::vector<std::pair<int, Hypersurface>>& family,
                       FillMethod method) {
    if (family.empty()) throw EmptyFamily("iso_profile: no hypersurfaces given");
    Metric1Skeleton metric(*m.X);

    IsoProfile out;
    for (const auto& [size, h] : family) {
        auto t0 = Clock::now();
        FillResult fr;
        if (method == FillMethod::oracle) {
            fr = oracle_fill(h, m);
        } else {
            VertexId apex = h.map.image_vertices().front();
            Combing comb = build_combing(m.X, apex);
            fr = cone_fill(h, comb, apex, &m);
            if (method == FillMethod::heuristic) {
                // cone volume is an upper bound; replace it when the exact
                // chain is smaller
                FillResult exact = oracle_fill(h, m);
                if (exact.finite && exact.vol < fr.vol) {
                    fr = std::move(exact);
                }
                fr.method = FillMethod::heuristic;
            }
        }
        IsoRecord rec;
        rec.size = size;
        rec.vol = volume(h);
        rec.diam = diameter(h, metric);
        rec.finite = fr.finite;
        rec.fill_vol = fr.finite ? fr.vol : 0;
        rec.fill_rad = filling_radius(fr, h, metric);
        rec.runtime_ms = ms_since(t0);
        out.records.push_back(rec);
    }

    std::vector<std::pair<double, double>> pts;
    for (const IsoRecord& r : out.records) {
        if (r.finite && r.size > 0 && r.fill_vol > 0) {
            pts.push_back({static_cast<double>(r.size), static_cast<double>(r.fill_vol)});
        }
    }
    if (pts.size() >= 3) {
        ExponentFit fit = fit_exponent(pts);
        out.exponent = fit.slope;
        out.intercept = fit.intercept;
        out.residual = fit.residual;
    }
    return out;
}

}  // namespace fillab
