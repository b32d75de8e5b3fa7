#include "fillab/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace fillab {

Simplex SimplicialMap::chamber_image(ChamberId c) const {
    Simplex img;
    for (VertexId v : domain->chamber(c)) img.push_back(vertex_image[v]);
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    return img;
}

bool SimplicialMap::chamber_collapsed(ChamberId c) const {
    return chamber_image(c).size() != domain->chamber(c).size();
}

std::vector<VertexId> SimplicialMap::image_vertices() const {
    std::vector<VertexId> out = vertex_image;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void validate_simplicial(const SimplicialMap& f) {
    if (static_cast<int>(f.vertex_image.size()) != f.domain->vertex_count()) {
        throw InvalidArgument("simplicial map: vertex_image size mismatch");
    }
    for (VertexId img : f.vertex_image) {
        if (img < 0 || img >= f.ambient->vertex_count()) {
            throw InvalidArgument("simplicial map: image vertex out of range");
        }
    }
    for (ChamberId c = 0; c < static_cast<ChamberId>(f.domain->chamber_count()); ++c) {
        Simplex img = f.chamber_image(c);
        if (img.size() > 1 && !f.ambient->has_simplex(img)) {
            throw InvalidArgument("simplicial map: chamber " + std::to_string(c) +
                                  " image does not span an ambient simplex");
        }
    }
}

size_t volume(const SimplicialMap& f) {
    size_t n = 0;
    for (ChamberId c = 0; c < static_cast<ChamberId>(f.domain->chamber_count()); ++c) {
        if (!f.chamber_collapsed(c)) ++n;
    }
    return n;
}

size_t volume_of(const SimplicialMap& f, const ChamberSet& chambers) {
    size_t n = 0;
    for (ChamberId c : chambers.to_vector()) {
        if (!f.chamber_collapsed(c)) ++n;
    }
    return n;
}

Length diameter(const Hypersurface& h, const Metric1Skeleton& metric) {
    std::vector<VertexId> img = h.map.image_vertices();
    if (img.empty()) throw InvalidArgument("diameter: empty image");
    Length best = 0;
    for (VertexId u : img) {
        const auto& d = metric.distances_from(u);
        for (VertexId v : img) {
            if (d[v] != kInfLength) best = std::max(best, d[v]);
        }
    }
    return best;
}

Length diameter(const Hypersurface& h) {
    Metric1Skeleton metric(*h.map.ambient, 0);
    return diameter(h, metric);
}

bool is_round(const Hypersurface& h, double eta, const Metric1Skeleton& metric) {
    size_t vol = volume(h);
    Length diam = diameter(h, metric);
    if (vol == 0) return diam == 0;
    return static_cast<double>(diam) <= eta * std::pow(static_cast<double>(vol), 1.0 / h.k);
}

bool is_round(const Hypersurface& h, double eta) {
    Metric1Skeleton metric(*h.map.ambient, 0);
    return is_round(h, eta, metric);
}

std::vector<VertexId> volume_vertices(const SimplicialMap& f) {
    std::vector<char> in(f.domain->vertex_count(), 0);
    for (ChamberId c = 0; c < static_cast<ChamberId>(f.domain->chamber_count()); ++c) {
        if (!f.chamber_collapsed(c)) {
            for (VertexId v : f.domain->chamber(c)) in[v] = 1;
        }
    }
    std::vector<VertexId> out;
    for (VertexId v = 0; v < static_cast<VertexId>(in.size()); ++v) {
        if (in[v]) out.push_back(v);
    }
    return out;
}

namespace {

// Codimension-1 faces of a chamber tuple.
std::vector<Simplex> facets(const Simplex& ch) {
    std::vector<Simplex> out;
    for (size_t i = 0; i < ch.size(); ++i) {
        Simplex f;
        for (size_t j = 0; j < ch.size(); ++j) {
            if (j != i) f.push_back(ch[j]);
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<Simplex> internal_frontier(const SimplicialMap& f, const ChamberSet& chambers) {
    const SimplicialComplex& D = *f.domain;
    std::map<Simplex, int> in_count;
    for (ChamberId c : chambers.to_vector()) {
        for (auto& fc : facets(D.chamber(c))) in_count[fc] += 1;
    }
    std::vector<Simplex> out;
    for (auto& [face, cnt] : in_count) {
        if (cnt == 1 && D.incident_chambers(face).size() == 2) out.push_back(face);
    }
    return out;
}

}  // namespace

Restriction restrict(const SimplicialMap& f, VertexId v, Length r,
                     const Metric1Skeleton& metric) {
    const SimplicialComplex& D = *f.domain;
    Restriction out;
    out.source = &f;
    out.center = v;
    out.radius = r;
    out.chambers = ChamberSet(D.chamber_count());
    if (r < 0) return out;

    const auto& dist = metric.distances_from(f.image_of(v));
    auto admissible = [&](ChamberId c) {
        for (VertexId w : D.chamber(c)) {
            Length d = dist[f.image_of(w)];
            if (d == kInfLength || d > r) return false;
        }
        return true;
    };

    ChamberSet allowed(D.chamber_count());
    for (ChamberId c = 0; c < static_cast<ChamberId>(D.chamber_count()); ++c) {
        if (admissible(c)) allowed.set(c);
    }
    std::deque<ChamberId> q;
    for (ChamberId c : D.star_chambers(v)) {
        if (allowed.test(c) && !out.chambers.test(c)) {
            out.chambers.set(c);
            q.push_back(c);
        }
    }
    while (!q.empty()) {
        ChamberId c = q.front();
        q.pop_front();
        for (ChamberId n : D.adjacent_chambers(c)) {
            if (allowed.test(n) && !out.chambers.test(n)) {
                out.chambers.set(n);
                q.push_back(n);
            }
        }
    }
    out.boundary = internal_frontier(f, out.chambers);
    return out;
}

Restriction restrict(const SimplicialMap& f, VertexId v, Length r) {
    Metric1Skeleton metric(*f.ambient, 0);
    return restrict(f, v, r, metric);
}

std::vector<size_t> restriction_volume_profile(const SimplicialMap& f, VertexId v,
                                               Length max_r, const Metric1Skeleton& metric) {
    const SimplicialComplex& D = *f.domain;
    const auto& dist = metric.distances_from(f.image_of(v));
    const ChamberId n = static_cast<ChamberId>(D.chamber_count());
    // smallest r at which the chamber becomes admissible (kInfLength: never)
    std::vector<Length> admit_r(n);
    std::vector<std::vector<ChamberId>> by_radius(max_r + 2);
    for (ChamberId c = 0; c < n; ++c) {
        Length m = 0;
        for (VertexId w : D.chamber(c)) {
            Length d = dist[f.image_of(w)];
            m = (d == kInfLength) ? kInfLength : std::max(m, d);
            if (m == kInfLength) break;
        }
        admit_r[c] = m;
        if (m != kInfLength && m <= max_r) by_radius[m].push_back(c);
    }
    std::vector<char> is_star(n, 0);
    for (ChamberId c : D.star_chambers(v)) is_star[c] = 1;

    std::vector<char> included(n, 0);
    size_t vol = 0;
    std::vector<size_t> profile(max_r + 1, 0);
    std::deque<ChamberId> q;
    auto include = [&](ChamberId c) {
        included[c] = 1;
        if (!f.chamber_collapsed(c)) ++vol;
        q.push_back(c);
    };
    for (Length r = 0; r <= max_r; ++r) {
        for (ChamberId c : by_radius[r]) {
            if (included[c]) continue;
            bool reach = is_star[c];
            if (!reach) {
                for (ChamberId nb : D.adjacent_chambers(c)) {
                    if (included[nb]) { reach = true; break; }
                }
            }
            if (reach) include(c);
        }
        while (!q.empty()) {
            ChamberId c = q.front();
            q.pop_front();
            for (ChamberId nb : D.adjacent_chambers(c)) {
                if (!included[nb] && admit_r[nb] != kInfLength && admit_r[nb] <= r) include(nb);
            }
        }
        profile[r] = vol;
    }
    return profile;
}

CutResult cut(const SimplicialMap& f, const ChamberSet& chambers) {
    const SimplicialComplex& D = *f.domain;
    const int k = D.dimension();
    if (k > 2) throw UnsupportedDimension("cut: only k <= 2 supported");
    std::vector<ChamberId> chs = chambers.to_vector();
    if (chs.empty()) throw DegenerateInput("cut: empty chamber set");

    // Start fully disjoint: chamber i gets fresh vertex copies, then glue
    // copies along shared (k-1)-faces, pairing incident chambers in id order.
    const size_t arity = static_cast<size_t>(k) + 1;
    std::vector<int> parent(chs.size() * arity);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

    std::map<ChamberId, size_t> local;  // original chamber id -> index in chs
    for (size_t i = 0; i < chs.size(); ++i) local[chs[i]] = i;
    auto copy_id = [&](size_t ci, VertexId orig_v) {
        const Simplex& ch = D.chamber(chs[ci]);
        size_t pos = std::lower_bound(ch.begin(), ch.end(), orig_v) - ch.begin();
        return static_cast<int>(ci * arity + pos);
    };

    std::map<Simplex, std::vector<size_t>> face_users;
    for (size_t i = 0; i < chs.size(); ++i) {
        for (auto& fc : facets(D.chamber(chs[i]))) face_users[fc].push_back(i);
    }
    for (auto& [face, users] : face_users) {
        std::sort(users.begin(), users.end());
        for (size_t p = 0; p + 1 < users.size(); p += 2) {
            for (VertexId v : face) unite(copy_id(users[p], v), copy_id(users[p + 1], v));
        }
    }

    // Number the classes and assemble the new complex.
    std::map<int, VertexId> class_id;
    CutResult out;
    std::vector<Simplex> new_chambers;
    for (size_t i = 0; i < chs.size(); ++i) {
        Simplex nc;
        for (VertexId v : D.chamber(chs[i])) {
            int root = find(copy_id(i, v));
            auto it = class_id.find(root);
            if (it == class_id.end()) {
                it = class_id.emplace(root, static_cast<VertexId>(out.glue.size())).first;
                out.glue.push_back(v);
            }
            nc.push_back(it->second);
        }
        std::sort(nc.begin(), nc.end());
        new_chambers.push_back(std::move(nc));
        out.chamber_origin.push_back(chs[i]);
    }
    out.complex = build_complex(new_chambers);
    out.map.domain = std::make_shared<SimplicialComplex>(out.complex);
    out.map.ambient = f.ambient;
    out.map.vertex_image.resize(out.glue.size());
    for (size_t i = 0; i < out.glue.size(); ++i) {
        out.map.vertex_image[i] = f.image_of(out.glue[i]);
    }
    return out;
}

CutResult cut(const Restriction& sub) { return cut(*sub.source, sub.chambers); }

double folded_threshold(double eps, Length r, int k) {
    return eps * std::pow(static_cast<double>(r), k) / (2.0 * std::pow(12.0, k));
}

FoldedSet folded_set(const Hypersurface& h, double eps, Length rho,
                     const Metric1Skeleton& metric) {
    if (!(eps > 0 && eps < 1)) throw InvalidArgument("folded_set: eps must be in (0,1)");
    if (rho < 1) throw InvalidArgument("folded_set: rho must be >= 1");
    FoldedSet out;
    out.eps = eps;
    out.rho = rho;
    for (VertexId v : volume_vertices(h.map)) {
        auto profile = restriction_volume_profile(h.map, v, rho, metric);
        for (Length r = 1; r <= rho; ++r) {
            if (static_cast<double>(profile[r]) <= folded_threshold(eps, r, h.k)) {
                out.vertices.push_back(v);
                out.witness_radius.push_back(r);
                break;
            }
        }
    }
    return out;
}

FoldedSet folded_set(const Hypersurface& h, double eps, Length rho) {
    Metric1Skeleton metric(*h.map.ambient, 0);
    return folded_set(h, eps, rho, metric);
}

bool is_closed_manifold(const SimplicialComplex& X) {
    std::map<Simplex, int> cnt;
    for (const auto& ch : X.chambers()) {
        for (auto& fc : facets(ch)) cnt[fc] += 1;
    }
    for (auto& [f, c] : cnt) {
        if (c != 2) return false;
    }
    return true;
}

std::vector<Simplex> boundary_faces(const SimplicialComplex& X) {
    std::map<Simplex, int> cnt;
    for (const auto& ch : X.chambers()) {
        for (auto& fc : facets(ch)) cnt[fc] += 1;
    }
    std::vector<Simplex> out;
    for (auto& [f, c] : cnt) {
        if (c == 1) out.push_back(f);
    }
    return out;
}

long euler_characteristic(const SimplicialComplex& X) {
    std::vector<long> counts(X.dimension() + 1, 0);
    for (int d = 0; d <= X.dimension(); ++d) {
        counts[d] = static_cast<long>(X.faces_of_dimension(d).size());
    }
    long chi = 0;
    for (int d = 0; d <= X.dimension(); ++d) chi += (d % 2 == 0 ? 1 : -1) * counts[d];
    return chi;
}

std::vector<int> orient_manifold(const SimplicialComplex& X) {
    if (X.dimension() < 1) return {};
    std::vector<int> sign(X.chamber_count(), 0);
    for (ChamberId seed = 0; seed < static_cast<ChamberId>(X.chamber_count()); ++seed) {
        if (sign[seed] != 0) continue;
        sign[seed] = 1;
        std::deque<ChamberId> q{seed};
        while (!q.empty()) {
            ChamberId c = q.front();
            q.pop_front();
            const Simplex& ch = X.chamber(c);
            auto fs = facets(ch);
            for (size_t i = 0; i < fs.size(); ++i) {
                const auto& inc = X.incident_chambers(fs[i]);
                for (ChamberId n : inc) {
                    if (n == c) continue;
                    const Simplex& nch = X.chamber(n);
                    size_t j = 0;
                    for (; j < nch.size(); ++j) {
                        if (!std::binary_search(fs[i].begin(), fs[i].end(), nch[j])) break;
                    }
                    // induced orientations must be opposite
                    int want = -sign[c] * ((i + j) % 2 == 0 ? 1 : -1);
                    if (sign[n] == 0) {
                        sign[n] = want;
                        q.push_back(n);
                    } else if (sign[n] != want) {
                        return {};
                    }
                }
            }
        }
    }
    return sign;
}

FillingDomain normalize_domain(const FillingDomain& d) {
    // Work on mutable copies of the chamber list and vertex images.
    std::vector<Simplex> chambers = d.map.domain->chambers();
    std::vector<VertexId> image = d.map.vertex_image;
    std::vector<VertexId> bmap = d.boundary_vertex_map;
    size_t target_volume = volume(d.map);

    auto run_pass = [&](std::vector<Simplex>& chs, std::vector<VertexId>& img,
                        std::vector<VertexId>& bm) -> bool {
        // Recompute boundary data for the current chamber list.
        std::map<Simplex, int> facet_count;
        for (const auto& ch : chs) {
            for (auto& fc : facets(ch)) facet_count[fc] += 1;
        }
        std::set<VertexId> boundary_verts;
        std::set<std::pair<VertexId, VertexId>> boundary_edges;
        for (auto& [f, c] : facet_count) {
            if (c != 1) continue;
            for (VertexId v : f) boundary_verts.insert(v);
            for (size_t i = 0; i < f.size(); ++i) {
                for (size_t j = i + 1; j < f.size(); ++j) boundary_edges.insert({f[i], f[j]});
            }
        }
        // Find a contractible interior edge with equal endpoint images.
        std::set<std::pair<VertexId, VertexId>> edges;
        for (const auto& ch : chs) {
            for (size_t i = 0; i < ch.size(); ++i) {
                for (size_t j = i + 1; j < ch.size(); ++j) edges.insert({ch[i], ch[j]});
            }
        }
        for (auto [u, w] : edges) {
            if (img[u] != img[w]) continue;
            if (boundary_edges.count({u, w})) continue;
            if (boundary_verts.count(u) && boundary_verts.count(w)) continue;
            VertexId keep = boundary_verts.count(u) ? u : (boundary_verts.count(w) ? w : u);
            VertexId drop = (keep == u) ? w : u;
            // Trial contraction.
            std::vector<Simplex> next;
            std::set<Simplex> seen;
            size_t vol = 0;
            for (const auto& ch : chs) {
                Simplex nc;
                for (VertexId v : ch) nc.push_back(v == drop ? keep : v);
                std::sort(nc.begin(), nc.end());
                if (std::adjacent_find(nc.begin(), nc.end()) != nc.end()) continue;
                if (!seen.insert(nc).second) continue;
                Simplex im;
                for (VertexId v : nc) im.push_back(img[v]);
                std::sort(im.begin(), im.end());
                im.erase(std::unique(im.begin(), im.end()), im.end());
                if (im.size() == nc.size()) ++vol;
                next.push_back(std::move(nc));
            }
            if (vol != target_volume) continue;  // contraction would lose volume, skip
            // the contraction must not disturb the boundary or pinch facets
            std::map<Simplex, int> trial_count;
            for (const auto& ch : next) {
                for (auto& fc : facets(ch)) trial_count[fc] += 1;
            }
            size_t old_boundary = 0, new_boundary = 0;
            for (auto& [f, c] : facet_count) {
                if (c == 1) ++old_boundary;
            }
            bool pinched = false;
            for (auto& [f, c] : trial_count) {
                if (c == 1) ++new_boundary;
                if (c > 2) pinched = true;
            }
            if (pinched || new_boundary != old_boundary) continue;
            chs = std::move(next);
            for (VertexId& v : bm) {
                if (v == drop) v = keep;
            }
            return true;
        }
        return false;
    };

    while (run_pass(chambers, image, bmap)) {
    }

    // Compact vertex ids.
    std::map<VertexId, VertexId> remap;
    for (const auto& ch : chambers) {
        for (VertexId v : ch) {
            if (!remap.count(v)) remap[v] = static_cast<VertexId>(remap.size());
        }
    }
    std::vector<Simplex> final_chambers;
    for (const auto& ch : chambers) {
        Simplex nc;
        for (VertexId v : ch) nc.push_back(remap[v]);
        std::sort(nc.begin(), nc.end());
        final_chambers.push_back(std::move(nc));
    }
    FillingDomain out;
    out.map.domain = std::make_shared<SimplicialComplex>(build_complex(final_chambers));
    out.map.ambient = d.map.ambient;
    out.map.vertex_image.resize(remap.size());
    for (auto& [old_v, new_v] : remap) out.map.vertex_image[new_v] = image[old_v];
    out.boundary_of = d.boundary_of;
    out.boundary_vertex_map.resize(bmap.size());
    for (size_t i = 0; i < bmap.size(); ++i) out.boundary_vertex_map[i] = remap.at(bmap[i]);
    return out;
}

void write_hsf(std::ostream& os, const Hypersurface& h,
               const std::vector<std::string>& extra_comments) {
    for (const auto& c : extra_comments) os << "# " << c << "\n";
    if (h.model == SurfaceModel::sphere) {
        os << "model sphere k " << h.k << "\n";
    } else {
        os << "model surface " << h.genus << " k " << h.k << "\n";
    }
    write_scx(os, *h.map.domain);
    for (VertexId v = 0; v < h.map.domain->vertex_count(); ++v) {
        os << "m " << v << " " << h.map.vertex_image[v] << "\n";
    }
}

Hypersurface read_hsf(std::istream& is, ComplexPtr ambient) {
    std::string line;
    Hypersurface h;
    bool have_model = false;
    std::ostringstream scx;
    std::vector<std::pair<VertexId, VertexId>> assignments;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "model") {
            std::string kind;
            ls >> kind;
            if (kind == "sphere") {
                h.model = SurfaceModel::sphere;
            } else if (kind == "surface") {
                h.model = SurfaceModel::surface;
                ls >> h.genus;
            } else {
                throw FormatError("read_hsf: unknown model kind '" + kind + "'");
            }
            std::string ktag;
            ls >> ktag >> h.k;
            if (ktag != "k") throw FormatError("read_hsf: malformed model header");
            have_model = true;
        } else if (tag == "m") {
            VertexId dv, av;
            ls >> dv >> av;
            assignments.emplace_back(dv, av);
        } else {
            scx << line << "\n";
        }
    }
    if (!have_model) throw FormatError("read_hsf: missing model header");
    h.map.domain = std::make_shared<SimplicialComplex>(from_scx_string(scx.str()));
    h.map.ambient = std::move(ambient);
    h.map.vertex_image.assign(h.map.domain->vertex_count(), -1);
    for (auto [dv, av] : assignments) {
        if (dv < 0 || dv >= h.map.domain->vertex_count()) {
            throw FormatError("read_hsf: map line vertex out of range");
        }
        h.map.vertex_image[dv] = av;
    }
    validate_simplicial(h.map);
    return h;
}

std::string to_hsf_string(const Hypersurface& h) {
    std::ostringstream os;
    write_hsf(os, h);
    return os.str();
}

Hypersurface from_hsf_string(const std::string& text, ComplexPtr ambient) {
    std::istringstream is(text);
    return read_hsf(is, std::move(ambient));
}

}  // namespace fillab
