#include "fillab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fillab {

namespace {

Simplex image_tuple(const SimplicialMap& f, ChamberId c) {
    const Simplex& s = f.domain->chamber(c);
    Simplex t(s.size());
    for (size_t i = 0; i < s.size(); ++i) t[i] = f.vertex_image[s[i]];
    std::sort(t.begin(), t.end());
    return t;
}

CertPiece identity_piece(const Hypersurface& h) {
    CertPiece p;
    p.h = h;
    p.origin.resize(h.map.domain->chamber_count());
    for (size_t c = 0; c < p.origin.size(); ++c) {
        p.origin[c] = Provenance{false, static_cast<int>(c), 0, 0};
    }
    return p;
}

PartitionCertificate trivial_certificate(const Hypersurface& h) {
    PartitionCertificate cert;
    cert.source = h;
    cert.pieces.push_back(identity_piece(h));
    return cert;
}

// ---- carving machinery ----

struct Selection {
    VertexId y = -1;
    Length r = -1;
    ChamberSet chambers;
};

// Boundary cycles of a cut manifold-with-boundary, as cyclic vertex lists.
std::vector<std::vector<VertexId>> boundary_cycles(const SimplicialComplex& X) {
    std::vector<Simplex> edges = boundary_faces(X);
    std::map<VertexId, std::vector<int>> at;
    for (size_t e = 0; e < edges.size(); ++e) {
        for (VertexId v : edges[e]) at[v].push_back(static_cast<int>(e));
    }
    for (auto& [v, es] : at) {
        if (es.size() != 2) {
            throw CapFillUnavailable("boundary is not a union of circles after cutting");
        }
    }
    std::vector<std::vector<VertexId>> cycles;
    std::vector<char> used(edges.size(), 0);
    for (size_t e0 = 0; e0 < edges.size(); ++e0) {
        if (used[e0]) continue;
        std::vector<VertexId> cyc{edges[e0][0], edges[e0][1]};
        used[e0] = 1;
        while (true) {
            VertexId cur = cyc.back();
            int next = -1;
            for (int e : at[cur]) {
                if (!used[e]) next = e;
            }
            if (next < 0) break;
            used[next] = 1;
            cyc.push_back(edges[next][0] == cur ? edges[next][1] : edges[next][0]);
        }
        if (cyc.front() != cyc.back()) {
            throw CapFillUnavailable("boundary walk did not close up");
        }
        cyc.pop_back();
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

using EdgeLabel = std::pair<VertexId, VertexId>;  // a source-domain edge

// Rotates/reflects the cycle so that the sequence of source-edge labels is
// lexicographically minimal. Both sides of a frontier circle then agree on
// the numbering, so they build byte-identical cap disks.
std::vector<VertexId> canonical_cycle(const std::vector<VertexId>& cyc,
                                      const std::vector<VertexId>& glue,
                                      std::vector<EdgeLabel>* key_out) {
    int m = static_cast<int>(cyc.size());
    auto label = [&](VertexId a, VertexId b) {
        VertexId u = glue[a], w = glue[b];
        return u < w ? EdgeLabel{u, w} : EdgeLabel{w, u};
    };
    std::vector<VertexId> best;
    std::vector<EdgeLabel> best_key;
    for (int dir : {1, -1}) {
        for (int rot = 0; rot < m; ++rot) {
            std::vector<VertexId> cand(m);
            for (int j = 0; j < m; ++j) cand[j] = cyc[((rot + dir * j) % m + m) % m];
            std::vector<EdgeLabel> key(m);
            for (int j = 0; j < m; ++j) key[j] = label(cand[j], cand[(j + 1) % m]);
            if (best.empty() || key < best_key) {
                best = std::move(cand);
                best_key = std::move(key);
            }
        }
    }
    if (key_out) *key_out = best_key;
    return best;
}

struct CapEntry {
    int id = -1;
    FillingDomain disk;
    int uses = 0;
};

struct CarveContext {
    const Hypersurface* h = nullptr;
    const Model* margin = nullptr;
    std::map<std::vector<EdgeLabel>, CapEntry> cache;
};

// Cone-fills the image circle of a canonical boundary cycle.
CapEntry& cap_for(CarveContext& ctx, const std::vector<EdgeLabel>& key,
                  const std::vector<VertexId>& canon, const SimplicialMap& cut_map) {
    auto it = ctx.cache.find(key);
    if (it != ctx.cache.end()) return it->second;

    int m = static_cast<int>(canon.size());
    std::vector<Simplex> edges;
    std::vector<VertexId> image(m);
    for (int j = 0; j < m; ++j) {
        VertexId a = j, b = (j + 1) % m;
        edges.push_back(a < b ? Simplex{a, b} : Simplex{b, a});
        image[j] = cut_map.image_of(canon[j]);
    }
    Hypersurface circle;
    circle.k = 1;
    circle.model = SurfaceModel::sphere;
    circle.map.domain = std::make_shared<SimplicialComplex>(build_complex(edges));
    circle.map.ambient = ctx.h->map.ambient;
    circle.map.vertex_image = image;

    VertexId apex = *std::min_element(image.begin(), image.end());
    Combing comb = build_combing(ctx.h->map.ambient, apex, false);
    FillResult fr = cone_fill(circle, comb, apex, ctx.margin);

    CapEntry entry;
    entry.id = static_cast<int>(ctx.cache.size());
    entry.disk = std::move(*fr.domain);
    return ctx.cache.emplace(key, std::move(entry)).first->second;
}

// Builds one closed piece: the cut restriction plus one cap disk copy per
// boundary circle.
CertPiece assemble_piece(CarveContext& ctx, const ChamberSet& chambers, bool is_contour,
                         VertexId center, Length radius) {
    const Hypersurface& h = *ctx.h;
    CutResult cr = cut(h.map, chambers);

    std::vector<Simplex> piece_chambers = cr.complex.chambers();
    std::vector<VertexId> image(cr.complex.vertex_count());
    for (VertexId v = 0; v < cr.complex.vertex_count(); ++v) image[v] = cr.map.image_of(v);
    std::vector<Provenance> origin;
    for (ChamberId c = 0; c < static_cast<ChamberId>(piece_chambers.size()); ++c) {
        origin.push_back(Provenance{false, cr.chamber_origin[c], 0, 0});
    }

    VertexId next_id = cr.complex.vertex_count();
    for (const auto& cyc : boundary_cycles(cr.complex)) {
        std::vector<EdgeLabel> key;
        std::vector<VertexId> canon = canonical_cycle(cyc, cr.glue, &key);
        CapEntry& cap = cap_for(ctx, key, canon, cr.map);
        int side = cap.uses++;
        if (side > 1) throw CapFillUnavailable("frontier circle bounded by more than two pieces");

        const SimplicialComplex& D = *cap.disk.map.domain;
        std::vector<VertexId> tr(D.vertex_count(), -1);
        for (size_t j = 0; j < canon.size(); ++j) {
            tr[cap.disk.boundary_vertex_map[j]] = canon[j];
        }
        for (VertexId v = 0; v < D.vertex_count(); ++v) {
            if (tr[v] < 0) {
                tr[v] = next_id++;
                image.push_back(cap.disk.map.image_of(v));
            }
        }
        for (ChamberId c = 0; c < static_cast<ChamberId>(D.chamber_count()); ++c) {
            Simplex s = D.chamber(c);
            for (VertexId& v : s) v = tr[v];
            std::sort(s.begin(), s.end());
            piece_chambers.push_back(std::move(s));
            origin.push_back(Provenance{true, cap.id, static_cast<int>(c), side});
        }
    }

    CertPiece piece;
    piece.h.k = h.k;
    piece.h.model = h.model;
    piece.h.genus = h.genus;
    piece.h.map.domain = std::make_shared<SimplicialComplex>(build_complex(piece_chambers));
    piece.h.map.ambient = h.map.ambient;
    piece.h.map.vertex_image = std::move(image);
    piece.origin = std::move(origin);
    piece.is_contour = is_contour;
    piece.center = center;
    piece.radius = radius;
    return piece;
}

// Splits h along the selections; every source chamber lands in exactly one
// piece (first selection wins; `disjoint` reports whether a tie occurred).
PartitionCertificate carve(const Hypersurface& h, const std::vector<Selection>& sels,
                           const Model* margin, bool* disjoint) {
    size_t n = h.map.domain->chamber_count();
    std::vector<int> owner(n, -1);
    bool clean = true;
    for (size_t i = 0; i < sels.size(); ++i) {
        for (ChamberId c : sels[i].chambers.to_vector()) {
            if (owner[c] < 0) {
                owner[c] = static_cast<int>(i);
            } else {
                clean = false;
            }
        }
    }
    if (disjoint) *disjoint = clean;

    PartitionCertificate cert;
    cert.source = h;
    CarveContext ctx{&h, margin, {}};

    std::vector<ChamberSet> region(sels.size(), ChamberSet(n));
    ChamberSet rest(n);
    for (size_t c = 0; c < n; ++c) {
        if (owner[c] >= 0) {
            region[owner[c]].set(static_cast<ChamberId>(c));
        } else {
            rest.set(static_cast<ChamberId>(c));
        }
    }
    for (size_t i = 0; i < sels.size(); ++i) {
        if (region[i].empty()) continue;
        cert.pieces.push_back(assemble_piece(ctx, region[i], true, sels[i].y, sels[i].r));
    }
    if (!rest.empty()) {
        cert.pieces.push_back(assemble_piece(ctx, rest, false, -1, -1));
    }

    cert.caps.resize(ctx.cache.size());
    for (auto& [key, entry] : ctx.cache) {
        if (entry.uses != 2) {
            throw CapFillUnavailable("frontier circle not shared by exactly two pieces");
        }
        CapRecord rec;
        rec.volume = volume(entry.disk.map);
        for (ChamberId c = 0; c < static_cast<ChamberId>(entry.disk.map.domain->chamber_count());
             ++c) {
            rec.chamber_images.push_back(image_tuple(entry.disk.map, c));
        }
        cert.caps[entry.id] = std::move(rec);
    }
    return cert;
}

// Replaces base piece `piece_idx` by the pieces of a certificate refining it,
// rewriting provenance through the host piece's origin.
void splice(PartitionCertificate& base, int piece_idx, PartitionCertificate sub) {
    CertPiece host = std::move(base.pieces[piece_idx]);
    int cap_off = static_cast<int>(base.caps.size());
    for (auto& cap : sub.caps) base.caps.push_back(std::move(cap));
    base.pieces.erase(base.pieces.begin() + piece_idx);
    for (auto& piece : sub.pieces) {
        for (auto& pr : piece.origin) {
            if (pr.is_cap) {
                pr.id += cap_off;
            } else {
                pr = host.origin[pr.id];
            }
        }
        base.pieces.push_back(std::move(piece));
    }
    base.particular_case = base.particular_case || sub.particular_case;
    for (auto& a : sub.assertions) base.assertions.push_back(a);
}

size_t contour_volume_sum(const PartitionCertificate& cert) {
    size_t s = 0;
    for (const auto& p : cert.pieces) {
        if (p.is_contour) s += volume(p.h);
    }
    return s;
}

size_t remainder_volume(const PartitionCertificate& cert) {
    int ri = cert.remainder_index();
    return ri < 0 ? 0 : volume(cert.pieces[ri].h);
}

// Max distance from the image 1-skeleton of `h` to any image vertex used by
// a certificate piece.
Length certificate_spread(const PartitionCertificate& cert, const Metric1Skeleton& metric) {
    std::vector<Length> dist = metric.distances_from_set(cert.source.map.image_vertices());
    Length worst = 0;
    for (const auto& p : cert.pieces) {
        for (VertexId v : p.h.map.image_vertices()) worst = std::max(worst, dist[v]);
    }
    return worst;
}

double measured_eta(const PartitionCertificate& cert, const Metric1Skeleton& metric, int k) {
    double eta = 0;
    for (const auto& p : cert.pieces) {
        if (!p.is_contour) continue;
        size_t v = volume(p.h);
        if (v == 0) continue;
        eta = std::max(eta, diameter(p.h, metric) / std::pow(static_cast<double>(v), 1.0 / k));
    }
    return eta;
}

}  // namespace

// ---- certificate basics ----

bool PartitionCertificate::all_pass() const {
    for (const auto& [name, ok] : assertions) {
        if (!ok) return false;
    }
    return true;
}

size_t PartitionCertificate::contour_count() const {
    size_t n = 0;
    for (const auto& p : pieces) n += p.is_contour ? 1 : 0;
    return n;
}

int PartitionCertificate::remainder_index() const {
    for (size_t i = 0; i < pieces.size(); ++i) {
        if (!pieces[i].is_contour) return static_cast<int>(i);
    }
    return -1;
}

std::vector<std::string> check_certificate(const PartitionCertificate& cert) {
    std::vector<std::string> problems;
    size_t n = cert.source.map.domain->chamber_count();
    std::vector<int> source_uses(n, 0);
    // cap id -> chamber -> per-side use counts
    std::map<std::pair<int, int>, std::array<int, 2>> cap_uses;

    for (size_t pi = 0; pi < cert.pieces.size(); ++pi) {
        const CertPiece& p = cert.pieces[pi];
        std::string tag = "piece " + std::to_string(pi);
        try {
            validate_simplicial(p.h.map);
        } catch (const Error& e) {
            problems.push_back(tag + ": " + e.what());
        }
        if (!is_closed_manifold(*p.h.map.domain)) {
            problems.push_back(tag + ": not a closed manifold");
        }
        if (p.origin.size() != p.h.map.domain->chamber_count()) {
            problems.push_back(tag + ": provenance size mismatch");
            continue;
        }
        for (ChamberId c = 0; c < static_cast<ChamberId>(p.origin.size()); ++c) {
            const Provenance& pr = p.origin[c];
            Simplex img = image_tuple(p.h.map, c);
            if (!pr.is_cap) {
                if (pr.id < 0 || pr.id >= static_cast<int>(n)) {
                    problems.push_back(tag + ": bad source chamber id");
                    continue;
                }
                ++source_uses[pr.id];
                if (img != image_tuple(cert.source.map, pr.id)) {
                    problems.push_back(tag + ": source chamber image mismatch");
                }
            } else {
                if (pr.id < 0 || pr.id >= static_cast<int>(cert.caps.size()) ||
                    pr.sub >= static_cast<int>(cert.caps[pr.id].chamber_images.size()) ||
                    pr.side < 0 || pr.side > 1) {
                    problems.push_back(tag + ": bad cap reference");
                    continue;
                }
                ++cap_uses[{pr.id, pr.sub}][pr.side];
                if (img != cert.caps[pr.id].chamber_images[pr.sub]) {
                    problems.push_back(tag + ": cap chamber image mismatch");
                }
            }
        }
    }
    for (size_t c = 0; c < n; ++c) {
        if (source_uses[c] != 1) {
            problems.push_back("source chamber " + std::to_string(c) + " used " +
                               std::to_string(source_uses[c]) + " times");
        }
    }
    for (int cap = 0; cap < static_cast<int>(cert.caps.size()); ++cap) {
        for (int sub = 0; sub < static_cast<int>(cert.caps[cap].chamber_images.size()); ++sub) {
            auto it = cap_uses.find({cap, sub});
            std::array<int, 2> got = it == cap_uses.end() ? std::array<int, 2>{0, 0} : it->second;
            if (got[0] != 1 || got[1] != 1) {
                problems.push_back("cap " + std::to_string(cap) + " chamber " +
                                   std::to_string(sub) + " sides used " +
                                   std::to_string(got[0]) + "/" + std::to_string(got[1]));
            }
        }
    }
    return problems;
}

// ---- radii ----

Length r0_radius(const Hypersurface& h, VertexId y, double lambda,
                 const Metric1Skeleton& metric) {
    if (lambda <= 0) throw InvalidArgument("r0_radius: lambda must be positive");
    size_t vol = volume(h);
    Length dmax = diameter(h, metric) + 1;
    std::vector<size_t> prof = restriction_volume_profile(h.map, y, dmax, metric);
    Length rmax = static_cast<Length>(
        std::floor(std::pow(static_cast<double>(vol) / lambda, 1.0 / h.k)) + 1);
    Length best = 1;
    for (Length r = 1; r <= rmax; ++r) {
        size_t v = prof[std::min<size_t>(r, prof.size() - 1)];
        if (static_cast<double>(v) >= lambda * std::pow(r, h.k) - 1e-9) best = r;
    }
    return best;
}

CriticalRadii critical_radius(const Hypersurface& h, VertexId y, double eps, Length rho,
                              const Metric1Skeleton& metric) {
    if (eps <= 0 || eps >= 1) throw InvalidArgument("critical_radius: eps must be in (0,1)");
    int k = h.k;
    double pow12k = std::pow(12.0, k);
    Length dmax = std::max<Length>(6 * rho + 6, diameter(h, metric) + 1);
    std::vector<size_t> prof = restriction_volume_profile(h.map, y, dmax, metric);
    auto V = [&](Length r) { return prof[std::min<size_t>(r, prof.size() - 1)]; };

    CriticalRadii out;
    out.R_star = -1;
    for (Length r = 1; r <= rho; ++r) {
        if (static_cast<double>(V(r)) < eps * std::pow(r, k) / (2 * pow12k)) {
            out.R_star = r;
            break;
        }
    }
    if (out.R_star < 0) throw NotFoldedVertex("vertex has no folded scale within rho");
    out.r_star = 1;
    for (Length r = 1; r <= out.R_star; ++r) {
        if (static_cast<double>(V(r)) > eps * std::pow(r, k)) out.r_star = r;
    }
    out.r = out.r_star + 1;
    out.vol_r = V(out.r);
    out.vol_6r = V(6 * out.r);
    Restriction sub = restrict(h.map, y, out.r, metric);
    for (const Simplex& f : sub.boundary) {
        Simplex img(f.size());
        for (size_t i = 0; i < f.size(); ++i) img[i] = h.map.image_of(f[i]);
        std::sort(img.begin(), img.end());
        if (std::unique(img.begin(), img.end()) == img.end()) ++out.boundary_vol;
    }
    double ck = k * (k + 1) * std::pow(3.0, k - 1);
    out.b1 = static_cast<double>(out.vol_6r) <= pow12k * static_cast<double>(out.vol_r) + 1e-9;
    out.b2 = static_cast<double>(out.vol_r) <= eps * std::pow(out.r, k) + 1e-9;
    out.b3 = static_cast<double>(out.boundary_vol) <=
             ck * std::pow(eps, 1.0 / k) *
                     std::pow(static_cast<double>(out.vol_r), (k - 1.0) / k) +
                 1e-9;
    return out;
}

// ---- round partition ----

PartitionCertificate round_partition_step(const Hypersurface& h, double eps,
                                          const Model* margin) {
    if (h.k != 2) throw UnsupportedDimension("round partition implemented for k=2");
    int k = h.k;
    size_t vol = volume(h);
    double theta = 1.0 - 1.0 / std::pow(6.0, k + 1);

    if (vol == 0) {
        PartitionCertificate cert = trivial_certificate(h);
        cert.constants["theta"] = theta;
        cert.assertions.push_back({"round: zero-volume input kept as remainder", true});
        return cert;
    }

    Metric1Skeleton metric(*h.map.ambient);
    Length dmax = diameter(h, metric) + 1;
    std::vector<VertexId> mvol = volume_vertices(h.map);
    std::map<VertexId, std::vector<size_t>> profiles;
    for (VertexId y : mvol) {
        profiles[y] = restriction_volume_profile(h.map, y, dmax, metric);
    }
    auto r0_of = [&](VertexId y, double lambda) {
        const auto& prof = profiles[y];
        Length rmax = static_cast<Length>(
            std::floor(std::pow(static_cast<double>(vol) / lambda, 1.0 / k)) + 1);
        Length best = 1;
        for (Length r = 1; r <= rmax; ++r) {
            size_t v = prof[std::min<size_t>(r, prof.size() - 1)];
            if (static_cast<double>(v) >= lambda * std::pow(r, k) - 1e-9) best = r;
        }
        return best;
    };

    double lambda = std::pow(2.0, -k);
    for (int halvings = 0;; ++halvings, lambda /= 2) {
        if (halvings > 20) throw NonTerminating("round partition: lambda halving cap exceeded");

        std::vector<char> alive(h.map.domain->vertex_count(), 0);
        for (VertexId y : mvol) alive[y] = 1;
        std::vector<Selection> sels;
        while (true) {
            VertexId pick = -1;
            Length pick_r = 0;
            for (VertexId y : mvol) {
                if (!alive[y]) continue;
                Length r = r0_of(y, lambda);
                if (r > pick_r) {
                    pick = y;
                    pick_r = r;
                }
            }
            if (pick < 0) break;
            Selection sel;
            sel.y = pick;
            sel.r = pick_r;
            sel.chambers = restrict(h.map, pick, pick_r, metric).chambers;
            sels.push_back(sel);
            for (ChamberId c : restrict(h.map, pick, 6 * pick_r, metric).chambers.to_vector()) {
                for (VertexId v : h.map.domain->chamber(c)) alive[v] = 0;
            }
            alive[pick] = 0;
        }

        bool disjoint = true;
        PartitionCertificate cert = carve(h, sels, margin, &disjoint);
        cert.particular_case = sels.size() == 1;

        size_t csum = contour_volume_sum(cert);
        size_t rvol = remainder_volume(cert);
        double R = eps * std::pow(static_cast<double>(vol), 1.0 / k);
        bool b_sum = csum <= 2 * vol;
        bool b_rem = static_cast<double>(rvol) <= theta * vol + 1e-9;
        bool b_nbhd = certificate_spread(cert, metric) <= R + 1e-9;
        if (!(b_sum && b_rem && b_nbhd)) continue;

        cert.assertions.push_back({"round: contour volume sum <= 2 Vol", b_sum});
        cert.assertions.push_back({"round: remainder <= theta Vol", b_rem});
        cert.assertions.push_back({"round: pieces inside the eps Vol^{1/k} neighborhood", b_nbhd});
        cert.assertions.push_back({"round: selections chamber-disjoint", disjoint});
        cert.constants["lambda"] = lambda;
        cert.constants["theta"] = theta;
        cert.constants["eps"] = eps;
        cert.constants["R"] = R;
        cert.constants["eta"] = measured_eta(cert, metric, k);
        return cert;
    }
}

PartitionCertificate round_partition_full(const Hypersurface& h, double eps,
                                          const Model* margin) {
    int k = h.k;
    double theta = 1.0 - 1.0 / std::pow(6.0, k + 1);
    PartitionCertificate cert = round_partition_step(h, eps, margin);
    size_t prev = remainder_volume(cert);
    int guard = 0;
    while (prev > 0) {
        if (++guard > 2000) throw NonDecayingRemainder("round partition failed to terminate");
        int ri = cert.remainder_index();
        PartitionCertificate sub = round_partition_step(cert.pieces[ri].h, eps, margin);
        size_t next = remainder_volume(sub);
        if (static_cast<double>(next) > theta * prev + 1e-9) {
            throw NonDecayingRemainder("remainder volume did not decay by theta");
        }
        splice(cert, ri, std::move(sub));
        prev = next;
    }
    size_t vol = volume(h);
    size_t csum = contour_volume_sum(cert);
    double bound = 2 * std::pow(6.0, k + 1) * static_cast<double>(vol);
    cert.assertions.push_back(
        {"round-full: total contour volume <= 2*6^{k+1} Vol", static_cast<double>(csum) <= bound + 1e-9});
    cert.constants["total_contour_volume"] = static_cast<double>(csum);
    return cert;
}

// ---- folded removal ----

PartitionCertificate remove_folded(const Hypersurface& h, double eps, Length rho,
                                   const Model* margin) {
    if (h.k != 2) throw UnsupportedDimension("folded removal implemented for k=2");
    int k = h.k;
    double pow12k = std::pow(12.0, k);
    size_t vol = volume(h);
    Metric1Skeleton metric(*h.map.ambient);
    FoldedSet folded = folded_set(h, eps, rho, metric);

    if (vol == 0 || folded.vertices.empty()) {
        PartitionCertificate cert = trivial_certificate(h);
        cert.assertions.push_back({"folded: empty folded set kept as remainder", true});
        cert.constants["folded_card"] = 0;
        return cert;
    }

    std::map<VertexId, CriticalRadii> crit;
    for (VertexId y : folded.vertices) crit[y] = critical_radius(h, y, eps, rho, metric);

    std::vector<char> alive(h.map.domain->vertex_count(), 0);
    for (VertexId y : folded.vertices) alive[y] = 1;
    std::vector<Selection> sels;
    std::vector<CriticalRadii> picked;
    while (true) {
        VertexId pick = -1;
        Length pick_r = 0;
        for (VertexId y : folded.vertices) {
            if (!alive[y]) continue;
            if (crit[y].r > pick_r) {
                pick = y;
                pick_r = crit[y].r;
            }
        }
        if (pick < 0) break;
        Selection sel;
        sel.y = pick;
        sel.r = pick_r;
        sel.chambers = restrict(h.map, pick, pick_r, metric).chambers;
        sels.push_back(sel);
        picked.push_back(crit[pick]);
        for (ChamberId c : restrict(h.map, pick, 6 * pick_r, metric).chambers.to_vector()) {
            for (VertexId v : h.map.domain->chamber(c)) alive[v] = 0;
        }
        alive[pick] = 0;
    }

    // greedy-stage properties
    bool s1 = true, s2 = true, s4 = true;
    double vsum = 0;
    for (size_t i = 0; i < sels.size(); ++i) {
        double vi = static_cast<double>(picked[i].vol_r);
        vsum += vi;
        double ri = picked[i].r;
        if (!(eps * std::pow(ri, k) / (2 * pow12k) - 1e-9 <= vi &&
              vi <= eps * std::pow(ri, k) + 1e-9)) {
            s1 = false;
        }
        if (!(ri <= rho / 6.0 + 1e-9)) s2 = false;
        if (!picked[i].b3) s4 = false;
    }
    bool s3 = true;
    std::vector<ChamberSet> twice;
    for (const auto& sel : sels) {
        twice.push_back(restrict(h.map, sel.y, 2 * sel.r, metric).chambers);
    }
    for (size_t i = 0; i < twice.size() && s3; ++i) {
        for (size_t j = i + 1; j < twice.size(); ++j) {
            ChamberSet meet = twice[i];
            meet &= twice[j];
            if (!meet.empty()) {
                s3 = false;
                break;
            }
        }
    }
    double card = static_cast<double>(folded.vertices.size());
    bool s5 = vsum >= card / (2 * pow12k) - 1e-9;

    bool disjoint = true;
    PartitionCertificate cert = carve(h, sels, margin, &disjoint);

    bool o1 = true;
    double sigma = 0, csum = 0;
    for (const auto& p : cert.pieces) {
        if (!p.is_contour) continue;
        double v = static_cast<double>(volume(p.h));
        csum += v;
        if (!(v > 0 && v <= 2 * eps * std::pow(rho, k) / std::pow(6.0, k) + 1e-9)) o1 = false;
        if (v > 0) {
            sigma = std::max(sigma, std::pow(eps, 1.0 / k) * diameter(p.h, metric) /
                                        std::pow(v, 1.0 / k));
        }
    }
    bool o3 = csum >= card / (2 * pow12k) - 1e-9;
    bool o4 = static_cast<double>(remainder_volume(cert)) + csum / 2 <=
              static_cast<double>(vol) + 1e-9;

    cert.assertions.push_back({"folded: (s1) selection volume window", s1});
    cert.assertions.push_back({"folded: (s2) radii <= rho/6", s2});
    cert.assertions.push_back({"folded: (s3) doubled balls chamber-disjoint", s3});
    cert.assertions.push_back({"folded: (s4) boundary bound with C_k", s4});
    cert.assertions.push_back({"folded: (s5) selections cover the folded card", s5});
    cert.assertions.push_back({"folded: (1) contour volumes in (0, 2 eps rho^k/6^k]", o1});
    cert.assertions.push_back({"folded: (3) contour sum covers folded card", o3});
    cert.assertions.push_back({"folded: (4) remainder + half sum <= Vol", o4});
    cert.assertions.push_back({"folded: selections chamber-disjoint", disjoint});
    cert.constants["sigma"] = sigma;
    cert.constants["eps"] = eps;
    cert.constants["rho"] = static_cast<double>(rho);
    cert.constants["folded_card"] = card;
    return cert;
}

PartitionCertificate folded_unfolded_decomposition(const Hypersurface& h, double eps,
                                                   double delta, const Model* margin) {
    size_t vol = volume(h);
    int k = h.k;
    auto scale_of = [&](size_t v) {
        return std::max<Length>(
            1, static_cast<Length>(std::ceil(6 * delta * std::pow(static_cast<double>(v), 1.0 / k))));
    };

    PartitionCertificate cert = remove_folded(h, eps, scale_of(vol), margin);
    size_t iters = 0;
    while (true) {
        int ri = cert.remainder_index();
        if (ri < 0) break;
        const Hypersurface& rem = cert.pieces[ri].h;
        size_t rvol = volume(rem);
        Length rho = scale_of(rvol);
        Metric1Skeleton metric(*rem.map.ambient);
        if (rvol == 0 || folded_set(rem, eps, rho, metric).vertices.empty()) {
            cert.assertions.push_back({"thickthin: (1) remainder unfolded at its scale", true});
            cert.constants["final_scale"] = static_cast<double>(rho);
            break;
        }
        if (++iters > vol + 2) throw NonTerminating("folded-unfolded iteration exceeded Vol(h)");
        splice(cert, ri, remove_folded(rem, eps, rho, margin));
    }

    bool o2 = true;
    double csum = 0;
    for (const auto& p : cert.pieces) {
        if (!p.is_contour) continue;
        double v = static_cast<double>(volume(p.h));
        csum += v;
        if (!(v > 0 && v <= 2 * delta * delta * eps * static_cast<double>(vol) + 1e-9)) o2 = false;
    }
    bool o4 = static_cast<double>(remainder_volume(cert)) + csum / 2 <=
              static_cast<double>(vol) + 1e-9;
    cert.assertions.push_back({"thickthin: (2) contour volumes <= 2 delta^k eps Vol", o2});
    cert.assertions.push_back({"thickthin: (4) remainder + half sum <= Vol", o4});
    cert.constants["delta"] = delta;
    return cert;
}

// ---- unfolded to round ----

PartitionCertificate unfolded_to_round(const Hypersurface& h, double eps, double delta,
                                       const Model* margin) {
    if (h.k != 2) throw UnsupportedDimension("round split implemented for k=2");
    int k = h.k;
    size_t vol = volume(h);
    if (vol == 0) {
        PartitionCertificate cert = trivial_certificate(h);
        cert.assertions.push_back({"thickround: zero-volume input kept as remainder", true});
        return cert;
    }
    double vol_rk = std::pow(static_cast<double>(vol), 1.0 / k);
    Length W = static_cast<Length>(std::ceil(24 * delta * vol_rk));
    if (W < 6) {
        throw InvalidArgument("round split: volume below the W >= 6 scale");
    }
    Length scale = std::max<Length>(1, static_cast<Length>(std::ceil(6 * delta * vol_rk)));
    Length max_scan = static_cast<Length>(std::ceil(17.0 / (eps * delta * delta))) * W;
    int piece_budget = static_cast<int>(std::ceil(2.0 / (eps * delta * delta))) + 2;

    PartitionCertificate cert = trivial_certificate(h);
    while (true) {
        int ri = cert.remainder_index();
        if (ri < 0) break;
        const Hypersurface& cur = cert.pieces[ri].h;
        if (volume(cur) == 0) break;
        if (--piece_budget < 0) throw NonTerminating("round split produced too many pieces");

        Metric1Skeleton metric(*cur.map.ambient);
        VertexId v = volume_vertices(cur.map).front();
        Length dmax = std::min<Length>(max_scan + W + 1, diameter(cur, metric) + W + 2);
        std::vector<size_t> prof = restriction_volume_profile(cur.map, v, dmax, metric);
        auto V = [&](Length r) { return prof[std::min<size_t>(r, prof.size() - 1)]; };
        Length split = -1;
        for (Length r = W; r <= max_scan; ++r) {
            if (V(r + W) == V(r)) {
                split = r;
                break;
            }
        }
        if (split < 0) throw NoEmptyAnnulus("no volume-free annulus in the scan window");

        ChamberSet set = restrict(cur.map, v, split + W / 2, metric).chambers;
        if (set.count() == cur.map.domain->chamber_count()) {
            cert.pieces[ri].is_contour = true;
            cert.pieces[ri].center = v;
            cert.pieces[ri].radius = split + W / 2;
            break;
        }
        bool disjoint = true;
        splice(cert, ri, carve(cur, {Selection{v, split + W / 2, set}}, margin, &disjoint));
    }

    bool o1 = true, o3 = true;
    double kappa = 0;
    Metric1Skeleton metric(*h.map.ambient);
    int live_pieces = 0;
    for (const auto& p : cert.pieces) {
        double pv = static_cast<double>(volume(p.h));
        if (pv == 0) continue;
        ++live_pieces;
        if (!folded_set(p.h, eps, scale, metric).vertices.empty()) o1 = false;
        if (!(eps * delta * delta / 2 * static_cast<double>(vol) - 1e-9 <= pv &&
              pv <= static_cast<double>(vol))) {
            o3 = false;
        }
        kappa = std::max(kappa, diameter(p.h, metric) * eps * std::pow(delta, k - 1) / vol_rk);
    }
    int N = static_cast<int>(std::ceil(2.0 / (eps * delta * delta)));
    cert.assertions.push_back({"thickround: (1) pieces unfolded at the inherited scale", o1});
    cert.assertions.push_back({"thickround: (3) piece volumes within [eps delta^k Vol/2, Vol]", o3});
    cert.assertions.push_back({"thickround: piece count within N", live_pieces <= N});
    cert.constants["kappa"] = kappa;
    cert.constants["W"] = static_cast<double>(W);
    cert.constants["N"] = static_cast<double>(N);
    return cert;
}

// ---- pipeline ----

bool PipelineResult::all_pass() const {
    for (const auto& [name, ok] : assertions) {
        if (!ok) return false;
    }
    return true;
}

PipelineResult pipeline_fill(const Hypersurface& h, const PipelineParams& params,
                             const Model& m) {
    PipelineResult out;
    FillResult oracle = oracle_fill(h, m);
    out.oracle_vol = oracle.finite ? oracle.vol : 0;

    PartitionCertificate round_cert = round_partition_full(h, params.eps_round, &m);
    out.assertions.push_back(
        {"pipeline: round certificate sound", check_certificate(round_cert).empty()});

    std::vector<Hypersurface> leaves;
    bool sub_ok = true;
    for (const auto& piece : round_cert.pieces) {
        if (volume(piece.h) == 0) {
            leaves.push_back(piece.h);
            continue;
        }
        PartitionCertificate fu =
            folded_unfolded_decomposition(piece.h, params.eps_folded, params.delta, &m);
        sub_ok = sub_ok && check_certificate(fu).empty();
        for (const auto& fp : fu.pieces) {
            if (!fp.is_contour && params.split_round && volume(fp.h) > 0) {
                try {
                    PartitionCertificate ur =
                        unfolded_to_round(fp.h, params.eps_folded, params.delta, &m);
                    sub_ok = sub_ok && check_certificate(ur).empty();
                    for (const auto& rp : ur.pieces) leaves.push_back(rp.h);
                    continue;
                } catch (const InvalidArgument&) {
                    // below the W >= 6 splitting scale; fill directly
                }
            }
            leaves.push_back(fp.h);
        }
    }
    out.assertions.push_back({"pipeline: stage certificates sound", sub_ok});

    out.terminal_pieces = static_cast<int>(leaves.size());
    for (const auto& leaf : leaves) {
        FillResult fr = oracle_fill(leaf, m);
        if (!fr.finite) {
            out.finite = false;
            break;
        }
        out.assembled_vol += fr.vol;
    }
    bool sandwich = out.finite && oracle.finite && out.assembled_vol >= out.oracle_vol;
    out.assertions.push_back({"pipeline: assembled volume >= oracle volume", sandwich});
    out.ratio = out.oracle_vol > 0 ? static_cast<double>(out.assembled_vol) / out.oracle_vol
                                   : (out.assembled_vol == 0 ? 1.0 : 0.0);
    return out;
}

// ---- serialization ----

void write_cert(std::ostream& os, const PartitionCertificate& cert) {
    nlohmann::json j;
    j["format"] = "fillab-cert v1";
    j["source"] = to_hsf_string(cert.source);
    j["particular_case"] = cert.particular_case;
    j["constants"] = cert.constants;
    for (const auto& [name, ok] : cert.assertions) {
        j["assertions"].push_back({{"name", name}, {"pass", ok}});
    }
    for (const auto& cap : cert.caps) {
        nlohmann::json jc;
        jc["volume"] = cap.volume;
        jc["images"] = cap.chamber_images;
        j["caps"].push_back(jc);
    }
    for (const auto& p : cert.pieces) {
        nlohmann::json jp;
        jp["hsf"] = to_hsf_string(p.h);
        jp["contour"] = p.is_contour;
        jp["center"] = p.center;
        jp["radius"] = p.radius;
        for (const auto& pr : p.origin) {
            jp["origin"].push_back({pr.is_cap ? 1 : 0, pr.id, pr.sub, pr.side});
        }
        j["pieces"].push_back(jp);
    }
    os << j.dump(1) << "\n";
}

PartitionCertificate read_cert(std::istream& is, ComplexPtr ambient) {
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("cert parse: ") + e.what());
    }
    if (!j.contains("format") || j["format"] != "fillab-cert v1") {
        throw FormatError("cert: unknown format tag");
    }
    PartitionCertificate cert;
    cert.source = from_hsf_string(j["source"].get<std::string>(), ambient);
    cert.particular_case = j.value("particular_case", false);
    if (j.contains("constants")) {
        cert.constants = j["constants"].get<std::map<std::string, double>>();
    }
    for (const auto& ja : j.value("assertions", nlohmann::json::array())) {
        cert.assertions.push_back({ja["name"].get<std::string>(), ja["pass"].get<bool>()});
    }
    for (const auto& jc : j.value("caps", nlohmann::json::array())) {
        CapRecord cap;
        cap.volume = jc["volume"].get<size_t>();
        cap.chamber_images = jc["images"].get<std::vector<Simplex>>();
        cert.caps.push_back(std::move(cap));
    }
    for (const auto& jp : j.value("pieces", nlohmann::json::array())) {
        CertPiece p;
        p.h = from_hsf_string(jp["hsf"].get<std::string>(), ambient);
        p.is_contour = jp["contour"].get<bool>();
        p.center = jp["center"].get<VertexId>();
        p.radius = jp["radius"].get<Length>();
        for (const auto& jo : jp.value("origin", nlohmann::json::array())) {
            p.origin.push_back(Provenance{jo[0].get<int>() == 1, jo[1].get<int>(),
                                          jo[2].get<int>(), jo[3].get<int>()});
        }
        cert.pieces.push_back(std::move(p));
    }
    return cert;
}

std::string to_cert_string(const PartitionCertificate& cert) {
    std::ostringstream os;
    write_cert(os, cert);
    return os.str();
}

PartitionCertificate from_cert_string(const std::string& text, ComplexPtr ambient) {
    std::istringstream is(text);
    return read_cert(is, ambient);
}

}  // namespace fillab
