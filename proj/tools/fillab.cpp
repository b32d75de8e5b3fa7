// fillab — command-line front end for the filling/divergence library.
//
// Verbs: generate, fill, partition, folded, divergence, experiment,
// check-cert. Models travel as .scx files (with metadata comments),
// hypersurfaces as .hsf, partition certificates as .cert.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "fillab/decomposition.hpp"
#include "fillab/divergence.hpp"
#include "fillab/harness.hpp"

using namespace fillab;

namespace {

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file: " + path);
    std::vector<std::string> comments;
    auto X = std::make_shared<SimplicialComplex>(read_scx(in, &comments));
    return model_from_scx_comments(X, comments);
}

Hypersurface load_surface(const std::string& path, const Model& m) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open surface file: " + path);
    return read_hsf(in, m.X);
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write: " + path);
    out << text;
}

struct GenerateArgs {
    std::string kind = "grid2";
    int size = 8, size_y = -1, size_z = -1, margin = -1;
    std::vector<int> removal;       // cx,cy,cz,r
    std::vector<int> loop;          // x,y,s
    std::vector<int> sphere;        // x,y,z,s
    std::vector<int> perturbed;     // x,y,z,s,seed
    std::vector<int> dumbbell;      // bulb_side,neck_length
    std::string out, surface_out;
};

int run_generate(const GenerateArgs& a) {
    ModelSpec spec;
    spec.kind = model_kind_from_string(a.kind);
    spec.size = a.size;
    spec.size_y = a.size_y;
    spec.size_z = a.size_z;
    spec.margin = a.margin;
    if (!a.removal.empty()) {
        if (a.removal.size() != 4) throw ConfigError("--removal wants cx,cy,cz,r");
        spec.removal = Removal{{a.removal[0], a.removal[1], a.removal[2]},
                               static_cast<Length>(a.removal[3])};
    }
    Model m = generate(spec);
    if (!a.out.empty()) {
        std::ofstream os(a.out);
        write_scx(os, *m.X, model_comments(m));
        std::cout << "wrote " << a.out << " (" << m.X->vertex_count() << " vertices, "
                  << m.X->chamber_count() << " chambers)\n";
    }
    std::optional<Hypersurface> h;
    if (!a.loop.empty()) {
        if (a.loop.size() != 3) throw ConfigError("--loop wants x,y,s");
        h = square_loop(m, m.vertex_at(a.loop[0], a.loop[1]), a.loop[2]);
    } else if (!a.sphere.empty()) {
        if (a.sphere.size() != 4) throw ConfigError("--sphere wants x,y,z,s");
        h = boundary_sphere(m, m.vertex_at(a.sphere[0], a.sphere[1], a.sphere[2]), a.sphere[3]);
    } else if (!a.perturbed.empty()) {
        if (a.perturbed.size() != 5) throw ConfigError("--perturbed wants x,y,z,s,seed");
        h = perturbed_sphere(m, m.vertex_at(a.perturbed[0], a.perturbed[1], a.perturbed[2]),
                             a.perturbed[3], static_cast<uint64_t>(a.perturbed[4]));
    } else if (!a.dumbbell.empty()) {
        if (a.dumbbell.size() != 2) throw ConfigError("--dumbbell wants bulb_side,neck_length");
        h = dumbbell_sphere(m, {.bulb_side = a.dumbbell[0], .neck_length = a.dumbbell[1]});
    }
    if (h) {
        if (a.surface_out.empty()) throw ConfigError("surface requested without --surface-out");
        save_text(a.surface_out, to_hsf_string(*h));
        std::cout << "wrote " << a.surface_out << " (k=" << h->k << ", vol=" << volume(*h)
                  << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"combinatorial filling and divergence toolkit"};
    app.require_subcommand(1);
    int threads = 1;
    uint64_t seed = 7;
    bool verbose = false;
    app.add_option("--threads", threads, "worker pool size");
    app.add_option("--seed", seed, "base random seed");
    app.add_flag("--verbose", verbose, "print per-assertion progress");

    GenerateArgs gen;
    CLI::App* generate_cmd = app.add_subcommand("generate", "build a model and test surfaces");
    generate_cmd->add_option("--kind", gen.kind, "model kind");
    generate_cmd->add_option("--size", gen.size, "cells per side");
    generate_cmd->add_option("--size-y", gen.size_y, "cells along y");
    generate_cmd->add_option("--size-z", gen.size_z, "cells along z");
    generate_cmd->add_option("--margin", gen.margin, "margin band width");
    generate_cmd->add_option("--removal", gen.removal, "cx,cy,cz,r ball removal")->delimiter(',');
    generate_cmd->add_option("--loop", gen.loop, "square loop x,y,s")->delimiter(',');
    generate_cmd->add_option("--sphere", gen.sphere, "boundary sphere x,y,z,s")->delimiter(',');
    generate_cmd->add_option("--perturbed", gen.perturbed, "bumped sphere x,y,z,s,seed")
        ->delimiter(',');
    generate_cmd->add_option("--dumbbell", gen.dumbbell, "dumbbell bulb_side,neck_length")
        ->delimiter(',');
    generate_cmd->add_option("--out", gen.out, "output .scx path");
    generate_cmd->add_option("--surface-out", gen.surface_out, "output .hsf path");

    std::string model_path, surface_path, method_name = "oracle", out_path;
    bool certify = false;
    CLI::App* fill_cmd = app.add_subcommand("fill", "fill a hypersurface");
    fill_cmd->add_option("--model", model_path)->required();
    fill_cmd->add_option("--surface", surface_path)->required();
    fill_cmd->add_option("--method", method_name, "cone | oracle | heuristic");
    fill_cmd->add_flag("--certify", certify, "re-derive the oracle value exhaustively");

    double eps = 0.5;
    CLI::App* partition_cmd = app.add_subcommand("partition", "round partition with certificate");
    partition_cmd->add_option("--model", model_path)->required();
    partition_cmd->add_option("--surface", surface_path)->required();
    partition_cmd->add_option("--eps", eps, "roundness parameter");
    partition_cmd->add_option("--out", out_path, "output .cert path");

    long rho = 100;
    CLI::App* folded_cmd = app.add_subcommand("folded", "carve the folded part at a scale");
    folded_cmd->add_option("--model", model_path)->required();
    folded_cmd->add_option("--surface", surface_path)->required();
    folded_cmd->add_option("--eps", eps, "folded threshold parameter");
    folded_cmd->add_option("--rho", rho, "scale");
    folded_cmd->add_option("--out", out_path, "output .cert path");

    int div_k = 2;
    double delta = 0.25;
    long div_r = 1;
    std::vector<int> coords_a, coords_b, coords_c;
    CLI::App* div_cmd = app.add_subcommand("divergence", "divergence of a pair or hypersurface");
    div_cmd->add_option("--model", model_path)->required();
    div_cmd->add_option("--k", div_k, "0 for paths, else the surface dimension");
    div_cmd->add_option("--delta", delta, "obstacle-ball fraction");
    div_cmd->add_option("--r", div_r, "query radius");
    div_cmd->add_option("--surface", surface_path, "hypersurface (k > 0)");
    div_cmd->add_option("--a", coords_a, "endpoint grid coords (k = 0)")->delimiter(',');
    div_cmd->add_option("--b", coords_b, "endpoint grid coords (k = 0)")->delimiter(',');
    div_cmd->add_option("--c", coords_c, "obstacle center grid coords")->delimiter(',');

    std::string config_path, csv_path, svg_path;
    CLI::App* exp_cmd = app.add_subcommand("experiment", "run a configured sweep");
    exp_cmd->add_option("--config", config_path)->required();
    exp_cmd->add_option("--csv", csv_path, "records output");
    exp_cmd->add_option("--svg", svg_path, "plot output");

    std::string cert_path;
    CLI::App* check_cmd = app.add_subcommand("check-cert", "verify a partition certificate");
    check_cmd->add_option("--model", model_path)->required();
    check_cmd->add_option("--cert", cert_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate_cmd->parsed()) return run_generate(gen);

        if (fill_cmd->parsed()) {
            Model m = load_model(model_path);
            Hypersurface h = load_surface(surface_path, m);
            FillMethod method = fill_method_from_string(method_name);
            FillResult fr;
            if (method == FillMethod::oracle) {
                fr = oracle_fill(h, m);
            } else {
                VertexId apex = h.map.image_vertices().front();
                fr = cone_fill(h, build_combing(m.X, apex), apex, &m);
                if (method == FillMethod::heuristic) {
                    FillResult exact = oracle_fill(h, m);
                    if (exact.finite && exact.vol < fr.vol) fr = std::move(exact);
                }
            }
            Metric1Skeleton metric(*m.X, m.X->vertex_count() <= 4096 ? 4096 : 0);
            std::cout << "vol(h) = " << volume(h) << "\n";
            if (fr.finite) {
                std::cout << "fill vol = " << fr.vol
                          << "\nfill rad = " << filling_radius(fr, h, metric) << "\n";
            } else {
                std::cout << "fill vol = inf (not null-homologous in this patch)\n";
            }
            if (certify) {
                OptimalityCertificate cert =
                    certify_oracle(h, m, fr, nullptr, m.X->chamber_count());
                std::cout << "certified minimal: " << (cert.verified ? "yes" : "no") << " ("
                          << cert.chambers_touched << " chambers touched)\n";
            }
            return 0;
        }

        if (partition_cmd->parsed() || folded_cmd->parsed()) {
            Model m = load_model(model_path);
            Hypersurface h = load_surface(surface_path, m);
            PartitionCertificate cert =
                partition_cmd->parsed()
                    ? round_partition_full(h, eps, &m)
                    : remove_folded(h, eps, static_cast<Length>(rho), &m);
            std::vector<std::string> problems = check_certificate(cert);
            std::cout << "pieces = " << cert.pieces.size()
                      << ", contours = " << cert.contour_count() << "\n";
            for (const auto& [name, ok] : cert.assertions) {
                std::cout << (ok ? "  [pass] " : "  [FAIL] ") << name << "\n";
            }
            for (const std::string& p : problems) std::cout << "  [FAIL] " << p << "\n";
            if (!out_path.empty()) save_text(out_path, to_cert_string(cert));
            return (cert.all_pass() && problems.empty()) ? 0 : 1;
        }

        if (div_cmd->parsed()) {
            Model m = load_model(model_path);
            if (coords_c.empty()) throw ConfigError("--c is required");
            VertexId c = coords_c.size() > 2 ? m.vertex_at(coords_c[0], coords_c[1], coords_c[2])
                                             : m.vertex_at(coords_c[0], coords_c[1]);
            if (div_k == 0) {
                if (coords_a.size() < 2 || coords_b.size() < 2) {
                    throw ConfigError("k = 0 wants --a and --b grid coords");
                }
                VertexId a = coords_a.size() > 2
                                 ? m.vertex_at(coords_a[0], coords_a[1], coords_a[2])
                                 : m.vertex_at(coords_a[0], coords_a[1]);
                VertexId b = coords_b.size() > 2
                                 ? m.vertex_at(coords_b[0], coords_b[1], coords_b[2])
                                 : m.vertex_at(coords_b[0], coords_b[1]);
                Div0Result res = div0(*m.X, a, b, c, delta);
                std::cout << "dist(a,b) = " << res.dist_ab << "\n";
                std::cout << "detour = " << (res.finite ? std::to_string(res.length) : "inf")
                          << "\n";
                return 0;
            }
            if (surface_path.empty()) throw ConfigError("k > 0 wants --surface");
            Hypersurface h = load_surface(surface_path, m);
            DivkResult res = divk({h, c, static_cast<Length>(div_r), delta}, m);
            std::cout << "divergence = " << (res.finite ? std::to_string(res.value) : "inf")
                      << " (free fill "
                      << (res.unrestricted_finite ? std::to_string(res.unrestricted_vol) : "inf")
                      << ", " << res.forbidden_count << " forbidden chambers)\n";
            return 0;
        }

        if (exp_cmd->parsed()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open config: " + config_path);
            auto config = parse_config(in);
            ExperimentSummary s = run_experiment(config, threads, seed, verbose);
            std::cout << "records = " << s.records.size() << ", assertions "
                      << s.assertions_passed << " passed / " << s.assertions_failed
                      << " failed\n";
            for (const auto& [name, val] : s.fitted) {
                std::cout << "  " << name << " = " << val << "\n";
            }
            if (!csv_path.empty()) {
                std::ofstream os(csv_path);
                os << "# config " << config_hash(config) << "\n";
                write_csv(os, s.records);
            }
            if (!svg_path.empty()) {
                std::map<std::string, PlotSeries> grouped;
                for (const ExperimentRecord& r : s.records) {
                    PlotSeries& ps = grouped[r.experiment];
                    ps.label = r.experiment;
                    if (r.finite && r.size > 0 && r.value > 0) {
                        ps.points.push_back({static_cast<double>(r.size), r.value});
                    } else if (!r.finite) {
                        ++ps.infinite_count;
                    }
                }
                std::vector<PlotSeries> series;
                for (auto& [name, ps] : grouped) series.push_back(std::move(ps));
                std::ofstream os(svg_path);
                emit_plot(os, series, "size", "value");
            }
            return s.assertions_failed > 0 ? 1 : 0;
        }

        if (check_cmd->parsed()) {
            Model m = load_model(model_path);
            std::ifstream in(cert_path);
            if (!in) throw ConfigError("cannot open certificate: " + cert_path);
            PartitionCertificate cert = read_cert(in, m.X);
            std::vector<std::string> problems = check_certificate(cert);
            if (problems.empty()) {
                std::cout << "certificate ok (" << cert.pieces.size() << " pieces, "
                          << cert.caps.size() << " caps)\n";
                return 0;
            }
            for (const std::string& p : problems) std::cout << "problem: " << p << "\n";
            return 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
