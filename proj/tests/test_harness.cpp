#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "fillab/harness.hpp"

using namespace fillab;

TEST_CASE("exponent fit on exact power laws") {
    ExponentFit fit = fit_exponent({{4, 16}, {8, 64}, {16, 256}, {32, 1024}});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.residual == doctest::Approx(0.0));

    // perimeter x = 4s against area y = 2s^2 still fits slope 2
    std::vector<std::pair<double, double>> pts;
    for (double s : {4, 8, 16, 32}) pts.push_back({4 * s, 2 * s * s});
    CHECK(fit_exponent(pts).slope == doctest::Approx(2.0));
}

TEST_CASE("exponent fit input validation") {
    CHECK_THROWS_AS(fit_exponent({{1, 1}, {2, 4}}), InsufficientPoints);
    CHECK_THROWS_AS(fit_exponent({{1, 1}, {2, 4}, {2, 4}, {1, 1}, {2, 4}, {2, 4}, {2, 4}}),
                    InsufficientPoints);  // no distinct sizes after the drop
    CHECK_THROWS_AS(fit_exponent({{1, 1}, {2, -4}, {3, 9}}), NonPositiveValue);
}

TEST_CASE("exponent fit drops the two smallest sizes at five points") {
    // transient at small sizes, clean slope 3 afterwards
    std::vector<std::pair<double, double>> pts = {{1, 50}, {2, 90}, {4, 64}, {8, 512}, {16, 4096}};
    CHECK(fit_exponent(pts).slope == doctest::Approx(3.0));
}

TEST_CASE("config parsing") {
    std::istringstream is(
        "# sweep setup\n"
        "experiment = iso-profile\n"
        "\n"
        "sizes = 2, 4, 8   # loop sides\n"
        "method=oracle\n");
    auto config = parse_config(is);
    CHECK(config.size() == 3);
    CHECK(config.at("experiment") == "iso-profile");
    CHECK(config.at("sizes") == "2, 4, 8");
    CHECK(config.at("method") == "oracle");

    std::istringstream bad("just some words\n");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    std::istringstream nokey(" = value\n");
    CHECK_THROWS_AS(parse_config(nokey), ConfigError);
}

TEST_CASE("config hash is stable and input-sensitive") {
    std::map<std::string, std::string> a{{"experiment", "iso-profile"}, {"sizes", "2,4"}};
    std::map<std::string, std::string> b = a;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b["sizes"] = "2,4,8";
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("csv emission is versioned and canonically ordered") {
    ExperimentRecord r1, r2, r3;
    r1.experiment = "iso-profile";
    r1.size = 8;
    r1.sample_id = "s8";
    r1.value = 128;
    r2.experiment = "iso-profile";
    r2.size = 2;
    r2.sample_id = "s2";
    r2.value = 8;
    r2.measured = {{"eta", 1.5}, {"sigma", 0.25}};
    r3.experiment = "divergence-profile";
    r3.size = 4;
    r3.sample_id = "pair4";
    r3.finite = false;
    r3.value = std::numeric_limits<double>::infinity();

    std::ostringstream os;
    write_csv(os, {r1, r2, r3});
    std::istringstream lines(os.str());
    std::string l;
    std::getline(lines, l);
    CHECK(l == "# fillab-csv v1");
    std::getline(lines, l);  // column header
    std::getline(lines, l);
    CHECK(l.find("divergence-profile,4") == 0);  // sorted before iso-profile
    CHECK(l.find("inf") != std::string::npos);
    std::getline(lines, l);
    CHECK(l.find("iso-profile,2") == 0);
    CHECK(l.find("eta=1.5;sigma=0.25") != std::string::npos);
    std::getline(lines, l);
    CHECK(l.find("iso-profile,8") == 0);
}

TEST_CASE("plot emission is deterministic") {
    PlotSeries general{"general", {{2, 8}, {4, 32}, {8, 128}}, 0};
    PlotSeries restricted{"restricted", {{2, 8}, {4, 30}}, 2};
    std::ostringstream a, b;
    emit_plot(a, {general, restricted}, "size", "fill volume");
    emit_plot(b, {general, restricted}, "size", "fill volume");
    CHECK(a.str() == b.str());
    CHECK(a.str().find("<svg") == 0);
    CHECK(a.str().find("slope=2.00") != std::string::npos);  // fitted-line annotation
    CHECK(a.str().find("inf=2") != std::string::npos);       // infinite points surfaced
    CHECK(a.str().find("restricted") != std::string::npos);

    std::ostringstream sink;
    CHECK_THROWS_AS(emit_plot(sink, {}, "x", "y"), EmptyRecords);
}

TEST_CASE("iso-profile experiment fits the square-loop law") {
    std::map<std::string, std::string> config{{"experiment", "iso-profile"},
                                              {"sizes", "2,4,8"},
                                              {"expect_exponent", "2.0"},
                                              {"exponent_tol", "0.05"}};
    ExperimentSummary s = run_experiment(config, 1, 7, false);
    REQUIRE(s.records.size() == 3);
    CHECK(s.records.back().value == 128);
    CHECK(s.fitted.at("exponent") == doctest::Approx(2.0).epsilon(0.01));
    CHECK(s.assertions_failed == 0);
    CHECK(s.assertions_passed >= 4);  // per-size finiteness plus the exponent gate
}

TEST_CASE("experiment config validation") {
    CHECK_THROWS_AS(run_experiment({{"sizes", "2,4"}}, 1, 7, false), ConfigError);
    CHECK_THROWS_AS(run_experiment({{"experiment", "iso-profile"}}, 1, 7, false), ConfigError);
    CHECK_THROWS_AS(run_experiment({{"experiment", "iso-profile"}, {"sizes", ""}}, 1, 7, false),
                    ConfigError);
    CHECK_THROWS_AS(
        run_experiment({{"experiment", "iso-profile"}, {"sizes", "4,2"}}, 1, 7, false),
        ConfigError);
    CHECK_THROWS_AS(run_experiment({{"experiment", "warp-drive"}, {"sizes", "2,4"}}, 1, 7, false),
                    ConfigError);
}

TEST_CASE("radius-profile experiment checks the growth inequality") {
    std::map<std::string, std::string> config{{"experiment", "radius-profile"},
                                              {"sizes", "2,4,6"}};
    ExperimentSummary s = run_experiment(config, 2, 7, false);
    REQUIRE(s.records.size() == 3);
    CHECK(s.assertions_failed == 0);
    for (const ExperimentRecord& r : s.records) CHECK(r.fill_rad >= 1);
}

TEST_CASE("partition-sweep experiment certifies every sample") {
    std::map<std::string, std::string> config{{"experiment", "partition-sweep"},
                                              {"sizes", "2"},
                                              {"samples", "2"}};
    ExperimentSummary s = run_experiment(config, 2, 42, false);
    REQUIRE(s.records.size() == 2);
    CHECK(s.assertions_failed == 0);
    CHECK(s.assertions_passed == 4);

    SUBCASE("a corrupted certificate cannot pass") {
        config["corrupt_certificate"] = "true";
        ExperimentSummary bad = run_experiment(config, 1, 42, false);
        CHECK(bad.assertions_failed > 0);
        CHECK_FALSE(bad.records.front().pass);
    }
}

TEST_CASE("folded-sweep experiment carves every dumbbell") {
    std::map<std::string, std::string> config{{"experiment", "folded-sweep"}, {"sizes", "10,20"}};
    ExperimentSummary s = run_experiment(config, 2, 7, false);
    REQUIRE(s.records.size() == 2);
    CHECK(s.assertions_failed == 0);
    for (const ExperimentRecord& r : s.records) {
        CHECK(r.value >= 1);  // at least one contour carved
        CHECK(r.measured.count("r_star"));
    }
}

TEST_CASE("divergence-profile experiment at k = 0 is linear") {
    std::map<std::string, std::string> config{{"experiment", "divergence-profile"},
                                              {"sizes", "4,8,16"},
                                              {"k", "0"},
                                              {"expect_exponent", "1.0"}};
    ExperimentSummary s = run_experiment(config, 2, 7, false);
    REQUIRE(s.records.size() == 3);
    CHECK(s.assertions_failed == 0);
    CHECK(s.fitted.at("exponent") == doctest::Approx(1.0).epsilon(0.1));
    for (const ExperimentRecord& r : s.records) {
        CHECK(r.value >= 2.0 * r.size);
    }
}

TEST_CASE("pipeline-compare experiment never beats the oracle") {
    std::map<std::string, std::string> config{{"experiment", "pipeline-compare"},
                                              {"sizes", "2"}};
    ExperimentSummary s = run_experiment(config, 1, 7, false);
    REQUIRE(s.records.size() == 1);
    CHECK(s.assertions_failed == 0);
    CHECK(s.records[0].value >= s.records[0].measured.at("oracle"));
    CHECK(s.fitted.at("ratio_spread") >= 1.0);
}

TEST_CASE("experiment reruns reproduce the csv byte for byte") {
    std::map<std::string, std::string> config{{"experiment", "partition-sweep"},
                                              {"sizes", "2"},
                                              {"samples", "2"}};
    std::ostringstream a, b;
    write_csv(a, run_experiment(config, 2, 42, false).records);
    write_csv(b, run_experiment(config, 1, 42, false).records);
    CHECK(a.str() == b.str());
}

TEST_CASE("model cache round-trips through scx files") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "fillab-cache-test";
    fs::remove_all(dir);
    setenv("FILLAB_CACHE", dir.c_str(), 1);
    std::map<std::string, std::string> config{{"experiment", "iso-profile"}, {"sizes", "2,4"}};
    std::ostringstream cold, warm;
    write_csv(cold, run_experiment(config, 1, 7, false).records);
    CHECK_FALSE(fs::is_empty(dir));  // first run populated the cache
    write_csv(warm, run_experiment(config, 1, 7, false).records);
    unsetenv("FILLAB_CACHE");
    CHECK(cold.str() == warm.str());
    fs::remove_all(dir);
}
