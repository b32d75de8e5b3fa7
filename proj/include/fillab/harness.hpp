#pragma once

// Experiment orchestration: config parsing, exponent fitting, CSV and SVG
// emission. The CLI verbs in tools/fillab.cpp are thin wrappers over this.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fillab/errors.hpp"

namespace fillab {

struct ExponentFit {
    double slope = 0;
    double intercept = 0;   // of log y vs log x
    double residual = 0;    // max |log y - fit| over used points
};

// Ordinary least squares on (log x, log y); the smallest two sizes are
// dropped when five or more points are given.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points);

struct ExperimentRecord {
    std::string experiment;
    int size = 0;
    int k = 0;
    std::string sample_id;
    size_t vol = 0;
    long diam = 0;
    bool finite = true;
    double value = 0;       // fill volume / divergence / etc
    long fill_rad = -1;
    std::map<std::string, double> measured;  // named constants
    bool pass = true;
    double runtime_ms = 0;
};

// `# fillab-csv v1` header; canonical order (experiment, size, sampleId).
void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // finite values only
    int infinite_count = 0;
};

// Deterministic log-log scatter with fitted lines per series.
void emit_plot(std::ostream& os, const std::vector<PlotSeries>& series,
               const std::string& x_label, const std::string& y_label);

// Flat `key = value` config files; '#' comments, blank lines ignored.
std::map<std::string, std::string> parse_config(std::istream& is);
std::string config_hash(const std::map<std::string, std::string>& config);

struct ExperimentSummary {
    std::vector<ExperimentRecord> records;
    std::map<std::string, double> fitted;      // named exponents / constants
    int assertions_passed = 0;
    int assertions_failed = 0;
};

// Runs one experiment described by a parsed config. Known kinds:
// iso-profile, radius-profile, partition-sweep, folded-sweep,
// divergence-profile, pipeline-compare.
ExperimentSummary run_experiment(const std::map<std::string, std::string>& config,
                                 int threads, uint64_t seed, bool verbose);

}  // namespace fillab
