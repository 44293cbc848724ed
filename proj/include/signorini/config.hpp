#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "signorini/elliptic.hpp"
#include "signorini/epi.hpp"
#include "signorini/free_boundary.hpp"
#include "signorini/functionals.hpp"
#include "signorini/problems.hpp"

namespace signorini {

// Config text format:
//
//   # comment
//   [section]
//   key:type = value
//
// with type one of int, real, str, bool, reals (comma-separated list).
// Unknown sections or keys are rejected.

struct ConfigError : std::runtime_error {
    std::string path;    // "section.key" or "line N"
    std::string reason;
    ConfigError(std::string p, std::string r)
        : std::runtime_error(p + ": " + r), path(std::move(p)), reason(std::move(r)) {}
};

struct AnalysisConfig {
    std::optional<double> delta;  // defaults to default_delta(a)
    double sigma = 0.5;
    double ell = 4.0;
    double C_mono = 0.0;
    double C_par = 0.0;
    double r_min = 0.0;  // 0 means the smallest trusted radius
    double r_max = 0.5;
    int radii_count = 8;
    double class_tol = 0.25;
    std::vector<double> center{0.0, 0.0};

    FrequencyParams frequency(double a) const;
};

struct DtnConfig {
    std::vector<double> k{1.0, 2.0};
    double R = 3.141592653589793;
    double Y = 8.0;
    int nx = 65;
    int ny = 33;
    int levels = 3;  // refinement levels (nx, ny doubled per level)
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
    bool wants(const std::string& fmt) const;
};

struct ExperimentConfig {
    ProblemParams problem;
    SolverParams solver;
    EpiParams epi;
    AnalysisConfig analysis;
    DtnConfig dtn;
    OutputConfig output;

    // Throws ConfigError naming the offending field.
    void validate() const;
    FrequencyParams frequency() const { return analysis.frequency(problem.grid.a); }
    ClassifyParams classify_params() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical form: every key with its resolved value, sorted by section then key;
// output.directory is left out so relocated runs hash alike.
std::string canonical_config(const ExperimentConfig& c);
std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const ExperimentConfig& c);  // 16 hex digits

std::string code_version();

struct ManifestEntry {
    std::string path;  // relative to the manifest directory
    std::string kind;  // csv, json, snapshot
    std::string description;
};

struct ExperimentManifest {
    std::string config_hash;
    std::string version;
    std::string command;
    std::vector<ManifestEntry> outputs;
    std::map<std::string, double> timings;  // seconds

    std::string to_json() const;
    static ExperimentManifest from_json(const std::string& text);
};

// Every listed file exists under `dir` and parses according to its kind.
bool verify_manifest(const ExperimentManifest& m, const std::string& dir, std::string* problem = nullptr);

}  // namespace signorini
