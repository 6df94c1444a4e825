#pragma once

#include "spectral/dirac_models.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectral {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Model definition file (TOML or JSON): lambdas, multiplicities, R, [bc], [defect], [cutoffs].
struct ModelFile {
    TangentialModel tangential;
    double R = 4;
    EndSpec left = EndSpec::line_at(0.3);
    EndSpec right = EndSpec::line_at(1.1);
    double defect_width = 1;
    std::vector<double> shift_left;
    std::vector<double> shift_right;
    double window = 0;
    int torus_cutoff = 64;
    std::string name;

    SplitModel split() const;
};

ModelFile load_model_file(const std::filesystem::path& path);
ModelFile parse_model_toml(const std::string& text, const std::string& name = "inline");
ModelFile parse_model_json(const nlohmann::json& j, const std::string& name = "inline");

struct Tolerances {
    double eta = 1e-5;            // eta identities and R-independence
    double integer = 1e-6;        // residual of integer-valued quantities
    double fit_r2 = 0.99;         // minimum R^2 of the log-linear small-eigenvalue fit
    double a1_stability = 2.0;    // max/min of the per-R lower bound of the large eigenvalues
    double stabilization = 1e-3;  // R-doubling change of mu_0
    double heat = 1e-8;           // Mellin and density identities
    double scale = 1.0;           // multiplies every tolerance that is an upper bound

    double upper(double tol) const { return tol * scale; }
};

struct Sweeps {
    std::vector<double> additivity_R{4, 8, 16};
    std::vector<double> additivity_small_R{2, 4, 6};
    std::vector<double> dichotomy_R{1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5};
    std::vector<double> rayleigh_R{8, 12, 16};
    std::vector<double> lowest_R{2, 4, 8, 16, 32, 64, 128};
    double stabilization_from = 64;  // R-doubling change of mu_0 is asserted for R >= this
    std::vector<int> vekua_p{1, 2, 3, 0, -1, -2};
    int vekua_N = 32;
    int sf_samples = 65;
    int sf_truncation = 3;
    int pasting_modes = 6;
    int pasting_samples = 40;
};

struct ExperimentConfig {
    std::string experiment = "all";
    std::filesystem::path config_path;
    ModelFile model;          // q = 0 split model
    ModelFile defect_model;   // split model with one bound state
    Sweeps sweeps;
    Tolerances tol;
    std::filesystem::path out = "out";
    std::uint64_t seed = 20240607;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config_toml(const std::string& text, const std::filesystem::path& base_dir);

struct Check {
    std::string quantity;
    double computed = 0;
    double oracle = 0;
    double gap = 0;
    double tolerance = 0;
    bool integer = false;
    bool pass = false;
};

struct CaseRecord {
    std::string name;
    std::vector<std::pair<std::string, double>> values;
    std::vector<Check> checks;
    std::vector<std::string> notes;

    void value(const std::string& key, double v) { values.emplace_back(key, v); }
    // |computed - oracle| <= tolerance
    Check& close(const std::string& q, double computed, double oracle, double tolerance);
    // exact integer equality after rounding; residual <= integer tolerance
    Check& equal_int(const std::string& q, double computed, double oracle, double residual_tol);
    // computed <= bound (gap = computed - bound, pass iff gap <= 0)
    Check& at_most(const std::string& q, double computed, double bound);
    Check& at_least(const std::string& q, double computed, double bound);
};

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

struct ExperimentReport {
    std::string experiment;
    std::string statement;
    std::vector<CaseRecord> cases;
    std::vector<std::string> notes;
    std::vector<std::string> sweep_header;
    std::vector<std::vector<std::string>> sweep_rows;
    bool inconclusive = false;
    Verdict verdict = Verdict::fail;
    double wall_time = 0;
    nlohmann::json fingerprint;

    CaseRecord& add_case(const std::string& name);
    void finalize();
    std::vector<const Check*> failing() const;
    nlohmann::json to_json() const;
    void write_csv(std::ostream& os) const;
};

nlohmann::json environment_fingerprint(std::uint64_t seed);

ExperimentReport exp_eta_additivity(const ExperimentConfig& cfg);
ExperimentReport exp_dichotomy(const ExperimentConfig& cfg);
ExperimentReport exp_lowest_eigenvalue(const ExperimentConfig& cfg);
ExperimentReport exp_sf_equals_maslov(const ExperimentConfig& cfg);
ExperimentReport exp_vekua(const ExperimentConfig& cfg);
ExperimentReport exp_index_pasting(const ExperimentConfig& cfg);

const std::vector<std::string>& experiment_names();
ExperimentReport run_experiment(const std::string& name, const ExperimentConfig& cfg);

// Small-eigenvalue partition by the largest gap of the sorted log|mu|.
struct Dichotomy {
    double a1 = 0;         // sqrt(lo * hi) across the gap, or min|mu| when no gap
    double gap_ratio = 1;  // hi / lo
    bool split = false;    // gap ratio above 100
    bool ambiguous = false;
    std::vector<double> small;
    std::vector<double> large;
};

Dichotomy partition_small(const std::vector<double>& values, const std::vector<int>& multiplicities);

struct VekuaResult {
    int p = 0;
    int N = 0;
    int kernel = 0;
    int cokernel = 0;
    int index = 0;
    bool unstable = false;
    double smallest_kept = 0;
    double largest_dropped = 0;
};

// Boundary reduction: (a_0..a_{N-1}, c) -> real trig coefficients of Re(phi(z) z^p) on |z| = 1.
VekuaResult vekua_boundary_index(int p, int N);

// spectral-lab command line; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spectral
