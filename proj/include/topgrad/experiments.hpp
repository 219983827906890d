#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "topgrad/descent.hpp"

namespace topgrad {

enum class DumpLevel { none, summary, full };

struct RunConfig {
    ProblemSpec spec;
    int n = 32;
    DescentConfig descent;
    std::filesystem::path out_dir;
    DumpLevel dump = DumpLevel::summary;
    std::string a0 = "full";  // full | empty | file:PATH
    unsigned rng_seed = 1;    // used by diagnostic probes only
};

/// Built-in experiment presets.
///   l0_elliptic            Dirichlet Laplace, alpha = beta = 0.01, box [-4,4]
///   l0_elliptic_alt        same but alpha = 0.001, beta = 0.1, box [-40,40]
///   l0_neumann_unsolvable  Neumann Helmholtz, alpha = 1000, beta = 0.01
///   binary                 fixed u = 1, nu = 0.002, domain (0,2)^2
ProblemSpec preset(const std::string& name);

/// Flat key=value config files ('#' comments, order-insensitive).
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::filesystem::path& path);
void write_config(std::ostream& out, const RunConfig& cfg);

/// Parameter echo for meta.txt; preset values as exact decimal strings.
std::map<std::string, std::string> config_echo(const RunConfig& cfg);

struct RunOutcome {
    DescentResult result;
    int exit_code = 0;
};

/// Execute a configured run, write artifacts, print the summary line.
RunOutcome execute_run(const RunConfig& cfg, std::ostream& log);

int exit_code_for(StopReason reason);

/// Diagnostic suites validating the derivative, the expansion remainder
/// and the stability estimate on coarse meshes.
struct FlipProbe {
    int level_n;
    int cell;
    double dj;
    double oracle;
    double abs_error;
};

struct FlipReport {
    std::vector<FlipProbe> probes;
    std::vector<double> median_abs_error;  // one per mesh level
    bool decay_verdict = false;
};

FlipReport diagnostics_flip(const ProblemSpec& spec, const std::vector<int>& levels,
                            int cells_per_level, unsigned seed);

struct ExpansionReport {
    std::vector<ExpansionProbe> probes;
    double slope = 0.0;  // log(lhs) vs log(dist) least-squares slope
};

ExpansionReport diagnostics_expansion(const ProblemSpec& spec, int n,
                                      const std::vector<int>& perturbation_sizes, unsigned seed);

struct StabilityProbe {
    double dist;
    double du_l2;
    double dp_inf;
};

struct StabilityReport {
    std::vector<StabilityProbe> probes;
    double slope_u = 0.0;  // informational, expected near 0.5
};

StabilityReport diagnostics_stability(const ProblemSpec& spec, int n, int num_pairs,
                                      unsigned seed);

int run_cli(int argc, char** argv);

}  // namespace topgrad
