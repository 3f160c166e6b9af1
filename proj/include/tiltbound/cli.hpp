#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tiltbound/chernoff.hpp"

namespace tiltbound::cli {

enum class OutputFormat { json, csv };

struct RunConfig {
    double tolerance = 1e-12;
    int max_iterations = 200;
    /// Unset means the command's natural format.
    std::optional<OutputFormat> output_format;
    std::optional<std::uint64_t> seed;
    int precision = 6;

    void validate() const;
    SolverOptions solver() const { return {tolerance, max_iterations}; }
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitHypothesis = 2;

/// Runs the command line (argv[0] excluded) and returns the exit code. Data
/// goes to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ExampleRow {
    double a;
    double bound;
    double reference_bound;
    double tolerance;
    double true_tail;
    double reference_tail;
    bool pass;
};

struct ExampleProjectionRow {
    double atom;
    double q;
    double p_hat;
    double reference_p_hat;
    bool pass;
};

struct ExampleTable {
    double mean;
    bool mean_pass;
    std::vector<ExampleRow> rows;
    std::vector<ExampleProjectionRow> projection;
    bool all_pass;
};

/// Recomputes the worked example (thresholds 4..7 and the projection at 4)
/// and compares it with the published values.
ExampleTable reproduce_example(const RunConfig& config);

}  // namespace tiltbound::cli
