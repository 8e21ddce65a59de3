#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "mfspec/birkhoff.hpp"
#include "mfspec/model.hpp"

namespace mfspec::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
    kExitOk = 0,
    kExitOther = 1,
    kExitEmpty = 2,
    kExitParse = 3,
    kExitBudget = 4,
    kExitBracket = 5,
};

struct RunConfig {
    std::string command;
    std::string model_path;
    /// "lo:hi" per coordinate, comma separated; "a" for a singleton.
    std::string target;
    /// 0 selects the command default.
    int n_max = 0;
    /// Any of L, M, fixed, shrinking, comma separated (e.g. "M,shrinking").
    std::string mode = "L";
    /// Explicit decreasing radii; empty selects 2^-k, k = 1..radius_count.
    std::vector<double> radii;
    int radius_count = 6;
    /// "start:stop:count", one per coordinate for M = 2 (comma separated).
    std::string alpha_grid;
    std::string q_grid;
    std::string t_grid;
    /// Single q point for M >= 2 beta queries, comma separated.
    std::string q_point;
    /// Multiplier of Lambda in the potential phi = t Lambda (zeta, oracle).
    double t = 0.0;
    std::string observable_path;
    /// bernoulli | markov1 | auto
    std::string family = "auto";
    std::string format = "csv";
    std::string output_path;
    int jobs = 1;
    /// Echoed in JSON output; every optimizer is deterministic.
    std::uint64_t seed = 0;
    /// Omit the generated_at timestamp.
    bool deterministic = false;
};

/// A table cell: number (-inf/inf/nan allowed) or text.
using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

ModelSpec parse_model(const std::string& path);
/// `source` names the input in diagnostics.
ModelSpec parse_model_text(const std::string& text, const std::string& source = "<model>");

ObservableTable parse_observable(const std::string& path, int alphabet_size);
ObservableTable parse_observable_text(const std::string& text, int alphabet_size,
                                      const std::string& source = "<observable>");

TargetBox parse_target(const std::string& spec);

/// "start:stop:count" -> count evenly spaced values (count >= 1).
std::vector<double> parse_grid(const std::string& spec);

/// Formats a number the way CSV output does: %.17g, "-inf", "inf", "nan".
std::string format_number(double v);

void write_csv(std::ostream& out, const Table& table);
/// Single JSON document; -inf/inf/nan become null with a per-row flag.
void write_json(std::ostream& out, const Table& table, const RunConfig& config, const std::string& model_label,
                int exit_status);

/// Reads a JSON document written by write_json back into a table.
Table read_json_table(const std::string& text);

/// Runs one command; results go to `out` (or config.output_path), errors to
/// `err`. Returns the exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Command-line entry point.
int main_entry(int argc, char** argv);

}  // namespace mfspec::cli
