#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stefan/optimizer.hpp"
#include "stefan/verify.hpp"

namespace stefan::cli {

/// Malformed or incomplete configuration.
class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// [section] / key = value text. '#' and ';' start comments.
class IniFile {
public:
    static IniFile parse(const std::string& text);

    bool has_section(const std::string& section) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    /// Keys never read through get(), as "section.key".
    std::vector<std::string> unused() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

struct GradcheckSettings {
    double threshold = 1e-2;
    double abs_floor = 1e-8;
    std::vector<double> steps{1e-3, 1e-4, 1e-5};
    std::vector<std::string> components{"f", "g", "s"};
    exprs::Expr df = exprs::parse("cos(x)*(1 + t)");
    exprs::Expr dg = exprs::parse("t");
    exprs::Expr ds = exprs::parse("t^2");
};

struct SyntheticSettings {
    exprs::Expr f_true;
    exprs::Expr g_true;
    exprs::Expr s_true;
    int generation_refinement = 1;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
};

struct RunConfig {
    std::filesystem::path base_dir;
    ProblemData data;
    int n_y = 64;
    int n_t = 128;
    int n_x = 64;
    SolverOptions solver;
    std::optional<ControlVector> control;
    OptimizerConfig optimizer;
    int gap_candidates = 10;
    GradcheckSettings gradcheck;
    std::optional<SyntheticSettings> synthetic;
    std::optional<exprs::Expr> exact_u;
    std::string output_dir;

    Grid grid() const { return Grid(n_y, n_t, data.T); }
};

/// Reads a configuration; table paths are resolved against base_dir.
/// With a [synthetic] section the measurements w, mu and s* are generated
/// from the true control instead of being read.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       std::optional<std::uint64_t> seed = std::nullopt);
RunConfig load_config(const std::filesystem::path& path,
                      std::optional<std::uint64_t> seed = std::nullopt);

// Tables in CSV with a header row. Fields: x,t,value in time-major long form.
// Curves: one coordinate column and a value column, uniformly spaced from 0.
SampledField read_field_table(const std::filesystem::path& path);
std::vector<double> read_series_table(const std::filesystem::path& path, double* spacing = nullptr);
void write_field_table(const std::filesystem::path& path, const SampledField& f);
void write_series_table(const std::filesystem::path& path, const std::string& coord,
                        const std::vector<double>& values, double spacing);

/// %.17g
std::string format_number(double v);

// Subcommands. Each returns the process exit code and writes CSV files to out.
int cmd_forward(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_adjoint(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_gradcheck(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_optimize(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log,
                 std::uint64_t seed);
int cmd_norms(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// Full command line entry point: parses arguments, maps exceptions to exit
/// codes (1 configuration or validation, 2 numerical failure).
int main_entry(int argc, char** argv);

}  // namespace stefan::cli
