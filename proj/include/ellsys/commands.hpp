#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ellsys/config.hpp"

namespace ellsys {

/// Process exit codes; nonzero values name the failing stage.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitEllipticity = 2, kExitSolve = 3, kExitVerification = 4 };

/// Rows of text cells written as CSV or JSON lines.
class ReportTable {
public:
    explicit ReportTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    ReportTable& row();
    ReportTable& add(const std::string& text);
    ReportTable& add(double v);
    ReportTable& add(long long v);
    ReportTable& add(int v) { return add(static_cast<long long>(v)); }
    ReportTable& add(std::size_t v) { return add(static_cast<long long>(v)); }
    ReportTable& add(bool v);
    /// Empty cell (null in JSON lines) when absent.
    ReportTable& add(const std::optional<double>& v);
    ReportTable& add(const char* text) { return add(std::string(text)); }

    void write_csv(std::ostream& out) const;
    void write_jsonl(std::ostream& out) const;
    /// Writes <stem>.csv or <stem>.jsonl into dir; returns the path written.
    std::filesystem::path save(const std::filesystem::path& dir, const std::string& stem,
                               const std::string& format) const;

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }
    const std::string& cell(std::size_t r, const std::string& column) const;

private:
    struct Cell {
        std::string text;
        bool numeric = false;
    };
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// Shortest round-trip decimal text for a double ("nan", "inf", "-inf" for non-finite).
std::string format_real(double v);

int cmd_analyze(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_solve_linear(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_solve_nonlinear(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
};

/// Loads the config, applies overrides, runs `command` and maps errors to exit codes.
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const std::filesystem::path& out_dir, const RunOverrides& overrides, std::ostream& log);

std::vector<std::string> command_names();

}  // namespace ellsys
