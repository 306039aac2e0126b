#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ellsys/grid.hpp"
#include "ellsys/linear_solver.hpp"
#include "ellsys/nonlinear_operator.hpp"
#include "ellsys/tensor.hpp"

namespace ellsys {

/// `[section]` headers and `key = value` lines; `#` and `;` start comments.
class IniDocument {
public:
    static IniDocument parse(const std::string& text);
    static IniDocument load(const std::filesystem::path& path);

    bool has_section(const std::string& section) const { return data_.contains(section); }
    bool has(const std::string& section, const std::string& key) const;
    const std::string& get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long long get_int(const std::string& section, const std::string& key, long long fallback) const;

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);
std::vector<double> parse_double_list(const std::string& text, const std::string& what);

struct RhsSpec {
    enum class Kind { none, mode, file, expression };
    Kind kind = Kind::none;
    /// mode: amplitude * sin(2 pi k.x / L) (or cos) in one component (1-based).
    int component = 1;
    std::vector<int> frequency;
    double amplitude = 1.0;
    bool cosine = false;
    std::filesystem::path file;
    std::vector<std::string> expressions;
};

struct NonlinearSpec {
    /// lipschitz_perturbation, variable_linear or expression.
    std::string family;
    std::string shape = "sin_q11";
    double lambda = 0.0;
    double epsilon = 0.0;
    std::vector<std::string> expressions;
    std::optional<double> declared_nearness;
};

struct RunConfig {
    std::string tensor_label;
    std::optional<ConstantTensor> tensor;
    std::optional<double> documented_nu;
    PeriodicGrid grid;
    RhsSpec rhs;
    std::optional<NonlinearSpec> nonlinear;
    double tol = 1e-10;
    int max_iter = 500;
    RegularizerSequence::Kind regularizer = RegularizerSequence::Kind::rational;
    std::vector<double> m_ladder;
    std::uint64_t seed = 0;
    std::string format = "csv";
    /// [verify] knobs.
    int verify_samples = 10;
    int verify_band = 2;
    int sphere_resolution = kDefaultSphereResolution;

    const ConstantTensor& require_tensor() const;
};

/// Throws ConfigError on missing or malformed keys.
RunConfig parse_config(const IniDocument& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Right-hand side on cfg.grid with cfg.require_tensor().N() components.
GridFunction build_rhs(const RunConfig& cfg);
NonlinearOperator build_operator(const RunConfig& cfg);

}  // namespace ellsys
