#include "ellsys/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "ellsys/catalog.hpp"
#include "ellsys/errors.hpp"
#include "ellsys/expression.hpp"
#include "ellsys/field_io.hpp"

namespace ellsys {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text) {
    IniDocument doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            doc.data_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        auto& sec = doc.data_[section];
        if (sec.contains(key)) throw ConfigError("duplicate key [" + section + "] " + key);
        sec[key] = trim(line.substr(eq + 1));
    }
    return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool IniDocument::has(const std::string& section, const std::string& key) const {
    const auto it = data_.find(section);
    return it != data_.end() && it->second.contains(key);
}

const std::string& IniDocument::get(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ConfigError("missing key [" + section + "] " + key);
    return data_.at(section).at(key);
}

std::string IniDocument::get_or(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double IniDocument::get_double(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? parse_double(get(section, key), "[" + section + "] " + key) : fallback;
}

long long IniDocument::get_int(const std::string& section, const std::string& key, long long fallback) const {
    return has(section, key) ? parse_int(get(section, key), "[" + section + "] " + key) : fallback;
}

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError(what + ": expected a finite real, got '" + text + "'");
    return v;
}

long long parse_int(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ConfigError(what + ": expected an integer, got '" + text + "'");
    return v;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_double(item, what));
    return out;
}

const ConstantTensor& RunConfig::require_tensor() const {
    if (!tensor) throw ConfigError("config has no [tensor] section");
    return *tensor;
}

namespace {

void parse_tensor(const IniDocument& doc, RunConfig& cfg) {
    if (!doc.has_section("tensor")) return;
    const std::string source = doc.get("tensor", "source");
    if (source.starts_with("catalog:")) {
        const std::string spec = trim(source.substr(8));
        catalog::Entry entry = [&] {
            try {
                return catalog::get(spec);
            } catch (const Error& e) {
                throw ConfigError(std::string("[tensor] source: ") + e.what());
            }
        }();
        if (entry.kind != catalog::Kind::constant_tensor)
            throw ConfigError("[tensor] source must name a constant tensor, got " + spec);
        cfg.tensor = entry.tensor();
        cfg.documented_nu = entry.documented_nu;
        cfg.tensor_label = spec;
    } else if (source == "inline") {
        const int N = static_cast<int>(doc.get_int("tensor", "N", 0));
        const int n = static_cast<int>(doc.get_int("tensor", "n", 0));
        const auto entries = parse_double_list(doc.get("tensor", "entries"), "[tensor] entries");
        if (N < 2 || n < 2) throw ConfigError("[tensor] N and n must be at least 2");
        if (entries.size() != static_cast<std::size_t>(N * N * n))
            throw ConfigError("[tensor] entries: expected N*N*n = " + std::to_string(N * N * n) + " values, got " +
                              std::to_string(entries.size()));
        try {
            cfg.tensor = ConstantTensor(N, n, entries);
        } catch (const Error& e) {
            throw ConfigError(std::string("[tensor] entries: ") + e.what());
        }
        cfg.tensor_label = "inline";
    } else {
        throw ConfigError("[tensor] source must be catalog:<name> or inline, got '" + source + "'");
    }
}

void parse_rhs(const IniDocument& doc, RunConfig& cfg) {
    if (!doc.has_section("rhs")) return;
    const std::string kind = doc.get("rhs", "kind");
    RhsSpec& r = cfg.rhs;
    if (kind == "mode") {
        r.kind = RhsSpec::Kind::mode;
        r.component = static_cast<int>(doc.get_int("rhs", "component", 1));
        for (double v : parse_double_list(doc.get("rhs", "frequency"), "[rhs] frequency")) {
            if (v != std::floor(v)) throw ConfigError("[rhs] frequency must be integers");
            r.frequency.push_back(static_cast<int>(v));
        }
        r.amplitude = doc.get_double("rhs", "amplitude", 1.0);
        const std::string fn = doc.get_or("rhs", "function", "sin");
        if (fn != "sin" && fn != "cos") throw ConfigError("[rhs] function must be sin or cos");
        r.cosine = fn == "cos";
    } else if (kind == "file") {
        r.kind = RhsSpec::Kind::file;
        r.file = doc.get("rhs", "file");
    } else if (kind == "expression") {
        r.kind = RhsSpec::Kind::expression;
        for (int c = 1; doc.has("rhs", "f" + std::to_string(c)); ++c) r.expressions.push_back(doc.get("rhs", "f" + std::to_string(c)));
        if (r.expressions.empty()) throw ConfigError("[rhs] kind = expression needs f1, f2, ...");
    } else {
        throw ConfigError("[rhs] kind must be mode, file or expression, got '" + kind + "'");
    }
}

void parse_nonlinear(const IniDocument& doc, RunConfig& cfg) {
    if (!doc.has_section("nonlinear")) return;
    NonlinearSpec s;
    if (doc.get_or("nonlinear", "source", "catalog") == "expression") {
        s.family = "expression";
        for (int c = 1; doc.has("nonlinear", "F" + std::to_string(c)); ++c)
            s.expressions.push_back(doc.get("nonlinear", "F" + std::to_string(c)));
        if (s.expressions.empty()) throw ConfigError("[nonlinear] source = expression needs F1, F2, ...");
        if (doc.has("nonlinear", "declared_nearness"))
            s.declared_nearness = doc.get_double("nonlinear", "declared_nearness", 0.0);
    } else {
        s.family = doc.get("nonlinear", "catalog");
        if (s.family == "lipschitz_perturbation") {
            s.lambda = parse_double(doc.get("nonlinear", "lambda"), "[nonlinear] lambda");
            s.shape = doc.get_or("nonlinear", "shape", "sin_q11");
        } else if (s.family == "variable_linear") {
            s.epsilon = parse_double(doc.get("nonlinear", "epsilon"), "[nonlinear] epsilon");
        } else {
            throw ConfigError("[nonlinear] catalog must be lipschitz_perturbation or variable_linear, got '" +
                              s.family + "'");
        }
    }
    cfg.nonlinear = std::move(s);
}

}  // namespace

RunConfig parse_config(const IniDocument& doc, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    parse_tensor(doc, cfg);
    if (cfg.tensor || doc.has_section("grid")) {
        const int n = cfg.tensor ? cfg.tensor->n() : static_cast<int>(doc.get_int("grid", "n", 3));
        const long long G = doc.get_int("grid", "G", 16);
        const double L = doc.get_double("grid", "L", 1.0);
        try {
            cfg.grid = PeriodicGrid(n, static_cast<int>(G), L);
        } catch (const Error& e) {
            throw ConfigError(std::string("[grid]: ") + e.what());
        }
    }
    parse_rhs(doc, cfg);
    if (cfg.rhs.kind == RhsSpec::Kind::file && cfg.rhs.file.is_relative() && !base_dir.empty())
        cfg.rhs.file = base_dir / cfg.rhs.file;
    parse_nonlinear(doc, cfg);

    cfg.tol = doc.get_double("solver", "tol", 1e-10);
    if (!(cfg.tol > 0)) throw ConfigError("[solver] tol must be positive");
    cfg.max_iter = static_cast<int>(doc.get_int("solver", "max_iter", 500));
    if (cfg.max_iter < 1) throw ConfigError("[solver] max_iter must be positive");
    try {
        cfg.regularizer = RegularizerSequence::parse_kind(doc.get_or("solver", "regularizer", "rational"));
    } catch (const Error& e) {
        throw ConfigError(std::string("[solver] regularizer: ") + e.what());
    }
    if (doc.has("solver", "m")) {
        cfg.m_ladder = parse_double_list(doc.get("solver", "m"), "[solver] m");
        for (double m : cfg.m_ladder)
            if (m < 1) throw ConfigError("[solver] m values must be >= 1");
    }

    const long long seed = doc.get_int("run", "seed", 0);
    if (seed < 0) throw ConfigError("[run] seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.format = doc.get_or("run", "format", "csv");
    if (cfg.format != "csv" && cfg.format != "jsonl") throw ConfigError("[run] format must be csv or jsonl");
    cfg.sphere_resolution = static_cast<int>(doc.get_int("run", "sphere_resolution", kDefaultSphereResolution));
    if (cfg.sphere_resolution < 100) throw ConfigError("[run] sphere_resolution must be at least 100");

    cfg.verify_samples = static_cast<int>(doc.get_int("verify", "samples", 10));
    cfg.verify_band = static_cast<int>(doc.get_int("verify", "band", 2));
    if (cfg.verify_samples < 1) throw ConfigError("[verify] samples must be positive");
    if (cfg.tensor && (cfg.verify_band < 1 || cfg.verify_band >= cfg.grid.G() / 2))
        throw ConfigError("[verify] band must lie in [1, G/2)");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(IniDocument::load(path), path.parent_path());
}

GridFunction build_rhs(const RunConfig& cfg) {
    const ConstantTensor& A = cfg.require_tensor();
    const PeriodicGrid& grid = cfg.grid;
    const int N = A.N();
    const RhsSpec& r = cfg.rhs;
    switch (r.kind) {
        case RhsSpec::Kind::none:
            throw ConfigError("config has no [rhs] section");
        case RhsSpec::Kind::mode: {
            if (r.component < 1 || r.component > N)
                throw ConfigError("[rhs] component must lie in 1.." + std::to_string(N));
            if (static_cast<int>(r.frequency.size()) != grid.n())
                throw ConfigError("[rhs] frequency needs " + std::to_string(grid.n()) + " integers");
            const int c = r.component - 1;
            return sample_field(grid, N, [&](const Vector& x, std::span<double> out) {
                double phase = 0.0;
                for (int d = 0; d < grid.n(); ++d) phase += r.frequency[static_cast<std::size_t>(d)] * x(d);
                phase *= 2.0 * std::numbers::pi / grid.L();
                std::fill(out.begin(), out.end(), 0.0);
                out[static_cast<std::size_t>(c)] = r.amplitude * (r.cosine ? std::cos(phase) : std::sin(phase));
            });
        }
        case RhsSpec::Kind::file: {
            GridFunction f = [&] {
                try {
                    return read_efof(r.file, grid.L());
                } catch (const FormatError& e) {
                    throw ConfigError("[rhs] file: " + std::string(e.what()));
                }
            }();
            if (!(f.grid() == grid) || f.components() != N)
                throw ConfigError("[rhs] file does not match the configured grid and component count");
            return f;
        }
        case RhsSpec::Kind::expression: {
            if (static_cast<int>(r.expressions.size()) != N)
                throw ConfigError("[rhs] expression needs exactly f1..f" + std::to_string(N));
            std::vector<Expression> exprs;
            for (const auto& e : r.expressions) exprs.push_back(Expression::parse(e, grid.n()));
            return sample_field(grid, N, [&](const Vector& x, std::span<double> out) {
                for (int c = 0; c < N; ++c) {
                    out[static_cast<std::size_t>(c)] = exprs[static_cast<std::size_t>(c)].evaluate({x.data(), static_cast<std::size_t>(x.size())});
                    if (!std::isfinite(out[static_cast<std::size_t>(c)]))
                        throw ConfigError("[rhs] f" + std::to_string(c + 1) + " is not finite on the grid");
                }
            });
        }
    }
    throw ConfigError("unreachable rhs kind");
}

NonlinearOperator build_operator(const RunConfig& cfg) {
    if (!cfg.nonlinear) throw ConfigError("config has no [nonlinear] section");
    const ConstantTensor& A = cfg.require_tensor();
    const NonlinearSpec& s = *cfg.nonlinear;
    try {
        if (s.family == "lipschitz_perturbation")
            return catalog::lipschitz_perturbation(A, s.lambda, catalog::parse_shape(s.shape));
        if (s.family == "variable_linear") return catalog::variable_linear(A, s.epsilon, std::nullopt, cfg.grid.L());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("[nonlinear]: ") + e.what());
    }
    const int N = A.N(), n = A.n();
    if (static_cast<int>(s.expressions.size()) != N)
        throw ConfigError("[nonlinear] expression needs exactly F1..F" + std::to_string(N));
    auto exprs = std::make_shared<std::vector<Expression>>();
    for (const auto& e : s.expressions) exprs->push_back(Expression::parse(e, n, N));
    NonlinearOperator::Options opts;
    opts.declared_nearness = s.declared_nearness;
    opts.name = "expression";
    return NonlinearOperator(
        [exprs, N, n](const Vector& x, const Matrix& Q) {
            std::vector<double> slots(static_cast<std::size_t>(Expression::slot_count(n, N)));
            for (int d = 0; d < n; ++d) slots[static_cast<std::size_t>(d)] = x(d);
            for (int b = 0; b < N; ++b)
                for (int j = 0; j < n; ++j) slots[static_cast<std::size_t>(n + b * n + j)] = Q(b, j);
            Vector out(N);
            for (int c = 0; c < N; ++c) out(c) = (*exprs)[static_cast<std::size_t>(c)].evaluate(slots);
            return out;
        },
        A, opts);
}

}  // namespace ellsys
