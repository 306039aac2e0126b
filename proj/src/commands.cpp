#include "ellsys/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ellsys/catalog.hpp"
#include "ellsys/ellipticity.hpp"
#include "ellsys/errors.hpp"
#include "ellsys/field_io.hpp"
#include "ellsys/linear_solver.hpp"
#include "ellsys/nonlinear_solver.hpp"
#include "ellsys/oracle.hpp"

namespace ellsys {

namespace fs = std::filesystem;

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

ReportTable& ReportTable::row() {
    if (!rows_.empty() && rows_.back().size() != columns_.size())
        throw InputError("report row has " + std::to_string(rows_.back().size()) + " cells, expected " +
                         std::to_string(columns_.size()));
    rows_.emplace_back();
    return *this;
}

ReportTable& ReportTable::add(const std::string& text) {
    if (rows_.empty() || rows_.back().size() >= columns_.size()) throw InputError("report row overflow");
    rows_.back().push_back({text, false});
    return *this;
}

ReportTable& ReportTable::add(double v) {
    add(format_real(v));
    rows_.back().back().numeric = true;
    return *this;
}

ReportTable& ReportTable::add(long long v) {
    add(std::to_string(v));
    rows_.back().back().numeric = true;
    return *this;
}

ReportTable& ReportTable::add(bool v) { return add(std::string(v ? "true" : "false")); }

ReportTable& ReportTable::add(const std::optional<double>& v) {
    if (v) return add(*v);
    add(std::string());
    rows_.back().back().numeric = true;
    return *this;
}

const std::string& ReportTable::cell(std::size_t r, const std::string& column) const {
    const auto it = std::find(columns_.begin(), columns_.end(), column);
    if (it == columns_.end()) throw LookupError("no column " + column);
    return rows_.at(r).at(static_cast<std::size_t>(it - columns_.begin())).text;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void ReportTable::write_csv(std::ostream& out) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << csv_escape(columns_[i]);
    out << '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_escape(r[i].text);
        out << '\n';
    }
}

void ReportTable::write_jsonl(std::ostream& out) const {
    for (const auto& r : rows_) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const Cell& c = r[i];
            if (!c.numeric) {
                if (c.text == "true" || c.text == "false") obj[columns_[i]] = c.text == "true";
                else obj[columns_[i]] = c.text;
            } else {
                const double v = std::strtod(c.text.c_str(), nullptr);
                if (!c.text.empty() && std::isfinite(v)) obj[columns_[i]] = nlohmann::ordered_json::parse(c.text);
                else obj[columns_[i]] = nullptr;
            }
        }
        out << obj.dump() << '\n';
    }
}

fs::path ReportTable::save(const fs::path& dir, const std::string& stem, const std::string& format) const {
    fs::create_directories(dir);
    const fs::path path = dir / (stem + (format == "jsonl" ? ".jsonl" : ".csv"));
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    if (format == "jsonl") write_jsonl(out);
    else write_csv(out);
    if (!out) throw FormatError("write failed for " + path.string());
    return path;
}

namespace {

constexpr double kLinearResidualLimit = 1e-8;
constexpr double kAprioriSlack = 1e-10;
constexpr double kOracleTolerance = 1e-9;
constexpr double kComparisonSlack = 1e-9;

std::string join(const Vector& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_real(v(i));
    return s;
}

NearnessSampler sampler_for(const RunConfig& cfg) {
    NearnessSampler s;
    s.seed = cfg.seed;
    s.cell_length = cfg.grid.L();
    return s;
}

}  // namespace

int cmd_analyze(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const ConstantTensor& A = cfg.require_tensor();
    const EllipticityReport rep = ellipticity_constant(A, cfg.sphere_resolution);

    ReportTable t({"tensor", "N", "n", "nu", "min_abs_det", "argmin_direction", "resolution", "refined", "elliptic",
                   "documented_nu", "operator_norm"});
    t.row()
        .add(cfg.tensor_label)
        .add(A.N())
        .add(A.n())
        .add(rep.nu)
        .add(rep.min_abs_det)
        .add(join(rep.argmin_direction))
        .add(rep.resolution)
        .add(rep.refined)
        .add(rep.elliptic)
        .add(std::optional<double>(cfg.documented_nu))
        .add(operator_norm(A));
    t.save(out_dir, "analyze", cfg.format);
    log << "analyze: nu(A) = " << format_real(rep.nu) << (rep.elliptic ? " (elliptic)" : " (not elliptic)") << '\n';
    if (!rep.elliptic) return kExitEllipticity;

    if (cfg.nonlinear) {
        const NonlinearOperator F = build_operator(cfg);
        const StrictEllipticityReport s = is_strictly_elliptic(F, A, sampler_for(cfg));
        ReportTable nt({"operator", "nu_A", "nu_FA", "ratio", "declared_nearness", "samples_used", "strictly_elliptic",
                        "x_range"});
        nt.row()
            .add(F.name())
            .add(s.nearness.nu_A)
            .add(s.nearness.nu_FA)
            .add(s.nearness.ratio)
            .add(std::optional<double>(F.declared_nearness()))
            .add(s.nearness.samples_used)
            .add(s.elliptic)
            .add(s.nearness.x_range);
        nt.save(out_dir, "nearness", cfg.format);
        log << "analyze: sampled nu(F,A) = " << format_real(s.nearness.nu_FA) << ", " << s.caveat << '\n';
        if (!s.elliptic) return kExitEllipticity;
    }
    return kExitOk;
}

int cmd_solve_linear(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const ConstantTensor& A = cfg.require_tensor();
    const GridFunction f = build_rhs(cfg);
    const MultiplierPlan plan(A, cfg.grid);
    const LinearSolution sol = solve_linear(plan, f);
    const AprioriReport ap = verify_apriori(plan.ellipticity().nu, sol.u, f);

    fs::create_directories(out_dir);
    write_efof(out_dir / "u.efof", sol.u);
    ReportTable t({"grid", "nu", "residual", "ratio_grad", "ratio_sobolev", "dropped_mean_norm"});
    t.row()
        .add(sol.report.grid)
        .add(sol.report.nu)
        .add(sol.report.residual)
        .add(ap.ratio_grad)
        .add(std::optional<double>(ap.ratio_sobolev))
        .add(sol.report.dropped_mean_norm);
    t.save(out_dir, "report", cfg.format);

    if (sol.report.dropped_mean_norm > 1e-12 * std::max(norm_l2(f), 1.0))
        log << "solve-linear: dropped the mean of f (norm " << format_real(sol.report.dropped_mean_norm) << ")\n";
    if (sol.report.truncated)
        log << "solve-linear: f carries Nyquist-plane energy " << format_real(sol.report.nyquist_energy)
            << " that the grid cannot invert\n";
    log << "solve-linear: residual " << format_real(sol.report.residual) << '\n';

    int code = kExitOk;
    if (!(sol.report.residual <= kLinearResidualLimit)) code = kExitSolve;

    if (!cfg.m_ladder.empty()) {
        ReportTable rt({"kind", "m", "z_min", "rel_error", "error_bound", "max_factor_deviation", "within_bound"});
        const double unorm = norm_l2(sol.u);
        for (double m : cfg.m_ladder) {
            const RegularizerSequence h(cfg.regularizer, m);
            const RepresentationSolution rs = solve_representation(plan, f, h);
            const double err = unorm > 0.0 ? norm_l2(rs.u - sol.u) / unorm : norm_l2(rs.u);
            const bool ok = err <= rs.report.error_bound * (1.0 + 1e-9) + 1e-14;
            rt.row()
                .add(RegularizerSequence::kind_name(cfg.regularizer))
                .add(m)
                .add(rs.report.z_min)
                .add(err)
                .add(rs.report.error_bound)
                .add(rs.report.max_factor_deviation)
                .add(ok);
            if (!ok && code == kExitOk) code = kExitVerification;
        }
        rt.save(out_dir, "representation", cfg.format);
    }
    return code;
}

int cmd_solve_nonlinear(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const NonlinearOperator F = build_operator(cfg);
    const GridFunction f = build_rhs(cfg);
    CampanatoOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.sampler = sampler_for(cfg);

    auto write_trace = [&](const IterationTrace& trace) {
        ReportTable t({"k", "d_k", "ratio_k", "residual_k", "dropped_mean_norm"});
        for (const auto& r : trace.records)
            t.row().add(r.k).add(r.d).add(r.ratio).add(r.residual).add(r.dropped_mean_norm);
        t.save(out_dir, "trace", cfg.format);
        for (const auto& w : trace.warnings) log << "solve-nonlinear: " << w << '\n';
    };

    CampanatoSolution sol = [&] {
        try {
            return campanato_solve(F, f, opts);
        } catch (const DivergenceError& e) {
            write_trace(e.trace());
            throw;
        }
    }();
    fs::create_directories(out_dir);
    write_efof(out_dir / "u.efof", sol.u);
    write_trace(sol.trace);
    log << "solve-nonlinear: K = " << format_real(sol.trace.K_theory) << ", " << sol.trace.iterations
        << " iterations, residual " << format_real(sol.rhs_norm > 0 ? sol.residual_abs / sol.rhs_norm : 0.0)
        << (sol.trace.converged ? "" : " (not converged)") << '\n';
    return sol.trace.converged ? kExitOk : kExitSolve;
}

int cmd_verify(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const ConstantTensor& A = cfg.require_tensor();
    const PeriodicGrid& grid = cfg.grid;
    ReportTable t({"check", "value", "limit", "status"});
    bool failed = false;
    auto record = [&](const std::string& name, double value, double limit, bool pass) {
        t.row().add(name).add(value).add(limit).add(pass ? "pass" : "fail");
        log << "verify: " << name << " = " << format_real(value) << (pass ? " ok" : " FAILED") << '\n';
        failed = failed || !pass;
    };
    auto skip = [&](const std::string& name, const std::string& why) {
        t.row().add(name).add(std::numeric_limits<double>::quiet_NaN()).add(std::numeric_limits<double>::quiet_NaN()).add("skipped");
        log << "verify: " << name << " skipped (" << why << ")\n";
    };

    const EllipticityReport ell = ellipticity_constant(A, cfg.sphere_resolution);
    t.row().add("ellipticity_nu").add(ell.nu).add(0.0).add(ell.elliptic ? "pass" : "fail");
    if (!ell.elliptic) {
        t.save(out_dir, "verify", cfg.format);
        log << "verify: tensor is not elliptic (nu = " << format_real(ell.nu) << ")\n";
        return kExitEllipticity;
    }

    const MultiplierPlan plan(A, grid);
    const int N = A.N();
    std::vector<GridFunction> samples;
    for (int s = 0; s < cfg.verify_samples; ++s)
        samples.push_back(random_band_limited(grid, N, cfg.verify_band, cfg.seed + static_cast<std::uint64_t>(s)));

    double worst_residual = 0.0, worst_apriori = 0.0;
    for (const auto& f : samples) {
        const LinearSolution sol = solve_linear(plan, f);
        worst_residual = std::max(worst_residual, sol.report.residual);
        worst_apriori = std::max(worst_apriori, verify_apriori(ell.nu, sol.u, f).ratio_grad);
    }
    record("linear_residual", worst_residual, 1e-10, worst_residual <= 1e-10);
    record("apriori_ratio_grad", worst_apriori, 1.0 + kAprioriSlack, worst_apriori <= 1.0 + kAprioriSlack);

    if (static_cast<std::size_t>(N) * grid.size() <= kDenseSizeCap) {
        const GridFunction& f = samples.front();
        const DenseSolveResult dense = solve_dense(A, f);
        if (!dense.u) {
            record("oracle_gradient_diff", std::numeric_limits<double>::infinity(), kOracleTolerance, false);
        } else {
            const GridFunction Du = gradient(solve_linear(plan, f).u);
            const double rel = norm_l2(Du - gradient(*dense.u)) / std::max(norm_l2(Du), 1e-300);
            record("oracle_gradient_diff", rel, kOracleTolerance, rel <= kOracleTolerance);
        }
    } else {
        skip("oracle_gradient_diff", "grid above the dense size cap");
    }

    if (cfg.nonlinear) {
        const NonlinearOperator F = build_operator(cfg);
        std::vector<std::pair<GridFunction, GridFunction>> pairs;
        for (std::size_t i = 0; i + 1 < samples.size(); i += 2) pairs.emplace_back(samples[i], samples[i + 1]);
        if (pairs.empty()) pairs.emplace_back(samples.front(), GridFunction(grid, N));
        double worst_ratio = 0.0, margin = 0.0;
        for (const auto& [w, v] : pairs) {
            const ComparisonReport c = verify_comparison(F, w, v);
            margin = c.margin;
            worst_ratio = std::max(worst_ratio, c.ratio);
        }
        if (!(margin > 0.0)) {
            t.row().add("strict_ellipticity_margin").add(margin).add(0.0).add("fail");
            t.save(out_dir, "verify", cfg.format);
            log << "verify: F is not strictly elliptic (margin " << format_real(margin) << ")\n";
            return kExitEllipticity;
        }
        record("comparison_ratio", worst_ratio, 1.0 + kComparisonSlack, worst_ratio <= 1.0 + kComparisonSlack);
        const NearOperatorReport near = near_operator_check(F, pairs);
        record("near_operator_max_ratio", near.max_ratio, near.K, near.violations == 0);
    } else {
        skip("comparison_ratio", "no [nonlinear] section");
        skip("near_operator_max_ratio", "no [nonlinear] section");
    }

    t.save(out_dir, "verify", cfg.format);
    return failed ? kExitVerification : kExitOk;
}

std::vector<std::string> command_names() { return {"analyze", "solve-linear", "solve-nonlinear", "verify"}; }

int run_command(const std::string& command, const fs::path& config_path, const fs::path& out_dir,
                const RunOverrides& overrides, std::ostream& log) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        if (overrides.seed) cfg.seed = *overrides.seed;
        if (overrides.format) {
            if (*overrides.format != "csv" && *overrides.format != "jsonl")
                throw ConfigError("format must be csv or jsonl");
            cfg.format = *overrides.format;
        }
        if (!cfg.tensor) throw ConfigError("config has no [tensor] section");
    } catch (const Error& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (command == "analyze") return cmd_analyze(cfg, out_dir, log);
        if (command == "solve-linear") return cmd_solve_linear(cfg, out_dir, log);
        if (command == "solve-nonlinear") return cmd_solve_nonlinear(cfg, out_dir, log);
        if (command == "verify") return cmd_verify(cfg, out_dir, log);
        log << "unknown command '" << command << "'\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NonEllipticError& e) {
        log << "ellipticity error: " << e.what() << '\n';
        return kExitEllipticity;
    } catch (const DivergenceError& e) {
        log << "solve error: " << e.what() << '\n';
        return kExitSolve;
    } catch (const Error& e) {
        log << "solve error: " << e.what() << '\n';
        return kExitSolve;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitSolve;
    }
}

}  // namespace ellsys
