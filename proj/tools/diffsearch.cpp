// diffsearch: optimal drifts for diffusive search of a random target.
//
// Exit codes: 0 success, 1 usage error, 2 malformed spec, 3 quadrature
// failure, 4 any other domain error (no density, inadmissible drift, ...).

#include "diffsearch/approx.hpp"
#include "diffsearch/drift.hpp"
#include "diffsearch/errors.hpp"
#include "diffsearch/functional.hpp"
#include "diffsearch/simulate.hpp"
#include "diffsearch/spec_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>

using namespace diffsearch;

namespace {

TargetDistribution read_spec(const std::string& path) {
    if (path != "-") return load_target_spec(path);
    const std::string text{std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    return parse_target_spec(text);
}

int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedSpec: return 2;
    case ErrorCode::NonFiniteEvaluation:
    case ErrorCode::BudgetExhausted: return 3;
    default: return 4;
    }
}

nlohmann::json estimate_json(const McEstimate& e) {
    return {{"mean", e.mean}, {"std_error", e.std_error}, {"n_censored", e.n_censored}, {"n_paths", e.n_paths}};
}

double finite_or_nan(double x) { return std::isfinite(x) ? x : std::numeric_limits<double>::quiet_NaN(); }

// Window for tables: the support, cut where the tail falls below 1e-6 on infinite sides.
Interval table_window(const TargetDistribution& t) {
    return Interval(-effective_extent(t.minus(), 1e-6), effective_extent(t.plus(), 1e-6));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal drifts for diffusive search of a random target"};
    app.require_subcommand(1, 1);

    std::string spec_path;
    double D = 1.0;
    auto common = [&](CLI::App* sub) {
        sub->add_option("spec", spec_path, "Target distribution spec (JSON file, - for stdin)")->required();
        sub->add_option("--diffusion", D, "Diffusion rate D")->check(CLI::PositiveNumber);
    };

    auto* analyze_cmd = app.add_subcommand("analyze", "Balance, verdict, infimum and endpoint report");
    common(analyze_cmd);
    std::string analyze_out = "text";
    analyze_cmd->add_option("--out", analyze_out, "Output format")->check(CLI::IsMember({"json", "text"}));

    auto* table_cmd = app.add_subcommand("drift-table", "Optimal drift and critical CDF on a grid (CSV)");
    common(table_cmd);
    int grid = 512;
    std::string table_out = "csv";
    table_cmd->add_option("--grid", grid, "Number of grid points")->check(CLI::PositiveNumber);
    table_cmd->add_option("--out", table_out, "Output format")->check(CLI::IsMember({"csv"}));

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo search time under the optimal drift");
    common(sim_cmd);
    SimConfig sim;
    std::string dump_path;
    sim_cmd->add_option("--paths", sim.n_paths, "Number of paths")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--dt", sim.dt, "Euler step")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed, "Random seed");
    sim_cmd->add_option("--max-time", sim.max_time, "Censoring time")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
    sim_cmd->add_option("--dump", dump_path, "Write per-path CSV to this file");

    auto* approx_cmd = app.add_subcommand("approx", "Approximation sequence of balanced measures (CSV)");
    common(approx_cmd);
    int n_max = 10;
    std::string variant = "outward";
    approx_cmd->add_option("--n-max", n_max, "Largest n")->check(CLI::PositiveNumber);
    approx_cmd->add_option("--variant", variant, "Construction")->check(CLI::IsMember({"outward", "inward", "truncated"}));

    auto* catalog_cmd = app.add_subcommand("catalog", "Print the spec of a symmetric catalog entry");
    std::string family;
    ParamMap params{{"A", 1.0}, {"lambda", 1.0}, {"sigma", 1.0}, {"alpha", 4.0}, {"A0", 1.0}};
    catalog_cmd->add_option("family", family, "degenerate, uniform, exponential, gaussian or pareto")->required();
    for (auto& [key, value] : params) catalog_cmd->add_option("--" + key, value, key + " parameter");

    auto* hit_cmd = app.add_subcommand("hitting", "Expected hitting time of a point under the optimal drift");
    common(hit_cmd);
    double point = 1.0;
    bool hit_sim = false;
    hit_cmd->add_option("--point", point, "Target point a")->required();
    hit_cmd->add_flag("--simulate", hit_sim, "Add a Monte Carlo estimate");
    hit_cmd->add_option("--paths", sim.n_paths, "Number of paths")->check(CLI::PositiveNumber);
    hit_cmd->add_option("--dt", sim.dt, "Euler step")->check(CLI::PositiveNumber);
    hit_cmd->add_option("--seed", sim.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*catalog_cmd) {
            std::cout << target_spec_json(catalog(family, params)) << "\n";
            return 0;
        }
        const TargetDistribution t = read_spec(spec_path);
        if (*analyze_cmd) {
            const AnalysisReport r = analyze(t, D);
            std::cout << (analyze_out == "json" ? report_json(r) + "\n" : report_text(r));
        } else if (*table_cmd) {
            const Drift b0 = optimal_drift(t, D);
            const auto rows = drift_table(b0, critical_cdf(t), table_window(t), grid);
            write_drift_table_csv(std::cout, rows);
        } else if (*sim_cmd) {
            const Drift b0 = optimal_drift(t, D);
            std::vector<PathRecord> records;
            const McEstimate e = simulate_search(b0, t, sim, dump_path.empty() ? nullptr : &records);
            const SearchValue q = expected_search_time(b0, t);
            const nlohmann::json j{{"monte_carlo", estimate_json(e)},
                                   {"quadrature", finite_or_nan(q.value.value)},
                                   {"dt", sim.dt},
                                   {"seed", sim.seed}};
            std::cout << j.dump(2) << "\n";
            if (!dump_path.empty()) {
                std::ofstream out(dump_path);
                if (!out) throw Error(ErrorCode::BadParams, "cannot write " + dump_path);
                write_paths_csv(out, records);
            }
        } else if (*approx_cmd) {
            write_approximation_csv(std::cout, approximation_sequence(t, n_max, approx_variant_from_string(variant), D));
        } else if (*hit_cmd) {
            const Drift b0 = optimal_drift(t, D);
            const HittingTime h = expected_hitting_time(b0, point);
            nlohmann::json j{{"point", point}, {"quadrature", finite_or_nan(h.value.value)}};
            if (hit_sim) j["monte_carlo"] = estimate_json(simulate_hitting(b0, point, sim));
            std::cout << j.dump(2) << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "diffsearch: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "diffsearch: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
