// hcsmooth command-line front end: solve, analyze, verify, bench.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 I/O or parse
// error, 3 verification failure.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hcsmooth/errors.hpp"
#include "hcsmooth/experiment.hpp"
#include "hcsmooth/metaheuristics.hpp"

namespace {

using namespace hcsmooth;

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerify = 3;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const auto v = std::stoull(item, &used);
        if (used != item.size()) throw ConfigError("bad seed: " + item);
        seeds.push_back(v);
    }
    return seeds;
}

struct BenchConfig {
    int n = 500;
    int cities = 100;
    double budget = 2.0;
    std::uint64_t seed = 1;
};

void bench(const BenchConfig& cfg) {
    Rng rng(cfg.seed);
    const auto ubqp = random_ubqp(cfg.n, 0.1, 100, rng, "random-ubqp");
    const auto tsp = random_tsp(cfg.cities, 1000.0, rng, "random-tsp");

    SolverOptions opts;
    opts.budget = {BudgetKind::wall_clock_seconds, cfg.budget, cfg.budget};
    auto report = [](const char* name, std::int64_t value, std::int64_t iterations, double seconds) {
        std::cout << name << " best=" << value << " iterations=" << iterations
                  << " iterations_per_second=" << format_number(iterations / seconds) << '\n';
    };
    auto timed = [&](const char* name, auto&& run) {
        const auto start = std::chrono::steady_clock::now();
        auto trace = run();
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report(name, trace.final_value, trace.iterations, s);
    };

    timed("ubqp-ils", [&] { return ils_run(ubqp, opts, cfg.seed); });
    opts.schedule = ubqp_default_schedule(cfg.budget);
    timed("ubqp-lsils", [&] { return lsils_run(ubqp, opts, cfg.seed); });
    opts.schedule = LambdaSchedule::constant(0.0);
    timed("tsp-ils", [&] { return ils_run(tsp, opts, cfg.seed); });
    opts.schedule = tsp_dynamic_schedule(cfg.budget);
    timed("tsp-lsils", [&] { return lsils_run(tsp, opts, cfg.seed); });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landscape-smoothing metaheuristics for UBQP and TSP"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file; keys match long flag names, under [solve] etc.");

    // solve
    ExperimentConfig solve_cfg;
    std::string algo = "lsils";
    std::string budget_kind = "evaluations";
    std::string seeds_text;
    std::string mode = "threaded";
    double budget = 0.0;
    double log_interval = 0.0;
    std::int64_t best_known = 0;
    std::string problem_path;
    std::string out_dir = ".";
    auto* solve = app.add_subcommand("solve", "Run an algorithm and write CSV traces");
    solve->add_option("problem", problem_path, "ORLIB (.txt) or TSPLIB (.tsp) file")->required();
    solve->add_option("--algo", algo, "ils, lsils, gh, ssa, pi-ils, pi-lsils, pi-gh, pi-ssa, pc-lsils")
        ->capture_default_str();
    solve->add_option("--budget", budget, "Budget limit in units of --budget-kind")->required();
    solve->add_option("--budget-kind", budget_kind, "seconds, evaluations or moves")->capture_default_str();
    solve->add_option("--log-interval", log_interval, "Trace interval; defaults to budget/100");
    solve->add_option("--lambda", solve_cfg.lambda, "Constant lambda");
    solve->add_option("--lambda-step", solve_cfg.lambda_step, "Stepped schedule increment");
    solve->add_option("--lambda-max", solve_cfg.lambda_max, "Stepped schedule cap");
    solve->add_option("--lambda-interval", solve_cfg.lambda_interval, "Budget between lambda steps");
    solve->add_option("--toy-scale", solve_cfg.toy_scale, "UBQP toy multiplier")->capture_default_str();
    solve->add_option("--strength", solve_cfg.perturbation_strength, "UBQP bits flipped per shake (0: n/4)");
    solve->add_option("--neighbor-k", solve_cfg.neighbor_k, "3-Opt candidate list size (0: full scan)");
    solve->add_option("--alphas", solve_cfg.alphas, "GH/SSA alpha sequence, ending with 1")->delimiter(',');
    solve->add_option("--topology", solve_cfg.topology, "Torus RxC for pc-lsils (and pi-* worker count)");
    solve->add_option("--workers", solve_cfg.workers, "Worker count for pi-* without a topology");
    solve->add_option("--seeds", seeds_text, "Comma-separated seeds");
    solve->add_option("--runs", solve_cfg.runs, "Number of runs with seeds 1..runs when --seeds is absent");
    auto* best_opt = solve->add_option("--best-known", best_known, "Best known objective value");
    solve->add_option("--instance-index", solve_cfg.instance_index, "0-based ORLIB instance (-1: all)");
    solve->add_option("--out", out_dir, "Output directory")->capture_default_str();
    solve->add_option("--mode", mode, "threaded or round-robin")->capture_default_str();
    solve->add_flag("--plot-script", solve_cfg.plot_script, "Also write a matplotlib script for the aggregates");

    // analyze
    AnalyzeConfig analyze_cfg;
    std::string analyze_problem;
    std::string anchor = "local";
    std::string anchor_file;
    std::string analyze_out;
    bool no_scale = false;
    auto* analyze = app.add_subcommand("analyze", "Local-optimum density and escaping rate across a lambda grid");
    analyze->add_option("problem", analyze_problem, "ORLIB file")->required();
    analyze->add_option("--instance-index", analyze_cfg.instance_index, "0-based instance")->capture_default_str();
    analyze->add_option("--lambdas", analyze_cfg.lambdas, "lambda grid")->delimiter(',');
    analyze->add_flag("--no-scale", no_scale, "Use the grid as given instead of scaling it by the magnitude limit");
    analyze->add_option("--anchor", anchor, "local or global")->capture_default_str();
    analyze->add_option("--anchor-file", anchor_file, "Best-known solution as 0/1 characters (global mode)");
    analyze->add_option("--moves", analyze_cfg.move_budget, "Moves per sample")->capture_default_str();
    analyze->add_option("--repetitions", analyze_cfg.repetitions, "Samples per lambda")->capture_default_str();
    analyze->add_option("--toy-scale", analyze_cfg.toy_scale)->capture_default_str();
    analyze->add_option("--strength", analyze_cfg.perturbation_strength, "Bits flipped per shake (0: n/4)");
    analyze->add_option("--seed", analyze_cfg.seed)->capture_default_str();
    analyze->add_option("--out", analyze_out, "CSV file (default stdout)");

    // verify
    VerifyConfig verify_cfg;
    auto* verify = app.add_subcommand("verify", "Exhaustively check toy unimodality on random anchors");
    verify->add_option("--n-min", verify_cfg.n_min)->capture_default_str();
    verify->add_option("--n-max", verify_cfg.n_max)->capture_default_str();
    verify->add_option("--trials", verify_cfg.trials)->capture_default_str();
    verify->add_option("--seed", verify_cfg.seed)->capture_default_str();

    // bench
    BenchConfig bench_cfg;
    auto* bench_cmd = app.add_subcommand("bench", "Time ILS and LSILS on random instances");
    bench_cmd->add_option("--n", bench_cfg.n, "UBQP variables")->capture_default_str();
    bench_cmd->add_option("--cities", bench_cfg.cities, "TSP cities")->capture_default_str();
    bench_cmd->add_option("--budget", bench_cfg.budget, "Seconds per run")->capture_default_str();
    bench_cmd->add_option("--seed", bench_cfg.seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*solve) {
            solve_cfg.problem = problem_path;
            solve_cfg.out_dir = out_dir;
            solve_cfg.algorithm = parse_algorithm(algo);
            solve_cfg.budget.kind = parse_budget_kind(budget_kind);
            solve_cfg.budget.limit = budget;
            solve_cfg.budget.log_interval = log_interval > 0.0 ? log_interval : (budget > 0.0 ? budget / 100.0 : 1.0);
            solve_cfg.seeds = parse_seed_list(seeds_text);
            if (*best_opt) solve_cfg.best_known = best_known;
            if (mode == "threaded") solve_cfg.mode = ExecutionMode::threaded;
            else if (mode == "round-robin") solve_cfg.mode = ExecutionMode::round_robin;
            else throw ConfigError("--mode must be threaded or round-robin");
            const auto summary = run_experiment(solve_cfg);
            for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
            for (const auto& f : summary.files) std::cout << f.string() << '\n';
        } else if (*analyze) {
            analyze_cfg.problem = analyze_problem;
            analyze_cfg.scale_lambdas = !no_scale;
            if (anchor == "global") analyze_cfg.anchor_source = AnchorSource::global_optimum;
            else if (anchor != "local") throw ConfigError("--anchor must be local or global");
            if (!anchor_file.empty()) analyze_cfg.anchor_file = anchor_file;
            if (analyze_out.empty()) {
                analyze_command(analyze_cfg, std::cout);
            } else {
                std::ofstream out(analyze_out, std::ios::binary);
                if (!out) throw IoError("cannot write " + analyze_out);
                analyze_command(analyze_cfg, out);
            }
        } else if (*verify) {
            if (!verify_command(verify_cfg, std::cout)) return kExitVerify;
        } else if (*bench_cmd) {
            bench(bench_cfg);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const CostGuardError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
