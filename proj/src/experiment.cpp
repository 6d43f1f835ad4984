#include "hcsmooth/experiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "hcsmooth/errors.hpp"
#include "hcsmooth/metaheuristics.hpp"
#include "hcsmooth/oracle.hpp"

namespace hcsmooth {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 9> kAlgorithms = {{
    {Algorithm::ils, "ils"},
    {Algorithm::lsils, "lsils"},
    {Algorithm::gh, "gh"},
    {Algorithm::ssa, "ssa"},
    {Algorithm::pi_ils, "pi-ils"},
    {Algorithm::pi_lsils, "pi-lsils"},
    {Algorithm::pi_gh, "pi-gh"},
    {Algorithm::pi_ssa, "pi-ssa"},
    {Algorithm::pc_lsils, "pc-lsils"},
}};

Variant variant_of(Algorithm a) {
    switch (a) {
        case Algorithm::ils:
        case Algorithm::pi_ils: return Variant::ils;
        case Algorithm::gh:
        case Algorithm::pi_gh: return Variant::gh;
        case Algorithm::ssa:
        case Algorithm::pi_ssa: return Variant::ssa;
        default: return Variant::lsils;
    }
}

bool uses_ssa(Algorithm a) { return a == Algorithm::ssa || a == Algorithm::pi_ssa; }
bool uses_phases(Algorithm a) { return variant_of(a) == Variant::gh || variant_of(a) == Variant::ssa; }

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

std::vector<UbqpInstance> load_ubqp(const std::filesystem::path& path) {
    auto in = open_input(path);
    auto instances = parse_orlib_ubqp(in);
    const std::string stem = path.stem().string();
    for (std::size_t k = 0; k < instances.size(); ++k)
        instances[k].set_name(instances.size() == 1 ? stem : stem + "_" + std::to_string(k + 1));
    return instances;
}

TspInstance load_tsp(const std::filesystem::path& path) {
    auto in = open_input(path);
    auto instance = parse_tsplib(in);
    if (instance.name().empty()) instance.set_name(path.stem().string());
    return instance;
}

template <class Solution>
struct RunOutput {
    std::vector<TracePoint> trace;
    std::vector<std::vector<TracePoint>> workers;
};

template <class Instance>
auto execute(const ExperimentConfig& config, const Instance& instance, const SolverOptions& solver,
             std::uint64_t seed) {
    using Solution = std::conditional_t<std::is_same_v<Instance, UbqpInstance>, BitString, Tour>;
    RunOutput<Solution> out;
    const Algorithm a = config.algorithm;
    if (!is_parallel(a)) {
        RunTrace<Solution> run;
        switch (variant_of(a)) {
            case Variant::ils: run = ils_run(instance, solver, seed); break;
            case Variant::lsils: run = lsils_run(instance, solver, seed); break;
            case Variant::gh: run = gh_run(instance, solver, seed); break;
            case Variant::ssa: run = ssa_run(instance, solver, seed); break;
        }
        out.trace = std::move(run.points);
        return out;
    }

    ParallelOptions popts;
    popts.solver = solver;
    popts.mode = config.mode;
    ParallelResult<Solution> result;
    if (a == Algorithm::pc_lsils) {
        const auto topology = TorusTopology::parse(*config.topology);
        const auto seeds = worker_seeds(seed, topology.size());
        result = pc_lsils_run(instance, topology, popts, seeds);
    } else {
        const int m = config.topology ? TorusTopology::parse(*config.topology).size() : config.workers;
        const auto seeds = worker_seeds(seed, m);
        result = pi_run(variant_of(a), instance, popts, seeds);
    }
    out.trace = std::move(result.aggregate);
    for (auto& w : result.workers) out.workers.push_back(std::move(w.points));
    return out;
}

std::string sanitize(std::string name) {
    for (char& c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    return name;
}

/// Mean best and mean excess over runs at each log point.
std::vector<TracePoint> mean_over_runs(const std::vector<std::vector<TracePoint>>& runs) {
    std::size_t length = runs.empty() ? 0 : runs.front().size();
    for (const auto& r : runs) length = std::min(length, r.size());
    std::vector<TracePoint> out(length);
    for (std::size_t k = 0; k < length; ++k) {
        double best = 0.0;
        double excess = 0.0;
        bool have_excess = true;
        for (const auto& r : runs) {
            best += r[k].best;
            if (r[k].excess) excess += *r[k].excess;
            else have_excess = false;
        }
        const auto count = static_cast<double>(runs.size());
        out[k].elapsed = runs.front()[k].elapsed;
        out[k].best = best / count;
        if (have_excess) out[k].excess = excess / count;
    }
    return out;
}

void write_plot_script(const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "# Plots mean excess over time from every *_agg.csv in this directory.\n"
           "import csv, glob, os\n"
           "import matplotlib.pyplot as plt\n\n"
           "here = os.path.dirname(os.path.abspath(__file__))\n"
           "for name in sorted(glob.glob(os.path.join(here, '*_agg.csv'))):\n"
           "    with open(name) as f:\n"
           "        rows = [r for r in csv.DictReader(f) if r['excess']]\n"
           "    if rows:\n"
           "        plt.plot([float(r['elapsed']) for r in rows], [float(r['excess']) for r in rows],\n"
           "                 label=os.path.basename(name)[:-8])\n"
           "plt.xlabel('elapsed')\n"
           "plt.ylabel('excess')\n"
           "plt.legend()\n"
           "plt.savefig(os.path.join(here, 'excess.png'), dpi=150)\n";
}

template <class Instance>
void run_instance(const ExperimentConfig& config, Instance instance, ProblemKind problem,
                  std::optional<std::int64_t> best_known, ExperimentSummary& summary) {
    if (best_known) instance.set_best_known(best_known);
    if (!instance.best_known())
        summary.warnings.push_back("no best-known value for " + instance.name() + "; excess column left empty");

    SolverOptions solver;
    solver.budget = config.budget;
    solver.schedule = resolve_schedule(config, problem);
    solver.toy_scale = config.toy_scale;
    solver.perturbation_strength = config.perturbation_strength;
    solver.three_opt.neighbor_k = config.neighbor_k;
    solver.alpha_sequence = config.alphas;

    const std::string prefix = sanitize(instance.name()) + "_" + std::string(algorithm_name(config.algorithm));
    const bool phases = uses_phases(config.algorithm) && !is_parallel(config.algorithm);
    std::vector<std::vector<TracePoint>> runs;
    for (std::uint64_t seed : resolve_seeds(config)) {
        auto result = execute(config, instance, solver, seed);
        const auto run_path = config.out_dir / (prefix + "_" + std::to_string(seed) + ".csv");
        {
            auto out = open_output(run_path);
            write_trace_csv(out, result.trace, phases);
        }
        summary.files.push_back(run_path);
        if (!result.workers.empty()) {
            const auto workers_path = config.out_dir / (prefix + "_" + std::to_string(seed) + "_workers.csv");
            auto out = open_output(workers_path);
            out << "elapsed,best,excess,worker\n";
            for (std::size_t w = 0; w < result.workers.size(); ++w)
                for (const auto& p : result.workers[w])
                    out << format_number(p.elapsed) << ',' << format_number(p.best) << ','
                        << (p.excess ? format_number(*p.excess) : std::string()) << ',' << w << '\n';
            summary.files.push_back(workers_path);
        }
        runs.push_back(std::move(result.trace));
    }

    const auto agg_path = config.out_dir / (prefix + "_agg.csv");
    auto out = open_output(agg_path);
    out << "elapsed,best,excess,runs\n";
    for (const auto& p : mean_over_runs(runs))
        out << format_number(p.elapsed) << ',' << format_number(p.best) << ','
            << (p.excess ? format_number(*p.excess) : std::string()) << ',' << runs.size() << '\n';
    summary.files.push_back(agg_path);
}

std::optional<std::int64_t> pick_best_known(const ExperimentConfig& config, const std::vector<std::int64_t>& sidecar,
                                            std::size_t index, std::size_t count) {
    if (config.best_known) return config.best_known;
    if (sidecar.size() == count) return sidecar[index];
    if (sidecar.size() == 1 && count == 1) return sidecar.front();
    return std::nullopt;
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
    for (const auto& [a, n] : kAlgorithms)
        if (n == name) return a;
    throw ConfigError("unknown algorithm: " + std::string(name));
}

std::string_view algorithm_name(Algorithm algorithm) {
    for (const auto& [a, n] : kAlgorithms)
        if (a == algorithm) return n;
    return "unknown";
}

bool is_parallel(Algorithm algorithm) {
    return algorithm != Algorithm::ils && algorithm != Algorithm::lsils && algorithm != Algorithm::gh &&
           algorithm != Algorithm::ssa;
}

ProblemKind detect_problem(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".tsp" ? ProblemKind::tsp : ProblemKind::ubqp;
}

BudgetKind parse_budget_kind(std::string_view name) {
    if (name == "seconds" || name == "wall") return BudgetKind::wall_clock_seconds;
    if (name == "evaluations" || name == "evals") return BudgetKind::evaluation_count;
    if (name == "moves") return BudgetKind::move_count;
    throw ConfigError("unknown budget kind: " + std::string(name));
}

std::string_view budget_kind_name(BudgetKind kind) {
    switch (kind) {
        case BudgetKind::wall_clock_seconds: return "seconds";
        case BudgetKind::evaluation_count: return "evaluations";
        case BudgetKind::move_count: return "moves";
    }
    return "unknown";
}

LambdaSchedule resolve_schedule(const ExperimentConfig& config, ProblemKind problem) {
    LambdaSchedule schedule;
    if (config.lambda_step) {
        if (config.lambda) throw ConfigError("--lambda and --lambda-step are mutually exclusive");
        if (!config.lambda_max) throw ConfigError("a stepped lambda schedule needs --lambda-max");
        if (!(*config.lambda_step > 0.0)) throw ConfigError("--lambda-step must be positive");
        const double interval = config.lambda_interval
                                    ? *config.lambda_interval
                                    : config.budget.limit / (std::floor(*config.lambda_max / *config.lambda_step + 1e-9) + 1.0);
        schedule = LambdaSchedule::stepped(*config.lambda_step, interval, *config.lambda_max);
    } else if (config.lambda) {
        if (config.lambda_max) throw ConfigError("--lambda-max only applies to a stepped schedule");
        schedule = LambdaSchedule::constant(*config.lambda);
    } else if (config.lambda_max) {
        throw ConfigError("--lambda-max needs --lambda-step");
    } else {
        schedule = problem == ProblemKind::ubqp ? ubqp_default_schedule(config.budget.limit)
                                                : tsp_dynamic_schedule(config.budget.limit);
        if (config.budget.limit == 0.0) schedule = LambdaSchedule::constant(0.0);
    }
    schedule.validate();
    return schedule;
}

std::vector<std::uint64_t> resolve_seeds(const ExperimentConfig& config) {
    if (!config.seeds.empty()) return config.seeds;
    const int runs = config.runs > 0 ? config.runs : 1;
    std::vector<std::uint64_t> seeds;
    for (int r = 1; r <= runs; ++r) seeds.push_back(static_cast<std::uint64_t>(r));
    return seeds;
}

void validate_config(const ExperimentConfig& config, ProblemKind problem) {
    if (uses_ssa(config.algorithm) && problem != ProblemKind::tsp)
        throw ConfigError("ssa smooths distances and applies to TSP instances only");
    if (config.algorithm == Algorithm::pc_lsils && !config.topology)
        throw ConfigError("pc-lsils needs --topology RxC");
    if (config.topology) (void)TorusTopology::parse(*config.topology);
    if (is_parallel(config.algorithm) && config.algorithm != Algorithm::pc_lsils && !config.topology &&
        config.workers < 1)
        throw ConfigError(std::string(algorithm_name(config.algorithm)) + " needs --topology or --workers");
    if (config.runs < 0) throw ConfigError("--runs must be >= 0");
    config.budget.validate();
    if (!config.alphas.empty()) validate_alpha_sequence(config.alphas);
    (void)resolve_schedule(config, problem);
}

std::vector<std::int64_t> read_best_known_sidecar(const std::filesystem::path& problem) {
    auto path = problem;
    path.replace_extension(".best");
    std::vector<std::int64_t> values;
    std::ifstream in(path);
    if (!in) return values;
    std::string token;
    while (in >> token) {
        std::int64_t v = 0;
        const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
        if (r.ec != std::errc{} || r.ptr != token.data() + token.size())
            throw ParseError("best-known sidecar holds a non-integer: " + token, values.size() + 1);
        values.push_back(v);
    }
    return values;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    const ProblemKind problem = detect_problem(config.problem);
    validate_config(config, problem);
    std::filesystem::create_directories(config.out_dir);
    const auto sidecar = read_best_known_sidecar(config.problem);

    ExperimentSummary summary;
    if (problem == ProblemKind::tsp) {
        run_instance(config, load_tsp(config.problem), problem, pick_best_known(config, sidecar, 0, 1), summary);
    } else {
        auto instances = load_ubqp(config.problem);
        if (config.instance_index >= static_cast<int>(instances.size()))
            throw ConfigError("instance index out of range; the file holds " + std::to_string(instances.size()));
        for (std::size_t k = 0; k < instances.size(); ++k) {
            if (config.instance_index >= 0 && static_cast<int>(k) != config.instance_index) continue;
            run_instance(config, std::move(instances[k]), problem, pick_best_known(config, sidecar, k, instances.size()),
                         summary);
        }
    }
    if (config.plot_script) {
        const auto script = config.out_dir / "plot_excess.py";
        write_plot_script(script);
        summary.files.push_back(script);
    }
    return summary;
}

std::string format_number(double value) {
    if (value == std::floor(value) && std::fabs(value) < 9.0e15) return std::to_string(static_cast<std::int64_t>(value));
    std::array<char, 64> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), r.ptr);
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& points, bool with_phase) {
    out << (with_phase ? "elapsed,best,excess,phase\n" : "elapsed,best,excess\n");
    for (const auto& p : points) {
        out << format_number(p.elapsed) << ',' << format_number(p.best) << ','
            << (p.excess ? format_number(*p.excess) : std::string());
        if (with_phase) out << ',' << p.phase;
        out << '\n';
    }
}

bool verify_command(const VerifyConfig& config, std::ostream& out) {
    if (config.n_min < 1 || config.n_min > config.n_max) throw ConfigError("need 1 <= n_min <= n_max");
    if (config.n_max > kMaxUnimodalSize)
        throw CostGuardError("unimodality check refused: n = " + std::to_string(config.n_max) +
                             " exceeds the exhaustive limit of " + std::to_string(kMaxUnimodalSize));
    if (config.trials < 1) throw ConfigError("trials must be >= 1");

    Rng rng(config.seed);
    int passed = 0;
    for (int t = 0; t < config.trials; ++t) {
        const int n = config.n_min + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(config.n_max - config.n_min + 1)));
        const BitString anchor = random_bits(n, rng);
        const auto cert = verify_unimodal(anchor);
        std::string bits;
        for (auto b : anchor) bits.push_back(b ? '1' : '0');
        out << "trial " << (t + 1) << " n=" << n << " anchor=" << bits << ' ' << (cert.unimodal ? "pass" : "FAIL");
        if (!cert.unimodal) {
            out << " other_optima=" << cert.other_local_optima.size() << " stray_starts:";
            for (const auto& s : cert.stray_starts) {
                out << ' ';
                for (auto b : s) out << (b ? '1' : '0');
            }
        }
        out << '\n';
        if (cert.unimodal) ++passed;
    }
    out << "passed " << passed << " of " << config.trials << '\n';
    return passed == config.trials;
}

BitString read_bit_string(const std::filesystem::path& path) {
    auto in = open_input(path);
    BitString x;
    char c;
    while (in.get(c)) {
        if (c == '0' || c == '1') x.push_back(static_cast<std::uint8_t>(c - '0'));
        else if (!std::isspace(static_cast<unsigned char>(c)))
            throw ParseError(std::string("unexpected character '") + c + "' in solution file", 1);
    }
    return x;
}

void analyze_command(const AnalyzeConfig& config, std::ostream& out) {
    if (detect_problem(config.problem) != ProblemKind::ubqp) throw ConfigError("analyze works on UBQP instances");
    auto instances = load_ubqp(config.problem);
    if (config.instance_index < 0 || config.instance_index >= static_cast<int>(instances.size()))
        throw ConfigError("instance index out of range; the file holds " + std::to_string(instances.size()));
    const auto& instance = instances[static_cast<std::size_t>(config.instance_index)];

    SweepOptions sweep;
    sweep.anchor_source = config.anchor_source;
    if (config.anchor_source == AnchorSource::global_optimum) {
        if (!config.anchor_file) throw ConfigError("global anchor mode needs --anchor-file with the best-known solution");
        sweep.global_optimum = read_bit_string(*config.anchor_file);
    }
    const double scale = config.scale_lambdas ? magnitude_scaled_lambda_max(instance, config.toy_scale) : 1.0;
    for (double l : config.lambdas) sweep.lambdas.push_back(l * scale);
    sweep.move_budget = config.move_budget;
    sweep.repetitions = config.repetitions;
    sweep.toy_scale = config.toy_scale;
    sweep.strength = config.perturbation_strength;
    sweep.seed = config.seed;

    out << "lambda,mean_density,mean_escaping_rate,repetitions\n";
    for (const auto& row : lambda_sweep(instance, sweep))
        out << format_number(row.lambda) << ',' << (row.mean_density ? format_number(*row.mean_density) : "") << ','
            << (row.mean_escaping_rate ? format_number(*row.mean_escaping_rate) : "") << ',' << row.repetitions
            << '\n';
}

}  // namespace hcsmooth
