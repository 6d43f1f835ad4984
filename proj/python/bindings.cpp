#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "hcsmooth/errors.hpp"
#include "hcsmooth/landscape.hpp"
#include "hcsmooth/localsearch.hpp"
#include "hcsmooth/metaheuristics.hpp"
#include "hcsmooth/oracle.hpp"
#include "hcsmooth/parallel.hpp"

namespace py = pybind11;
using namespace hcsmooth;

namespace {

Budget make_budget(double limit, const std::string& kind, std::optional<double> log_interval) {
    Budget b;
    if (kind == "seconds") b.kind = BudgetKind::wall_clock_seconds;
    else if (kind == "evaluations") b.kind = BudgetKind::evaluation_count;
    else if (kind == "moves") b.kind = BudgetKind::move_count;
    else throw ConfigError("budget_kind must be seconds, evaluations or moves");
    b.limit = limit;
    b.log_interval = log_interval.value_or(limit > 0 ? limit / 100.0 : 1.0);
    return b;
}

// lambda_ is a constant; lambda_step/lambda_max/lambda_interval give a staircase;
// neither picks the problem's default schedule.
SolverOptions make_options(double budget, const std::string& budget_kind, std::optional<double> log_interval,
                           std::optional<double> lambda, std::optional<double> lambda_step,
                           std::optional<double> lambda_max, std::optional<double> lambda_interval,
                           double toy_scale, int strength, int neighbor_k, std::vector<int> alphas,
                           LambdaSchedule (*fallback)(double)) {
    SolverOptions o;
    o.budget = make_budget(budget, budget_kind, log_interval);
    if (lambda_step) {
        if (!lambda_max) throw ConfigError("lambda_step needs lambda_max");
        const double interval = lambda_interval.value_or(budget / (std::floor(*lambda_max / *lambda_step + 1e-9) + 1.0));
        o.schedule = LambdaSchedule::stepped(*lambda_step, interval, *lambda_max);
    } else if (lambda) {
        o.schedule = LambdaSchedule::constant(*lambda);
    } else {
        o.schedule = fallback(budget);
    }
    o.toy_scale = toy_scale;
    o.perturbation_strength = strength;
    o.three_opt.neighbor_k = neighbor_k;
    o.alpha_sequence = std::move(alphas);
    return o;
}

template <class Instance>
LambdaSchedule default_schedule(double budget) {
    if constexpr (std::is_same_v<Instance, TspInstance>) return tsp_dynamic_schedule(budget);
    else return ubqp_default_schedule(budget);
}

py::list trace_points(const std::vector<TracePoint>& points) {
    py::list out;
    for (const auto& p : points) {
        py::dict d;
        d["elapsed"] = p.elapsed;
        d["best"] = p.best;
        d["excess"] = p.excess ? py::cast(*p.excess) : py::none();
        d["phase"] = p.phase;
        out.append(d);
    }
    return out;
}

template <class Solution>
py::dict run_dict(const RunTrace<Solution>& run) {
    py::dict d;
    d["trace"] = trace_points(run.points);
    d["best"] = run.final_best;
    d["value"] = run.final_value;
    d["seed"] = run.seed;
    d["iterations"] = run.iterations;
    return d;
}

template <class Solution>
py::dict parallel_dict(const ParallelResult<Solution>& r) {
    py::dict d;
    py::list workers;
    for (const auto& w : r.workers) workers.append(run_dict(w));
    d["workers"] = workers;
    d["aggregate"] = trace_points(r.aggregate);
    d["best"] = r.best;
    d["value"] = r.best_value;
    d["best_worker"] = r.best_worker;
    return d;
}

Variant parse_variant(const std::string& name) {
    if (name == "ils") return Variant::ils;
    if (name == "lsils") return Variant::lsils;
    if (name == "gh") return Variant::gh;
    if (name == "ssa") return Variant::ssa;
    throw ConfigError("variant must be ils, lsils, gh or ssa");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Shared keyword set of every solver entry point.
#define SOLVER_ARGS                                                                                         \
    py::arg("budget"), py::arg("budget_kind") = "evaluations", py::arg("log_interval") = py::none(),       \
        py::arg("lambda_") = py::none(), py::arg("lambda_step") = py::none(), py::arg("lambda_max") = py::none(), \
        py::arg("lambda_interval") = py::none(), py::arg("toy_scale") = 5.0, py::arg("strength") = 0,     \
        py::arg("neighbor_k") = 0, py::arg("alphas") = std::vector<int>{}

template <class Instance, class Run>
void def_solver(py::module_& m, const char* name, Run run, const char* doc) {
    m.def(
        name,
        [run](const Instance& inst, std::uint64_t seed, double budget, const std::string& kind,
              std::optional<double> log_interval, std::optional<double> lambda, std::optional<double> step,
              std::optional<double> lmax, std::optional<double> interval, double toy_scale, int strength,
              int neighbor_k, std::vector<int> alphas) {
            const auto o = make_options(budget, kind, log_interval, lambda, step, lmax, interval, toy_scale,
                                        strength, neighbor_k, std::move(alphas), default_schedule<Instance>);
            decltype(run(inst, o, seed)) result;
            {
                py::gil_scoped_release release;
                result = run(inst, o, seed);
            }
            return run_dict(result);
        },
        py::arg("instance"), py::arg("seed") = 1, SOLVER_ARGS, doc);
}

template <class Instance>
void def_solvers(py::module_& m) {
    def_solver<Instance>(m, "ils", [](const Instance& i, const SolverOptions& o, std::uint64_t s) { return ils_run(i, o, s); },
                         "Plain iterated local search.");
    def_solver<Instance>(m, "lsils", [](const Instance& i, const SolverOptions& o, std::uint64_t s) { return lsils_run(i, o, s); },
                         "Iterated local search on the smoothed landscape around the incumbent.");
    def_solver<Instance>(m, "gh", [](const Instance& i, const SolverOptions& o, std::uint64_t s) { return gh_run(i, o, s); },
                         "Staged Gu-Huang smoothing, then plain ILS.");
    def_solver<Instance>(m, "ssa", [](const Instance& i, const SolverOptions& o, std::uint64_t s) { return ssa_run(i, o, s); },
                         "Sequential convex/concave distance smoothing (TSP only).");

    m.def(
        "pc_lsils",
        [](const Instance& inst, const std::string& topology, std::vector<std::uint64_t> seeds, bool cooperation,
           bool round_robin, double budget, const std::string& kind, std::optional<double> log_interval,
           std::optional<double> lambda, std::optional<double> step, std::optional<double> lmax,
           std::optional<double> interval, double toy_scale, int strength, int neighbor_k, std::vector<int> alphas) {
            const auto topo = TorusTopology::parse(topology);
            ParallelOptions p;
            p.solver = make_options(budget, kind, log_interval, lambda, step, lmax, interval, toy_scale, strength,
                                    neighbor_k, std::move(alphas), default_schedule<Instance>);
            p.mode = round_robin ? ExecutionMode::round_robin : ExecutionMode::threaded;
            p.cooperation = cooperation;
            if (seeds.empty()) seeds = worker_seeds(1, topo.size());
            decltype(pc_lsils_run(inst, topo, p, seeds)) r;
            {
                py::gil_scoped_release release;
                r = pc_lsils_run(inst, topo, p, seeds);
            }
            return parallel_dict(r);
        },
        py::arg("instance"), py::arg("topology") = "3x3", py::arg("seeds") = std::vector<std::uint64_t>{},
        py::arg("cooperation") = true, py::arg("round_robin") = false, SOLVER_ARGS,
        "Cooperative LSILS workers on a torus exchanging elites with their four neighbours.");

    m.def(
        "pi_run",
        [](const std::string& variant, const Instance& inst, std::vector<std::uint64_t> seeds, bool round_robin,
           double budget, const std::string& kind, std::optional<double> log_interval, std::optional<double> lambda,
           std::optional<double> step, std::optional<double> lmax, std::optional<double> interval, double toy_scale,
           int strength, int neighbor_k, std::vector<int> alphas) {
            ParallelOptions p;
            p.solver = make_options(budget, kind, log_interval, lambda, step, lmax, interval, toy_scale, strength,
                                    neighbor_k, std::move(alphas), default_schedule<Instance>);
            p.mode = round_robin ? ExecutionMode::round_robin : ExecutionMode::threaded;
            const auto v = parse_variant(variant);
            decltype(pi_run(v, inst, p, seeds)) r;
            {
                py::gil_scoped_release release;
                r = pi_run(v, inst, p, seeds);
            }
            return parallel_dict(r);
        },
        py::arg("variant"), py::arg("instance"), py::arg("seeds"), py::arg("round_robin") = false, SOLVER_ARGS,
        "Independent runs of one sequential algorithm, one per seed.");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Landscape-smoothing iterated local search for UBQP and TSP.";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CostGuardError>(m, "CostGuardError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

    py::class_<UbqpInstance>(m, "UbqpInstance")
        .def_static("from_dense", &UbqpInstance::from_dense, py::arg("matrix"), py::arg("name") = "")
        .def_property_readonly("size", &UbqpInstance::size)
        .def_property("name", &UbqpInstance::name, &UbqpInstance::set_name)
        .def_property("best_known", &UbqpInstance::best_known, &UbqpInstance::set_best_known)
        .def("coef", &UbqpInstance::coef)
        .def("evaluate", [](const UbqpInstance& q, const BitString& x) { return evaluate_ubqp(q, x); })
        .def("__repr__", [](const UbqpInstance& q) {
            return "<UbqpInstance " + q.name() + " n=" + std::to_string(q.size()) + ">";
        });

    py::class_<TspInstance>(m, "TspInstance")
        .def(py::init([](const std::vector<std::pair<double, double>>& xy, const std::string& name) {
                 std::vector<Point> pts;
                 for (auto [x, y] : xy) pts.push_back({x, y});
                 return TspInstance(std::move(pts), name);
             }),
             py::arg("coords"), py::arg("name") = "")
        .def_property_readonly("size", &TspInstance::size)
        .def_property("name", &TspInstance::name, &TspInstance::set_name)
        .def_property("best_known", &TspInstance::best_known, &TspInstance::set_best_known)
        .def("distance", &TspInstance::distance)
        .def("evaluate", [](const TspInstance& t, const Tour& tour) { return evaluate_tour(t, tour); })
        .def("__repr__", [](const TspInstance& t) {
            return "<TspInstance " + t.name() + " n=" + std::to_string(t.size()) + ">";
        });

    m.def("parse_orlib", [](const std::string& text) { return parse_orlib_ubqp(std::string_view(text)); },
          py::arg("text"));
    m.def("load_orlib", [](const std::string& path) { return parse_orlib_ubqp(std::string_view(slurp(path))); },
          py::arg("path"));
    m.def("parse_tsplib", [](const std::string& text) { return parse_tsplib(std::string_view(text)); }, py::arg("text"));
    m.def("load_tsplib", [](const std::string& path) { return parse_tsplib(std::string_view(slurp(path))); },
          py::arg("path"));
    m.def(
        "random_ubqp",
        [](int n, double density, int max_abs, std::uint64_t seed) {
            Rng rng(seed);
            return random_ubqp(n, density, max_abs, rng);
        },
        py::arg("n"), py::arg("density") = 0.1, py::arg("max_abs") = 100, py::arg("seed") = 1);
    m.def(
        "random_tsp",
        [](int n, double extent, std::uint64_t seed) {
            Rng rng(seed);
            return random_tsp(n, extent, rng);
        },
        py::arg("n"), py::arg("extent") = 1000.0, py::arg("seed") = 1);

    m.def("toy_entry", [](const BitString& anchor, int i, int j) { return ToyUbqp(anchor).entry(i, j); },
          py::arg("anchor"), py::arg("i"), py::arg("j"));
    m.def("toy_fitness", [](const BitString& anchor, const BitString& y) { return ToyUbqp(anchor).fitness(y); },
          py::arg("anchor"), py::arg("y"));
    m.def(
        "smoothed_fitness",
        [](const UbqpInstance& q, const BitString& anchor, double lambda, const BitString& y, double toy_scale) {
            return SmoothedUbqp(q, ToyUbqp(anchor), lambda, toy_scale).fitness(y);
        },
        py::arg("instance"), py::arg("anchor"), py::arg("lambda_"), py::arg("y"), py::arg("toy_scale") = 5.0);

    m.def(
        "local_search",
        [](const UbqpInstance& q, const BitString& start) {
            const auto r = ubqp_best_improvement_ls(UbqpObjective::raw(q), start);
            return py::make_tuple(r.local_opt, r.best_value, r.moves);
        },
        py::arg("instance"), py::arg("start"), "Best-improvement 1-flip descent; returns (solution, value, moves).");
    m.def(
        "three_opt",
        [](const TspInstance& t, const Tour& start, int neighbor_k) {
            ThreeOptOptions o;
            o.neighbor_k = neighbor_k;
            const auto r = three_opt_first_improvement(raw_distances(t), start, t, {}, o);
            return py::make_tuple(r.local_opt, r.best_value, r.moves);
        },
        py::arg("instance"), py::arg("start"), py::arg("neighbor_k") = 0,
        "First-improvement 3-Opt; returns (tour, length, moves).");

    m.def(
        "sample_landscape",
        [](const UbqpInstance& q, const std::optional<BitString>& anchor, double lambda, std::int64_t moves,
           std::uint64_t seed, double toy_scale, int strength) {
            const auto obj = anchor ? UbqpObjective::hc(q, ToyUbqp(*anchor), lambda, toy_scale) : UbqpObjective::raw(q);
            Rng rng(seed);
            const auto s = sample_landscape(obj, moves, rng, strength);
            const auto metrics = density_and_rate(s);
            py::dict d;
            d["moves"] = s.moves;
            d["n_lo"] = s.n_lo;
            d["n_descents"] = s.n_descents;
            d["n_pert"] = s.n_pert;
            d["n_succ"] = s.n_succ;
            d["density"] = metrics.density ? py::cast(*metrics.density) : py::none();
            d["escaping_rate"] = metrics.escaping_rate ? py::cast(*metrics.escaping_rate) : py::none();
            return d;
        },
        py::arg("instance"), py::arg("anchor") = py::none(), py::arg("lambda_") = 0.0, py::arg("moves") = 100000,
        py::arg("seed") = 1, py::arg("toy_scale") = 5.0, py::arg("strength") = 0);
    m.def(
        "lambda_sweep",
        [](const UbqpInstance& q, std::vector<double> lambdas, std::int64_t moves, int repetitions,
           std::optional<BitString> global_optimum, std::uint64_t seed, double toy_scale) {
            SweepOptions o;
            o.lambdas = std::move(lambdas);
            o.move_budget = moves;
            o.repetitions = repetitions;
            o.seed = seed;
            o.toy_scale = toy_scale;
            if (global_optimum) {
                o.anchor_source = AnchorSource::global_optimum;
                o.global_optimum = std::move(global_optimum);
            }
            py::list rows;
            for (const auto& r : lambda_sweep(q, o))
                rows.append(py::make_tuple(r.lambda, r.mean_density, r.mean_escaping_rate, r.repetitions));
            return rows;
        },
        py::arg("instance"), py::arg("lambdas"), py::arg("moves") = 100000, py::arg("repetitions") = 20,
        py::arg("global_optimum") = py::none(), py::arg("seed") = 1, py::arg("toy_scale") = 5.0,
        "Rows of (lambda, mean density, mean escaping rate, repetitions).");
    m.def("magnitude_scaled_lambda_max", &magnitude_scaled_lambda_max, py::arg("instance"), py::arg("toy_scale") = 5.0);

    m.def(
        "verify_unimodal",
        [](const BitString& anchor) {
            const auto c = verify_unimodal(anchor);
            return py::make_tuple(c.unimodal, c.other_local_optima, c.stray_starts);
        },
        py::arg("anchor"), "Exhaustive check (n <= 12); returns (unimodal, other optima, stray starts).");
    m.def(
        "is_kbit_optimal",
        [](const UbqpInstance& q, const BitString& x, int k) { return is_kbit_optimal(UbqpObjective::raw(q), x, k); },
        py::arg("instance"), py::arg("x"), py::arg("k"));
    m.def(
        "global_optima",
        [](const UbqpInstance& q) {
            const auto r = enumerate_ubqp(UbqpObjective::raw(q));
            std::vector<BitString> out;
            for (auto mask : r.global_optima) out.push_back(decode_mask(mask, r.n));
            return py::make_tuple(r.best_value, out);
        },
        py::arg("instance"), "Exhaustive enumeration (n <= 20); returns (best value, optimal solutions).");

    def_solvers<UbqpInstance>(m);
    def_solvers<TspInstance>(m);
}
