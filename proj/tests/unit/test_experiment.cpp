#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hcsmooth/errors.hpp"
#include "hcsmooth/experiment.hpp"

using namespace hcsmooth;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    std::random_device rd;
    const auto dir = fs::temp_directory_path() / ("hcsmooth-" + tag + "-" + std::to_string(rd()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

fs::path write_two_instances(const fs::path& dir) {
    Rng rng(51);
    std::vector<UbqpInstance> v{random_ubqp(30, 0.3, 100, rng), random_ubqp(25, 0.3, 100, rng)};
    const auto path = dir / "pair.txt";
    std::ofstream out(path);
    write_orlib_ubqp(out, v);
    return path;
}

ExperimentConfig base_config(const fs::path& problem, const fs::path& out) {
    ExperimentConfig c;
    c.problem = problem;
    c.out_dir = out;
    c.budget = {BudgetKind::evaluation_count, 20000, 2000};
    c.seeds = {1, 2};
    return c;
}

}  // namespace

TEST_CASE("algorithm and budget names") {
    for (auto name : {"ils", "lsils", "gh", "ssa", "pi-ils", "pi-lsils", "pi-gh", "pi-ssa", "pc-lsils"})
        CHECK(algorithm_name(parse_algorithm(name)) == name);
    CHECK_THROWS_AS(parse_algorithm("sa"), ConfigError);
    CHECK(is_parallel(Algorithm::pc_lsils));
    CHECK_FALSE(is_parallel(Algorithm::gh));
    CHECK(parse_budget_kind("evals") == BudgetKind::evaluation_count);
    CHECK(parse_budget_kind("seconds") == BudgetKind::wall_clock_seconds);
    CHECK_THROWS_AS(parse_budget_kind("hours"), ConfigError);
    CHECK(detect_problem("a/b/kroA100.TSP") == ProblemKind::tsp);
    CHECK(detect_problem("bqp2500.txt") == ProblemKind::ubqp);
}

TEST_CASE("schedule resolution") {
    ExperimentConfig c;
    c.budget = {BudgetKind::evaluation_count, 600, 10};
    c.lambda_step = 0.01;
    c.lambda_max = 0.05;
    auto s = resolve_schedule(c, ProblemKind::tsp);
    CHECK(s.step_interval == doctest::Approx(100.0));
    CHECK(update_lambda(s, 599) == doctest::Approx(0.05));

    c.lambda_interval = 50;
    CHECK(resolve_schedule(c, ProblemKind::tsp).step_interval == 50.0);

    ExperimentConfig d;
    d.budget = {BudgetKind::evaluation_count, 1000, 10};
    CHECK(update_lambda(resolve_schedule(d, ProblemKind::ubqp), 999) == doctest::Approx(0.004));
    CHECK(update_lambda(resolve_schedule(d, ProblemKind::tsp), 999) == doctest::Approx(0.09));
    d.lambda = 0.3;
    CHECK(resolve_schedule(d, ProblemKind::ubqp).value == 0.3);

    ExperimentConfig e;
    e.lambda_step = 0.1;
    CHECK_THROWS_AS(resolve_schedule(e, ProblemKind::ubqp), ConfigError);
    e.lambda_step.reset();
    e.lambda_max = 0.1;
    CHECK_THROWS_AS(resolve_schedule(e, ProblemKind::ubqp), ConfigError);
    e.lambda_max.reset();
    e.lambda = 1.2;
    CHECK_THROWS_AS(resolve_schedule(e, ProblemKind::ubqp), ConfigError);
}

TEST_CASE("seed resolution") {
    ExperimentConfig c;
    CHECK(resolve_seeds(c) == std::vector<std::uint64_t>{1});
    c.runs = 3;
    CHECK(resolve_seeds(c) == std::vector<std::uint64_t>{1, 2, 3});
    c.seeds = {9};
    CHECK(resolve_seeds(c) == std::vector<std::uint64_t>{9});
}

TEST_CASE("configuration errors") {
    ExperimentConfig c;
    c.budget = {BudgetKind::evaluation_count, 100, 10};
    c.algorithm = Algorithm::ssa;
    CHECK_THROWS_AS(validate_config(c, ProblemKind::ubqp), ConfigError);
    CHECK_NOTHROW(validate_config(c, ProblemKind::tsp));
    c.algorithm = Algorithm::pc_lsils;
    CHECK_THROWS_AS(validate_config(c, ProblemKind::ubqp), ConfigError);
    c.topology = "2x2";
    CHECK_THROWS_AS(validate_config(c, ProblemKind::ubqp), ConfigError);
    c.topology = "3x3";
    CHECK_NOTHROW(validate_config(c, ProblemKind::ubqp));
    c.algorithm = Algorithm::pi_gh;
    c.topology.reset();
    CHECK_THROWS_AS(validate_config(c, ProblemKind::ubqp), ConfigError);
    c.workers = 2;
    CHECK_NOTHROW(validate_config(c, ProblemKind::ubqp));
    c.alphas = {2, 3};
    CHECK_THROWS_AS(validate_config(c, ProblemKind::ubqp), ConfigError);
}

TEST_CASE("number formatting") {
    CHECK(format_number(3) == "3");
    CHECK(format_number(-120) == "-120");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(0.1) == "0.1");
    std::ostringstream out;
    write_trace_csv(out, {{0, 10, 0.25, "gh-a2"}, {5, 12, std::nullopt, "ils"}}, true);
    CHECK(out.str() == "elapsed,best,excess,phase\n0,10,0.25,gh-a2\n5,12,,ils\n");
}

TEST_CASE("experiment files are named per instance and seed and reruns are identical") {
    const auto dir = fresh_dir("exp");
    const auto problem = write_two_instances(dir);
    auto c = base_config(problem, dir / "out");
    const auto first = run_experiment(c);
    REQUIRE(first.files.size() == 6);
    CHECK(first.files[0].filename() == "pair_1_lsils_1.csv");
    CHECK(first.files[2].filename() == "pair_1_lsils_agg.csv");
    CHECK(first.files[5].filename() == "pair_2_lsils_agg.csv");

    std::vector<std::string> before;
    for (const auto& f : first.files) before.push_back(slurp(f));
    const auto second = run_experiment(c);
    for (std::size_t k = 0; k < before.size(); ++k) CHECK(slurp(second.files[k]) == before[k]);

    c.instance_index = 1;
    const auto only = run_experiment(c);
    REQUIRE(only.files.size() == 3);
    CHECK(only.files[0].filename() == "pair_2_lsils_1.csv");
    c.instance_index = 2;
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("aggregate CSV holds the mean of the runs") {
    const auto dir = fresh_dir("agg");
    const auto problem = write_two_instances(dir);
    {
        std::ofstream side(dir / "pair.best");
        side << "100000\n90000\n";
    }
    auto c = base_config(problem, dir);
    c.instance_index = 0;
    const auto files = run_experiment(c).files;
    const auto a = read_csv(files[0]);
    const auto b = read_csv(files[1]);
    const auto agg = read_csv(files[2]);
    REQUIRE(agg.size() == a.size());
    CHECK(agg[0] == std::vector<std::string>{"elapsed", "best", "excess", "runs"});
    CHECK(a[0] == std::vector<std::string>{"elapsed", "best", "excess"});
    for (std::size_t k = 1; k < agg.size(); ++k) {
        const double mean = (std::stod(a[k][1]) + std::stod(b[k][1])) / 2;
        CHECK(std::stod(agg[k][1]) == doctest::Approx(mean));
        const double ex = (100000 - std::stod(a[k][1])) / 100000;
        CHECK(std::stod(a[k][2]) == doctest::Approx(ex));
        CHECK(agg[k][3] == "2");
    }
    fs::remove_all(dir);
}

TEST_CASE("sidecar parsing") {
    const auto dir = fresh_dir("side");
    CHECK(read_best_known_sidecar(dir / "none.txt").empty());
    {
        std::ofstream side(dir / "x.best");
        side << "12 -7\n";
    }
    CHECK(read_best_known_sidecar(dir / "x.txt") == std::vector<std::int64_t>{12, -7});
    {
        std::ofstream side(dir / "y.best");
        side << "12 abc\n";
    }
    CHECK_THROWS_AS(read_best_known_sidecar(dir / "y.txt"), ParseError);
    fs::remove_all(dir);
}

TEST_CASE("staged and parallel runs write their extra columns") {
    const auto dir = fresh_dir("par");
    const auto problem = write_two_instances(dir);
    auto c = base_config(problem, dir);
    c.instance_index = 0;
    c.seeds = {3};
    c.algorithm = Algorithm::gh;
    auto files = run_experiment(c).files;
    CHECK(read_csv(files[0])[0].back() == "phase");

    c.algorithm = Algorithm::pc_lsils;
    c.topology = "3x3";
    c.mode = ExecutionMode::round_robin;
    files = run_experiment(c).files;
    REQUIRE(files.size() == 3);
    CHECK(files[1].filename() == "pair_1_pc-lsils_3_workers.csv");
    const auto workers = read_csv(files[1]);
    CHECK(workers[0].back() == "worker");
    CHECK(workers.size() == 1 + 9 * (read_csv(files[0]).size() - 1));
    fs::remove_all(dir);
}

TEST_CASE("missing input is an I/O error") {
    ExperimentConfig c;
    c.problem = "/nonexistent/q.txt";
    c.out_dir = fresh_dir("io");
    c.budget = {BudgetKind::evaluation_count, 10, 1};
    CHECK_THROWS_AS(run_experiment(c), IoError);
    fs::remove_all(c.out_dir);
}

TEST_CASE("verify command on small anchors") {
    std::ostringstream out;
    CHECK(verify_command({4, 7, 6, 3}, out));
    CHECK(out.str().find("passed 6 of 6") != std::string::npos);
    CHECK_THROWS_AS(verify_command({4, 13, 1, 1}, out), CostGuardError);
}

TEST_CASE("analyze command output") {
    const auto dir = fresh_dir("an");
    const auto problem = write_two_instances(dir);
    AnalyzeConfig a;
    a.problem = problem;
    a.lambdas = {0.0, 1.0};
    a.move_budget = 1000;
    a.repetitions = 2;
    std::ostringstream out;
    analyze_command(a, out);
    const std::string text = out.str();
    CHECK(text.rfind("lambda,mean_density,mean_escaping_rate,repetitions\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);

    a.anchor_source = AnchorSource::global_optimum;
    CHECK_THROWS_AS(analyze_command(a, out), ConfigError);
    {
        std::ofstream f(dir / "best.sol");
        f << std::string(30, '1') << '\n';
    }
    a.anchor_file = dir / "best.sol";
    std::ostringstream ok;
    analyze_command(a, ok);
    const std::string rows = ok.str();
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);
    fs::remove_all(dir);
}
