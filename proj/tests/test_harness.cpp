#include "tlp/error.hpp"
#include "tlp/harness.hpp"
#include "tlp/worker_pool.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tlp;

namespace {

const std::string kModel = std::string(TLP_TEST_DATA) + "/table2_model.csv";

ExperimentConfig simulated(int procs, double e_min, std::vector<int> variants)
{
    ExperimentConfig c;
    c.model_path = kModel;
    c.procs = procs;
    c.e_min = e_min;
    c.variants = std::move(variants);
    return c;
}

std::vector<PdeProblem> tiny_problems()
{
    return {{"g", SolutionKind::gaussian, -5.0, 5.0, 0.8, 40, 16},
            {"w", SolutionKind::wavepacket, 0.0, 1.5, 0.04, 60, 10}};
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("tlp_test_" + name)).string();
}

}  // namespace

TEST_SUITE("harness")
{
    TEST_CASE("experiment config parsing")
    {
        const Json j = Json::parse(R"({
            "mode": "real", "benchmark": 0, "scale": 0.5, "procs": 8, "e_min": 0.25,
            "variants": [1, 2], "gammas": [1.0, 0.6],
            "problems": [{"name": "g", "solution": "gaussian", "left": -5, "right": 5,
                          "horizon": 0.8, "intervals": 100, "steps": 40}],
            "calibration": {"process_counts": [1, 2], "repetitions": 3},
            "nm": {"iterations": 7, "tolerance": 1e-6, "variant": "a2", "start": [1, 2, 3, 4, 5, 6, 7]},
            "seed": 4, "report": "r.json"
        })");
        const ExperimentConfig c = ExperimentConfig::from_json(j);
        CHECK(c.mode == RunMode::real);
        CHECK(c.procs == 8);
        CHECK(c.gammas == std::vector<double>{1.0, 0.6});
        CHECK(c.calibration_counts == std::vector<int>{1, 2});
        CHECK(c.calibration_repetitions == 3);
        CHECK(c.nm_iterations == 7);
        CHECK(c.nm_variant == Variant::a2);
        CHECK(c.abc_start.d[2] == 7.0);
        REQUIRE(c.task_problems().size() == 1);
        CHECK(c.task_problems()[0].intervals == 50);
        CHECK(c.task_problems()[0].steps == 20);

        const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
        CHECK(back.to_json() == c.to_json());
    }

    TEST_CASE("experiment config errors")
    {
        CHECK_THROWS_AS(ExperimentConfig::from_json(Json{{"procs", 0}}), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::from_json(Json{{"mode", "fast"}}), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::from_json(Json{{"scale", 1.5}}), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::from_json(Json{{"e_min", -0.1}}), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::from_json(Json{{"procs", "many"}}), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::from_json(Json{{"variants", {1, 2}}, {"gammas", {1.0}}}), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::from_json(Json{{"mode", "real"}, {"procs", 2}}), ConfigError);
        CHECK_THROWS_AS(run_experiment(simulated(16, 0.0, {1, 4})), ParameterError);
        ExperimentConfig no_model = simulated(16, 0.0, {1});
        no_model.model_path.clear();
        CHECK_THROWS_AS(run_experiment(no_model), ConfigError);
        no_model.model_path = temp_path("missing.csv");
        CHECK_THROWS_AS(run_experiment(no_model), IoError);
    }

    TEST_CASE("simulated single level run")
    {
        const RunReport r = run_experiment(simulated(16, 0.0, {1}));
        CHECK(r.mode == "simulated");
        REQUIRE(r.variants.size() == 1);
        const VariantReport& v = r.chosen();
        CHECK(v.feasible);
        CHECK(v.makespan == doctest::Approx(11.145));
        CHECK(r.model_sequential == doctest::Approx(97.04 + 24.26 + 12.13 + 6.07));
        CHECK(r.model_speedup == doctest::Approx(r.model_sequential / 11.145));
        CHECK(v.procs.size() == 4);

        // Independent recomputation of the makespan from the model file.
        const TimingModel model = load_timing_model(kModel, 16);
        double worst = 0.0;
        for (std::size_t i = 0; i < v.tasks.size(); ++i)
        {
            CHECK(v.task_seconds[i] == model.predict_time(v.tasks[i], v.procs[i]));
            worst = std::max(worst, v.task_seconds[i]);
        }
        CHECK(worst == v.makespan);
        int total = 0;
        for (int p : v.procs)
            total += p;
        CHECK(total <= 16);
    }

    TEST_CASE("three level selection with an efficiency floor")
    {
        const RunReport r = run_experiment(simulated(128, 0.75, {1, 2, 3}));
        CHECK(r.chosen().degree == 3);
        CHECK(r.active_procs == 117);
        CHECK(r.model_efficiency == doctest::Approx(0.4867).epsilon(0.02));
        CHECK(r.model_time == doctest::Approx(2.45).epsilon(0.01));
        const RunReport again = run_experiment(simulated(128, 0.75, {1, 2, 3}));
        CHECK(again == r);
        CHECK(again.to_json().dump() == r.to_json().dump());
    }

    TEST_CASE("report JSON round trip")
    {
        RunReport r = run_experiment(simulated(64, 0.0, {1, 2}));
        OptimizationReport o;
        o.variant = "a2";
        o.iterations = 3;
        o.best_point = {1, 2, 3, 4, 5, 6, 7};
        o.initial_value = 0.1 + 0.2;
        o.best_value = 1.0 / 3.0;
        o.best_history = {0.5, 0.4, 1.0 / 3.0};
        o.useful_evals = 5;
        o.parallel_steps = 4;
        o.gamma = 0.625;
        r.optimization = o;
        r.measured_time = 0.1;
        r.peak_workers = 12;
        const RunReport back = RunReport::from_json(Json::parse(r.to_json().dump()));
        CHECK(back == r);
        CHECK_THROWS_AS(RunReport::from_json(Json{{"mode", 3}}), ConfigError);
    }

    TEST_CASE("Gantt output")
    {
        const RunReport r16 = run_experiment(simulated(16, 0.0, {1}));
        std::ostringstream out;
        write_gantt(out, r16);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "task_id,procs,predicted_seconds");
        int rows = 0;
        while (std::getline(in, line))
            ++rows;
        CHECK(rows == 4);

        auto spread = [](const RunReport& r) {
            const auto& s = r.chosen().task_seconds;
            return *std::max_element(s.begin(), s.end()) / *std::min_element(s.begin(), s.end());
        };
        CHECK(spread(r16) == doctest::Approx(1.84).epsilon(0.02));
        CHECK(spread(run_experiment(simulated(64, 0.0, {1}))) == doctest::Approx(1.13).epsilon(0.02));

        const std::string path = temp_path("gantt.csv");
        emit_gantt(r16, path);
        std::ifstream file(path);
        std::stringstream content;
        content << file.rdbuf();
        CHECK(content.str() == out.str());
        std::remove(path.c_str());

        RunReport empty;
        CHECK_THROWS_AS(emit_gantt(empty, path), ParameterError);
        CHECK_THROWS_AS(emit_gantt(r16, "/nonexistent/dir/g.csv"), IoError);
    }

    TEST_CASE("sequential and concurrent optimization agree")
    {
        OptimizeOptions opt;
        opt.max_iterations = 6;
        opt.keep_trace = false;
        const std::vector<int> procs{2, 3};
        const AbcOptimization seq =
            optimize_abc(tiny_problems(), procs, Variant::a1, default_abc_start(), opt);
        WorkerPool pool(10);
        const AbcOptimization par =
            optimize_abc(tiny_problems(), procs, Variant::a2, default_abc_start(), opt, &pool);
        CHECK(seq.result.best_point == par.result.best_point);
        CHECK(seq.result.best_history == par.result.best_history);
        CHECK(seq.initial_value == par.initial_value);
        CHECK(seq.result.best_value <= seq.initial_value);
        CHECK(pool.peak_active() <= 10);
        CHECK_THROWS_AS(optimize_abc(tiny_problems(), {1}, Variant::a1, default_abc_start(), opt), ParameterError);
    }

    TEST_CASE("small real run")
    {
        ExperimentConfig c;
        c.mode = RunMode::real;
        c.benchmark = 0;
        c.problems = tiny_problems();
        c.procs = 4;
        c.variants = {1, 2};
        c.calibration_counts = {1, 2};
        c.nm_iterations = 2;
        const RunReport r = run_experiment(c);
        CHECK(r.mode == "real");
        CHECK(r.peak_workers >= 1);
        CHECK(r.peak_workers <= 4);
        CHECK(r.measured_time > 0.0);
        CHECK(r.measured_sequential > 0.0);
        REQUIRE(r.optimization.has_value());
        CHECK(r.optimization->iterations == 2);
        CHECK(r.optimization->best_value <= r.optimization->initial_value);
    }

    TEST_CASE("calibration config")
    {
        const Json j = Json::parse(R"({"tasks": [{"id": 1, "kind": "serial", "work": 1000},
                                                 {"id": 2, "kind": "divisible", "work": 1000}],
                                       "process_counts": [1, 2], "repetitions": 1})");
        const CalibrationConfig c = calibration_config_from_json(j);
        REQUIRE(c.tasks.size() == 2);
        CHECK(c.tasks[1].kind == TaskDescriptor::Kind::divisible);
        const TimingModel m = run_calibration(c);
        CHECK(m.task_count() == 2);
        const Json inline_pde = Json::parse(R"({"tasks": [{"name": "g", "solution": "gaussian", "left": -1,
                                                           "right": 1, "horizon": 0.1, "intervals": 20,
                                                           "steps": 4}]})");
        const CalibrationConfig p = calibration_config_from_json(inline_pde);
        CHECK(p.tasks[0].kind == TaskDescriptor::Kind::pde);
        CHECK(p.tasks[0].name == "g");
        CHECK(p.tasks[0].problem.intervals == 20);
        CHECK_THROWS_AS(calibration_config_from_json(Json{{"tasks", {{{"id", 1}, {"kind", "magic"}}}}}),
                        ConfigError);
    }
}
