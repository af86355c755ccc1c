#include "tlp/harness.hpp"

#include "tlp/error.hpp"
#include "tlp/worker_pool.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

namespace tlp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string shortest(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

/// Integrates on every worker of `group`: the partition solver for more than
/// one worker, Thomas on the single worker otherwise.
IntegrateResult integrate_on(WorkerGroup& group, const PdeProblem& problem, const AbcParams& abc)
{
    if (group.size() > 1)
        return integrate(problem, abc, group.size(), &group);
    IntegrateResult result;
    group.run([&](GroupContext&) { result = integrate(problem, abc, 1); });
    return result;
}

const char* solution_name(SolutionKind k) { return k == SolutionKind::gaussian ? "gaussian" : "wavepacket"; }

SolutionKind parse_solution(const std::string& s)
{
    if (s == "gaussian")
        return SolutionKind::gaussian;
    if (s == "wavepacket")
        return SolutionKind::wavepacket;
    throw ConfigError("unknown solution '" + s + "' (expected gaussian or wavepacket)");
}

PdeProblem problem_from_json(const Json& j)
{
    PdeProblem p;
    p.name = j.value("name", std::string("custom"));
    p.solution = parse_solution(j.at("solution").get<std::string>());
    p.left = j.at("left").get<double>();
    p.right = j.at("right").get<double>();
    p.horizon = j.at("horizon").get<double>();
    p.intervals = j.at("intervals").get<std::size_t>();
    p.steps = j.at("steps").get<std::size_t>();
    if (j.contains("scale"))
        p = scaled(p, j.at("scale").get<double>());
    p.validate();
    return p;
}

Json problem_to_json(const PdeProblem& p)
{
    return {{"name", p.name},         {"solution", solution_name(p.solution)},
            {"left", p.left},         {"right", p.right},
            {"horizon", p.horizon},   {"intervals", p.intervals},
            {"steps", p.steps}};
}

AbcParams abc_from_json(const Json& j)
{
    const auto v = j.get<std::vector<double>>();
    return AbcParams::from_vector(v);
}

template <typename F>
auto config_guard(const char* what, F&& f)
{
    try
    {
        return f();
    }
    catch (const Json::exception& e)
    {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

/// Runs one job per entry on its own thread and waits for all of them;
/// rethrows the first failure.
void run_concurrently(std::size_t count, const std::function<void(std::size_t)>& job)
{
    std::vector<std::exception_ptr> errors(count);
    {
        std::vector<std::jthread> threads;
        threads.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
        {
            threads.emplace_back([&, i] {
                try
                {
                    job(i);
                }
                catch (...)
                {
                    errors[i] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors)
    {
        if (e)
            std::rethrow_exception(e);
    }
}

Variant variant_for_degree(int k)
{
    switch (k)
    {
        case 1: return Variant::a1;
        case 2: return Variant::a2;
        case 3: return Variant::a3;
        default: throw ParameterError("no speculative Nelder-Mead variant of degree " + std::to_string(k));
    }
}

}  // namespace

double busy_work(std::uint64_t iterations)
{
    // Opaque inputs keep the compiler from folding the loop.
    volatile double start = 1.0;
    volatile double rate = 0.999999;
    double x = start;
    const double a = rate;
    for (std::uint64_t i = 0; i < iterations; ++i)
        x = x * a + 1e-6;
    return x;
}

CalibrationTask make_calibration_task(const TaskDescriptor& task, const AbcParams& abc)
{
    CalibrationTask out;
    out.task_id = task.task_id;
    out.name = task.name;
    switch (task.kind)
    {
        case TaskDescriptor::Kind::pde:
            out.run = [problem = task.problem, abc](WorkerGroup& group) { integrate_on(group, problem, abc); };
            break;
        case TaskDescriptor::Kind::serial:
            out.run = [work = task.work](WorkerGroup& group) {
                group.run([work](GroupContext& ctx) {
                    if (ctx.rank() == 0)
                    {
                        volatile double sink = busy_work(work);
                        (void)sink;
                    }
                });
            };
            break;
        case TaskDescriptor::Kind::divisible:
            out.run = [work = task.work](WorkerGroup& group) {
                group.run([work](GroupContext& ctx) {
                    const std::uint64_t share = work / ctx.size() + (ctx.rank() < work % ctx.size() ? 1 : 0);
                    volatile double sink = busy_work(share);
                    (void)sink;
                });
            };
            break;
    }
    return out;
}

CalibrationConfig calibration_config_from_json(const Json& j)
{
    return config_guard("calibration config", [&] {
        CalibrationConfig c;
        int next_id = 1;
        for (const auto& t : j.at("tasks"))
        {
            TaskDescriptor d;
            d.task_id = t.value("id", next_id);
            next_id = d.task_id + 1;
            const std::string kind = t.value("kind", std::string("pde"));
            d.name = t.value("name", kind + "-" + std::to_string(d.task_id));
            if (kind == "pde")
            {
                d.kind = TaskDescriptor::Kind::pde;
                d.problem = problem_from_json(t.contains("problem") ? t.at("problem") : t);
                if (!t.contains("name"))
                    d.name = d.problem.name;
            }
            else if (kind == "serial" || kind == "divisible")
            {
                d.kind = kind == "serial" ? TaskDescriptor::Kind::serial : TaskDescriptor::Kind::divisible;
                d.work = t.at("work").get<std::uint64_t>();
            }
            else
            {
                throw ConfigError("unknown task kind '" + kind + "'");
            }
            c.tasks.push_back(std::move(d));
        }
        if (c.tasks.empty())
            throw ConfigError("calibration config lists no tasks");
        c.process_counts = j.value("process_counts", std::vector<int>{1});
        c.repetitions = j.value("repetitions", 1);
        c.max_procs = j.value("max_procs", 0);
        if (j.contains("abc"))
            c.abc = abc_from_json(j.at("abc"));
        return c;
    });
}

TimingModel run_calibration(const CalibrationConfig& config)
{
    std::vector<CalibrationTask> tasks;
    for (const auto& t : config.tasks)
        tasks.push_back(make_calibration_task(t, config.abc));
    return calibrate(tasks, config.process_counts, config.repetitions, config.max_procs);
}

AbcParams default_abc_start()
{
    AbcParams p;
    p.a = {1.0, 1.0, 1.0, 1.0};
    p.d = {10.0, 100.0, 1000.0};
    return p;
}

void ExperimentConfig::validate() const
{
    if (procs < 1)
        throw ConfigError("procs must be >= 1");
    if (!(scale > 0.0 && scale <= 1.0))
        throw ConfigError("scale must lie in (0, 1]");
    if (!(e_min >= 0.0 && e_min <= 1.0))
        throw ConfigError("e_min must lie in [0, 1]");
    if (benchmark < 0 || benchmark > 3)
        throw ConfigError("benchmark must be 0 (custom) or 1..3");
    if (variants.empty())
        throw ConfigError("at least one variant degree is required");
    for (int k : variants)
    {
        if (k < 1)
            throw ConfigError("variant degrees must be >= 1");
    }
    if (!gammas.empty() && gammas.size() != variants.size())
        throw ConfigError("gammas must be empty or match variants");
    if (calibration_repetitions < 1)
        throw ConfigError("calibration repetitions must be >= 1");
    if (mode == RunMode::real && procs < static_cast<int>(task_problems().size()))
        throw ConfigError("real mode needs procs >= number of tasks");
}

std::vector<PdeProblem> ExperimentConfig::task_problems() const
{
    if (benchmark > 0)
        return timing_benchmark(benchmark, scale);
    if (problems.empty())
        return benchmark_problems(scale);
    std::vector<PdeProblem> out;
    for (const auto& p : problems)
        out.push_back(scaled(p, scale));
    return out;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j)
{
    return config_guard("experiment config", [&] {
        ExperimentConfig c;
        const std::string mode = j.value("mode", std::string("simulated"));
        if (mode == "simulated")
            c.mode = RunMode::simulated;
        else if (mode == "real")
            c.mode = RunMode::real;
        else
            throw ConfigError("mode must be 'simulated' or 'real'");
        c.benchmark = j.value("benchmark", c.benchmark);
        if (j.contains("problems"))
        {
            for (const auto& p : j.at("problems"))
                c.problems.push_back(problem_from_json(p));
        }
        c.scale = j.value("scale", c.scale);
        c.procs = j.value("procs", c.procs);
        c.e_min = j.value("e_min", c.e_min);
        c.variants = j.value("variants", c.variants);
        c.gammas = j.value("gammas", c.gammas);
        c.continue_past_cap = j.value("continue_past_cap", c.continue_past_cap);
        c.model_path = j.value("model", c.model_path);
        if (j.contains("calibration"))
        {
            const Json& cal = j.at("calibration");
            c.calibration_counts = cal.value("process_counts", c.calibration_counts);
            c.calibration_repetitions = cal.value("repetitions", c.calibration_repetitions);
        }
        c.measure_baseline = j.value("measure_baseline", c.measure_baseline);
        if (j.contains("nm"))
        {
            const Json& nm = j.at("nm");
            c.nm_iterations = nm.value("iterations", c.nm_iterations);
            c.nm_tolerance = nm.value("tolerance", c.nm_tolerance);
            if (nm.contains("variant"))
                c.nm_variant = parse_variant(nm.at("variant").get<std::string>());
            if (nm.contains("start"))
                c.abc_start = abc_from_json(nm.at("start"));
        }
        c.seed = j.value("seed", c.seed);
        c.report_path = j.value("report", c.report_path);
        c.gantt_path = j.value("gantt", c.gantt_path);
        c.validate();
        return c;
    });
}

Json ExperimentConfig::to_json() const
{
    Json j;
    j["mode"] = mode == RunMode::real ? "real" : "simulated";
    j["benchmark"] = benchmark;
    j["problems"] = Json::array();
    for (const auto& p : problems)
        j["problems"].push_back(problem_to_json(p));
    j["scale"] = scale;
    j["procs"] = procs;
    j["e_min"] = e_min;
    j["variants"] = variants;
    j["gammas"] = gammas;
    j["continue_past_cap"] = continue_past_cap;
    j["model"] = model_path;
    j["calibration"] = {{"process_counts", calibration_counts}, {"repetitions", calibration_repetitions}};
    j["measure_baseline"] = measure_baseline;
    j["nm"] = {{"iterations", nm_iterations}, {"tolerance", nm_tolerance}, {"start", abc_start.to_vector()}};
    if (nm_variant)
        j["nm"]["variant"] = to_string(*nm_variant);
    j["seed"] = seed;
    j["report"] = report_path;
    j["gantt"] = gantt_path;
    return j;
}

Json RunReport::to_json() const
{
    Json j;
    j["mode"] = mode;
    j["procs"] = procs;
    j["e_min"] = e_min;
    j["seed"] = seed;
    j["selected"] = selected;
    j["variants"] = Json::array();
    for (const auto& v : variants)
    {
        j["variants"].push_back({{"id", v.id},
                                 {"degree", v.degree},
                                 {"gamma", v.gamma},
                                 {"feasible", v.feasible},
                                 {"procs_per_copy", v.procs_per_copy},
                                 {"tasks", v.tasks},
                                 {"procs", v.procs},
                                 {"task_seconds", v.task_seconds},
                                 {"used_total", v.used_total},
                                 {"makespan", v.makespan},
                                 {"useful_point_time", v.useful_point_time}});
    }
    j["model_sequential"] = model_sequential;
    j["model_time"] = model_time;
    j["active_procs"] = active_procs;
    j["model_speedup"] = model_speedup;
    j["model_efficiency"] = model_efficiency;
    j["measured_time"] = measured_time;
    j["measured_sequential"] = measured_sequential;
    j["measured_speedup"] = measured_speedup;
    j["peak_workers"] = peak_workers;
    if (optimization)
    {
        const auto& o = *optimization;
        j["optimization"] = {{"variant", o.variant},
                             {"iterations", o.iterations},
                             {"best_point", o.best_point},
                             {"initial_value", o.initial_value},
                             {"best_value", o.best_value},
                             {"best_history", o.best_history},
                             {"useful_evals", o.useful_evals},
                             {"parallel_steps", o.parallel_steps},
                             {"gamma", o.gamma}};
    }
    else
    {
        j["optimization"] = nullptr;
    }
    return j;
}

RunReport RunReport::from_json(const Json& j)
{
    return config_guard("run report", [&] {
        RunReport r;
        r.mode = j.at("mode").get<std::string>();
        r.procs = j.at("procs").get<int>();
        r.e_min = j.at("e_min").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.selected = j.at("selected").get<std::size_t>();
        for (const auto& v : j.at("variants"))
        {
            VariantReport vr;
            vr.id = v.at("id").get<int>();
            vr.degree = v.at("degree").get<int>();
            vr.gamma = v.at("gamma").get<double>();
            vr.feasible = v.at("feasible").get<bool>();
            vr.procs_per_copy = v.at("procs_per_copy").get<int>();
            vr.tasks = v.at("tasks").get<std::vector<int>>();
            vr.procs = v.at("procs").get<std::vector<int>>();
            vr.task_seconds = v.at("task_seconds").get<std::vector<double>>();
            vr.used_total = v.at("used_total").get<int>();
            vr.makespan = v.at("makespan").get<double>();
            vr.useful_point_time = v.at("useful_point_time").get<double>();
            r.variants.push_back(std::move(vr));
        }
        r.model_sequential = j.at("model_sequential").get<double>();
        r.model_time = j.at("model_time").get<double>();
        r.active_procs = j.at("active_procs").get<int>();
        r.model_speedup = j.at("model_speedup").get<double>();
        r.model_efficiency = j.at("model_efficiency").get<double>();
        r.measured_time = j.at("measured_time").get<double>();
        r.measured_sequential = j.at("measured_sequential").get<double>();
        r.measured_speedup = j.at("measured_speedup").get<double>();
        r.peak_workers = j.at("peak_workers").get<std::size_t>();
        if (!j.at("optimization").is_null())
        {
            const Json& o = j.at("optimization");
            OptimizationReport op;
            op.variant = o.at("variant").get<std::string>();
            op.iterations = o.at("iterations").get<std::size_t>();
            op.best_point = o.at("best_point").get<std::vector<double>>();
            op.initial_value = o.at("initial_value").get<double>();
            op.best_value = o.at("best_value").get<double>();
            op.best_history = o.at("best_history").get<std::vector<double>>();
            op.useful_evals = o.at("useful_evals").get<std::size_t>();
            op.parallel_steps = o.at("parallel_steps").get<std::size_t>();
            op.gamma = o.at("gamma").get<double>();
            r.optimization = std::move(op);
        }
        if (r.selected >= r.variants.size())
            throw ConfigError("run report selects a variant that does not exist");
        return r;
    });
}

RunReport plan_experiment(const ExperimentConfig& config, const TimingModel& model)
{
    config.validate();
    std::vector<VariantProfile> profiles;
    if (config.gammas.empty())
    {
        profiles = default_variant_profiles(config.variants);
    }
    else
    {
        for (std::size_t i = 0; i < config.variants.size(); ++i)
            profiles.push_back({config.variants[i], config.variants[i], config.gammas[i]});
    }
    const TaskSet tasks = TaskSet::all_of(model);
    const AlgorithmSelection sel =
        select_algorithm(profiles, model, tasks, config.procs, config.e_min, {config.continue_past_cap});

    RunReport r;
    r.mode = config.mode == RunMode::real ? "real" : "simulated";
    r.procs = config.procs;
    r.e_min = config.e_min;
    r.seed = config.seed;
    r.selected = sel.selected;
    for (const auto& plan : sel.plans)
    {
        VariantReport v;
        v.id = plan.variant.id;
        v.degree = plan.variant.degree;
        v.gamma = plan.variant.gamma;
        v.feasible = plan.feasible;
        v.procs_per_copy = plan.procs_per_copy;
        if (plan.feasible)
        {
            v.tasks = plan.per_copy.tasks;
            v.procs = plan.per_copy.procs;
            for (std::size_t i = 0; i < v.tasks.size(); ++i)
                v.task_seconds.push_back(model.predict_time(v.tasks[i], v.procs[i]));
            v.used_total = plan.used_total;
            v.makespan = plan.makespan;
            v.useful_point_time = plan.useful_point_time;
        }
        r.variants.push_back(std::move(v));
    }
    for (int id : tasks.tasks)
        r.model_sequential += model.predict_time(id, 1);
    const VariantReport& chosen = r.chosen();
    r.model_time = chosen.useful_point_time;
    r.active_procs = chosen.used_total;
    r.model_speedup = r.model_sequential / r.model_time;
    r.model_efficiency = r.model_speedup / r.active_procs;
    return r;
}

AbcOptimization optimize_abc(const std::vector<PdeProblem>& problems, const std::vector<int>& procs,
                             Variant variant, const AbcParams& start, const OptimizeOptions& options,
                             WorkerPool* pool)
{
    if (problems.empty() || problems.size() != procs.size())
        throw ParameterError("optimize_abc needs one process count per problem");
    std::vector<std::size_t> blocks(procs.begin(), procs.end());

    BatchObjective batch;
    if (pool == nullptr)
    {
        batch = sequential_batch([&](std::span<const double> x) {
            return objective(AbcParams::from_vector(x), problems, blocks);
        });
    }
    else
    {
        std::size_t per_point = 0;
        for (std::size_t b : blocks)
            per_point += b;
        const std::size_t at_once = pool->size() / per_point;
        if (at_once == 0)
            throw ParameterError("one objective evaluation needs " + std::to_string(per_point)
                                 + " workers but the pool has " + std::to_string(pool->size()));
        batch = [&problems, &blocks, pool, at_once](const std::vector<Point>& points) {
            const std::size_t m = problems.size();
            std::vector<double> errors(points.size() * m, 0.0);
            // Points beyond the pool capacity (initial simplex) run in waves.
            for (std::size_t first = 0; first < points.size(); first += at_once)
            {
                const std::size_t count = std::min(at_once, points.size() - first);
                std::vector<WorkerGroup> groups;
                for (std::size_t i = 0; i < count * m; ++i)
                    groups.push_back(pool->lease(blocks[i % m]));
                run_concurrently(count * m, [&](std::size_t i) {
                    const AbcParams abc = AbcParams::from_vector(points[first + i / m]);
                    try
                    {
                        errors[first * m + i] = integrate_on(groups[i], problems[i % m], abc).max_error;
                    }
                    catch (const SingularMatrixError&)
                    {
                        errors[first * m + i] = std::numeric_limits<double>::infinity();
                    }
                });
            }
            std::vector<double> values(points.size(), 0.0);
            for (std::size_t p = 0; p < points.size(); ++p)
            {
                for (std::size_t t = 0; t < m; ++t)
                {
                    const double e = errors[p * m + t];
                    values[p] = std::isfinite(e) ? std::max(values[p], e) : std::numeric_limits<double>::infinity();
                    if (!std::isfinite(e))
                        break;
                }
            }
            return values;
        };
    }

    AbcOptimization out;
    out.result = minimize(batch, start.to_vector(), variant, options);
    out.best = AbcParams::from_vector(out.result.best_point);
    out.initial_value = batch({start.to_vector()}).front();
    return out;
}

AbcOptimization optimize_abc(const ExperimentConfig& config, const RunReport& plan, bool parallel)
{
    const std::vector<PdeProblem> problems = config.task_problems();
    const VariantReport& chosen = plan.chosen();
    if (chosen.procs.size() != problems.size())
        throw ParameterError("assignment does not match the problem list");
    OptimizeOptions options;
    options.max_iterations = config.nm_iterations;
    options.tolerance = config.nm_tolerance;
    options.keep_trace = false;
    if (!parallel)
        return optimize_abc(problems, chosen.procs, Variant::a1, config.abc_start, options);
    const Variant v = config.nm_variant.value_or(variant_for_degree(chosen.degree));
    WorkerPool pool(static_cast<std::size_t>(config.procs));
    return optimize_abc(problems, chosen.procs, v, config.abc_start, options, &pool);
}

RunReport run_experiment(const ExperimentConfig& config)
{
    config.validate();
    RunReport report;
    if (config.mode == RunMode::simulated)
    {
        if (config.model_path.empty())
            throw ConfigError("simulated mode needs a timing model file");
        report = plan_experiment(config, load_timing_model(config.model_path, config.procs));
    }
    else
    {
        const std::vector<PdeProblem> problems = config.task_problems();
        std::optional<TimingModel> model;
        if (!config.model_path.empty())
        {
            model = load_timing_model(config.model_path, config.procs);
        }
        else
        {
            CalibrationConfig cal;
            cal.abc = config.abc_start;
            cal.repetitions = config.calibration_repetitions;
            cal.max_procs = config.procs;
            std::size_t limit = static_cast<std::size_t>(config.procs);
            for (const auto& p : problems)
                limit = std::min(limit, (p.intervals + 1) / 2);
            cal.process_counts = config.calibration_counts;
            if (cal.process_counts.empty())
            {
                for (std::size_t p = 1; p <= limit; p *= 2)
                    cal.process_counts.push_back(static_cast<int>(p));
            }
            for (std::size_t m = 0; m < problems.size(); ++m)
                cal.tasks.push_back({static_cast<int>(m) + 1, problems[m].name, TaskDescriptor::Kind::pde,
                                     problems[m], 0});
            model = run_calibration(cal);
        }
        if (model->task_count() != problems.size())
            throw ConfigError("timing model has " + std::to_string(model->task_count()) + " tasks but the benchmark has "
                              + std::to_string(problems.size()));
        report = plan_experiment(config, *model);

        // One block of the selected variant: every copy runs every task
        // concurrently on its own group.
        const VariantReport& chosen = report.chosen();
        WorkerPool pool(static_cast<std::size_t>(config.procs));
        const std::size_t m = chosen.tasks.size();
        const std::size_t copies = static_cast<std::size_t>(chosen.degree);
        std::vector<WorkerGroup> groups;
        for (std::size_t i = 0; i < copies * m; ++i)
            groups.push_back(pool.lease(static_cast<std::size_t>(chosen.procs[i % m])));
        const auto start = Clock::now();
        run_concurrently(copies * m, [&](std::size_t i) {
            integrate_on(groups[i], problems[static_cast<std::size_t>(chosen.tasks[i % m] - 1)], config.abc_start);
        });
        const double block = seconds_since(start);
        groups.clear();
        report.measured_time = block / (chosen.gamma * chosen.degree);
        report.peak_workers = pool.peak_active();

        if (config.measure_baseline)
        {
            const auto t0 = Clock::now();
            for (const auto& p : problems)
                integrate(p, config.abc_start, 1);
            report.measured_sequential = seconds_since(t0);
            report.measured_speedup = report.measured_sequential / report.measured_time;
        }

        if (config.nm_iterations > 0)
        {
            const AbcOptimization opt = optimize_abc(config, report, true);
            OptimizationReport o;
            o.variant = to_string(config.nm_variant.value_or(variant_for_degree(chosen.degree)));
            o.iterations = opt.result.iterations;
            o.best_point = opt.result.best_point;
            o.initial_value = opt.initial_value;
            o.best_value = opt.result.best_value;
            o.best_history = opt.result.best_history;
            o.useful_evals = opt.result.stats.useful_evals;
            o.parallel_steps = opt.result.stats.parallel_steps;
            o.gamma = opt.result.stats.parallel_steps > 0 ? gamma_measure(opt.result.stats) : 1.0;
            report.optimization = std::move(o);
        }
    }

    if (!config.report_path.empty())
    {
        std::ofstream out(config.report_path);
        if (!out)
            throw IoError("cannot write report '" + config.report_path + "'");
        out << report.to_json().dump(2) << '\n';
    }
    if (!config.gantt_path.empty())
        emit_gantt(report, config.gantt_path);
    return report;
}

void write_gantt(std::ostream& out, const RunReport& report)
{
    if (report.variants.empty() || report.chosen().tasks.empty())
        throw ParameterError("report holds no assignment to chart");
    const VariantReport& v = report.chosen();
    out << "task_id,procs,predicted_seconds\n";
    for (std::size_t i = 0; i < v.tasks.size(); ++i)
        out << v.tasks[i] << ',' << v.procs[i] << ',' << shortest(v.task_seconds[i]) << '\n';
}

void emit_gantt(const RunReport& report, const std::string& path)
{
    if (report.variants.empty() || report.chosen().tasks.empty())
        throw ParameterError("report holds no assignment to chart");
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write Gantt file '" + path + "'");
    write_gantt(out, report);
    if (!out)
        throw IoError("write to Gantt file '" + path + "' failed");
}

}  // namespace tlp
