// Command-line front end: calibrate, schedule, simulate, run, nm-bench, gantt.

#include "tlp/error.hpp"
#include "tlp/harness.hpp"
#include "tlp/nelder_mead.hpp"
#include "tlp/scheduler.hpp"
#include "tlp/timing_model.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using tlp::Json;

Json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw tlp::IoError("cannot open '" + path + "'");
    try
    {
        return Json::parse(in);
    }
    catch (const Json::exception& e)
    {
        throw tlp::ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
    {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw tlp::IoError("cannot write '" + path + "'");
    out << text;
}

int fail(const std::string& kind, const std::string& message, int code)
{
    std::cerr << Json{{"error", kind}, {"message", message}}.dump() << '\n';
    return code;
}

struct Common
{
    std::string config;
    std::string model;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "JSON configuration file");
    cmd->add_option("--model", c.model, "timing model CSV (task_id,p,seconds)");
    cmd->add_option("--out", c.out, "output path ('-' or empty for stdout)");
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&c](std::uint64_t s) {
            c.seed = s;
            c.seed_given = true;
        },
        "random seed");
}

tlp::ExperimentConfig load_experiment(const Common& c, tlp::RunMode mode)
{
    Json j = c.config.empty() ? Json::object() : read_json(c.config);
    j["mode"] = mode == tlp::RunMode::real ? "real" : "simulated";
    if (!c.model.empty())
        j["model"] = c.model;
    if (c.seed_given)
        j["seed"] = c.seed;
    tlp::ExperimentConfig cfg = tlp::ExperimentConfig::from_json(j);
    cfg.report_path.clear();
    return cfg;
}

void cmd_calibrate(const Common& c)
{
    if (c.config.empty())
        throw tlp::ConfigError("calibrate needs --config");
    const tlp::TimingModel model = tlp::run_calibration(tlp::calibration_config_from_json(read_json(c.config)));
    std::ostringstream csv;
    tlp::write_timing_model_csv(csv, model);
    write_text(c.out, csv.str());
}

struct ScheduleArgs
{
    int procs = 0;
    double e_min = 0.0;
    std::vector<int> variants{1};
    std::vector<double> gammas;
    bool continue_past_cap = false;
};

void cmd_schedule(const Common& c, const ScheduleArgs& a)
{
    if (c.model.empty())
        throw tlp::ConfigError("schedule needs --model");
    tlp::ExperimentConfig cfg;
    cfg.mode = tlp::RunMode::simulated;
    cfg.model_path = c.model;
    cfg.procs = a.procs;
    cfg.e_min = a.e_min;
    cfg.variants = a.variants;
    cfg.gammas = a.gammas;
    cfg.continue_past_cap = a.continue_past_cap;
    cfg.seed = c.seed;
    const tlp::RunReport report = tlp::run_experiment(cfg);
    write_text(c.out, report.to_json().dump(2) + "\n");
}

void cmd_experiment(const Common& c, tlp::RunMode mode)
{
    const tlp::RunReport report = tlp::run_experiment(load_experiment(c, mode));
    write_text(c.out, report.to_json().dump(2) + "\n");
}

struct BenchArgs
{
    std::string objective = "rosenbrock";
    std::size_t dim = 3;
    std::string variant = "a2";
    std::size_t iters = 1000;
    double tolerance = 1e-8;
};

void cmd_nm_bench(const Common& c, const BenchArgs& a)
{
    if (a.objective != "rosenbrock")
        throw tlp::ParameterError("unknown objective '" + a.objective + "'");
    const tlp::Point x0 = tlp::rosenbrock_start(a.dim, c.seed);
    std::ostringstream csv;
    csv << "objective,dim,variant,seed,iterations,best_value,gamma,useful_evals,parallel_steps\n";
    csv.precision(17);
    if (a.variant.rfind("gen-", 0) == 0)
    {
        std::size_t k = 0;
        try
        {
            k = std::stoul(a.variant.substr(4));
        }
        catch (const std::exception&)
        {
            throw tlp::ParameterError("variant '" + a.variant + "' must look like gen-<k>");
        }
        const tlp::GeneralizedGamma g = tlp::generalized_gamma(tlp::rosenbrock, x0, k, a.iters);
        csv << a.objective << ',' << a.dim << ',' << a.variant << ',' << c.seed << ',' << a.iters << ','
            << g.reached_value << ',' << g.gamma << ',' << g.sequential_evals << ',' << g.parallel_steps << '\n';
    }
    else
    {
        tlp::OptimizeOptions opt;
        opt.max_iterations = a.iters;
        opt.tolerance = a.tolerance;
        opt.keep_trace = false;
        const tlp::OptimizeResult r =
            tlp::minimize(tlp::Objective(tlp::rosenbrock), x0, tlp::parse_variant(a.variant), opt);
        csv << a.objective << ',' << a.dim << ',' << a.variant << ',' << c.seed << ',' << r.iterations << ','
            << r.best_value << ',' << tlp::gamma_measure(r.stats) << ',' << r.stats.useful_evals << ','
            << r.stats.parallel_steps << '\n';
    }
    write_text(c.out, csv.str());
}

void cmd_gantt(const Common& c, const std::string& report_path)
{
    tlp::RunReport report;
    if (!report_path.empty())
        report = tlp::RunReport::from_json(read_json(report_path));
    else
        report = tlp::run_experiment(load_experiment(c, tlp::RunMode::simulated));
    std::ostringstream csv;
    tlp::write_gantt(csv, report);
    write_text(c.out, csv.str());
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Three-level load balancing toolkit"};
    app.require_subcommand(1);

    Common common;
    auto* calibrate = app.add_subcommand("calibrate", "measure a timing model");
    add_common(calibrate, common);

    ScheduleArgs sched;
    auto* schedule = app.add_subcommand("schedule", "distribute processes among tasks");
    add_common(schedule, common);
    schedule->add_option("--procs", sched.procs, "total processes")->required();
    schedule->add_option("--emin", sched.e_min, "efficiency floor in [0, 1]");
    schedule->add_option("--variants", sched.variants, "first-level degrees, e.g. 1,2,3")->delimiter(',');
    schedule->add_option("--gammas", sched.gammas, "efficiency per degree")->delimiter(',');
    schedule->add_flag("--continue-past-cap", sched.continue_past_cap, "skip capped tasks instead of stopping");

    auto* simulate = app.add_subcommand("simulate", "plan an experiment from a timing model");
    add_common(simulate, common);

    auto* run = app.add_subcommand("run", "execute an experiment on the worker pool");
    add_common(run, common);

    BenchArgs bench;
    auto* nm = app.add_subcommand("nm-bench", "measure Nelder-Mead efficiency on a test function");
    add_common(nm, common);
    nm->add_option("--objective", bench.objective, "objective function");
    nm->add_option("--dim", bench.dim, "dimension")->check(CLI::Range(2, 1000));
    nm->add_option("--variant", bench.variant, "a1, a2, a3 or gen-<k>");
    nm->add_option("--iters", bench.iters, "iterations");
    nm->add_option("--tol", bench.tolerance, "simplex diameter tolerance");

    std::string report_path;
    auto* gantt = app.add_subcommand("gantt", "write the selected assignment as CSV");
    add_common(gantt, common);
    gantt->add_option("--report", report_path, "existing report JSON");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        return fail("usage", e.what(), 1);
    }

    try
    {
        if (*calibrate)
            cmd_calibrate(common);
        else if (*schedule)
            cmd_schedule(common, sched);
        else if (*simulate)
            cmd_experiment(common, tlp::RunMode::simulated);
        else if (*run)
            cmd_experiment(common, tlp::RunMode::real);
        else if (*nm)
            cmd_nm_bench(common, bench);
        else if (*gantt)
            cmd_gantt(common, report_path);
    }
    catch (const tlp::Error& e)
    {
        return fail(e.kind(), e.what(), 2);
    }
    catch (const std::exception& e)
    {
        return fail("internal", e.what(), 3);
    }
    return 0;
}
