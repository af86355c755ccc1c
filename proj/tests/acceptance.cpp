// Acceptance checks; prints one PASS/FAIL line per criterion and exits
// non-zero when any of them fails.

#include "tlp/harness.hpp"
#include "tlp/nelder_mead.hpp"
#include "tlp/scheduler.hpp"
#include "tlp/schrodinger.hpp"
#include "tlp/timing_model.hpp"
#include "tlp/tridiag.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace tlp;

namespace {

struct Outcome
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

int failures = 0;

template <typename F>
void criterion(int id, const char* title, F&& body)
{
    const auto start = Clock::now();
    Outcome out;
    try
    {
        body(out);
    }
    catch (const std::exception& e)
    {
        out.pass = false;
        out.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (!out.pass)
        ++failures;
    std::printf("%s %d %s:%s (%.1f s)\n", out.pass ? "PASS" : "FAIL", id, title, out.detail.str().c_str(), secs);
    std::fflush(stdout);
}

TridiagSystem random_dominant(std::size_t n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TridiagSystem s(n);
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        s.lower[i] = {u(rng), u(rng)};
        s.upper[i] = {u(rng), u(rng)};
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        const double off = (i > 0 ? std::abs(s.lower[i - 1]) : 0.0) + (i + 1 < n ? std::abs(s.upper[i]) : 0.0);
        const double phase = u(rng) * 3.14159265358979;
        s.diag[i] = std::polar(off + 0.5 + std::abs(u(rng)), phase);
        s.rhs[i] = {u(rng), u(rng)};
    }
    return s;
}

void solver_equivalence(Outcome& out)
{
    std::mt19937_64 rng(20240501);
    const std::pair<std::size_t, int> sizes[] = {{100, 500}, {1000, 400}, {16000, 150}};
    double worst = 0.0;
    int systems = 0;
    for (const auto& [n, count] : sizes)
    {
        for (int c = 0; c < count; ++c)
        {
            const TridiagSystem s = random_dominant(n, rng);
            // The partition needs at least two unknowns per block.
            const std::size_t p = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(64, n / 2))(rng);
            const auto thomas = solve_thomas(s);
            const auto wang = solve_wang(s, p);
            double diff = 0.0;
            double scale = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                diff = std::max(diff, std::abs(wang[i] - thomas[i]));
                scale = std::max(scale, std::abs(thomas[i]));
            }
            worst = std::max(worst, diff / scale);
            ++systems;
        }
    }
    out.detail << " systems=" << systems << " max_rel_diff=" << worst;
    out.require(systems >= 1000, "at least 1000 systems");
    out.require(worst <= 1e-10, "relative difference <= 1e-10");
}

void convergence_order(Outcome& out)
{
    IntegrateOptions opt;
    opt.boundary = BoundaryMode::exact_dirichlet;
    double err[3];
    const std::size_t grid[3] = {200, 400, 800};
    for (int i = 0; i < 3; ++i)
    {
        const PdeProblem p{"exmpl1", SolutionKind::gaussian, -5.0, 5.0, 0.8, grid[i], grid[i]};
        err[i] = integrate(p, {}, 1, nullptr, opt).max_error;
    }
    const double r1 = err[0] / err[1];
    const double r2 = err[1] / err[2];
    out.detail << " errors=" << err[0] << "," << err[1] << "," << err[2] << " ratios=" << r1 << "," << r2;
    out.require(r1 >= 3.4 && r1 <= 4.6, "200->400 ratio in [3.4, 4.6]");
    out.require(r2 >= 3.4 && r2 <= 4.6, "400->800 ratio in [3.4, 4.6]");
}

void trace_equivalence(Outcome& out)
{
    for (std::size_t d : {3, 6, 7})
    {
        OptimizeOptions opt;
        opt.max_iterations = 1000;
        const Point x0 = rosenbrock_start(d, 0);
        const OptimizeResult a1 = minimize(Objective(rosenbrock), x0, Variant::a1, opt);
        const OptimizeResult a2 = minimize(Objective(rosenbrock), x0, Variant::a2, opt);
        const OptimizeResult a3 = minimize(Objective(rosenbrock), x0, Variant::a3, opt);
        const bool same = a1.trace.size() == 1000 && a1.trace == a2.trace && a1.trace == a3.trace;
        out.detail << " d=" << d << (same ? ":identical" : ":differs");
        out.require(same, "identical traces for d=" + std::to_string(d));
    }
}

// Two-dimensional simplex whose next step is an expansion or a contraction,
// decided by a lookup objective on the exact candidate points.
StepStats scripted_step(bool expansion, Variant v)
{
    SimplexState s;
    s.vertices = {{{0.0, 0.0}, 0.0}, {{1.0, 0.0}, 1.0}, {{0.0, 1.0}, 2.0}};
    const std::map<Point, double> values =
        expansion ? std::map<Point, double>{{{1.0, -1.0}, -1.0}, {{1.5, -2.0}, -2.0}}
                  : std::map<Point, double>{{{1.0, -1.0}, 5.0}, {{0.25, 0.5}, 0.5}};
    const Objective f = [&](std::span<const double> x) {
        const auto it = values.find(Point(x.begin(), x.end()));
        return it == values.end() ? 1e300 : it->second;
    };
    return nm_step(s, sequential_batch(f), v);
}

void gamma_accounting(Outcome& out)
{
    // Expansion with probability 2/3, contraction with 1/3.
    for (Variant v : {Variant::a2, Variant::a3})
    {
        EvalStats stats;
        stats.slots_per_step = static_cast<std::size_t>(degree(v));
        for (int i = 0; i < 300; ++i)
        {
            const StepStats st = scripted_step(i % 3 != 2, v);
            stats.add(st);
        }
        const double g = gamma_measure(stats);
        const double expect = v == Variant::a2 ? 0.75 : 2.0 / 3.0;
        out.detail << " synthetic_" << to_string(v) << "=" << g;
        out.require(stats.expansions == 200 && stats.contractions == 100, "scripted step kinds");
        out.require(std::abs(g - expect) <= 1e-15, "synthetic gamma for " + to_string(v));
    }

    const double reference[2][3] = {{0.603, 0.604, 0.606}, {0.584, 0.517, 0.502}};
    const std::size_t dims[3] = {3, 6, 7};
    for (int k = 0; k < 2; ++k)
    {
        for (int c = 0; c < 3; ++c)
        {
            OptimizeOptions opt;
            opt.max_iterations = 1000;
            opt.tolerance = 1e-8;
            opt.keep_trace = false;
            const OptimizeResult r =
                minimize(Objective(rosenbrock), rosenbrock_start(dims[c], 0), k == 0 ? Variant::a2 : Variant::a3, opt);
            const double g = gamma_measure(r.stats);
            out.detail << " g" << k + 2 << "(d=" << dims[c] << ")=" << g;
            out.require(std::abs(g - reference[k][c]) <= 0.1,
                        "gamma_" + std::to_string(k + 2) + " d=" + std::to_string(dims[c]) + " within 0.1");
        }
    }
}

void generalized_degradation(Outcome& out)
{
    const Point x0 = rosenbrock_start(7, 0);
    double g[7] = {};
    for (std::size_t k = 1; k <= 6; ++k)
    {
        g[k] = generalized_gamma(rosenbrock, x0, k, 1000).gamma;
        out.detail << " k" << k << "=" << g[k];
    }
    for (std::size_t k = 2; k < 5; ++k)
        out.require(g[k + 1] <= g[k] + 0.05, "monotone at k=" + std::to_string(k + 1));
    out.require(g[4] < 0.3, "gamma_4 < 0.3");
    out.require(g[5] < 0.1, "gamma_5 < 0.1");
}

TimingModel random_model(std::mt19937_64& rng, int tasks, int max_p)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<TimingCurve> curves;
    for (int m = 1; m <= tasks; ++m)
    {
        const double work = 1.0 + 20.0 * u(rng);
        const double serial = 0.3 * u(rng);
        const double comm = 0.1 * u(rng);
        std::vector<TimingSample> s;
        for (int p = 1; p <= max_p; ++p)
        {
            const double noise = 1.0 + 0.2 * (u(rng) - 0.5);
            s.push_back({p, work * (serial + (1.0 - serial) / p) * noise + comm * p});
        }
        curves.emplace_back(m, std::move(s));
    }
    return TimingModel(std::move(curves), max_p);
}

void scheduler_correctness(Outcome& out)
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> pick_m(1, 4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int instances = 0;
    int violations = 0;
    int worse = 0;
    for (; instances < 10000; ++instances)
    {
        const int m = pick_m(rng);
        const int procs = std::uniform_int_distribution<int>(m, 12)(rng);
        const TimingModel model = random_model(rng, m, procs);
        const double e_min = u(rng) < 0.3 ? 0.0 : u(rng);
        const TaskSet tasks = TaskSet::all_of(model);
        const Assignment a = distribute(model, tasks, procs, e_min);
        int used = 0;
        for (std::size_t i = 0; i < a.tasks.size(); ++i)
        {
            const TimingCurve& c = model.curve(a.tasks[i]);
            const int p = a.procs[i];
            used += p;
            double tmin = c.predict(1);
            int sat = 1;
            for (int q = 2; q <= procs; ++q)
            {
                if (c.predict(q) < tmin)
                {
                    tmin = c.predict(q);
                    sat = q;
                }
            }
            bool floor_ok = true;
            for (int q = 2; q <= p; ++q)
                floor_ok = floor_ok && c.predict(1) / (q * c.predict(q)) >= e_min;
            if (p < 1 || p > sat || !floor_ok)
                ++violations;
        }
        if (used != a.used || used > procs || a.tasks.size() != static_cast<std::size_t>(m))
            ++violations;
        const Assignment b = brute_force_distribute(model, tasks, procs, e_min);
        if (b.predicted_makespan > a.predicted_makespan + 1e-12)
            ++worse;
    }

    int ideal_mismatch = 0;
    for (int i = 0; i < 500; ++i)
    {
        const int m = pick_m(rng);
        const int procs = std::uniform_int_distribution<int>(m, 12)(rng);
        std::vector<TimingCurve> curves;
        for (int t = 1; t <= m; ++t)
        {
            const double c = 1.0 + 10.0 * u(rng);
            std::vector<TimingSample> s;
            for (int p = 1; p <= procs; ++p)
                s.push_back({p, c / p});
            curves.emplace_back(t, std::move(s));
        }
        const TimingModel model(std::move(curves), procs);
        const TaskSet tasks = TaskSet::all_of(model);
        if (distribute(model, tasks, procs, 0.0).predicted_makespan
            != brute_force_distribute(model, tasks, procs, 0.0).predicted_makespan)
            ++ideal_mismatch;
    }
    out.detail << " instances=" << instances << " violations=" << violations << " brute_worse=" << worse
               << " ideal_mismatch=" << ideal_mismatch;
    out.require(violations == 0, "greedy invariants");
    out.require(worse == 0, "brute force never worse than greedy");
    out.require(ideal_mismatch == 0, "equal on ideal curves");
}

TimingModel table2_model()
{
    // Hand-entered per-task times for benchmark 1.
    return load_timing_model(std::string(TLP_TEST_DATA) + "/table2_model.csv");
}

void table_arithmetic(Outcome& out)
{
    const TimingModel model = table2_model();
    ExperimentConfig c;
    c.procs = 16;
    const RunReport p16 = plan_experiment(c, model);
    out.detail << " T(16)=" << p16.model_time;
    out.require(std::abs(p16.model_time - 11.145) < 1e-9, "T_Mp = 11.145 at p=16");

    c.procs = 128;
    c.variants = {1, 2, 3};
    const RunReport k3 = plan_experiment(c, model);
    out.detail << " T(k=" << k3.chosen().degree << ",128)=" << k3.model_time;
    out.require(k3.chosen().degree == 3 && std::abs(k3.model_time - 2.272) < 1e-9, "2.272 at k=3, P=128");

    c.e_min = 0.75;
    const RunReport green = plan_experiment(c, model);
    out.detail << " active=" << green.active_procs << " efficiency=" << green.model_efficiency;
    out.require(green.active_procs == 117, "117 active processes");
    out.require(std::abs(green.model_efficiency - 0.48) <= 0.01, "efficiency ~ 0.48");
}

void end_to_end(Outcome& out)
{
    ExperimentConfig c;
    c.mode = RunMode::real;
    c.benchmark = 0;
    c.scale = 0.05;
    c.procs = 8;
    c.variants = {1, 2, 3};
    c.measure_baseline = false;
    c.nm_iterations = 200;
    const RunReport report = run_experiment(c);
    const OptimizationReport& par = report.optimization.value();
    const AbcOptimization seq = optimize_abc(c, report, false);
    out.detail << " variant=" << par.variant << " initial=" << par.initial_value << " best=" << par.best_value
               << " ratio=" << par.best_value / par.initial_value;
    out.require(seq.result.best_point == par.best_point, "identical sequential and parallel parameters");
    out.require(par.best_value <= 0.5 * par.initial_value, "objective halved");
}

}  // namespace

int main()
{
    criterion(1, "solver oracle equivalence", solver_equivalence);
    criterion(2, "Crank-Nicolson order", convergence_order);
    criterion(3, "NM family trace equivalence", trace_equivalence);
    criterion(4, "gamma accounting", gamma_accounting);
    criterion(5, "generalized variant degradation", generalized_degradation);
    criterion(6, "scheduler correctness", scheduler_correctness);
    criterion(7, "simulated table arithmetic", table_arithmetic);
    criterion(8, "end-to-end desk run", end_to_end);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
