#include "tlp/nelder_mead.hpp"

#include "tlp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace tlp {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

double sanitize(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

/// c + t * (c - x)
Point along(const Point& c, const Point& x, double t)
{
    Point out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i] = c[i] + t * (c[i] - x[i]);
    return out;
}

Point centroid(const std::vector<Vertex>& vertices, std::size_t count)
{
    Point c(vertices.front().x.size(), 0.0);
    for (std::size_t v = 0; v < count; ++v)
    {
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] += vertices[v].x[i];
    }
    for (double& ci : c)
        ci /= static_cast<double>(count);
    return c;
}

std::vector<double> evaluate(const BatchObjective& f, const std::vector<Point>& points)
{
    std::vector<double> values = f(points);
    if (values.size() != points.size())
        throw ParameterError("batch objective returned " + std::to_string(values.size()) + " values for "
                             + std::to_string(points.size()) + " points");
    for (double& v : values)
        v = sanitize(v);
    return values;
}

/// Shrinks every vertex but the best halfway towards it, evaluating the m new
/// points in rounds of at most `slots`.
void shrink(SimplexState& s, const BatchObjective& f, std::size_t slots, StepStats& stats)
{
    const std::size_t m = s.dimension();
    const Point& best = s.vertices.front().x;
    for (std::size_t first = 1; first <= m; first += slots)
    {
        const std::size_t last = std::min(m, first + slots - 1);
        std::vector<Point> batch;
        for (std::size_t v = first; v <= last; ++v)
            batch.push_back(along(best, s.vertices[v].x, -kShrink));
        const std::vector<double> values = evaluate(f, batch);
        for (std::size_t v = first; v <= last; ++v)
            s.vertices[v] = {std::move(batch[v - first]), values[v - first]};
        stats.evaluated += batch.size();
        ++stats.rounds;
    }
    stats.kind = StepKind::shrink;
    stats.useful += m;
}

void check_simplex(const SimplexState& s)
{
    if (s.dimension() < 2)
        throw ParameterError("simplex needs dimension >= 2");
}

}  // namespace

BatchObjective sequential_batch(Objective f)
{
    return [f = std::move(f)](const std::vector<Point>& points) {
        std::vector<double> out;
        out.reserve(points.size());
        for (const auto& p : points)
            out.push_back(f(p));
        return out;
    };
}

int degree(Variant v)
{
    switch (v)
    {
        case Variant::a1: return 1;
        case Variant::a2: return 2;
        case Variant::a3: return 3;
    }
    return 1;
}

std::string to_string(Variant v) { return "a" + std::to_string(degree(v)); }

Variant parse_variant(const std::string& text)
{
    if (text == "a1")
        return Variant::a1;
    if (text == "a2")
        return Variant::a2;
    if (text == "a3")
        return Variant::a3;
    throw ParameterError("unknown Nelder-Mead variant '" + text + "' (expected a1, a2 or a3)");
}

double SimplexState::diameter() const
{
    double worst = 0.0;
    for (std::size_t v = 1; v < vertices.size(); ++v)
    {
        double sq = 0.0;
        for (std::size_t i = 0; i < vertices[v].x.size(); ++i)
        {
            const double d = vertices[v].x[i] - vertices[0].x[i];
            sq += d * d;
        }
        worst = std::max(worst, std::sqrt(sq));
    }
    return worst;
}

void SimplexState::sort()
{
    std::stable_sort(vertices.begin(), vertices.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
}

SimplexState SimplexState::initial(const Point& x0, const BatchObjective& f)
{
    if (x0.size() < 2)
        throw ParameterError("Nelder-Mead needs dimension >= 2");
    for (double v : x0)
    {
        if (!std::isfinite(v))
            throw ParameterError("Nelder-Mead start point must be finite");
    }
    std::vector<Point> points{x0};
    for (std::size_t i = 0; i < x0.size(); ++i)
    {
        Point p = x0;
        p[i] += x0[i] != 0.0 ? 0.05 * std::abs(x0[i]) : 0.00025;
        points.push_back(std::move(p));
    }
    const std::vector<double> values = evaluate(f, points);
    SimplexState s;
    for (std::size_t v = 0; v < points.size(); ++v)
        s.vertices.push_back({std::move(points[v]), values[v]});
    s.sort();
    return s;
}

void EvalStats::add(const StepStats& step)
{
    useful_evals += step.useful;
    total_evals += step.evaluated;
    parallel_steps += step.rounds;
    switch (step.kind)
    {
        case StepKind::reflection: ++reflections; break;
        case StepKind::expansion: ++expansions; break;
        case StepKind::contraction: ++contractions; break;
        case StepKind::shrink: ++shrinks; break;
    }
}

double gamma_measure(const EvalStats& stats)
{
    if (stats.parallel_steps == 0 || stats.slots_per_step == 0)
        throw ParameterError("gamma needs at least one parallel step");
    return static_cast<double>(stats.useful_evals)
           / (static_cast<double>(stats.slots_per_step) * static_cast<double>(stats.parallel_steps));
}

StepStats nm_step(SimplexState& s, const BatchObjective& f, Variant variant)
{
    check_simplex(s);
    const std::size_t m = s.dimension();
    const Point c = centroid(s.vertices, m);
    const Vertex& worst = s.vertices[m];

    // Candidate points: 0 reflection, 1 expansion, 2 contraction.
    std::vector<Point> points{along(c, worst.x, kReflect), along(c, worst.x, kExpand),
                              along(c, worst.x, -kContract)};
    std::vector<std::optional<double>> values(3);
    StepStats stats;

    const auto fetch = [&](std::size_t id) {
        if (!values[id])
        {
            // First use of this point: one round with the speculative set.
            std::vector<std::size_t> ids;
            if (id == 0)
            {
                for (std::size_t j = 0; j < static_cast<std::size_t>(degree(variant)); ++j)
                    ids.push_back(j);
            }
            else
            {
                ids.push_back(id);
            }
            std::vector<Point> batch;
            for (std::size_t j : ids)
                batch.push_back(points[j]);
            const std::vector<double> out = evaluate(f, batch);
            for (std::size_t j = 0; j < ids.size(); ++j)
                values[ids[j]] = out[j];
            stats.evaluated += batch.size();
            ++stats.rounds;
        }
        ++stats.useful;
        return *values[id];
    };

    const double fr = fetch(0);
    if (fr < s.vertices[0].f)
    {
        const double fe = fetch(1);
        stats.kind = StepKind::expansion;
        if (fe < fr)
            s.vertices[m] = {points[1], fe};
        else
            s.vertices[m] = {points[0], fr};
    }
    else if (fr < s.vertices[m - 1].f)
    {
        stats.kind = StepKind::reflection;
        s.vertices[m] = {points[0], fr};
    }
    else
    {
        const double fc = fetch(2);
        if (fc < worst.f)
        {
            stats.kind = StepKind::contraction;
            s.vertices[m] = {points[2], fc};
        }
        else
        {
            shrink(s, f, static_cast<std::size_t>(degree(variant)), stats);
        }
    }
    s.sort();
    ++s.iteration;
    return stats;
}

StepStats nm_step_generalized(SimplexState& s, const BatchObjective& f, std::size_t k)
{
    check_simplex(s);
    const std::size_t m = s.dimension();
    if (k < 1 || k > m - 1)
        throw ParameterError("k-point Nelder-Mead needs 1 <= k <= " + std::to_string(m - 1) + ", got "
                             + std::to_string(k));
    const std::size_t keep = m + 1 - k;
    const Point c = centroid(s.vertices, keep);
    const double f_best = s.vertices[0].f;
    const double f_threshold = s.vertices[keep - 1].f;

    StepStats stats;
    std::vector<Point> reflected;
    for (std::size_t j = keep; j <= m; ++j)
        reflected.push_back(along(c, s.vertices[j].x, kReflect));
    const std::vector<double> fr = evaluate(f, reflected);
    stats.evaluated += k;
    ++stats.rounds;

    enum class Need
    {
        none,
        expand,
        contract
    };
    std::vector<Need> need(k, Need::none);
    std::vector<Point> second;
    for (std::size_t i = 0; i < k; ++i)
    {
        const Point& x = s.vertices[keep + i].x;
        if (fr[i] < f_best)
        {
            need[i] = Need::expand;
            second.push_back(along(c, x, kExpand));
        }
        else if (fr[i] >= f_threshold)
        {
            need[i] = Need::contract;
            second.push_back(along(c, x, -kContract));
        }
    }
    std::vector<double> fs;
    if (!second.empty())
    {
        fs = evaluate(f, second);
        stats.evaluated += second.size();
        ++stats.rounds;
    }

    bool improved = false;
    bool any_expansion = false;
    bool any_contraction = false;
    std::size_t next = 0;
    for (std::size_t i = 0; i < k; ++i)
    {
        Vertex& v = s.vertices[keep + i];
        switch (need[i])
        {
            case Need::none:
                v = {std::move(reflected[i]), fr[i]};
                improved = true;
                break;
            case Need::expand:
                any_expansion = true;
                if (fs[next] < fr[i])
                    v = {std::move(second[next]), fs[next]};
                else
                    v = {std::move(reflected[i]), fr[i]};
                ++next;
                improved = true;
                break;
            case Need::contract:
                any_contraction = true;
                if (fs[next] < v.f)
                {
                    v = {std::move(second[next]), fs[next]};
                    improved = true;
                }
                ++next;
                break;
        }
    }
    stats.kind = any_contraction ? StepKind::contraction
                                 : (any_expansion ? StepKind::expansion : StepKind::reflection);
    if (!improved)
        shrink(s, f, k, stats);
    stats.useful = stats.evaluated;
    s.sort();
    ++s.iteration;
    return stats;
}

namespace {

template <typename Step>
OptimizeResult drive(const BatchObjective& f, const Point& x0, std::size_t slots, const OptimizeOptions& options,
                     Step step)
{
    SimplexState s = SimplexState::initial(x0, f);
    OptimizeResult r;
    r.stats.slots_per_step = slots;
    r.best_history.push_back(s.best().f);
    while (r.iterations < options.max_iterations && !(options.tolerance > 0.0 && s.diameter() < options.tolerance))
    {
        r.stats.add(step(s));
        ++r.iterations;
        r.best_history.push_back(s.best().f);
        if (options.keep_trace)
            r.trace.push_back(s);
    }
    r.best_point = s.best().x;
    r.best_value = s.best().f;
    return r;
}

}  // namespace

OptimizeResult minimize(const BatchObjective& f, const Point& x0, Variant variant, const OptimizeOptions& options)
{
    return drive(f, x0, static_cast<std::size_t>(degree(variant)), options,
                 [&](SimplexState& s) { return nm_step(s, f, variant); });
}

OptimizeResult minimize(const Objective& f, const Point& x0, Variant variant, const OptimizeOptions& options)
{
    return minimize(sequential_batch(f), x0, variant, options);
}

OptimizeResult minimize_generalized(const BatchObjective& f, const Point& x0, std::size_t k,
                                    const OptimizeOptions& options)
{
    return drive(f, x0, k, options, [&](SimplexState& s) { return nm_step_generalized(s, f, k); });
}

GeneralizedGamma generalized_gamma(const Objective& f, const Point& x0, std::size_t k, std::size_t iterations,
                                   std::size_t sequential_budget)
{
    const BatchObjective batch = sequential_batch(f);
    if (sequential_budget == 0)
        sequential_budget = 10 * iterations;

    GeneralizedGamma g;
    {
        SimplexState s = SimplexState::initial(x0, batch);
        std::vector<double> best{s.best().f};
        std::vector<std::size_t> rounds{0};
        for (std::size_t it = 0; it < iterations; ++it)
        {
            rounds.push_back(rounds.back() + nm_step_generalized(s, batch, k).rounds);
            best.push_back(s.best().f);
        }
        g.reached_value = best.back();
        const auto first = std::find_if(best.begin(), best.end(), [&](double v) { return v <= g.reached_value; });
        g.parallel_steps = rounds[static_cast<std::size_t>(first - best.begin())];
    }
    {
        SimplexState s = SimplexState::initial(x0, batch);
        std::size_t evals = 0;
        std::size_t it = 0;
        while (!(s.best().f <= g.reached_value) && it < sequential_budget)
        {
            evals += nm_step(s, batch, Variant::a1).useful;
            ++it;
        }
        g.sequential_evals = evals;
        g.sequential_reached = s.best().f <= g.reached_value;
    }
    if (g.parallel_steps > 0)
        g.gamma = static_cast<double>(g.sequential_evals)
                  / (static_cast<double>(k) * static_cast<double>(g.parallel_steps));
    return g;
}

double rosenbrock(std::span<const double> x)
{
    if (x.size() < 2)
        throw ParameterError("Rosenbrock needs dimension >= 2");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
    {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        sum += 100.0 * a * a + b * b;
    }
    return sum;
}

Point rosenbrock_start(std::size_t dimension, std::uint64_t seed)
{
    Point x(dimension);
    if (seed == 0)
    {
        for (std::size_t i = 0; i < dimension; ++i)
            x[i] = i % 2 == 0 ? -1.2 : 1.0;
        return x;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (double& v : x)
        v = dist(rng);
    return x;
}

}  // namespace tlp
