#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tlp {

using Point = std::vector<double>;
using Objective = std::function<double(std::span<const double>)>;

/// Evaluates a batch of points that may run concurrently; returns the values
/// in input order.
using BatchObjective = std::function<std::vector<double>(const std::vector<Point>&)>;

/// Evaluates the points one after another on the calling thread.
BatchObjective sequential_batch(Objective f);

/// Speculative family: A1 is classical Nelder-Mead, A2 evaluates f_R and f_E
/// together, A3 evaluates f_R, f_E and f_C together.
enum class Variant
{
    a1,
    a2,
    a3
};

int degree(Variant v);
std::string to_string(Variant v);
/// Parses "a1", "a2" or "a3"; throws ParameterError otherwise.
Variant parse_variant(const std::string& text);

struct Vertex
{
    Point x;
    double f = 0.0;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// m+1 vertices sorted ascending by value (stable, so ties keep their order).
struct SimplexState
{
    std::vector<Vertex> vertices;
    std::size_t iteration = 0;

    std::size_t dimension() const { return vertices.empty() ? 0 : vertices.size() - 1; }
    const Vertex& best() const { return vertices.front(); }
    /// Largest Euclidean distance from the best vertex to any other.
    double diameter() const;
    void sort();

    /// x0 plus 0.05*|x0_i| along each axis (0.00025 where x0_i == 0).
    /// Throws ParameterError for m < 2 or non-finite x0.
    static SimplexState initial(const Point& x0, const BatchObjective& f);

    friend bool operator==(const SimplexState&, const SimplexState&) = default;
};

enum class StepKind
{
    reflection,
    expansion,
    contraction,
    shrink
};

struct StepStats
{
    StepKind kind = StepKind::reflection;
    std::size_t useful = 0;     // evaluations the sequential method needs
    std::size_t evaluated = 0;  // evaluations actually performed
    std::size_t rounds = 0;     // synchronized evaluation rounds
};

struct EvalStats
{
    std::size_t useful_evals = 0;
    std::size_t total_evals = 0;
    std::size_t parallel_steps = 0;
    std::size_t slots_per_step = 1;
    std::size_t reflections = 0;
    std::size_t expansions = 0;
    std::size_t contractions = 0;
    std::size_t shrinks = 0;

    void add(const StepStats& step);
};

/// useful_evals / (slots_per_step * parallel_steps); throws ParameterError
/// when no step was taken.
double gamma_measure(const EvalStats& stats);

/// One Nelder-Mead iteration with coefficients 1, 2, 0.5, 0.5 and a single
/// inside contraction point. Non-finite values count as +infinity.
StepStats nm_step(SimplexState& simplex, const BatchObjective& f, Variant variant);

/// Generalized step: the k worst vertices are reflected together against the
/// centroid of the other m+1-k, each then expanded, accepted or contracted on
/// its own; the simplex shrinks when none of them improved. Requires
/// 1 <= k <= m-1.
StepStats nm_step_generalized(SimplexState& simplex, const BatchObjective& f, std::size_t k);

struct OptimizeOptions
{
    std::size_t max_iterations = 1000;
    /// Stop once the simplex diameter drops below this (0 never stops early).
    double tolerance = 0.0;
    bool keep_trace = true;
};

struct OptimizeResult
{
    Point best_point;
    double best_value = 0.0;
    std::size_t iterations = 0;
    EvalStats stats;
    /// Best value after every iteration; front() is the initial simplex.
    std::vector<double> best_history;
    /// Accepted simplex after every iteration (empty unless keep_trace).
    std::vector<SimplexState> trace;
};

OptimizeResult minimize(const BatchObjective& f, const Point& x0, Variant variant, const OptimizeOptions& options = {});
OptimizeResult minimize(const Objective& f, const Point& x0, Variant variant, const OptimizeOptions& options = {});

/// Same driver with the generalized k-point step; stats.slots_per_step = k.
OptimizeResult minimize_generalized(const BatchObjective& f, const Point& x0, std::size_t k,
                                    const OptimizeOptions& options = {});

struct GeneralizedGamma
{
    double gamma = 0.0;
    double reached_value = 0.0;          // final best of the k-point run
    std::size_t parallel_steps = 0;      // rounds until that value was first reached
    std::size_t sequential_evals = 0;    // classical evaluations to match it
    bool sequential_reached = false;     // false: sequential_evals is a lower bound
};

/// Runs the k-point method for `iterations` and classical Nelder-Mead for up
/// to `sequential_budget` iterations from the same start; the efficiency is
/// the classical evaluation count needed to reach the k-point run's final
/// best value divided by k times the rounds the k-point run took to get there.
GeneralizedGamma generalized_gamma(const Objective& f, const Point& x0, std::size_t k, std::size_t iterations,
                                   std::size_t sequential_budget = 0);

/// sum_{i<d} 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2; throws for d < 2.
double rosenbrock(std::span<const double> x);

/// Deterministic start for benchmark runs: seed 0 gives (-1.2, 1, -1.2, ...),
/// other seeds draw each coordinate uniformly from [-2, 2].
Point rosenbrock_start(std::size_t dimension, std::uint64_t seed);

}  // namespace tlp
