#pragma once

#include "tlp/nelder_mead.hpp"
#include "tlp/scheduler.hpp"
#include "tlp/schrodinger.hpp"
#include "tlp/timing_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tlp {

using Json = nlohmann::json;

class WorkerPool;

/// Default ABC starting point (a = 1, d = 10, 100, 1000).
AbcParams default_abc_start();

/// Work unit a calibration or real run can execute on a worker group.
struct TaskDescriptor
{
    enum class Kind
    {
        pde,        // integrate `problem` with the partition solver
        serial,     // `work` arithmetic iterations on rank 0 only
        divisible,  // `work` iterations split evenly across the group
    };

    int task_id = 1;
    std::string name;
    Kind kind = Kind::pde;
    PdeProblem problem;
    std::uint64_t work = 0;
};

/// Fixed amount of floating-point work; returns a value so it cannot be
/// optimized away.
double busy_work(std::uint64_t iterations);

/// Wraps a descriptor for calibrate(). A pde task on one process runs Thomas;
/// on p > 1 it needs p <= (J+1)/2.
CalibrationTask make_calibration_task(const TaskDescriptor& task, const AbcParams& abc);

struct CalibrationConfig
{
    std::vector<TaskDescriptor> tasks;
    std::vector<int> process_counts{1};
    int repetitions = 1;
    int max_procs = 0;
    AbcParams abc = default_abc_start();
};

/// {"tasks": [...], "process_counts": [...], "repetitions": n, "max_procs": P}
/// where a task is {"id", "kind": "serial"|"divisible", "work"} or a pde task
/// whose problem fields sit inline or under "problem". Throws ConfigError on
/// malformed input.
CalibrationConfig calibration_config_from_json(const Json& j);
TimingModel run_calibration(const CalibrationConfig& config);

enum class RunMode
{
    simulated,
    real
};

struct ExperimentConfig
{
    RunMode mode = RunMode::simulated;
    /// 1..3 selects a timing benchmark; 0 uses `problems` (or the four
    /// optimization problems when that list is empty).
    int benchmark = 1;
    std::vector<PdeProblem> problems;
    double scale = 1.0;
    int procs = 16;
    double e_min = 0.0;
    std::vector<int> variants{1};
    /// Explicit efficiencies, parallel to `variants`; defaults otherwise.
    std::vector<double> gammas;
    bool continue_past_cap = false;

    std::string model_path;
    std::vector<int> calibration_counts;  // empty: powers of two up to procs
    int calibration_repetitions = 1;
    bool measure_baseline = true;

    std::size_t nm_iterations = 0;
    double nm_tolerance = 0.0;
    std::optional<Variant> nm_variant;  // forced first-level variant
    AbcParams abc_start = default_abc_start();

    std::uint64_t seed = 0;
    std::string report_path;
    std::string gantt_path;

    /// Throws ConfigError when fields are out of range.
    void validate() const;
    std::vector<PdeProblem> task_problems() const;

    static ExperimentConfig from_json(const Json& j);
    Json to_json() const;
};

struct VariantReport
{
    int id = 1;
    int degree = 1;
    double gamma = 1.0;
    bool feasible = false;
    int procs_per_copy = 0;
    std::vector<int> tasks;
    std::vector<int> procs;
    std::vector<double> task_seconds;
    int used_total = 0;
    double makespan = 0.0;
    double useful_point_time = 0.0;

    friend bool operator==(const VariantReport&, const VariantReport&) = default;
};

struct OptimizationReport
{
    std::string variant;
    std::size_t iterations = 0;
    std::vector<double> best_point;
    double initial_value = 0.0;
    double best_value = 0.0;
    std::vector<double> best_history;
    std::size_t useful_evals = 0;
    std::size_t parallel_steps = 0;
    double gamma = 1.0;

    friend bool operator==(const OptimizationReport&, const OptimizationReport&) = default;
};

struct RunReport
{
    std::string mode;
    int procs = 0;
    double e_min = 0.0;
    std::uint64_t seed = 0;
    std::vector<VariantReport> variants;
    std::size_t selected = 0;

    /// Sum of the one-process model times of the task block.
    double model_sequential = 0.0;
    /// Useful-point model time of the selected variant.
    double model_time = 0.0;
    int active_procs = 0;
    double model_speedup = 0.0;
    double model_efficiency = 0.0;

    /// Real mode: measured block time divided by gamma*k, the measured
    /// one-process time of the block (0 if not measured) and the peak number
    /// of simultaneously busy workers.
    double measured_time = 0.0;
    double measured_sequential = 0.0;
    double measured_speedup = 0.0;
    std::size_t peak_workers = 0;

    std::optional<OptimizationReport> optimization;

    const VariantReport& chosen() const { return variants.at(selected); }

    Json to_json() const;
    static RunReport from_json(const Json& j);

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Simulated mode needs a model file and only plans. Real mode loads or
/// calibrates a model, plans, runs one block of the selected variant on a
/// pool of `procs` workers and, when nm_iterations > 0, optimizes the
/// boundary parameters.
RunReport run_experiment(const ExperimentConfig& config);

/// Planning step shared by both modes.
RunReport plan_experiment(const ExperimentConfig& config, const TimingModel& model);

struct AbcOptimization
{
    AbcParams best;
    OptimizeResult result;
    double initial_value = 0.0;
};

/// Nelder-Mead over objective(). With `pool` null every evaluation runs inline
/// on the calling thread; otherwise the points of a round are evaluated
/// concurrently, each problem of each point on its own leased group of
/// `procs[m]` workers. Both paths perform the same arithmetic.
AbcOptimization optimize_abc(const std::vector<PdeProblem>& problems, const std::vector<int>& procs,
                             Variant variant, const AbcParams& start, const OptimizeOptions& options,
                             WorkerPool* pool = nullptr);

/// Runs the optimization described by a real-mode config on its own pool.
AbcOptimization optimize_abc(const ExperimentConfig& config, const RunReport& plan, bool parallel);

/// CSV "task_id,procs,predicted_seconds" of the selected assignment.
void write_gantt(std::ostream& out, const RunReport& report);
/// Throws ParameterError for an empty assignment and IoError on write failure.
void emit_gantt(const RunReport& report, const std::string& path);

}  // namespace tlp
