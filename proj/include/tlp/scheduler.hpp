#pragma once

#include "tlp/timing_model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tlp {

/// One block of independent tasks, referenced by timing-model id, that is
/// solved `block_repetitions` times in sequence.
struct TaskSet
{
    std::vector<int> tasks;
    std::size_t block_repetitions = 1;

    /// All tasks of the model, once each.
    static TaskSet all_of(const TimingModel& model);
};

struct Assignment
{
    std::vector<int> tasks;
    std::vector<int> procs;
    double predicted_makespan = 0.0;
    int used = 0;
    /// True when the greedy loop stopped because the slowest task was capped.
    bool cap_stop = false;
};

struct DistributeOptions
{
    /// Instead of stopping at the first capped maximum, drop the capped task
    /// from candidacy and keep distributing.
    bool continue_past_cap = false;
};

/// Greedy distribution of `procs` processes among the tasks. Every task
/// starts with one process; each further process goes to the task with the
/// largest predicted time (lowest index on ties). The loop ends when the
/// processes run out or, by default, as soon as that task already sits at its
/// effective cap. Throws InfeasibleError when procs < number of tasks.
Assignment distribute(const TimingModel& model, const TaskSet& tasks, int procs, double e_min,
                      DistributeOptions options = {});

/// max over tasks of predict_time(task, p_task).
double predicted_makespan(const TimingModel& model, const Assignment& assignment);

/// Exhaustive minimax over all feasible capped distributions. Ties go to
/// fewer total processes, then to the lexicographically smallest vector.
/// Throws SizeError when the search space exceeds `max_states`.
Assignment brute_force_distribute(const TimingModel& model, const TaskSet& tasks, int procs, double e_min,
                                  double max_states = 1e7);

/// A first-level algorithm alternative: `degree` concurrent objective
/// evaluations per step with algorithmic efficiency `gamma`.
struct VariantProfile
{
    int id = 1;
    int degree = 1;
    double gamma = 1.0;
};

/// Theoretical efficiencies of the speculative Nelder-Mead family for
/// degree 1, 2 and 3 under the expansion-2/3, contraction-1/3 scenario mix.
std::vector<VariantProfile> default_variant_profiles(std::span<const int> degrees);

struct VariantPlan
{
    VariantProfile variant;
    bool feasible = false;
    int procs_per_copy = 0;
    Assignment per_copy;     // the same assignment is used by every copy
    int used_total = 0;      // degree * per_copy.used
    double makespan = 0.0;   // predicted time of one block
    double useful_point_time = 0.0;  // makespan / (gamma * degree)
};

struct AlgorithmSelection
{
    std::vector<VariantPlan> plans;  // in the order the variants were given
    std::size_t selected = 0;        // index into plans

    const VariantPlan& chosen() const { return plans.at(selected); }
};

/// Plans every variant on `procs` processes: each of its `degree` copies of
/// the task block gets floor(procs / degree) processes, distributed greedily.
/// Selects the feasible variant with the smallest useful-point time, ties to
/// the smaller degree. `models` holds one model shared by all variants or one
/// per variant. Throws InfeasibleError when no variant fits.
AlgorithmSelection select_algorithm(std::span<const VariantProfile> variants, std::span<const TimingModel> models,
                                    const TaskSet& tasks, int procs, double e_min, DistributeOptions options = {});

AlgorithmSelection select_algorithm(std::span<const VariantProfile> variants, const TimingModel& model,
                                    const TaskSet& tasks, int procs, double e_min, DistributeOptions options = {});

}  // namespace tlp
