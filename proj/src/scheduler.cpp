#include "tlp/scheduler.hpp"

#include "tlp/error.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

namespace tlp {

TaskSet TaskSet::all_of(const TimingModel& model)
{
    TaskSet set;
    set.tasks = model.task_ids();
    return set;
}

namespace {

void check_task_set(const TimingModel& model, const TaskSet& tasks)
{
    if (tasks.tasks.empty())
        throw ParameterError("task set is empty");
    std::set<int> seen;
    for (int id : tasks.tasks)
    {
        model.curve(id);
        if (!seen.insert(id).second)
            throw ParameterError("task " + std::to_string(id) + " appears twice in the task set");
    }
}

std::vector<int> effective_caps(const TimingModel& model, const TaskSet& tasks, double e_min)
{
    std::vector<int> caps;
    caps.reserve(tasks.tasks.size());
    for (int id : tasks.tasks)
        caps.push_back(model.effective_cap(id, e_min));
    return caps;
}

}  // namespace

Assignment distribute(const TimingModel& model, const TaskSet& tasks, int procs, double e_min,
                      DistributeOptions options)
{
    check_task_set(model, tasks);
    const std::size_t m = tasks.tasks.size();
    if (procs < static_cast<int>(m))
        throw InfeasibleError("cannot distribute " + std::to_string(procs) + " processes among " + std::to_string(m)
                              + " tasks");
    const std::vector<int> caps = effective_caps(model, tasks, e_min);

    Assignment a;
    a.tasks = tasks.tasks;
    a.procs.assign(m, 1);
    std::vector<double> times(m);
    for (std::size_t i = 0; i < m; ++i)
        times[i] = model.predict_time(tasks.tasks[i], 1);
    std::vector<bool> candidate(m, true);

    int remaining = procs - static_cast<int>(m);
    while (remaining > 0)
    {
        std::size_t j = m;
        for (std::size_t i = 0; i < m; ++i)
        {
            if (candidate[i] && (j == m || times[i] > times[j]))
                j = i;
        }
        if (j == m)
            break;
        if (a.procs[j] >= caps[j])
        {
            a.cap_stop = true;
            if (!options.continue_past_cap)
                break;
            candidate[j] = false;
            continue;
        }
        ++a.procs[j];
        times[j] = model.predict_time(tasks.tasks[j], a.procs[j]);
        --remaining;
    }

    a.used = procs - remaining;
    a.predicted_makespan = *std::max_element(times.begin(), times.end());
    return a;
}

double predicted_makespan(const TimingModel& model, const Assignment& assignment)
{
    if (assignment.tasks.size() != assignment.procs.size() || assignment.tasks.empty())
        throw ParameterError("assignment has mismatched or empty task/process lists");
    double worst = 0.0;
    for (std::size_t i = 0; i < assignment.tasks.size(); ++i)
        worst = std::max(worst, model.predict_time(assignment.tasks[i], assignment.procs[i]));
    return worst;
}

Assignment brute_force_distribute(const TimingModel& model, const TaskSet& tasks, int procs, double e_min,
                                  double max_states)
{
    check_task_set(model, tasks);
    const std::size_t m = tasks.tasks.size();
    if (procs < static_cast<int>(m))
        throw InfeasibleError("cannot distribute " + std::to_string(procs) + " processes among " + std::to_string(m)
                              + " tasks");
    std::vector<int> caps = effective_caps(model, tasks, e_min);
    double states = 1.0;
    for (std::size_t i = 0; i < m; ++i)
    {
        // A task can never hold more than procs - (m - 1) processes.
        caps[i] = std::min(caps[i], procs - static_cast<int>(m) + 1);
        states *= caps[i];
    }
    if (states > max_states)
        throw SizeError("brute-force search space " + std::to_string(states) + " exceeds limit");

    std::vector<std::vector<double>> table(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        table[i].resize(static_cast<std::size_t>(caps[i]) + 1);
        for (int p = 1; p <= caps[i]; ++p)
            table[i][static_cast<std::size_t>(p)] = model.predict_time(tasks.tasks[i], p);
    }

    std::vector<int> current(m, 1);
    std::vector<int> best;
    double best_makespan = std::numeric_limits<double>::infinity();
    int best_used = 0;

    // Odometer over every capped vector, pruned by the process budget.
    for (;;)
    {
        int used = 0;
        double makespan = 0.0;
        for (std::size_t i = 0; i < m; ++i)
        {
            used += current[i];
            makespan = std::max(makespan, table[i][static_cast<std::size_t>(current[i])]);
        }
        if (used <= procs)
        {
            const bool better = makespan < best_makespan
                                || (makespan == best_makespan
                                    && (used < best_used || (used == best_used && current < best)));
            if (better)
            {
                best = current;
                best_makespan = makespan;
                best_used = used;
            }
        }
        std::size_t i = 0;
        while (i < m)
        {
            if (current[i] < caps[i])
            {
                ++current[i];
                break;
            }
            current[i] = 1;
            ++i;
        }
        if (i == m)
            break;
    }

    Assignment a;
    a.tasks = tasks.tasks;
    a.procs = best;
    a.used = best_used;
    a.predicted_makespan = best_makespan;
    return a;
}

std::vector<VariantProfile> default_variant_profiles(std::span<const int> degrees)
{
    std::vector<VariantProfile> out;
    for (int k : degrees)
    {
        double gamma = 0.0;
        switch (k)
        {
            case 1: gamma = 1.0; break;
            case 2: gamma = 0.75; break;
            case 3: gamma = 2.0 / 3.0; break;
            default:
                throw ParameterError("no default efficiency for variant degree " + std::to_string(k)
                                     + "; supply gamma explicitly");
        }
        out.push_back({k, k, gamma});
    }
    return out;
}

AlgorithmSelection select_algorithm(std::span<const VariantProfile> variants, std::span<const TimingModel> models,
                                    const TaskSet& tasks, int procs, double e_min, DistributeOptions options)
{
    if (variants.empty())
        throw ParameterError("no algorithm variants given");
    if (models.size() != 1 && models.size() != variants.size())
        throw ParameterError("expected one timing model or one per variant");

    AlgorithmSelection sel;
    bool any = false;
    for (std::size_t v = 0; v < variants.size(); ++v)
    {
        const VariantProfile& profile = variants[v];
        if (profile.degree < 1 || !(profile.gamma > 0.0 && profile.gamma <= 1.0))
            throw ParameterError("variant " + std::to_string(profile.id) + " needs degree >= 1 and gamma in (0, 1]");
        const TimingModel& model = models.size() == 1 ? models[0] : models[v];

        VariantPlan plan;
        plan.variant = profile;
        plan.procs_per_copy = procs / profile.degree;
        if (plan.procs_per_copy >= static_cast<int>(tasks.tasks.size()))
        {
            plan.feasible = true;
            plan.per_copy = distribute(model, tasks, plan.procs_per_copy, e_min, options);
            plan.used_total = plan.per_copy.used * profile.degree;
            plan.makespan = plan.per_copy.predicted_makespan;
            plan.useful_point_time = plan.makespan / (profile.gamma * profile.degree);
        }
        sel.plans.push_back(std::move(plan));

        const VariantPlan& cur = sel.plans.back();
        if (!cur.feasible)
            continue;
        if (!any)
        {
            sel.selected = v;
            any = true;
            continue;
        }
        const VariantPlan& best = sel.plans[sel.selected];
        if (cur.useful_point_time < best.useful_point_time
            || (cur.useful_point_time == best.useful_point_time && cur.variant.degree < best.variant.degree))
            sel.selected = v;
    }
    if (!any)
        throw InfeasibleError("no algorithm variant fits on " + std::to_string(procs) + " processes");
    return sel;
}

AlgorithmSelection select_algorithm(std::span<const VariantProfile> variants, const TimingModel& model,
                                    const TaskSet& tasks, int procs, double e_min, DistributeOptions options)
{
    return select_algorithm(variants, std::span<const TimingModel>(&model, 1), tasks, procs, e_min, options);
}

}  // namespace tlp
