#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tlp {

class WorkerGroup;

struct TimingSample
{
    int procs = 1;
    double seconds = 0.0;

    friend bool operator==(const TimingSample&, const TimingSample&) = default;
};

/// Empirical wall time of one task as a function of its process count.
/// Samples are strictly increasing in p, include p = 1 and are positive.
class TimingCurve
{
public:
    TimingCurve(int task_id, std::vector<TimingSample> samples);

    int task_id() const noexcept { return task_id_; }
    std::span<const TimingSample> samples() const noexcept { return samples_; }
    int max_measured() const noexcept { return samples_.back().procs; }

    /// Exact on measured p; linear in 1/p between bracketing samples; held
    /// at the last sample beyond the largest measured p.
    double predict(int p) const;

    friend bool operator==(const TimingCurve&, const TimingCurve&) = default;

private:
    int task_id_;
    std::vector<TimingSample> samples_;
};

/// Saturation point, efficiency cap and their minimum for one task.
struct CapInfo
{
    int saturation = 1;
    int eff_cap = 1;
    int effective = 1;
};

/// Per-task timing curves for tasks 1..M on a system of `max_procs` processes.
/// Queries are pure and may be called concurrently.
class TimingModel
{
public:
    TimingModel() = default;
    /// Curves may come in any order; their ids must be exactly 1..M.
    /// `max_procs` <= 0 selects the largest measured p.
    TimingModel(std::vector<TimingCurve> curves, int max_procs = 0);

    std::size_t task_count() const noexcept { return curves_.size(); }
    int max_procs() const noexcept { return max_procs_; }
    std::span<const TimingCurve> curves() const noexcept { return curves_; }
    std::vector<int> task_ids() const;

    /// Throws LookupError for an unknown id.
    const TimingCurve& curve(int task_id) const;

    /// Requires 1 <= p <= max_procs (ParameterError otherwise).
    double predict_time(int task_id, int p) const;

    /// Smallest measured p attaining the curve's global minimum.
    int saturation_point(int task_id) const;

    /// Largest P~ in [1, max_procs] such that every p <= P~ keeps the
    /// efficiency t(1) / (p * t(p)) at or above `e_min`.
    int efficiency_cap(int task_id, double e_min) const;

    /// min(saturation_point, efficiency_cap).
    int effective_cap(int task_id, double e_min) const;

    CapInfo caps(int task_id, double e_min) const;

    friend bool operator==(const TimingModel&, const TimingModel&) = default;

private:
    std::vector<TimingCurve> curves_;  // index m-1 holds task m
    int max_procs_ = 0;
};

/// CSV with header `task_id,p,seconds`, one row per sample. Values are
/// written in shortest round-trip form so read(write(m)) == m exactly.
TimingModel read_timing_model_csv(std::istream& in, int max_procs = 0);
void write_timing_model_csv(std::ostream& out, const TimingModel& model);
TimingModel load_timing_model(const std::string& path, int max_procs = 0);
void save_timing_model(const std::string& path, const TimingModel& model);

/// One benchmark task for calibration: runs the task on the given group.
struct CalibrationTask
{
    int task_id = 0;
    std::string name;
    std::function<void(WorkerGroup&)> run;
};

/// Measures every task at every process count. For each p all tasks run at
/// once, each on its own group of p workers, so the machine is loaded the
/// way it is during a real block. Each sample is the minimum wall time over
/// `repetitions`. Throws CalibrationError naming the task and p on failure.
TimingModel calibrate(std::span<const CalibrationTask> tasks, std::span<const int> process_counts, int repetitions,
                      int max_procs = 0);

}  // namespace tlp
