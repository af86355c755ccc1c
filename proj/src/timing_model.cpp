#include "tlp/timing_model.hpp"

#include "tlp/error.hpp"
#include "tlp/worker_pool.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace tlp {

TimingCurve::TimingCurve(int task_id, std::vector<TimingSample> samples)
    : task_id_(task_id), samples_(std::move(samples))
{
    if (samples_.empty() || samples_.front().procs != 1)
        throw ParameterError("timing curve of task " + std::to_string(task_id) + " must start at p=1");
    for (std::size_t i = 0; i < samples_.size(); ++i)
    {
        if (!(samples_[i].seconds > 0.0) || !std::isfinite(samples_[i].seconds))
            throw ParameterError("timing curve of task " + std::to_string(task_id) + " has a non-positive time");
        if (i > 0 && samples_[i].procs <= samples_[i - 1].procs)
            throw ParameterError("timing curve of task " + std::to_string(task_id)
                                 + " must be strictly increasing in p");
    }
}

double TimingCurve::predict(int p) const
{
    if (p < 1)
        throw ParameterError("process count must be >= 1");
    auto it = std::lower_bound(samples_.begin(), samples_.end(), p,
                               [](const TimingSample& s, int q) { return s.procs < q; });
    if (it == samples_.end())
        return samples_.back().seconds;
    if (it->procs == p)
        return it->seconds;
    const TimingSample& hi = *it;
    const TimingSample& lo = *(it - 1);
    const double inv = 1.0 / p;
    const double inv_lo = 1.0 / lo.procs;
    const double inv_hi = 1.0 / hi.procs;
    const double frac = (inv - inv_lo) / (inv_hi - inv_lo);
    return lo.seconds + (hi.seconds - lo.seconds) * frac;
}

TimingModel::TimingModel(std::vector<TimingCurve> curves, int max_procs)
{
    if (curves.empty())
        throw ParameterError("timing model needs at least one task");
    std::sort(curves.begin(), curves.end(),
              [](const TimingCurve& a, const TimingCurve& b) { return a.task_id() < b.task_id(); });
    for (std::size_t i = 0; i < curves.size(); ++i)
    {
        if (curves[i].task_id() != static_cast<int>(i) + 1)
            throw ParameterError("timing model task ids must be exactly 1..M, each once");
    }
    int largest = 0;
    for (const auto& c : curves)
        largest = std::max(largest, c.max_measured());
    max_procs_ = max_procs > 0 ? max_procs : largest;
    curves_ = std::move(curves);
}

std::vector<int> TimingModel::task_ids() const
{
    std::vector<int> ids;
    ids.reserve(curves_.size());
    for (const auto& c : curves_)
        ids.push_back(c.task_id());
    return ids;
}

const TimingCurve& TimingModel::curve(int task_id) const
{
    if (task_id < 1 || task_id > static_cast<int>(curves_.size()))
        throw LookupError("unknown task id " + std::to_string(task_id));
    return curves_[static_cast<std::size_t>(task_id - 1)];
}

double TimingModel::predict_time(int task_id, int p) const
{
    const TimingCurve& c = curve(task_id);
    if (p < 1 || p > max_procs_)
        throw ParameterError("process count " + std::to_string(p) + " outside [1, "
                             + std::to_string(max_procs_) + "]");
    return c.predict(p);
}

int TimingModel::saturation_point(int task_id) const
{
    const TimingCurve& c = curve(task_id);
    const TimingSample* best = &c.samples().front();
    for (const auto& s : c.samples())
    {
        if (s.seconds < best->seconds)
            best = &s;
    }
    return best->procs;
}

int TimingModel::efficiency_cap(int task_id, double e_min) const
{
    if (!(e_min >= 0.0 && e_min <= 1.0))
        throw ParameterError("E_min must lie in [0, 1]");
    const TimingCurve& c = curve(task_id);
    const double t1 = c.predict(1);
    int cap = 1;
    for (int p = 2; p <= max_procs_; ++p)
    {
        const double efficiency = t1 / (p * c.predict(p));
        if (efficiency < e_min)
            break;
        cap = p;
    }
    return cap;
}

int TimingModel::effective_cap(int task_id, double e_min) const
{
    return std::min(saturation_point(task_id), efficiency_cap(task_id, e_min));
}

CapInfo TimingModel::caps(int task_id, double e_min) const
{
    CapInfo info;
    info.saturation = saturation_point(task_id);
    info.eff_cap = efficiency_cap(task_id, e_min);
    info.effective = std::min(info.saturation, info.eff_cap);
    return info;
}

namespace {

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

template <typename T>
T parse_field(const std::string& text, std::size_t line)
{
    T value{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw IoError("timing model CSV line " + std::to_string(line) + ": cannot parse '" + text + "'");
    return value;
}

std::string shortest(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

TimingModel read_timing_model_csv(std::istream& in, int max_procs)
{
    std::string line;
    if (!std::getline(in, line) || trim(line) != "task_id,p,seconds")
        throw IoError("timing model CSV must start with header 'task_id,p,seconds'");
    std::map<int, std::vector<TimingSample>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        line = trim(line);
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            fields.push_back(trim(field));
        if (fields.size() != 3)
            throw IoError("timing model CSV line " + std::to_string(line_no) + ": expected 3 fields");
        const int task = parse_field<int>(fields[0], line_no);
        const int p = parse_field<int>(fields[1], line_no);
        const double seconds = parse_field<double>(fields[2], line_no);
        rows[task].push_back({p, seconds});
    }
    std::vector<TimingCurve> curves;
    for (auto& [task, samples] : rows)
    {
        std::sort(samples.begin(), samples.end(),
                  [](const TimingSample& a, const TimingSample& b) { return a.procs < b.procs; });
        curves.emplace_back(task, std::move(samples));
    }
    return TimingModel(std::move(curves), max_procs);
}

void write_timing_model_csv(std::ostream& out, const TimingModel& model)
{
    out << "task_id,p,seconds\n";
    for (const auto& c : model.curves())
    {
        for (const auto& s : c.samples())
            out << c.task_id() << ',' << s.procs << ',' << shortest(s.seconds) << '\n';
    }
}

TimingModel load_timing_model(const std::string& path, int max_procs)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open timing model '" + path + "'");
    return read_timing_model_csv(in, max_procs);
}

void save_timing_model(const std::string& path, const TimingModel& model)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write timing model '" + path + "'");
    write_timing_model_csv(out, model);
}

TimingModel calibrate(std::span<const CalibrationTask> tasks, std::span<const int> process_counts, int repetitions,
                      int max_procs)
{
    if (tasks.empty())
        throw ParameterError("calibration needs at least one task");
    if (repetitions < 1)
        throw ParameterError("calibration needs at least one repetition");
    std::vector<int> counts(process_counts.begin(), process_counts.end());
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    if (counts.empty() || counts.front() != 1)
        throw ParameterError("calibration process counts must include 1");

    const std::size_t m = tasks.size();
    WorkerPool pool(m * static_cast<std::size_t>(counts.back()));
    std::vector<std::vector<TimingSample>> samples(m);

    for (int p : counts)
    {
        std::vector<double> best(m, std::numeric_limits<double>::infinity());
        for (int rep = 0; rep < repetitions; ++rep)
        {
            std::vector<WorkerGroup> groups;
            groups.reserve(m);
            for (std::size_t i = 0; i < m; ++i)
                groups.push_back(pool.lease(static_cast<std::size_t>(p)));

            std::vector<double> elapsed(m, 0.0);
            std::vector<std::exception_ptr> errors(m);
            {
                // One waiting coordinator per task so each wall time ends
                // when that task ends, not when the slowest one does.
                std::vector<std::jthread> coordinators;
                coordinators.reserve(m);
                for (std::size_t i = 0; i < m; ++i)
                {
                    coordinators.emplace_back([&, i] {
                        const auto start = std::chrono::steady_clock::now();
                        try
                        {
                            tasks[i].run(groups[i]);
                        }
                        catch (...)
                        {
                            errors[i] = std::current_exception();
                        }
                        elapsed[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                    });
                }
            }
            for (std::size_t i = 0; i < m; ++i)
            {
                if (errors[i])
                {
                    std::string detail = "unknown error";
                    try
                    {
                        std::rethrow_exception(errors[i]);
                    }
                    catch (const std::exception& e)
                    {
                        detail = e.what();
                    }
                    catch (...)
                    {
                    }
                    throw CalibrationError("calibration of task " + std::to_string(tasks[i].task_id) + " ("
                                           + tasks[i].name + ") failed at p=" + std::to_string(p) + ": " + detail);
                }
                best[i] = std::min(best[i], std::max(elapsed[i], 1e-9));
            }
        }
        for (std::size_t i = 0; i < m; ++i)
            samples[i].push_back({p, best[i]});
    }

    std::vector<TimingCurve> curves;
    curves.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
        curves.emplace_back(tasks[i].task_id, std::move(samples[i]));
    return TimingModel(std::move(curves), max_procs);
}

}  // namespace tlp
