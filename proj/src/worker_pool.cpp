#include "tlp/worker_pool.hpp"

#include "tlp/error.hpp"

#include <string>

namespace tlp {

struct WorkerPool::Task
{
    Task(GroupJob j, std::size_t n)
        : job(std::move(j)), size(n), barrier(static_cast<std::ptrdiff_t>(n)), remaining(n)
    {
    }

    GroupJob job;
    std::size_t size;
    std::barrier<> barrier;
    std::atomic<std::size_t> remaining;
    std::mutex error_mutex;
    std::exception_ptr error;
    std::promise<void> done;
};

WorkerPool::WorkerPool(std::size_t size) : busy_(size, false)
{
    if (size == 0)
        throw ParameterError("worker pool needs at least one worker");
    workers_.reserve(size);
    for (std::size_t i = 0; i < size; ++i)
        workers_.push_back(std::make_unique<Worker>());
    for (auto& w : workers_)
        w->thread = std::thread([this, wp = w.get()] { worker_loop(*wp); });
}

WorkerPool::~WorkerPool()
{
    for (auto& w : workers_)
    {
        {
            std::lock_guard lock(w->mutex);
            w->stop = true;
        }
        w->cv.notify_one();
    }
    for (auto& w : workers_)
        w->thread.join();
}

WorkerGroup WorkerPool::lease(std::size_t count)
{
    if (count == 0)
        throw ParameterError("cannot lease an empty worker group");
    std::lock_guard lock(lease_mutex_);
    if (leased_ + count > workers_.size())
        throw InfeasibleError("worker pool exhausted: requested " + std::to_string(count) + ", free "
                              + std::to_string(workers_.size() - leased_));
    std::vector<std::size_t> ids;
    ids.reserve(count);
    for (std::size_t i = 0; i < busy_.size() && ids.size() < count; ++i)
    {
        if (!busy_[i])
        {
            busy_[i] = true;
            ids.push_back(i);
        }
    }
    leased_ += count;
    peak_leased_ = std::max(peak_leased_, leased_);
    return WorkerGroup(this, std::move(ids));
}

std::size_t WorkerPool::leased() const
{
    std::lock_guard lock(lease_mutex_);
    return leased_;
}

std::size_t WorkerPool::peak_leased() const
{
    std::lock_guard lock(lease_mutex_);
    return peak_leased_;
}

void WorkerPool::release(const std::vector<std::size_t>& ids)
{
    std::lock_guard lock(lease_mutex_);
    for (auto id : ids)
        busy_[id] = false;
    leased_ -= ids.size();
}

void WorkerPool::post(std::size_t worker_id, std::shared_ptr<Task> task, std::size_t rank)
{
    Worker& w = *workers_[worker_id];
    {
        std::lock_guard lock(w.mutex);
        w.pending = std::move(task);
        w.rank = rank;
    }
    w.cv.notify_one();
}

void WorkerPool::worker_loop(Worker& worker)
{
    for (;;)
    {
        std::shared_ptr<Task> task;
        std::size_t rank = 0;
        {
            std::unique_lock lock(worker.mutex);
            worker.cv.wait(lock, [&] { return worker.stop || worker.pending; });
            if (!worker.pending)
                return;
            task = std::move(worker.pending);
            rank = worker.rank;
        }

        std::size_t now = active_.fetch_add(1) + 1;
        std::size_t peak = peak_active_.load();
        while (now > peak && !peak_active_.compare_exchange_weak(peak, now))
        {
        }

        GroupContext ctx(rank, task->size, task->barrier);
        try
        {
            task->job(ctx);
        }
        catch (...)
        {
            {
                std::lock_guard lock(task->error_mutex);
                if (!task->error)
                    task->error = std::current_exception();
            }
            task->barrier.arrive_and_drop();
        }
        active_.fetch_sub(1);

        if (task->remaining.fetch_sub(1) == 1)
        {
            if (task->error)
                task->done.set_exception(task->error);
            else
                task->done.set_value();
        }
    }
}

WorkerGroup::WorkerGroup(WorkerGroup&& other) noexcept
    : pool_(other.pool_), ids_(std::move(other.ids_)), last_(std::move(other.last_))
{
    other.pool_ = nullptr;
    other.ids_.clear();
}

WorkerGroup& WorkerGroup::operator=(WorkerGroup&& other) noexcept
{
    if (this != &other)
    {
        reset();
        pool_ = other.pool_;
        ids_ = std::move(other.ids_);
        last_ = std::move(other.last_);
        other.pool_ = nullptr;
        other.ids_.clear();
    }
    return *this;
}

WorkerGroup::~WorkerGroup() { reset(); }

void WorkerGroup::reset()
{
    if (last_.valid())
        last_.wait();
    if (pool_ && !ids_.empty())
        pool_->release(ids_);
    pool_ = nullptr;
    ids_.clear();
    last_ = GroupFuture();
}

GroupFuture WorkerGroup::launch(GroupJob job)
{
    if (!pool_ || ids_.empty())
        throw ParameterError("launch on an empty worker group");
    if (last_.valid())
        last_.wait();
    auto task = std::make_shared<WorkerPool::Task>(std::move(job), ids_.size());
    GroupFuture future(task->done.get_future().share());
    for (std::size_t rank = 0; rank < ids_.size(); ++rank)
        pool_->post(ids_[rank], task, rank);
    last_ = future;
    return future;
}

}  // namespace tlp
