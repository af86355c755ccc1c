#pragma once

#include <atomic>
#include <barrier>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace tlp {

/// Per-worker view of a running group job.
class GroupContext
{
public:
    GroupContext(std::size_t rank, std::size_t size, std::barrier<>& barrier)
        : rank_(rank), size_(size), barrier_(&barrier)
    {
    }

    std::size_t rank() const noexcept { return rank_; }
    std::size_t size() const noexcept { return size_; }

    /// Blocks until every worker of the group reaches the same point.
    void sync() { barrier_->arrive_and_wait(); }

private:
    std::size_t rank_;
    std::size_t size_;
    std::barrier<>* barrier_;
};

using GroupJob = std::function<void(GroupContext&)>;

class WorkerGroup;

/// Fixed set of persistent worker threads. Disjoint subsets are leased out as
/// `WorkerGroup`s; a worker belongs to at most one lease at a time, so the
/// number of busy workers can never exceed `size()`.
class WorkerPool
{
public:
    explicit WorkerPool(std::size_t size);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    std::size_t size() const noexcept { return workers_.size(); }

    /// Leases `count` idle workers. Throws InfeasibleError when fewer are free.
    WorkerGroup lease(std::size_t count);

    std::size_t leased() const;
    std::size_t peak_leased() const;
    /// Largest number of workers observed executing a job at the same instant.
    std::size_t peak_active() const noexcept { return peak_active_.load(); }

private:
    friend class WorkerGroup;

    struct Task;
    struct Worker
    {
        std::mutex mutex;
        std::condition_variable cv;
        std::shared_ptr<Task> pending;
        std::size_t rank = 0;
        bool stop = false;
        std::thread thread;
    };

    void worker_loop(Worker& worker);
    void release(const std::vector<std::size_t>& ids);
    void post(std::size_t worker_id, std::shared_ptr<Task> task, std::size_t rank);

    std::vector<std::unique_ptr<Worker>> workers_;
    mutable std::mutex lease_mutex_;
    std::vector<bool> busy_;
    std::size_t leased_ = 0;
    std::size_t peak_leased_ = 0;
    std::atomic<std::size_t> active_{0};
    std::atomic<std::size_t> peak_active_{0};
};

/// Handle to an asynchronously running group job.
class GroupFuture
{
public:
    GroupFuture() = default;
    explicit GroupFuture(std::shared_future<void> f) : future_(std::move(f)) {}

    bool valid() const noexcept { return future_.valid(); }
    /// Waits for completion and rethrows the first worker exception, if any.
    void get() const { future_.get(); }
    void wait() const { future_.wait(); }

private:
    std::shared_future<void> future_;
};

/// RAII lease of workers from a pool. Move-only; returns its workers to the
/// pool on destruction after any outstanding job has finished.
class WorkerGroup
{
public:
    WorkerGroup() = default;
    WorkerGroup(WorkerGroup&& other) noexcept;
    WorkerGroup& operator=(WorkerGroup&& other) noexcept;
    ~WorkerGroup();

    std::size_t size() const noexcept { return ids_.size(); }

    /// Runs `job` on every worker of the group (ranks 0..size-1) and returns
    /// immediately. A worker whose job throws drops out of the group barrier
    /// so the remaining workers can finish.
    GroupFuture launch(GroupJob job);

    /// launch() followed by get().
    void run(GroupJob job) { launch(std::move(job)).get(); }

private:
    friend class WorkerPool;
    WorkerGroup(WorkerPool* pool, std::vector<std::size_t> ids)
        : pool_(pool), ids_(std::move(ids))
    {
    }
    void reset();

    WorkerPool* pool_ = nullptr;
    std::vector<std::size_t> ids_;
    GroupFuture last_;
};

}  // namespace tlp
