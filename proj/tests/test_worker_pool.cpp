#include "tlp/error.hpp"
#include "tlp/worker_pool.hpp"

#include <doctest.h>

#include <atomic>
#include <numeric>
#include <stdexcept>
#include <vector>

using namespace tlp;

TEST_SUITE("worker_pool")
{
    TEST_CASE("leases are disjoint and returned on destruction")
    {
        WorkerPool pool(6);
        {
            WorkerGroup a = pool.lease(2);
            WorkerGroup b = pool.lease(3);
            CHECK(pool.leased() == 5);
            CHECK_THROWS_AS(pool.lease(2), InfeasibleError);
            WorkerGroup c = pool.lease(1);
            CHECK(pool.leased() == 6);
        }
        CHECK(pool.leased() == 0);
        CHECK(pool.peak_leased() == 6);
        CHECK_NOTHROW(pool.lease(6));
    }

    TEST_CASE("every rank runs once and barriers order the phases")
    {
        WorkerPool pool(5);
        WorkerGroup g = pool.lease(5);
        std::vector<int> slot(5, -1);
        std::vector<int> seen(5, 0);
        g.run([&](GroupContext& ctx) {
            slot[ctx.rank()] = static_cast<int>(ctx.rank());
            ctx.sync();
            int sum = 0;
            for (int v : slot)
                sum += v;
            seen[ctx.rank()] = sum;
        });
        for (int v : seen)
            CHECK(v == 0 + 1 + 2 + 3 + 4);
    }

    TEST_CASE("a throwing worker does not deadlock the others")
    {
        WorkerPool pool(3);
        WorkerGroup g = pool.lease(3);
        std::atomic<int> finished{0};
        CHECK_THROWS_AS(g.run([&](GroupContext& ctx) {
            if (ctx.rank() == 1)
                throw std::runtime_error("boom");
            ctx.sync();
            ctx.sync();
            ++finished;
        }),
                        std::runtime_error);
        CHECK(finished == 2);
        // The group stays usable.
        g.run([&](GroupContext& ctx) { ctx.sync(); });
    }

    TEST_CASE("concurrent groups never exceed the pool size")
    {
        WorkerPool pool(4);
        WorkerGroup a = pool.lease(2);
        WorkerGroup b = pool.lease(2);
        std::atomic<long> total{0};
        auto job = [&](GroupContext& ctx) {
            for (int i = 0; i < 50; ++i)
            {
                total += 1;
                ctx.sync();
            }
        };
        GroupFuture fa = a.launch(job);
        GroupFuture fb = b.launch(job);
        fa.get();
        fb.get();
        CHECK(total == 200);
        CHECK(pool.peak_active() <= 4);
        CHECK(pool.peak_active() >= 1);
    }

    TEST_CASE("moved-from groups release nothing twice")
    {
        WorkerPool pool(2);
        WorkerGroup a = pool.lease(2);
        WorkerGroup b = std::move(a);
        CHECK(b.size() == 2);
        CHECK(pool.leased() == 2);
        b = WorkerGroup{};
        CHECK(pool.leased() == 0);
    }
}
