#include "tlp/error.hpp"
#include "tlp/tridiag.hpp"
#include "tlp/worker_pool.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace tlp;

namespace {

TridiagSystem random_dominant(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TridiagSystem s(n);
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        s.lower[i] = {u(rng), u(rng)};
        s.upper[i] = {u(rng), u(rng)};
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        const double margin = 3.0 + std::abs(u(rng));
        s.diag[i] = std::polar(margin, 3.14159 * u(rng));
        s.rhs[i] = {u(rng), u(rng)};
    }
    return s;
}

// Dense Gaussian elimination with partial pivoting.
std::vector<Complex> dense_solve(const TridiagSystem& s)
{
    const std::size_t n = s.size();
    std::vector<std::vector<Complex>> a(n, std::vector<Complex>(n + 1));
    for (std::size_t i = 0; i < n; ++i)
    {
        a[i][i] = s.diag[i];
        if (i > 0)
            a[i][i - 1] = s.lower[i - 1];
        if (i + 1 < n)
            a[i][i + 1] = s.upper[i];
        a[i][n] = s.rhs[i];
    }
    for (std::size_t c = 0; c < n; ++c)
    {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
        {
            if (std::abs(a[r][c]) > std::abs(a[piv][c]))
                piv = r;
        }
        std::swap(a[c], a[piv]);
        for (std::size_t r = c + 1; r < n; ++r)
        {
            const Complex f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= n; ++k)
                a[r][k] -= f * a[c][k];
        }
    }
    std::vector<Complex> x(n);
    for (std::size_t i = n; i-- > 0;)
    {
        Complex sum = a[i][n];
        for (std::size_t k = i + 1; k < n; ++k)
            sum -= a[i][k] * x[k];
        x[i] = sum / a[i][i];
    }
    return x;
}

double max_rel_diff(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    return worst;
}

}  // namespace

TEST_SUITE("tridiag")
{
    TEST_CASE("identity system returns the right-hand side")
    {
        TridiagSystem s(7);
        for (std::size_t i = 0; i < 7; ++i)
        {
            s.diag[i] = 1.0;
            s.rhs[i] = {double(i), -2.0 * i};
        }
        CHECK(solve_thomas(s) == s.rhs);
        for (std::size_t p : {2, 3})
            CHECK(max_rel_diff(solve_wang(s, p), s.rhs) == 0.0);
    }

    TEST_CASE("2x2 by hand")
    {
        TridiagSystem s(2);
        s.diag = {2.0, 2.0};
        s.lower = {1.0};
        s.upper = {1.0};
        s.rhs = {3.0, 3.0};
        const auto x = solve_thomas(s);
        CHECK(std::abs(x[0] - 1.0) < 1e-15);
        CHECK(std::abs(x[1] - 1.0) < 1e-15);
    }

    TEST_CASE("Thomas matches dense elimination and leaves a tiny residual")
    {
        const TridiagSystem small = random_dominant(60, 3);
        CHECK(max_rel_diff(solve_thomas(small), dense_solve(small)) < 1e-13);

        const TridiagSystem big = random_dominant(1000, 4);
        const auto x = solve_thomas(big);
        const auto ax = big.multiply(x);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < ax.size(); ++i)
        {
            num += std::norm(ax[i] - big.rhs[i]);
            den += std::norm(big.rhs[i]);
        }
        CHECK(std::sqrt(num / den) <= 1e-12);
    }

    TEST_CASE("partition solver agrees with Thomas")
    {
        for (std::size_t n : {100, 1000})
        {
            const TridiagSystem s = random_dominant(n, static_cast<unsigned>(n));
            const auto ref = solve_thomas(s);
            for (std::size_t p : {2, 4, 8, 16, 32, 50})
            {
                CAPTURE(n);
                CAPTURE(p);
                CHECK(max_rel_diff(solve_wang(s, p), ref) <= 1e-10);
            }
        }
    }

    TEST_CASE("one block is Thomas bit for bit")
    {
        const TridiagSystem s = random_dominant(257, 9);
        CHECK(solve_wang(s, 1) == solve_thomas(s));
    }

    TEST_CASE("grouped and inline runs are bit-identical")
    {
        const TridiagSystem s = random_dominant(999, 11);
        WorkerPool pool(7);
        for (std::size_t p : {2, 5, 7})
        {
            WorkerGroup g = pool.lease(p);
            CHECK(solve_wang(s, p, &g) == solve_wang(s, p));
        }
    }

    TEST_CASE("plan blocks are balanced and cover every row")
    {
        const WangPlan plan = make_wang_plan(103, 10);
        std::size_t lo = 1000, hi = 0, next = 0;
        for (auto [b, e] : plan.blocks)
        {
            CHECK(b == next);
            next = e;
            lo = std::min(lo, e - b);
            hi = std::max(hi, e - b);
        }
        CHECK(next == 103);
        CHECK(hi - lo <= 1);
        CHECK_THROWS_AS(make_wang_plan(10, 6), ParameterError);
        CHECK_THROWS_AS(make_wang_plan(10, 0), ParameterError);
    }

    TEST_CASE("singular pivots are reported")
    {
        TridiagSystem s(2);
        s.diag = {0.0, 0.0};
        s.lower = {1.0};
        s.upper = {1.0};
        s.rhs = {1.0, 1.0};
        CHECK_THROWS_AS(solve_thomas(s), SingularMatrixError);

        TridiagSystem z(8);
        z.rhs.assign(8, 1.0);
        CHECK_THROWS_AS(solve_wang(z, 2), SingularMatrixError);
        WorkerPool pool(2);
        WorkerGroup g = pool.lease(2);
        CHECK_THROWS_AS(solve_wang(z, 2, &g), SingularMatrixError);
    }

    TEST_CASE("inconsistent bands are rejected")
    {
        TridiagSystem s(5);
        s.lower.pop_back();
        CHECK_THROWS_AS(s.validate(), ParameterError);
        CHECK_THROWS_AS(solve_thomas(s), ParameterError);
    }

    TEST_CASE("operation-count model")
    {
        CHECK(wang_cost(1600, 16) == doctest::Approx(1828.0));
        CHECK(wang_cost(1000, 1) == doctest::Approx(17.0 * 1000 + 8.0));
        std::size_t best = 1;
        for (std::size_t p = 1; p <= 1000; ++p)
        {
            if (17.0 * 16000 / p + 8.0 * p < 17.0 * 16000 / best + 8.0 * best)
                best = p;
        }
        CHECK(wang_cost_argmin(16000, 1000) == best);
        CHECK(best == 184);
        CHECK(wang_cost_argmin(16000, 80) == 80);
    }
}
