#include "tlp/tridiag.hpp"

#include "tlp/error.hpp"
#include "tlp/worker_pool.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace tlp {

namespace {

constexpr double kPivotFloor = 1e-300;

bool is_singular(const Complex& pivot) { return std::abs(pivot) < kPivotFloor; }

}  // namespace

TridiagSystem::TridiagSystem(std::size_t size)
    : lower(size > 0 ? size - 1 : 0), diag(size), upper(size > 0 ? size - 1 : 0), rhs(size)
{
}

void TridiagSystem::validate() const
{
    const std::size_t n = diag.size();
    if (n < 2)
        throw ParameterError("tridiagonal system needs at least 2 rows, got " + std::to_string(n));
    if (lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n)
        throw ParameterError("tridiagonal band lengths inconsistent with size " + std::to_string(n));
}

std::vector<Complex> TridiagSystem::multiply(std::span<const Complex> x) const
{
    const std::size_t n = size();
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        Complex acc = diag[i] * x[i];
        if (i > 0)
            acc += lower[i - 1] * x[i - 1];
        if (i + 1 < n)
            acc += upper[i] * x[i + 1];
        out[i] = acc;
    }
    return out;
}

std::vector<Complex> solve_thomas(const TridiagSystem& system)
{
    system.validate();
    const std::size_t n = system.size();
    std::vector<Complex> c_prime(n - 1);
    std::vector<Complex> x(n);

    Complex pivot = system.diag[0];
    if (is_singular(pivot))
        throw SingularMatrixError("zero pivot in Thomas solve at row 0");
    c_prime[0] = system.upper[0] / pivot;
    x[0] = system.rhs[0] / pivot;

    // Forward sweep
    for (std::size_t i = 1; i < n; ++i)
    {
        pivot = system.diag[i] - system.lower[i - 1] * c_prime[i - 1];
        if (is_singular(pivot))
            throw SingularMatrixError("zero pivot in Thomas solve at row " + std::to_string(i));
        if (i + 1 < n)
            c_prime[i] = system.upper[i] / pivot;
        x[i] = (system.rhs[i] - system.lower[i - 1] * x[i - 1]) / pivot;
    }

    // Back substitution
    for (std::size_t i = n - 1; i > 0; --i)
        x[i - 1] -= c_prime[i - 1] * x[i];
    return x;
}

WangPlan make_wang_plan(std::size_t size, std::size_t p)
{
    if (p < 2 || p > size / 2)
        throw ParameterError("partition solver needs 2 <= p <= J/2, got p=" + std::to_string(p)
                             + " for J=" + std::to_string(size));
    WangPlan plan;
    plan.size = size;
    plan.blocks.reserve(p);
    const std::size_t base = size / p;
    const std::size_t extra = size % p;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < p; ++k)
    {
        const std::size_t len = base + (k < extra ? 1 : 0);
        plan.blocks.emplace_back(begin, begin + len);
        begin += len;
    }
    return plan;
}

WangSolver::WangSolver(WangPlan plan)
    : plan_(std::move(plan)),
      y_(plan_.size),
      v_(plan_.size),
      w_(plan_.size),
      pivot_(plan_.size),
      coupling_(plan_.procs()),
      last_(plan_.procs()),
      singular_(plan_.procs() + 1, 0)
{
}

void WangSolver::eliminate_block(const TridiagSystem& system, std::size_t block)
{
    const auto [begin, end] = plan_.blocks[block];
    const std::size_t last = end - 1;
    singular_[block] = 0;
    coupling_[block] = last + 1 < plan_.size ? system.upper[last] : Complex{};

    // Phase 1: downward elimination of the sub-diagonal. The first row keeps
    // its coupling to the previous block's last unknown in v.
    pivot_[begin] = system.diag[begin];
    y_[begin] = system.rhs[begin];
    v_[begin] = begin > 0 ? system.lower[begin - 1] : Complex{};
    for (std::size_t i = begin + 1; i <= last; ++i)
    {
        if (is_singular(pivot_[i - 1]))
        {
            singular_[block] = 1;
            return;
        }
        const Complex m = system.lower[i - 1] / pivot_[i - 1];
        pivot_[i] = system.diag[i] - m * system.upper[i - 1];
        y_[i] = system.rhs[i] - m * y_[i - 1];
        v_[i] = -m * v_[i - 1];
    }
    if (is_singular(pivot_[last]))
    {
        singular_[block] = 1;
        return;
    }

    // Phase 2: upward sweep expressing x[i] through x[begin-1] and x[last].
    // Row last-1 couples to x[last] directly through its super-diagonal.
    w_[last] = Complex{};
    {
        const std::size_t i = last - 1;
        const Complex inv = 1.0 / pivot_[i];
        y_[i] *= inv;
        v_[i] *= inv;
        w_[i] = system.upper[i] * inv;
    }
    for (std::size_t i = last - 1; i-- > begin;)
    {
        const Complex inv = 1.0 / pivot_[i];
        const Complex c = system.upper[i];
        y_[i] = (y_[i] - c * y_[i + 1]) * inv;
        v_[i] = (v_[i] - c * v_[i + 1]) * inv;
        w_[i] = -c * w_[i + 1] * inv;
    }
}

void WangSolver::solve_reduced()
{
    const std::size_t p = plan_.procs();
    singular_[p] = 0;
    for (std::size_t k = 0; k < p; ++k)
    {
        if (singular_[k])
            return;
    }

    // Row k: v[L]*z[k-1] + (pivot[L] - c*v[F])*z[k] - c*w[F]*z[k+1] = y[L] - c*y[F]
    // with L the last row of block k, F the first row of block k+1 and c the
    // super-diagonal entry of row L.
    std::vector<Complex> sub(p), dia(p), sup(p), rhs(p);
    for (std::size_t k = 0; k < p; ++k)
    {
        const std::size_t last = plan_.blocks[k].second - 1;
        sub[k] = v_[last];
        dia[k] = pivot_[last];
        rhs[k] = y_[last];
        sup[k] = Complex{};
        if (k + 1 < p)
        {
            const std::size_t first = plan_.blocks[k + 1].first;
            const Complex c = coupling_[k];
            dia[k] -= c * v_[first];
            sup[k] = -c * w_[first];
            rhs[k] -= c * y_[first];
        }
    }

    // Thomas on the reduced system; fixed order keeps the result deterministic.
    std::vector<Complex> c_prime(p);
    Complex pivot = dia[0];
    if (is_singular(pivot))
    {
        singular_[p] = 1;
        return;
    }
    c_prime[0] = sup[0] / pivot;
    last_[0] = rhs[0] / pivot;
    for (std::size_t k = 1; k < p; ++k)
    {
        pivot = dia[k] - sub[k] * c_prime[k - 1];
        if (is_singular(pivot))
        {
            singular_[p] = 1;
            return;
        }
        c_prime[k] = sup[k] / pivot;
        last_[k] = (rhs[k] - sub[k] * last_[k - 1]) / pivot;
    }
    for (std::size_t k = p - 1; k > 0; --k)
        last_[k - 1] -= c_prime[k - 1] * last_[k];
}

void WangSolver::substitute_block(std::size_t block, std::span<Complex> x) const
{
    const auto [begin, end] = plan_.blocks[block];
    const std::size_t last = end - 1;
    const Complex prev = block > 0 ? last_[block - 1] : Complex{};
    const Complex own = last_[block];
    for (std::size_t i = begin; i < last; ++i)
        x[i] = y_[i] - v_[i] * prev - w_[i] * own;
    x[last] = own;
}

void WangSolver::check() const
{
    const std::size_t p = plan_.procs();
    for (std::size_t k = 0; k < p; ++k)
    {
        if (singular_[k])
            throw SingularMatrixError("zero pivot in partition solver block " + std::to_string(k));
    }
    if (singular_[p])
        throw SingularMatrixError("singular reduced system in partition solver");
}

void WangSolver::solve(const TridiagSystem& system, std::span<Complex> x)
{
    const std::size_t p = plan_.procs();
    for (std::size_t k = 0; k < p; ++k)
        eliminate_block(system, k);
    solve_reduced();
    check();
    for (std::size_t k = 0; k < p; ++k)
        substitute_block(k, x);
}

void WangSolver::solve(GroupContext& ctx, const TridiagSystem& system, std::span<Complex> x)
{
    const std::size_t k = ctx.rank();
    eliminate_block(system, k);
    ctx.sync();
    if (k == 0)
        solve_reduced();
    ctx.sync();
    check();
    substitute_block(k, x);
}

std::vector<Complex> solve_wang(const TridiagSystem& system, std::size_t p, WorkerGroup* group)
{
    system.validate();
    if (p == 1)
        return solve_thomas(system);
    WangSolver solver(make_wang_plan(system.size(), p));
    std::vector<Complex> x(system.size());
    if (group == nullptr)
    {
        solver.solve(system, x);
        return x;
    }
    if (group->size() != p)
        throw ParameterError("worker group size " + std::to_string(group->size())
                             + " does not match p=" + std::to_string(p));
    group->run([&](GroupContext& ctx) { solver.solve(ctx, system, x); });
    return x;
}

double wang_cost(std::size_t size, std::size_t p)
{
    if (p == 0)
        throw ParameterError("wang_cost needs p >= 1");
    return 17.0 * static_cast<double>(size) / static_cast<double>(p) + 8.0 * static_cast<double>(p);
}

std::size_t wang_cost_argmin(std::size_t size, std::size_t max_p)
{
    std::size_t best = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t p = 1; p <= max_p; ++p)
    {
        const double cost = wang_cost(size, p);
        if (cost < best_cost)
        {
            best_cost = cost;
            best = p;
        }
    }
    return best;
}

}  // namespace tlp
