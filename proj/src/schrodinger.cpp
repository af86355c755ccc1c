#include "tlp/schrodinger.hpp"

#include "tlp/error.hpp"
#include "tlp/worker_pool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

namespace tlp {

namespace {

const Complex kI{0.0, 1.0};
const Complex kRotation = std::polar(1.0, -std::numbers::pi / 4.0);  // e^{-i pi/4}

/// Closed-form field at one time level with the t-dependent factors hoisted.
class ExactLevel
{
public:
    ExactLevel(const PdeProblem& problem, double t) : kind_(problem.solution), t_(t)
    {
        if (kind_ == SolutionKind::gaussian)
        {
            const Complex z{4.0 * t, -1.0};
            scale_ = kRotation / std::sqrt(z);
            inv_ = 1.0 / z;
        }
        else
        {
            scale_ = 1.0 / std::sqrt(1.0 + kI * t / shape_.alpha);
            inv_ = 1.0 / (4.0 * (shape_.alpha + kI * t));
        }
    }

    Complex operator()(double x) const
    {
        if (kind_ == SolutionKind::gaussian)
            return scale_ * std::exp((kI * x * x - 6.0 * x - 36.0 * t_) * inv_);
        const double shift = x - shape_.x0 - 2.0 * shape_.k * t_;
        return scale_ * std::exp(kI * shape_.k * (x - shape_.x0 - shape_.k * t_) - shift * shift * inv_);
    }

private:
    SolutionKind kind_;
    double t_;
    WavepacketShape shape_{};
    Complex scale_;
    Complex inv_;
};

/// Boundary-row coefficients shared by both ends.
struct BoundaryCoefficients
{
    std::array<double, AbcParams::terms> decay{};  // alpha_k of the trapezoidal update
    std::array<double, AbcParams::terms> gain{};   // beta_k
    Complex self;                                  // multiplier of the new boundary value

    BoundaryCoefficients(const AbcParams& abc, double tau)
    {
        double total = 0.0;
        for (double a : abc.a)
            total += a;
        double implicit = 0.0;
        for (std::size_t k = 0; k < AbcParams::terms; ++k)
        {
            const double denom = 1.0 + 0.5 * abc.d[k] * tau;
            decay[k] = (1.0 - 0.5 * abc.d[k] * tau) / denom;
            gain[k] = 0.5 * tau / denom;
            implicit += abc.a[k + 1] * abc.d[k] * gain[k];
        }
        self = kRotation * (total - implicit);
    }

    Complex known(const AbcParams& abc, const std::array<Complex, AbcParams::terms>& phi, Complex previous) const
    {
        Complex sum{};
        for (std::size_t k = 0; k < AbcParams::terms; ++k)
            sum += abc.a[k + 1] * abc.d[k] * (decay[k] * phi[k] + gain[k] * previous);
        return kRotation * sum;
    }
};

/// Fills rows [begin, end) of the step system. Boundary rows are handled when
/// they fall in the range; they only read the previous level and the
/// auxiliary variables, never other rows of `sys`.
void fill_rows(TridiagSystem& sys, std::size_t begin, std::size_t end, std::span<const Complex> prev,
               std::size_t step, const PdeState& state, const PdeProblem& problem, const AbcParams& abc, BoundaryMode mode,
               const BoundaryCoefficients& bc)
{
    const std::size_t n = problem.intervals;  // last node index
    const double h = problem.h();
    const double tau = problem.tau();
    const double off = 0.5 / (h * h);
    const Complex dia{-1.0 / (h * h), 1.0 / tau};
    const Complex lead = kI / tau;
    const auto interior_rhs = [&](std::size_t j) {
        return lead * prev[j] - (prev[j + 1] - 2.0 * prev[j] + prev[j - 1]) * off;
    };

    for (std::size_t j = std::max<std::size_t>(begin, 1); j < std::min(end, n); ++j)
    {
        sys.lower[j - 1] = off;
        sys.diag[j] = dia;
        sys.upper[j] = off;
        sys.rhs[j] = interior_rhs(j);
    }

    const double t_next = static_cast<double>(step + 1) * tau;
    if (begin == 0)
    {
        if (mode == BoundaryMode::exact_dirichlet)
        {
            sys.diag[0] = 1.0;
            sys.upper[0] = 0.0;
            sys.rhs[0] = problem.exact(problem.left, t_next);
        }
        else
        {
            // (3U0 - 4U1 + U2)/(2h) + self*U0 = known; U2 eliminated with row 1.
            const double c1 = -2.0 / h;
            const double c2 = 0.5 / h;
            const double m = c2 / off;
            sys.diag[0] = 1.5 / h + bc.self - m * off;
            sys.upper[0] = c1 - m * dia;
            sys.rhs[0] = bc.known(abc, state.phi_left, prev[0]) - m * interior_rhs(1);
        }
    }
    if (end == n + 1)
    {
        if (mode == BoundaryMode::exact_dirichlet)
        {
            sys.diag[n] = 1.0;
            sys.lower[n - 1] = 0.0;
            sys.rhs[n] = problem.exact(problem.right, t_next);
        }
        else
        {
            const double c1 = -2.0 / h;
            const double c2 = 0.5 / h;
            const double m = c2 / off;
            sys.diag[n] = 1.5 / h + bc.self - m * off;
            sys.lower[n - 1] = c1 - m * dia;
            sys.rhs[n] = bc.known(abc, state.phi_right, prev[n]) - m * interior_rhs(n - 1);
        }
    }
}

void update_phi(std::array<Complex, AbcParams::terms>& phi, const BoundaryCoefficients& bc, Complex next,
                Complex previous)
{
    for (std::size_t k = 0; k < AbcParams::terms; ++k)
        phi[k] = bc.decay[k] * phi[k] + bc.gain[k] * (next + previous);
}

double level_error(const PdeProblem& problem, const ExactLevel& exact, std::span<const Complex> u, std::size_t begin,
                   std::size_t end)
{
    double worst = 0.0;
    for (std::size_t j = begin; j < end; ++j)
    {
        const double e = std::abs(u[j] - exact(problem.x(j)));
        // NaN must not be swallowed by max.
        if (!(e <= worst))
            worst = e;
    }
    return worst;
}

Snapshot take_snapshot(std::span<const Complex> u, std::size_t step, double t)
{
    Snapshot s;
    s.step = step;
    s.t = t;
    s.magnitude.reserve(u.size());
    for (const auto& z : u)
        s.magnitude.push_back(std::abs(z));
    return s;
}

double combine(double a, double b) { return (a >= b || std::isnan(a)) ? a : b; }

}  // namespace

Complex exact_gaussian(double x, double t)
{
    const Complex z{4.0 * t, -1.0};
    return kRotation / std::sqrt(z) * std::exp((kI * x * x - 6.0 * x - 36.0 * t) / z);
}

Complex exact_wavepacket(double x, double t, const WavepacketShape& shape)
{
    const double shift = x - shape.x0 - 2.0 * shape.k * t;
    return 1.0 / std::sqrt(1.0 + kI * t / shape.alpha)
           * std::exp(kI * shape.k * (x - shape.x0 - shape.k * t) - shift * shift / (4.0 * (shape.alpha + kI * t)));
}

Complex PdeProblem::exact(double x, double t) const
{
    return solution == SolutionKind::gaussian ? exact_gaussian(x, t) : exact_wavepacket(x, t);
}

void PdeProblem::validate() const
{
    if (!(right > left))
        throw ParameterError("problem '" + name + "' has an empty domain");
    if (!(horizon > 0.0))
        throw ParameterError("problem '" + name + "' has a non-positive horizon");
    if (intervals < 2 || steps < 1)
        throw ParameterError("problem '" + name + "' needs at least 2 intervals and 1 step");
}

PdeProblem scaled(const PdeProblem& problem, double scale)
{
    if (!(scale > 0.0 && scale <= 1.0))
        throw ParameterError("grid scale must lie in (0, 1]");
    PdeProblem out = problem;
    out.intervals = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(problem.intervals * scale)));
    out.steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(problem.steps * scale)));
    return out;
}

std::vector<PdeProblem> benchmark_problems(double scale)
{
    std::vector<PdeProblem> base = {
        {"gaussian-5", SolutionKind::gaussian, -5.0, 5.0, 0.8, 8000, 4000},
        {"wavepacket-1.5", SolutionKind::wavepacket, 0.0, 1.5, 0.04, 12000, 4000},
        {"gaussian-10", SolutionKind::gaussian, -10.0, 10.0, 2.0, 16000, 10000},
        {"wavepacket-2", SolutionKind::wavepacket, 0.0, 2.0, 0.08, 16000, 8000},
    };
    for (auto& p : base)
        p = scaled(p, scale);
    return base;
}

std::vector<PdeProblem> timing_benchmark(int which, double scale)
{
    static constexpr std::size_t sizes[3][4][2] = {
        {{8000, 40000}, {4000, 20000}, {2000, 20000}, {2000, 10000}},
        {{8000, 20000}, {4000, 20000}, {4000, 10000}, {2000, 10000}},
        {{8000, 10000}, {2000, 20000}, {2000, 10000}, {1000, 20000}},
    };
    if (which < 1 || which > 3)
        throw ParameterError("timing benchmark must be 1, 2 or 3");
    std::vector<PdeProblem> problems = benchmark_problems(1.0);
    for (std::size_t m = 0; m < problems.size(); ++m)
    {
        problems[m].intervals = sizes[which - 1][m][0];
        problems[m].steps = sizes[which - 1][m][1];
        problems[m] = scaled(problems[m], scale);
    }
    return problems;
}

std::vector<double> AbcParams::to_vector() const
{
    std::vector<double> v(a.begin(), a.end());
    v.insert(v.end(), d.begin(), d.end());
    return v;
}

AbcParams AbcParams::from_vector(std::span<const double> v)
{
    if (v.size() != dimension)
        throw ParameterError("boundary parameters need exactly 7 values, got " + std::to_string(v.size()));
    AbcParams p;
    std::copy(v.begin(), v.begin() + terms + 1, p.a.begin());
    std::copy(v.begin() + terms + 1, v.end(), p.d.begin());
    return p;
}

PdeState initial_state(const PdeProblem& problem, bool zero_data)
{
    problem.validate();
    PdeState s;
    s.u.resize(problem.intervals + 1);
    if (!zero_data)
    {
        const ExactLevel exact(problem, 0.0);
        for (std::size_t j = 0; j < s.u.size(); ++j)
            s.u[j] = exact(problem.x(j));
    }
    return s;
}

TridiagSystem build_step_system(const PdeState& state, const PdeProblem& problem, const AbcParams& abc,
                                BoundaryMode mode)
{
    problem.validate();
    if (state.u.size() != problem.intervals + 1)
        throw ParameterError("state size does not match the problem grid");
    TridiagSystem sys(problem.intervals + 1);
    const BoundaryCoefficients bc(abc, problem.tau());
    fill_rows(sys, 0, sys.size(), state.u, state.step, state, problem, abc, mode, bc);
    return sys;
}

void advance_boundary_state(PdeState& state, std::span<const Complex> next_u, const AbcParams& abc, double tau)
{
    const BoundaryCoefficients bc(abc, tau);
    update_phi(state.phi_left, bc, next_u.front(), state.u.front());
    update_phi(state.phi_right, bc, next_u.back(), state.u.back());
}

IntegrateResult integrate(const PdeProblem& problem, const AbcParams& abc, std::size_t procs, WorkerGroup* group,
                          const IntegrateOptions& options)
{
    problem.validate();
    if (procs == 0)
        throw ParameterError("integrate needs at least one process");
    const std::size_t size = problem.intervals + 1;
    const double tau = problem.tau();
    const BoundaryCoefficients bc(abc, tau);

    IntegrateResult result;
    PdeState state = initial_state(problem, options.zero_initial_data);
    result.max_error = level_error(problem, ExactLevel(problem, 0.0), state.u, 0, size);
    if (options.snapshot_stride > 0)
        result.snapshots.push_back(take_snapshot(state.u, 0, 0.0));

    TridiagSystem sys(size);
    std::vector<Complex> next(size);
    const auto fail = [](std::size_t step, const std::exception& e) {
        return SingularMatrixError("time step " + std::to_string(step) + ": " + e.what());
    };

    if (procs == 1 || group == nullptr)
    {
        std::optional<WangSolver> wang;
        if (procs > 1)
            wang.emplace(make_wang_plan(size, procs));
        for (std::size_t n = 1; n <= problem.steps; ++n)
        {
            fill_rows(sys, 0, size, state.u, n - 1, state, problem, abc, options.boundary, bc);
            try
            {
                if (wang)
                    wang->solve(sys, next);
                else
                    next = solve_thomas(sys);
            }
            catch (const SingularMatrixError& e)
            {
                throw fail(n, e);
            }
            update_phi(state.phi_left, bc, next.front(), state.u.front());
            update_phi(state.phi_right, bc, next.back(), state.u.back());
            std::swap(state.u, next);
            state.step = n;
            const double t = static_cast<double>(n) * tau;
            result.max_error = combine(result.max_error, level_error(problem, ExactLevel(problem, t), state.u, 0, size));
            if (options.snapshot_stride > 0 && n % options.snapshot_stride == 0)
                result.snapshots.push_back(take_snapshot(state.u, n, t));
        }
    }
    else
    {
        if (group->size() != procs)
            throw ParameterError("worker group size " + std::to_string(group->size()) + " does not match "
                                 + std::to_string(procs) + " solver blocks");
        WangSolver wang(make_wang_plan(size, procs));
        std::array<std::vector<Complex>*, 2> levels{&state.u, &next};
        std::vector<double> errors(procs, 0.0);
        std::size_t failed_step = 0;

        try
        {
            group->run([&](GroupContext& ctx) {
                const std::size_t rank = ctx.rank();
                const auto [begin, end] = wang.plan().blocks[rank];
                // Row fills and the error sweep only touch this block's nodes;
                // the previous level is read at begin-1 and end, hence the sync
                // at the end of every step.
                for (std::size_t n = 1; n <= problem.steps; ++n)
                {
                    const std::vector<Complex>& prev = *levels[(n - 1) % 2];
                    std::vector<Complex>& cur = *levels[n % 2];
                    fill_rows(sys, begin, end, prev, n - 1, state, problem, abc, options.boundary, bc);
                    wang.eliminate_block(sys, rank);
                    ctx.sync();
                    if (rank == 0)
                        wang.solve_reduced();
                    ctx.sync();
                    try
                    {
                        wang.check();
                    }
                    catch (...)
                    {
                        if (rank == 0)
                            failed_step = n;
                        throw;
                    }
                    wang.substitute_block(rank, cur);
                    const double t = static_cast<double>(n) * tau;
                    errors[rank] = combine(errors[rank], level_error(problem, ExactLevel(problem, t), cur, begin, end));
                    if (rank == 0)
                        update_phi(state.phi_left, bc, cur.front(), prev.front());
                    if (rank + 1 == procs)
                        update_phi(state.phi_right, bc, cur.back(), prev.back());
                    ctx.sync();
                    if (rank == 0 && options.snapshot_stride > 0 && n % options.snapshot_stride == 0)
                        result.snapshots.push_back(take_snapshot(cur, n, t));
                }
            });
        }
        catch (const SingularMatrixError& e)
        {
            throw fail(failed_step, e);
        }
        if (problem.steps % 2 == 1)
            std::swap(state.u, next);
        state.step = problem.steps;
        for (double e : errors)
            result.max_error = combine(result.max_error, e);
    }

    result.steps = problem.steps;
    result.final_state = std::move(state);
    return result;
}

double objective(const AbcParams& abc, std::span<const PdeProblem> problems, std::span<const std::size_t> procs)
{
    if (problems.empty())
        throw ParameterError("objective needs at least one problem");
    if (!procs.empty() && procs.size() != problems.size())
        throw ParameterError("objective: one process count per problem expected");
    double worst = 0.0;
    for (std::size_t m = 0; m < problems.size(); ++m)
    {
        double v = std::numeric_limits<double>::infinity();
        try
        {
            v = integrate(problems[m], abc, procs.empty() ? 1 : procs[m]).max_error;
        }
        catch (const SingularMatrixError&)
        {
        }
        if (!std::isfinite(v))
            return std::numeric_limits<double>::infinity();
        worst = std::max(worst, v);
    }
    return worst;
}

void write_snapshots_csv(std::ostream& out, const PdeProblem& problem, std::span<const Snapshot> snapshots)
{
    out << "step,t,j,x,abs_u\n";
    for (const auto& s : snapshots)
    {
        for (std::size_t j = 0; j < s.magnitude.size(); ++j)
            out << s.step << ',' << s.t << ',' << j << ',' << problem.x(j) << ',' << s.magnitude[j] << '\n';
    }
}

}  // namespace tlp
