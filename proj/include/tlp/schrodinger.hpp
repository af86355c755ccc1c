#pragma once

#include "tlp/tridiag.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tlp {

class WorkerGroup;

/// Free Gaussian beam exp(-x^2 - 6ix) at t = 0, principal square root.
Complex exact_gaussian(double x, double t);

struct WavepacketShape
{
    double k = 100.0;
    double alpha = 1.0 / 120.0;
    double x0 = 0.8;
};

/// Moving wave packet with wavenumber k, width alpha, starting at x0.
Complex exact_wavepacket(double x, double t, const WavepacketShape& shape = {});

enum class SolutionKind
{
    gaussian,
    wavepacket
};

/// i u_t + u_xx = 0 on [left, right] x [0, horizon] with a closed-form
/// solution, discretized by `intervals` space steps and `steps` time steps.
struct PdeProblem
{
    std::string name;
    SolutionKind solution = SolutionKind::gaussian;
    double left = 0.0;
    double right = 1.0;
    double horizon = 1.0;
    std::size_t intervals = 2;
    std::size_t steps = 1;

    double h() const { return (right - left) / static_cast<double>(intervals); }
    double tau() const { return horizon / static_cast<double>(steps); }
    double x(std::size_t j) const { return left + static_cast<double>(j) * h(); }
    Complex exact(double x, double t) const;

    /// Throws ParameterError on an empty domain, horizon or grid.
    void validate() const;
};

/// The four benchmark problems with their production grids
/// (8000x4000, 12000x4000, 16000x10000, 16000x8000), both grid axes
/// multiplied by `scale`.
std::vector<PdeProblem> benchmark_problems(double scale = 1.0);

/// Timing benchmark 1, 2 or 3: the same four problems with the grid sizes
/// used for the load-balancing experiments, multiplied by `scale`.
std::vector<PdeProblem> timing_benchmark(int which, double scale = 1.0);

/// Shrinks both grid axes by `scale` in (0, 1], keeping at least 2 x 1.
PdeProblem scaled(const PdeProblem& problem, double scale);

/// Rational boundary-operator coefficients a_0..a_3 and poles d_1..d_3.
struct AbcParams
{
    static constexpr std::size_t terms = 3;
    static constexpr std::size_t dimension = 2 * terms + 1;

    std::array<double, terms + 1> a{};
    std::array<double, terms> d{};

    std::vector<double> to_vector() const;
    /// Throws ParameterError unless `v` has exactly 7 entries.
    static AbcParams from_vector(std::span<const double> v);

    friend bool operator==(const AbcParams&, const AbcParams&) = default;
};

/// Grid values at the current level plus the auxiliary boundary variables.
struct PdeState
{
    std::vector<Complex> u;
    std::array<Complex, AbcParams::terms> phi_left{};
    std::array<Complex, AbcParams::terms> phi_right{};
    std::size_t step = 0;
};

/// Level-0 state: exact initial data (or zeros), auxiliary variables zero.
PdeState initial_state(const PdeProblem& problem, bool zero_data = false);

enum class BoundaryMode
{
    absorbing,        // rational artificial boundary condition
    exact_dirichlet,  // exact solution imposed at both ends (test mode)
};

/// Crank-Nicolson system whose solution is the grid at level state.step + 1.
/// Interior row j (1 <= j < J):
///   U[j-1]/(2h^2) + (i/tau - 1/h^2) U[j] + U[j+1]/(2h^2)
///     = (i/tau) V[j] - (V[j+1] - 2V[j] + V[j-1])/(2h^2)
/// with V the previous level. Boundary rows impose the rational condition on
/// the outward derivative with a one-sided second-order difference whose
/// third point is eliminated against the neighbouring interior row.
TridiagSystem build_step_system(const PdeState& state, const PdeProblem& problem, const AbcParams& abc,
                                BoundaryMode mode = BoundaryMode::absorbing);

/// Trapezoidal update of d(phi_k)/dt + d_k phi_k = u at both boundaries.
void advance_boundary_state(PdeState& state, std::span<const Complex> next_u, const AbcParams& abc, double tau);

struct IntegrateOptions
{
    BoundaryMode boundary = BoundaryMode::absorbing;
    bool zero_initial_data = false;
    /// Record |U| every `snapshot_stride` steps (0 disables).
    std::size_t snapshot_stride = 0;
};

struct Snapshot
{
    std::size_t step = 0;
    double t = 0.0;
    std::vector<double> magnitude;
};

struct IntegrateResult
{
    /// max over all grid nodes and levels of |u(x_j, t^n) - U_j^n|
    double max_error = 0.0;
    std::size_t steps = 0;
    std::vector<Snapshot> snapshots;
    PdeState final_state;
};

/// Marches all time steps. `procs` == 1 solves each step with Thomas, larger
/// values with the partition solver on `procs` blocks: inline when `group` is
/// null, otherwise on the group (whose size must equal `procs`). Inline and
/// grouped runs are bit-identical. Solver failures are rethrown as
/// SingularMatrixError carrying the step index.
IntegrateResult integrate(const PdeProblem& problem, const AbcParams& abc, std::size_t procs = 1,
                          WorkerGroup* group = nullptr, const IntegrateOptions& options = {});

/// max over problems of the integration error; +infinity when any run is not
/// finite. `procs` (optional) gives the solver blocks per problem.
double objective(const AbcParams& abc, std::span<const PdeProblem> problems, std::span<const std::size_t> procs = {});

void write_snapshots_csv(std::ostream& out, const PdeProblem& problem, std::span<const Snapshot> snapshots);

}  // namespace tlp
