#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace tlp {

class GroupContext;
class WorkerGroup;

using Complex = std::complex<double>;

/// Complex tridiagonal system of size J. Row i reads
///   lower[i-1]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i].
struct TridiagSystem
{
    std::vector<Complex> lower;  // J-1 entries, sub-diagonal of rows 1..J-1
    std::vector<Complex> diag;   // J entries
    std::vector<Complex> upper;  // J-1 entries, super-diagonal of rows 0..J-2
    std::vector<Complex> rhs;    // J entries

    TridiagSystem() = default;
    explicit TridiagSystem(std::size_t size);

    std::size_t size() const noexcept { return diag.size(); }

    /// Throws ParameterError when band lengths are inconsistent or size < 2.
    void validate() const;

    /// Computes A*x.
    std::vector<Complex> multiply(std::span<const Complex> x) const;
};

/// Sequential Thomas algorithm. Throws SingularMatrixError on a pivot with
/// magnitude below 1e-300.
std::vector<Complex> solve_thomas(const TridiagSystem& system);

/// Contiguous row ranges [begin, end) used by the partition solver; block
/// sizes differ by at most one and each holds at least two rows.
struct WangPlan
{
    std::size_t size = 0;
    std::vector<std::pair<std::size_t, std::size_t>> blocks;

    std::size_t procs() const noexcept { return blocks.size(); }
};

/// Requires 2 <= p <= J/2; throws ParameterError otherwise.
WangPlan make_wang_plan(std::size_t size, std::size_t p);

/// Partition (Wang) solver state for one system size and block count.
///
/// Each block first eliminates its sub-diagonal downward, then sweeps upward
/// so that every unknown except the block's last one is written as
///
///     x[i] = y[i] - v[i] * x[begin-1] - w[i] * x[last]
///
/// The forward-reduced last row of block k, with the first unknown of block
/// k+1 substituted, couples only the last unknowns of blocks k-1, k and k+1.
/// Those p equations form a tridiagonal system solved by Thomas on rank 0;
/// the blocks then back-substitute independently.
///
/// The per-block phases touch disjoint rows, so running them on a worker
/// group or inline produces bit-identical results.
class WangSolver
{
public:
    explicit WangSolver(WangPlan plan);

    const WangPlan& plan() const noexcept { return plan_; }

    /// Phases 1 and 2 for one block. Records a singular pivot instead of
    /// throwing so that group workers stay in step.
    void eliminate_block(const TridiagSystem& system, std::size_t block);
    /// Phase 3: build and solve the reduced coupling system.
    void solve_reduced();
    /// Phase 4: recover all unknowns of one block into `x`.
    void substitute_block(std::size_t block, std::span<Complex> x) const;

    /// Throws SingularMatrixError if any phase hit a singular pivot.
    void check() const;

    /// Runs all phases inline on the calling thread.
    void solve(const TridiagSystem& system, std::span<Complex> x);

    /// Runs the phases of one worker of a group whose size equals procs().
    /// Synchronizes twice: after elimination and after the reduced solve.
    void solve(GroupContext& ctx, const TridiagSystem& system, std::span<Complex> x);

private:
    WangPlan plan_;
    std::vector<Complex> y_, v_, w_, pivot_;
    std::vector<Complex> coupling_;  // super-diagonal entry of each block's last row
    std::vector<Complex> last_;      // reduced solution: last unknown of each block
    std::vector<char> singular_;     // per block, plus one slot for the reduced system
};

/// Partition solver with p blocks. p = 1 delegates to solve_thomas. When
/// `group` is given its size must equal p and the blocks run concurrently.
std::vector<Complex> solve_wang(const TridiagSystem& system, std::size_t p, WorkerGroup* group = nullptr);

/// Abstract operation count 17*J/p + 8*p of the partition solver; the
/// communication term is zero in-process and excluded.
double wang_cost(std::size_t size, std::size_t p);

/// Integer p in [1, max_p] minimizing wang_cost.
std::size_t wang_cost_argmin(std::size_t size, std::size_t max_p);

}  // namespace tlp
