#pragma once

#include <cstddef>
#include <span>

#include "qsocp/ipm.hpp"
#include "qsocp/plan.hpp"
#include "qsocp/problem.hpp"

namespace qsocp {

/// A solver bound to one problem family. Every buffer is sized from the plan
/// at construction; load_instance and solve do not allocate.
class SolverInstance {
public:
    SolverInstance(const CustomizationPlan& plan, const Settings& settings = {});

    /// Copies the data of `problem` into the family-shaped storage. The
    /// problem's patterns may be subsets of the family's (missing entries
    /// are zero). Throws FamilyMismatch for a structural nonzero outside the
    /// family or for different dimensions or cone.
    void load_instance(const ProblemData& problem);

    /// Direct access to the stored data in family CCS order, for updates
    /// addressed through ParsingInfo indices.
    std::span<double> values(MatrixId id) noexcept;
    std::span<double> q() noexcept { return problem_.q; }
    std::span<double> b() noexcept { return problem_.b; }
    std::span<double> h() noexcept { return problem_.h; }

    const SolveResult& solve(const IterationCallback* callback = nullptr) noexcept;

    const SolveResult& result() const noexcept { return result_; }
    const ProblemData& problem() const noexcept { return problem_; }
    const Settings& settings() const noexcept { return settings_; }
    const IpmWorkspace& workspace() const noexcept { return ws_; }

    /// Sum of the capacities of every owned buffer, in bytes. Constant over
    /// the lifetime of the instance.
    std::size_t workspace_bytes() const noexcept;

private:
    Settings settings_;
    ProblemData problem_;
    IpmWorkspace ws_;
    IterateState state_;
    SolveResult result_;
};

SolverInstance instantiate(const CustomizationPlan& plan, const Settings& settings = {});

}  // namespace qsocp
