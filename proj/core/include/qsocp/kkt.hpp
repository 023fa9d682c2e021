#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qsocp/ccs.hpp"
#include "qsocp/cones.hpp"
#include "qsocp/ldl.hpp"
#include "qsocp/problem.hpp"

namespace qsocp {

/// Structure of the expanded KKT matrix
///
///     [ Q   A'  G'    ]
///     [ A   0   0     ]
///     [ G   0  -W'W   ]
///
/// in which every second-order cone block of -W'W is replaced by its sparse
/// expansion with two auxiliary rows. Rows are ordered x, y, then the cone
/// blocks; each SOC block is followed directly by its two auxiliary rows.
struct KKTLayout {
    ProblemFamily family;
    std::size_t dim = 0;
    SparseCCS pattern;                     // upper triangle, zero values
    std::vector<int> signs;                // expected pivot sign per row
    std::vector<std::size_t> z_rows;       // cone coordinate -> KKT row
    std::vector<std::size_t> aux_rows;     // per SOC: v row, then u row
    std::vector<std::size_t> diag_slots;   // per KKT row
    std::vector<std::size_t> Q_slots;      // per family nonzero of Q
    std::vector<std::size_t> A_slots;
    std::vector<std::size_t> G_slots;
    // Per NNC coordinate its diagonal; per SOC block, in order: the d
    // diagonals, the d-1 v entries, the v diagonal, the d u entries, the u
    // diagonal.
    std::vector<std::size_t> scaling_slots;

    std::size_t n() const noexcept { return family.n; }
    std::size_t p() const noexcept { return family.p; }
    std::size_t m() const noexcept { return family.m; }
    /// Length of a compact direction (x, y, z) without auxiliary rows.
    std::size_t compact_dim() const noexcept { return family.n + family.p + family.m; }

    friend bool operator==(const KKTLayout&, const KKTLayout&) = default;
};

KKTLayout kkt_layout(const ProblemFamily& family);

/// Regularized KKT values for one layout. Static regularization adds
/// +delta_s to the first n diagonal entries and -delta_s to every other one.
class KKTSystem {
public:
    KKTSystem() = default;
    KKTSystem(KKTLayout layout, double delta_s);

    /// Data values in the CCS order of the family patterns.
    void set_data(std::span<const double> Q_values, std::span<const double> A_values,
                  std::span<const double> G_values) noexcept;

    /// Writes only the scaling slots.
    void update_scaling(const NTScaling& scaling) noexcept;

    const KKTLayout& layout() const noexcept { return layout_; }
    const SparseCCS& matrix() const noexcept { return matrix_; }
    std::span<const int> expected_signs() const noexcept { return layout_.signs; }
    std::size_t dim() const noexcept { return layout_.dim; }
    double delta_s() const noexcept { return delta_s_; }

    /// Diagonal that, added to matrix(), removes the static regularization.
    std::span<const double> unregularize_shift() const noexcept { return shift_; }

private:
    KKTLayout layout_;
    SparseCCS matrix_;
    std::vector<double> shift_;
    double delta_s_ = 0.0;
};

/// Assembles the KKT matrix of `problem` with W = I. Throws FamilyMismatch
/// when the problem's patterns differ from the layout's family.
KKTSystem build_kkt(const ProblemData& problem, const KKTLayout& layout, double delta_s = 1e-7);

struct LinearSolverSettings {
    double delta_s = 1e-7;
    double eps_d = 1e-13;
    double delta_d = 1e-7;
    double eps_ir = 1e-13;
    std::size_t max_ir_passes = 10;
};

/// Factorization and refined solves of one KKTSystem. Every buffer is sized
/// in the constructor.
class KKTSolver {
public:
    KKTSolver() = default;
    KKTSolver(KKTLayout layout, SymbolicFactor symbolic, const LinearSolverSettings& settings);

    KKTSystem& system() noexcept { return system_; }
    const KKTSystem& system() const noexcept { return system_; }
    const SymbolicFactor& symbolic() const noexcept { return symbolic_; }
    const NumericFactor& numeric() const noexcept { return numeric_; }
    const LinearSolverSettings& settings() const noexcept { return settings_; }

    /// Returns false if a pivot is not finite.
    bool factor() noexcept;

    /// Solves K xi = rhs where both vectors are compact (x, y, z); auxiliary
    /// rows get a zero right-hand side and are dropped from the solution.
    RefinementResult solve(std::span<const double> rhs, std::span<double> sol) noexcept;

private:
    KKTSystem system_;
    SymbolicFactor symbolic_;
    NumericFactor numeric_;
    RefinementWorkspace refine_;
    LinearSolverSettings settings_;
    std::vector<double> rhs_full_;
    std::vector<double> sol_full_;
};

/// numeric_ldl on the current values with the solver's eps_d and delta_d.
NumericFactor factor(const KKTSystem& kkt, const SymbolicFactor& sym, double eps_d = 1e-13,
                     double delta_d = 1e-7);

/// b1 = [-q; b; h]
void build_rhs1(const ProblemData& problem, std::span<double> out) noexcept;

/// b2 = [-d_x; d_y; d_z - W (lambda \ d_s)]. `work` needs length m.
void build_rhs2(const NTScaling& scaling, std::span<const double> d_x,
                std::span<const double> d_y, std::span<const double> d_z,
                std::span<const double> d_s, std::span<double> out,
                std::span<double> work) noexcept;

struct SolvePairResult {
    RefinementResult first;
    RefinementResult second;
};

/// Solves K xi1 = b1 and K xi2 = b2 with one factorization.
SolvePairResult solve_pair(KKTSolver& solver, const ProblemData& problem,
                           const NTScaling& scaling, std::span<const double> d_x,
                           std::span<const double> d_y, std::span<const double> d_z,
                           std::span<const double> d_s, std::span<double> xi1,
                           std::span<double> xi2);

/// Step in tau that makes xi2 + dtau * xi1 satisfy the tau and kappa rows.
/// The denominator (1/tau^2) x'Qx + kappa/tau - (q + (2/tau) Qx)'xi1_x
/// - b'xi1_y - h'xi1_z is used directly; when cancellation drives it to a
/// nonpositive value it is re-evaluated through the identity K xi1 = b1 as
/// (x/tau - xi1_x)'Q(x/tau - xi1_x) + |W xi1_z|^2 + kappa/tau. `work` needs
/// length n + m. Returns NaN when the denominator is not positive.
double compute_dtau(const ProblemData& problem, const NTScaling& scaling,
                    std::span<const double> x, double tau, double kappa,
                    std::span<const double> xi1, std::span<const double> xi2, double d_tau,
                    double d_kappa, std::span<double> work) noexcept;
double compute_dtau(const ProblemData& problem, const NTScaling& scaling,
                    std::span<const double> x, double tau, double kappa,
                    std::span<const double> xi1, std::span<const double> xi2, double d_tau,
                    double d_kappa);

/// ds = W (lambda \ d_s - W dz); returns dkappa = (d_kappa - kappa dtau) / tau.
/// `work` needs length 2m.
double recover_ds_dkappa(const NTScaling& scaling, std::span<const double> d_s,
                         std::span<const double> dz, double d_kappa, double dtau, double kappa,
                         double tau, std::span<double> ds, std::span<double> work) noexcept;

}  // namespace qsocp
