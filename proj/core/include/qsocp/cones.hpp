#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace qsocp {

/// Ordered cone product: `nn_count` nonnegative orthants followed by
/// second-order cones of the listed dimensions.
struct ConeSpec {
    std::size_t nn_count = 0;
    std::vector<std::size_t> soc_dims;

    /// Total dimension m = l + sum(d_i).
    std::size_t dim() const noexcept;

    /// Number of constituent cones, l + n_soc. This is the degree that
    /// enters the duality measure.
    std::size_t block_count() const noexcept { return nn_count + soc_dims.size(); }

    std::size_t soc_count() const noexcept { return soc_dims.size(); }

    /// Throws InvalidProblem when a second-order cone has dimension < 2 or
    /// the total dimension is zero.
    void validate() const;

    friend bool operator==(const ConeSpec&, const ConeSpec&) = default;
};

using ConeVector = std::vector<double>;

inline constexpr double kInfiniteStep = std::numeric_limits<double>::infinity();

ConeVector identity_element(const ConeSpec& cone);

void jordan_product(std::span<const double> u, std::span<const double> v,
                    std::span<double> out, const ConeSpec& cone);
ConeVector jordan_product(std::span<const double> u, std::span<const double> v,
                          const ConeSpec& cone);

/// Returns v with lambda o v = w. Throws ConeBoundaryError when lambda is not
/// in the interior of the cone.
void jordan_inverse_op(std::span<const double> lambda, std::span<const double> w,
                       std::span<double> out, const ConeSpec& cone);
ConeVector jordan_inverse_op(std::span<const double> lambda, std::span<const double> w,
                             const ConeSpec& cone);
/// No size or interiority checks; for the solver loop.
void jordan_inverse_op_unchecked(std::span<const double> lambda, std::span<const double> w,
                                 std::span<double> out, const ConeSpec& cone) noexcept;

/// Per-block determinant: x_i for orthant entries, x0^2 - |x1|^2 for SOC blocks.
std::vector<double> cone_det(std::span<const double> x, const ConeSpec& cone);

bool in_interior(std::span<const double> x, const ConeSpec& cone);

/// sup{a >= 0 : x + a*dx in int K}; returns kInfiniteStep when unbounded.
/// Throws ConeBoundaryError if x itself is not interior.
double step_to_boundary(std::span<const double> x, std::span<const double> dx,
                        const ConeSpec& cone);

/// Same as step_to_boundary but without the interiority check; used inside
/// the solver loop where the iterate is known to be interior.
double step_to_boundary_unchecked(std::span<const double> x, std::span<const double> dx,
                                  const ConeSpec& cone) noexcept;

/// inf{a : v + a*e in int K}. Used to shift initial points into the cone.
double shift_to_interior(std::span<const double> v, const ConeSpec& cone) noexcept;

/// Terms of the sparse expansion of W^T W for one second-order cone.
/// The expanded block is eta^2 * [[Dbar, v, u], [v^T, 1, 0], [u^T, 0, -1]]
/// with Dbar = diag(a, 1, ..., 1), u = (u0, u1*wbar1), v = (0, v1*wbar1).
struct SocExpansion {
    double a = 0.5;
    double u0 = 0.0;
    double u1 = 0.0;
    double v1 = 0.0;
};

/// wbar must satisfy wbar0 > 0 and wbar0^2 - |wbar1|^2 = 1.
SocExpansion soc_sparse_expansion(std::span<const double> wbar);

struct SocScaling {
    std::size_t offset = 0;  // first index of the block inside the cone vector
    std::size_t dim = 0;
    double eta = 1.0;
    SocExpansion expansion;
};

/// Nesterov-Todd scaling for every block of a cone, plus the scaled point
/// lambda = W^{-T} s = W z. Constructed as the identity scaling; update()
/// recomputes it in place without touching the heap.
class NTScaling {
public:
    explicit NTScaling(const ConeSpec& cone);

    /// Returns false (leaving the object in an unspecified but valid state)
    /// when s or z is not strictly interior or the expansion fails.
    bool update(std::span<const double> s, std::span<const double> z) noexcept;

    /// Resets to W = I, lambda = e.
    void set_identity() noexcept;

    const ConeSpec& cone() const noexcept { return cone_; }
    std::span<const double> nn_w() const noexcept { return nn_w_; }
    std::span<const SocScaling> soc() const noexcept { return soc_; }
    /// Normalized scaling point of SOC block k.
    std::span<const double> wbar(std::size_t k) const noexcept;
    std::span<const double> lambda() const noexcept { return lambda_; }

private:
    ConeSpec cone_;
    std::vector<double> nn_w_;
    std::vector<SocScaling> soc_;
    std::vector<double> wbar_;  // SOC blocks back to back
    std::vector<double> lambda_;
};

/// Value-returning form. Throws ScalingFailure on boundary or exterior input.
NTScaling nt_scaling_update(std::span<const double> s, std::span<const double> z,
                            const ConeSpec& cone);

// Matrix-free application of the scaling. W is symmetric, so apply_W_transpose
// is the same map; it is provided for readability at call sites.
void apply_W(const NTScaling& w, std::span<const double> v, std::span<double> out) noexcept;
void apply_W_transpose(const NTScaling& w, std::span<const double> v,
                       std::span<double> out) noexcept;
void apply_W_inverse_transpose(const NTScaling& w, std::span<const double> v,
                               std::span<double> out) noexcept;

ConeVector apply_W(const NTScaling& w, std::span<const double> v);
ConeVector apply_W_transpose(const NTScaling& w, std::span<const double> v);
ConeVector apply_W_inverse_transpose(const NTScaling& w, std::span<const double> v);

}  // namespace qsocp
