#include "qsocp/cones.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "qsocp/errors.hpp"

namespace qsocp {

namespace {

void require_size(std::span<const double> v, std::size_t m, const char* what) {
    if (v.size() != m) {
        throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(m) +
                                ", got " + std::to_string(v.size()));
    }
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double soc_det(const double* x, std::size_t d) noexcept {
    return x[0] * x[0] - dot(x + 1, x + 1, d - 1);
}

// Smallest positive root of det(x + a*dx) = 0 for one SOC block.
double soc_step(const double* x, const double* dx, std::size_t d) noexcept {
    const double qa = dx[0] * dx[0] - dot(dx + 1, dx + 1, d - 1);
    const double qb = x[0] * dx[0] - dot(x + 1, dx + 1, d - 1);
    const double qc = soc_det(x, d);

    // qa*t^2 + 2*qb*t + qc with qc > 0.
    const double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc)});
    if (scale == 0.0) return kInfiniteStep;
    if (std::abs(qa) <= 1e-15 * scale) {
        if (qb < 0.0) return -qc / (2.0 * qb);
        return kInfiniteStep;
    }
    double disc = qb * qb - qa * qc;
    if (disc < 0.0) {
        if (-disc <= 1e-14 * (qb * qb + std::abs(qa * qc))) {
            disc = 0.0;
        } else {
            return kInfiniteStep;
        }
    }
    const double root = std::sqrt(disc);
    // Cancellation-free pair of roots.
    const double qq = -(qb + std::copysign(root, qb));
    double best = kInfiniteStep;
    if (qq != 0.0) {
        const double r1 = qq / qa;
        const double r2 = qc / qq;
        if (r1 > 0.0) best = std::min(best, r1);
        if (r2 > 0.0) best = std::min(best, r2);
    } else {
        const double r = -qb / qa;
        if (r > 0.0) best = r;
    }
    return best;
}

}  // namespace

std::size_t ConeSpec::dim() const noexcept {
    std::size_t m = nn_count;
    for (std::size_t d : soc_dims) m += d;
    return m;
}

void ConeSpec::validate() const {
    for (std::size_t d : soc_dims) {
        if (d < 2) {
            throw InvalidProblem("second-order cone dimension must be at least 2, got " +
                                 std::to_string(d));
        }
    }
    if (dim() == 0) throw InvalidProblem("cone has zero total dimension");
}

ConeVector identity_element(const ConeSpec& cone) {
    ConeVector e(cone.dim(), 0.0);
    std::fill_n(e.begin(), cone.nn_count, 1.0);
    std::size_t k = cone.nn_count;
    for (std::size_t d : cone.soc_dims) {
        e[k] = 1.0;
        k += d;
    }
    return e;
}

void jordan_product(std::span<const double> u, std::span<const double> v, std::span<double> out,
                    const ConeSpec& cone) {
    const std::size_t m = cone.dim();
    require_size(u, m, "jordan_product u");
    require_size(v, m, "jordan_product v");
    require_size(out, m, "jordan_product out");
    for (std::size_t i = 0; i < cone.nn_count; ++i) out[i] = u[i] * v[i];
    std::size_t k = cone.nn_count;
    for (std::size_t d : cone.soc_dims) {
        const double u0 = u[k];
        const double v0 = v[k];
        const double head = dot(&u[k], &v[k], d);
        for (std::size_t j = 1; j < d; ++j) out[k + j] = u0 * v[k + j] + v0 * u[k + j];
        out[k] = head;
        k += d;
    }
}

ConeVector jordan_product(std::span<const double> u, std::span<const double> v,
                          const ConeSpec& cone) {
    ConeVector out(cone.dim());
    jordan_product(u, v, out, cone);
    return out;
}

void jordan_inverse_op(std::span<const double> lambda, std::span<const double> w,
                       std::span<double> out, const ConeSpec& cone) {
    const std::size_t m = cone.dim();
    require_size(lambda, m, "jordan_inverse_op lambda");
    require_size(w, m, "jordan_inverse_op w");
    require_size(out, m, "jordan_inverse_op out");
    if (!in_interior(lambda, cone)) throw ConeBoundaryError("jordan_inverse_op: lambda not interior");
    jordan_inverse_op_unchecked(lambda, w, out, cone);
}

void jordan_inverse_op_unchecked(std::span<const double> lambda, std::span<const double> w,
                                 std::span<double> out, const ConeSpec& cone) noexcept {
    for (std::size_t i = 0; i < cone.nn_count; ++i) out[i] = w[i] / lambda[i];
    std::size_t k = cone.nn_count;
    for (std::size_t d : cone.soc_dims) {
        const double u0 = lambda[k];
        const double rho = soc_det(&lambda[k], d);
        const double w0 = w[k];
        const double zeta = dot(&lambda[k + 1], &w[k + 1], d - 1);
        const double factor = (zeta / u0 - w0) / rho;
        const double head = (u0 * w0 - zeta) / rho;
        for (std::size_t j = 1; j < d; ++j) out[k + j] = factor * lambda[k + j] + w[k + j] / u0;
        out[k] = head;
        k += d;
    }
}

ConeVector jordan_inverse_op(std::span<const double> lambda, std::span<const double> w,
                             const ConeSpec& cone) {
    ConeVector out(cone.dim());
    jordan_inverse_op(lambda, w, out, cone);
    return out;
}

std::vector<double> cone_det(std::span<const double> x, const ConeSpec& cone) {
    require_size(x, cone.dim(), "cone_det");
    std::vector<double> dets;
    dets.reserve(cone.block_count());
    for (std::size_t i = 0; i < cone.nn_count; ++i) dets.push_back(x[i]);
    std::size_t k = cone.nn_count;
    for (std::size_t d : cone.soc_dims) {
        dets.push_back(soc_det(&x[k], d));
        k += d;
    }
    return dets;
}

bool in_interior(std::span<const double> x, const ConeSpec& cone) {
    require_size(x, cone.dim(), "in_interior");
    for (std::size_t i = 0; i < cone.nn_count; ++i) {
        if (!(x[i] > 0.0)) return false;
    }
    std::size_t k = cone.nn_count;
    for (std::size_t d : cone.soc_dims) {
        if (!(x[k] > 0.0) || !(soc_det(&x[k], d) > 0.0)) return false;
        k += d;
    }
    return true;
}

double step_to_boundary_unchecked(std::span<const double> x, std::span<const double> dx,
                                  const ConeSpec& cone) noexcept {
    double alpha = kInfiniteStep;
    for (std::size_t i = 0; i < cone.nn_count; ++i) {
        if (dx[i] < 0.0) alpha = std::min(alpha, -x[i] / dx[i]);
    }
    std::size_t k = cone.nn_count;
    for (std::size_t d : cone.soc_dims) {
        alpha = std::min(alpha, soc_step(&x[k], &dx[k], d));
        k += d;
    }
    return alpha;
}

double step_to_boundary(std::span<const double> x, std::span<const double> dx,
                        const ConeSpec& cone) {
    require_size(dx, cone.dim(), "step_to_boundary dx");
    if (!in_interior(x, cone)) throw ConeBoundaryError("step_to_boundary: x not interior");
    return step_to_boundary_unchecked(x, dx, cone);
}

double shift_to_interior(std::span<const double> v, const ConeSpec& cone) noexcept {
    double alpha = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cone.nn_count; ++i) alpha = std::max(alpha, -v[i]);
    std::size_t k = cone.nn_count;
    for (std::size_t d : cone.soc_dims) {
        const double tail = std::sqrt(dot(&v[k + 1], &v[k + 1], d - 1));
        alpha = std::max(alpha, tail - v[k]);
        k += d;
    }
    return alpha;
}

namespace {

enum class ExpansionStatus { Ok, BadHead, NegativeU0, NegativeV1 };

ExpansionStatus try_expansion(const double* wbar, std::size_t d, SocExpansion& out) noexcept {
    const double w0 = wbar[0];
    if (!(w0 > 0.0)) return ExpansionStatus::BadHead;
    const double r2 = dot(wbar + 1, wbar + 1, d - 1);

    const double c = 1.0 + w0 + r2 / (1.0 + w0);
    const double dbar = 1.0 + 2.0 / (1.0 + w0) + r2 / ((1.0 + w0) * (1.0 + w0));
    // With det(wbar) = 1, c = 2*w0 and dbar = 2, and the defining expression
    // 0.5*(w0^2 + r2 - c^2*r2/(1 + dbar*r2)) collapses to the form below.
    const double a = 0.5 / (1.0 + 2.0 * r2);

    double u0_sq = w0 * w0 + r2 - a;
    if (u0_sq < 0.0) {
        if (u0_sq < -1e-14) return ExpansionStatus::NegativeU0;
        u0_sq = 0.0;
    }
    if (u0_sq == 0.0) return ExpansionStatus::NegativeU0;
    double v1_sq = (c * c - dbar * u0_sq) / u0_sq;
    if (v1_sq < 0.0) {
        if (v1_sq < -1e-14) return ExpansionStatus::NegativeV1;
        v1_sq = 0.0;
    }
    out.a = a;
    out.u0 = std::sqrt(u0_sq);
    out.u1 = c / out.u0;
    out.v1 = std::sqrt(v1_sq);
    return ExpansionStatus::Ok;
}

}  // namespace

SocExpansion soc_sparse_expansion(std::span<const double> wbar) {
    if (wbar.size() < 2) throw DimensionMismatch("soc_sparse_expansion: dimension must be >= 2");
    SocExpansion e;
    switch (try_expansion(wbar.data(), wbar.size(), e)) {
        case ExpansionStatus::Ok:
            return e;
        case ExpansionStatus::BadHead:
            throw ExpansionFailure("soc_sparse_expansion: wbar0 must be positive");
        case ExpansionStatus::NegativeU0:
            throw ExpansionFailure("soc_sparse_expansion: negative u0 radicand");
        case ExpansionStatus::NegativeV1:
            throw ExpansionFailure("soc_sparse_expansion: negative v1 radicand");
    }
    return e;
}

NTScaling::NTScaling(const ConeSpec& cone)
    : cone_(cone),
      nn_w_(cone.nn_count, 1.0),
      soc_(cone.soc_count()),
      wbar_(cone.dim() - cone.nn_count, 0.0),
      lambda_(cone.dim(), 0.0) {
    std::size_t k = cone.nn_count;
    for (std::size_t i = 0; i < cone.soc_count(); ++i) {
        soc_[i].offset = k;
        soc_[i].dim = cone.soc_dims[i];
        k += cone.soc_dims[i];
    }
    set_identity();
}

void NTScaling::set_identity() noexcept {
    std::fill(nn_w_.begin(), nn_w_.end(), 1.0);
    std::fill(wbar_.begin(), wbar_.end(), 0.0);
    std::fill(lambda_.begin(), lambda_.end(), 0.0);
    std::fill_n(lambda_.begin(), cone_.nn_count, 1.0);
    const double unit[2] = {1.0, 0.0};
    const SocExpansion ident = soc_sparse_expansion(unit);
    for (SocScaling& sc : soc_) {
        wbar_[sc.offset - cone_.nn_count] = 1.0;
        lambda_[sc.offset] = 1.0;
        sc.eta = 1.0;
        sc.expansion = ident;
    }
}

std::span<const double> NTScaling::wbar(std::size_t k) const noexcept {
    const SocScaling& sc = soc_[k];
    return std::span<const double>(wbar_).subspan(sc.offset - cone_.nn_count, sc.dim);
}

bool NTScaling::update(std::span<const double> s, std::span<const double> z) noexcept {
    assert(s.size() == cone_.dim() && z.size() == cone_.dim());
    for (std::size_t i = 0; i < cone_.nn_count; ++i) {
        if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
        nn_w_[i] = std::sqrt(s[i] / z[i]);
        lambda_[i] = std::sqrt(s[i] * z[i]);
    }
    for (SocScaling& sc : soc_) {
        const std::size_t d = sc.dim;
        const double* sb = &s[sc.offset];
        const double* zb = &z[sc.offset];
        const double s_det = soc_det(sb, d);
        const double z_det = soc_det(zb, d);
        if (!(sb[0] > 0.0) || !(zb[0] > 0.0) || !(s_det > 0.0) || !(z_det > 0.0)) return false;
        const double s_norm = std::sqrt(s_det);
        const double z_norm = std::sqrt(z_det);

        // sbar^T zbar, then wbar = (sbar + J zbar) / (2 gamma).
        const double sz = dot(sb, zb, d) / (s_norm * z_norm);
        const double gamma = std::sqrt(0.5 * (1.0 + sz));
        double* w = &wbar_[sc.offset - cone_.nn_count];
        const double inv = 0.5 / gamma;
        w[0] = inv * (sb[0] / s_norm + zb[0] / z_norm);
        for (std::size_t j = 1; j < d; ++j) w[j] = inv * (sb[j] / s_norm - zb[j] / z_norm);
        if (!std::isfinite(w[0]) || !(w[0] > 0.0)) return false;

        sc.eta = std::sqrt(std::sqrt(s_det / z_det));
        if (try_expansion(w, d, sc.expansion) != ExpansionStatus::Ok) return false;

        // lambda = W z
        const double wz = dot(w + 1, zb + 1, d - 1);
        const double coef = zb[0] + wz / (1.0 + w[0]);
        double* lam = &lambda_[sc.offset];
        lam[0] = sc.eta * (w[0] * zb[0] + wz);
        for (std::size_t j = 1; j < d; ++j) lam[j] = sc.eta * (zb[j] + coef * w[j]);
    }
    return true;
}

NTScaling nt_scaling_update(std::span<const double> s, std::span<const double> z,
                            const ConeSpec& cone) {
    require_size(s, cone.dim(), "nt_scaling_update s");
    require_size(z, cone.dim(), "nt_scaling_update z");
    NTScaling w(cone);
    if (!w.update(s, z)) throw ScalingFailure("nt_scaling_update: s or z not strictly interior");
    return w;
}

void apply_W(const NTScaling& w, std::span<const double> v, std::span<double> out) noexcept {
    const ConeSpec& cone = w.cone();
    const auto nn = w.nn_w();
    for (std::size_t i = 0; i < cone.nn_count; ++i) out[i] = nn[i] * v[i];
    for (std::size_t k = 0; k < cone.soc_count(); ++k) {
        const SocScaling& sc = w.soc()[k];
        const auto wb = w.wbar(k);
        const double* vb = &v[sc.offset];
        double* ob = &out[sc.offset];
        const std::size_t d = sc.dim;
        const double wv = dot(&wb[1], vb + 1, d - 1);
        const double coef = vb[0] + wv / (1.0 + wb[0]);
        const double head = sc.eta * (wb[0] * vb[0] + wv);
        for (std::size_t j = 1; j < d; ++j) ob[j] = sc.eta * (vb[j] + coef * wb[j]);
        ob[0] = head;
    }
}

void apply_W_transpose(const NTScaling& w, std::span<const double> v,
                       std::span<double> out) noexcept {
    apply_W(w, v, out);
}

void apply_W_inverse_transpose(const NTScaling& w, std::span<const double> v,
                               std::span<double> out) noexcept {
    // W^{-1} = (1/eta) J Wbar J for a normalized scaling point.
    const ConeSpec& cone = w.cone();
    const auto nn = w.nn_w();
    for (std::size_t i = 0; i < cone.nn_count; ++i) out[i] = v[i] / nn[i];
    for (std::size_t k = 0; k < cone.soc_count(); ++k) {
        const SocScaling& sc = w.soc()[k];
        const auto wb = w.wbar(k);
        const double* vb = &v[sc.offset];
        double* ob = &out[sc.offset];
        const std::size_t d = sc.dim;
        const double wv = dot(&wb[1], vb + 1, d - 1);
        const double coef = -vb[0] + wv / (1.0 + wb[0]);
        const double inv_eta = 1.0 / sc.eta;
        const double head = inv_eta * (wb[0] * vb[0] - wv);
        for (std::size_t j = 1; j < d; ++j) ob[j] = inv_eta * (vb[j] + coef * wb[j]);
        ob[0] = head;
    }
}

ConeVector apply_W(const NTScaling& w, std::span<const double> v) {
    require_size(v, w.cone().dim(), "apply_W");
    ConeVector out(v.size());
    apply_W(w, v, out);
    return out;
}

ConeVector apply_W_transpose(const NTScaling& w, std::span<const double> v) {
    return apply_W(w, v);
}

ConeVector apply_W_inverse_transpose(const NTScaling& w, std::span<const double> v) {
    require_size(v, w.cone().dim(), "apply_W_inverse_transpose");
    ConeVector out(v.size());
    apply_W_inverse_transpose(w, v, out);
    return out;
}

}  // namespace qsocp
