#include "ftac/rigid_body.hpp"

#include <cmath>

#include "ftac/errors.hpp"

namespace ftac {

InertiaMatrix::InertiaMatrix(const Mat3& j) : j_(j) {
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = r + 1; c < 3; ++c)
            if (std::abs(j(r, c) - j(c, r)) > 1e-12) throw Error("inertia matrix must be symmetric");
    for (double v : j.data)
        if (!std::isfinite(v)) throw Error("inertia matrix must be finite");
    eig_ = symmetric_eigenvalues(j);
    if (!(eig_[0] > 0.0)) throw SingularInertia("inertia matrix must be positive definite");
    auto inv = ftac::inverse(j, 1e-12);
    if (!inv) throw SingularInertia("inertia matrix is not invertible");
    inv_ = *inv;
}

Vec4 attitude_kinematics(const Vec4& q, const Vec3& w) {
    const Vec3 v{q[1], q[2], q[3]};
    const Vec3 vec = 0.5 * (q[0] * w + cross(v, w));
    return {-0.5 * dot(v, w), vec.x, vec.y, vec.z};
}

Vec3 euler_dynamics(const InertiaMatrix& j, const Vec3& omega, const Vec3& tau_c, const Vec3& tau_d) {
    const Vec3 h = j.matrix() * omega;
    return j.inverse() * (-cross(omega, h) + tau_c + tau_d);
}

TrackingError tracking_errors(const SpacecraftState& x, const DesiredState& d, double k) {
    TrackingError e;
    e.qe = d.qd.inverse() * x.q;
    e.omega_bar_d = rotation_matrix(e.qe) * d.omega_d;
    e.omega_e = x.omega - e.omega_bar_d;
    e.s = e.omega_e + k * e.qe.vec();
    return e;
}

Mat3 xi_matrix(const Mat3& j, const Vec3& omega_e, const Vec3& omega_bar_d) {
    const Mat3 wd = skew(omega_bar_d);
    return skew(j * (omega_e + omega_bar_d)) - wd * j - j * wd;
}

PsiTerms psi_terms(const Mat3& j, const UnitQuaternion& qe, const Vec3& omega_e, const Vec3& omega_bar_d,
                   const Vec3& omega_d_dot, double k) {
    const Vec3& qv = qe.vec();
    PsiTerms out;
    out.psi = (-0.5 * k * k) * (skew(qv) * (j * qv)) + (0.5 * k) * (g_matrix(qe) * (j * omega_e)) -
              k * (xi_matrix(j, {}, omega_bar_d) * qv);
    out.psi_d = cross(omega_bar_d, j * omega_bar_d) + j * (rotation_matrix(qe) * omega_d_dot);
    return out;
}

PsiTerms psi_terms(const Mat3& j, const TrackingError& err, const DesiredState& d, double k) {
    return psi_terms(j, err.qe, err.omega_e, err.omega_bar_d, d.omega_d_dot, k);
}

Vec3 j_s_dot(const Mat3& j, const TrackingError& err, const DesiredState& d, double k, const Vec3& tau_c,
             const Vec3& tau_d) {
    const Mat3 qx = skew(err.qe.vec());
    const PsiTerms p = psi_terms(j, err, d, k);
    return xi_matrix(j, err.omega_e, err.omega_bar_d) * err.s + (0.5 * k) * ((qx * j + j * qx) * err.s) + p.psi -
           p.psi_d + tau_c + tau_d;
}

Vec3 s_dot_rhs(const InertiaMatrix& j, const TrackingError& err, const DesiredState& d, double k, const Vec3& tau_c,
               const Vec3& tau_d) {
    return j.inverse() * j_s_dot(j.matrix(), err, d, k, tau_c, tau_d);
}

namespace {

struct Raw {
    Vec4 q;
    Vec3 w;
};

Raw axpy(const Raw& x, double h, const Raw& d) {
    Raw r = x;
    for (std::size_t i = 0; i < 4; ++i) r.q[i] += h * d.q[i];
    r.w += h * d.w;
    return r;
}

Vec4 axpy4(const Vec4& x, double h, const Vec4& d) {
    Vec4 r = x;
    for (std::size_t i = 0; i < 4; ++i) r[i] += h * d[i];
    return r;
}

bool finite4(const Vec4& q) {
    return std::isfinite(q[0]) && std::isfinite(q[1]) && std::isfinite(q[2]) && std::isfinite(q[3]);
}

}  // namespace

SpacecraftState rk4_step(const InertiaMatrix& j, const SpacecraftState& x, double t, double dt,
                         const TorqueFn& control, const TorqueFn& disturbance, std::size_t step) {
    // Stage states carry an unnormalized quaternion; the torque callbacks see a normalized copy.
    auto deriv = [&](double ts, const Raw& s) {
        double n2 = 0.0;
        for (double c : s.q) n2 += c * c;
        if (!(n2 > 0.0) || !std::isfinite(n2) || !is_finite(s.w))
            throw NonFiniteState("non-finite state during integration", step);
        const SpacecraftState view{UnitQuaternion(s.q), s.w};
        return Raw{attitude_kinematics(s.q, s.w),
                   euler_dynamics(j, s.w, control(ts, view), disturbance(ts, view))};
    };

    const Raw x0{x.q.as_array(), x.omega};
    const Raw k1 = deriv(t, x0);
    const Raw k2 = deriv(t + 0.5 * dt, axpy(x0, 0.5 * dt, k1));
    const Raw k3 = deriv(t + 0.5 * dt, axpy(x0, 0.5 * dt, k2));
    const Raw k4 = deriv(t + dt, axpy(x0, dt, k3));

    Raw next = x0;
    for (std::size_t i = 0; i < 4; ++i)
        next.q[i] += dt / 6.0 * (k1.q[i] + 2.0 * k2.q[i] + 2.0 * k3.q[i] + k4.q[i]);
    next.w += (dt / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);

    if (!finite4(next.q) || !is_finite(next.w)) throw NonFiniteState("non-finite state after integration", step);
    return {UnitQuaternion(next.q), next.w};
}

UnitQuaternion propagate_attitude(const UnitQuaternion& q, const VectorFn& omega, double t, double dt) {
    const Vec4 q0 = q.as_array();
    const Vec4 k1 = attitude_kinematics(q0, omega(t));
    const Vec4 k2 = attitude_kinematics(axpy4(q0, 0.5 * dt, k1), omega(t + 0.5 * dt));
    const Vec4 k3 = attitude_kinematics(axpy4(q0, 0.5 * dt, k2), omega(t + 0.5 * dt));
    const Vec4 k4 = attitude_kinematics(axpy4(q0, dt, k3), omega(t + dt));
    Vec4 next = q0;
    for (std::size_t i = 0; i < 4; ++i) next[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return UnitQuaternion(next);
}

void DesiredPropagator::advance(double dt) {
    qd_ = propagate_attitude(qd_, traj_.omega_d, t_, dt);
    t_ += dt;
}

}  // namespace ftac
