#pragma once

#include <cstddef>
#include <functional>
#include <utility>

#include "ftac/so3.hpp"

namespace ftac {

/// Symmetric positive-definite inertia matrix (kg·m²) with cached inverse.
class InertiaMatrix {
public:
    /// Throws Error if asymmetric beyond 1e-12, SingularInertia if not positive definite
    /// or not invertible at tolerance 1e-12.
    explicit InertiaMatrix(const Mat3& j);

    [[nodiscard]] const Mat3& matrix() const { return j_; }
    [[nodiscard]] const Mat3& inverse() const { return inv_; }
    [[nodiscard]] double lambda_min() const { return eig_[0]; }
    [[nodiscard]] double lambda_max() const { return eig_[2]; }

private:
    Mat3 j_;
    Mat3 inv_;
    std::array<double, 3> eig_{};
};

struct SpacecraftState {
    UnitQuaternion q;  // body relative to inertial
    Vec3 omega;        // rad/s, body frame
};

struct DesiredState {
    UnitQuaternion qd;
    Vec3 omega_d;
    Vec3 omega_d_dot;
};

struct TrackingError {
    UnitQuaternion qe;
    Vec3 omega_e;
    Vec3 omega_bar_d;  // R(q_e)·ω_d
    Vec3 s;            // ω_e + k·q_e,vec
};

/// q̇ = ½ [−qvᵀ; G(q)] ω, for a raw (possibly unnormalized) quaternion 4-vector.
[[nodiscard]] Vec4 attitude_kinematics(const Vec4& q, const Vec3& omega);
[[nodiscard]] inline Vec4 attitude_kinematics(const SpacecraftState& x) {
    return attitude_kinematics(x.q.as_array(), x.omega);
}

/// ω̇ = J⁻¹(−ω×Jω + τ_c + τ_d).
[[nodiscard]] Vec3 euler_dynamics(const InertiaMatrix& j, const Vec3& omega, const Vec3& tau_c, const Vec3& tau_d);

[[nodiscard]] TrackingError tracking_errors(const SpacecraftState& x, const DesiredState& d, double k);

/// Ξ(J, ω_e, ω̄_d) = (J(ω_e + ω̄_d))^× − ω̄_d^× J − J ω̄_d^×.
[[nodiscard]] Mat3 xi_matrix(const Mat3& j, const Vec3& omega_e, const Vec3& omega_bar_d);

struct PsiTerms {
    Vec3 psi;
    Vec3 psi_d;
};

/// ψ = −½k² qv^× J qv + ½k G(q_e) J ω_e − k Ξ(J, 0, ω̄_d) qv
/// ψ_d = ω̄_d^× J ω̄_d + J R(q_e) ω̇_d
/// Shared by the truth model and the controller's estimated feedforward.
[[nodiscard]] PsiTerms psi_terms(const Mat3& j, const UnitQuaternion& qe, const Vec3& omega_e,
                                 const Vec3& omega_bar_d, const Vec3& omega_d_dot, double k);
[[nodiscard]] PsiTerms psi_terms(const Mat3& j, const TrackingError& err, const DesiredState& d, double k);

/// J·ṡ = Ξ s + ½k[qv^× J + J qv^×] s + ψ − ψ_d + τ_c + τ_d.
[[nodiscard]] Vec3 j_s_dot(const Mat3& j, const TrackingError& err, const DesiredState& d, double k,
                           const Vec3& tau_c, const Vec3& tau_d);
/// ṡ = J⁻¹ · j_s_dot(...).
[[nodiscard]] Vec3 s_dot_rhs(const InertiaMatrix& j, const TrackingError& err, const DesiredState& d, double k,
                             const Vec3& tau_c, const Vec3& tau_d);

using TorqueFn = std::function<Vec3(double t, const SpacecraftState& x)>;
using VectorFn = std::function<Vec3(double t)>;

/// Classical RK4 on (q, ω) with one renormalization of q per step.
/// Throws NonFiniteState (tagged with `step`) if the result is not finite.
[[nodiscard]] SpacecraftState rk4_step(const InertiaMatrix& j, const SpacecraftState& x, double t, double dt,
                                       const TorqueFn& control, const TorqueFn& disturbance, std::size_t step = 0);

/// RK4 on the kinematics alone, with ω given as a time function.
[[nodiscard]] UnitQuaternion propagate_attitude(const UnitQuaternion& q, const VectorFn& omega, double t, double dt);

/// Desired motion: ω_d(t), ω̇_d(t) and q_d(0); q_d is integrated from ω_d with the body kinematics.
struct DesiredTrajectory {
    UnitQuaternion qd0;
    VectorFn omega_d;
    VectorFn omega_d_dot;
};

class DesiredPropagator {
public:
    explicit DesiredPropagator(DesiredTrajectory traj, double t0 = 0.0)
        : traj_(std::move(traj)), t_(t0), qd_(traj_.qd0) {}

    [[nodiscard]] DesiredState current() const { return {qd_, traj_.omega_d(t_), traj_.omega_d_dot(t_)}; }
    [[nodiscard]] double time() const { return t_; }
    void advance(double dt);

private:
    DesiredTrajectory traj_;
    double t_;
    UnitQuaternion qd_;
};

}  // namespace ftac
