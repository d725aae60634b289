#pragma once

#include <span>
#include <vector>

#include "ftac/actuation.hpp"
#include "ftac/budget.hpp"
#include "ftac/estimation.hpp"
#include "ftac/rigid_body.hpp"

namespace ftac {

struct ControllerGains {
    double k = 0.2;        // sliding-surface gain, 1/s
    Mat3 K = 0.7 * Mat3::identity();
    double epsilon = 0.01;  // boundary-layer width
    double gamma = 0.01;    // robust-term margin

    /// Throws ConfigError unless k, ε, γ > 0 and K is symmetric positive definite.
    void validate() const;
    [[nodiscard]] double lambda_min_K() const;
    [[nodiscard]] double lambda_max_K() const;
};

struct ModelEstimates {
    Mat3 J_hat;
    Vec3 tau_d_hat;
};

struct RobustCoefficients {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

/// ρ₀ = sqrt(2(1 − sqrt(1 − ρ_q²))), the ultimate bound on ‖M(q̃)‖ and ‖E(q̃)‖.
[[nodiscard]] double rho_zero(double rho_q);
/// ρ_s = ρ_w + 2ρ_qρ_v + kρ₀, the ultimate bound on ‖ŝ − s‖.
[[nodiscard]] double rho_sliding(const UncertaintyBudget& budget, double k);

/// Coefficients of the bound ‖τ_r‖ ≤ a₃‖s‖ + a₂‖q_e‖² + a₁‖q_e‖ + a₀.
[[nodiscard]] RobustCoefficients robust_coefficients(const UncertaintyBudget& budget, double k);

struct EstimatedErrors {
    UnitQuaternion q_hat_e;
    Vec3 omega_hat_e;
    Vec3 omega_hat_bar_d;
    Vec3 s_hat;
};

/// q̂_e = q_d⁻¹⊗q̂, ω̂_e = ω̂ − R(q̂_e)ω_d, ŝ = ω̂_e + k·q̂_e,vec.
[[nodiscard]] EstimatedErrors estimated_errors(const ObserverOutput& obs, const DesiredState& desired, double k);

/// ψ̂ and ψ̂_d: the ψ terms evaluated with Ĵ and the estimated errors.
[[nodiscard]] PsiTerms feedforward_terms(const Mat3& J_hat, const EstimatedErrors& est, const DesiredState& desired,
                                         double k);

/// Boundary-layer robust term: magnitude a₁(‖q̂_e,vec‖ + γ) + a₀ along −ŝ/‖ŝ‖ outside the layer,
/// scaled linearly by ‖ŝ‖/ε inside it.
[[nodiscard]] Vec3 robust_term(const Vec3& s_hat, const UnitQuaternion& q_hat_e, const RobustCoefficients& a,
                               double gamma, double epsilon);

/// u = −Kŝ + u_s + ψ̂_d − ψ̂ − τ̂_d.
[[nodiscard]] Vec3 virtual_control(const Vec3& s_hat, const Mat3& K, const Vec3& u_s, const Vec3& psi_hat,
                                   const Vec3& psi_hat_d, const Vec3& tau_d_hat);

struct GainConditionReport {
    double lambda_min_K = 0.0;
    double threshold = 0.0;  // a₃ + ρ_E(k‖Ĵ‖/2 + λ_max(K))
    double margin = 0.0;     // λ_min(K) − threshold
    bool lyapunov_ok = false;
    double rho_s = 0.0;
    double epsilon_margin = 0.0;  // ε − ρ_s
    bool boundary_ok = false;
    [[nodiscard]] bool passed() const { return lyapunov_ok && boundary_ok; }
};

[[nodiscard]] GainConditionReport check_gain_conditions(const ControllerGains& gains, const RobustCoefficients& a,
                                                        const UncertaintyBudget& budget);

struct ControlDiagnostics {
    EstimatedErrors errors;
    Vec3 u_s;
    bool outside_layer = false;
};

struct ControlOutput {
    std::vector<double> tau_u;  // saturated per-pair command
    Vec3 u;                     // virtual control
    ControlDiagnostics diagnostics;
};

/// Full pipeline: estimated errors → feedforward → robust term → virtual control → allocation → saturation.
/// Propagates RankDeficient from the allocation.
[[nodiscard]] ControlOutput control_step(const ObserverOutput& obs, const DesiredState& desired,
                                         const ControllerGains& gains, const ModelEstimates& model,
                                         const RobustCoefficients& a, const ActuatorBank& bank,
                                         std::span<const double> health_estimate);

/// τ_r = ψ − ψ̂ + ψ̂_d − ψ_d + τ_d − τ̂_d, evaluable only when the truth is known.
[[nodiscard]] Vec3 residual_uncertainty(const Mat3& J, const TrackingError& truth, const ModelEstimates& model,
                                        const EstimatedErrors& est, const DesiredState& desired, double k,
                                        const Vec3& tau_d);

}  // namespace ftac
