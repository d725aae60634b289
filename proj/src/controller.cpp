#include "ftac/controller.hpp"

#include <cmath>

#include "ftac/errors.hpp"

namespace ftac {

void ControllerGains::validate() const {
    if (!(k > 0.0)) throw ConfigError("gain k must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("boundary layer epsilon must be positive");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = r + 1; c < 3; ++c)
            if (std::abs(K(r, c) - K(c, r)) > 1e-12) throw ConfigError("gain matrix K must be symmetric");
    if (!(lambda_min_K() > 0.0)) throw ConfigError("gain matrix K must be positive definite");
}

double ControllerGains::lambda_min_K() const { return symmetric_eigenvalues(K)[0]; }
double ControllerGains::lambda_max_K() const { return symmetric_eigenvalues(K)[2]; }

double rho_zero(double rho_q) {
    // 1 − sqrt(1 − x²) rewritten as x²/(1 + sqrt(1 − x²)) to avoid cancellation.
    const double x2 = rho_q * rho_q;
    return std::sqrt(2.0 * x2 / (1.0 + std::sqrt(1.0 - x2)));
}

double rho_sliding(const UncertaintyBudget& b, double k) {
    return b.rho_w + 2.0 * b.rho_q * b.rho_v + k * rho_zero(b.rho_q);
}

RobustCoefficients robust_coefficients(const UncertaintyBudget& b, double k) {
    const double r0 = rho_zero(b.rho_q);
    const double jn = b.J_hat_norm;
    RobustCoefficients a;
    a.a3 = 0.5 * k * (r0 * jn + b.rho_J);
    a.a2 = 0.5 * k * k * b.rho_J;
    a.a1 = k * k * r0 * jn + k * a.a3 + 3.0 * k * b.rho_v * (b.rho_J + 2.0 * b.rho_q * jn);
    a.a0 = 0.5 * k * k * r0 * r0 * jn + 0.5 * k * (b.rho_w + 2.0 * b.rho_q * b.rho_v) * jn +
           3.0 * k * b.rho_v * r0 * jn + 4.0 * b.rho_q * b.rho_v * b.rho_v * jn + 2.0 * b.rho_q * b.rho_a * jn +
           b.rho_J * b.rho_v * b.rho_v + b.rho_J * b.rho_a + b.rho_d;
    return a;
}

EstimatedErrors estimated_errors(const ObserverOutput& obs, const DesiredState& desired, double k) {
    EstimatedErrors e;
    e.q_hat_e = desired.qd.inverse() * obs.q_hat;
    e.omega_hat_bar_d = rotation_matrix(e.q_hat_e) * desired.omega_d;
    e.omega_hat_e = obs.omega_hat - e.omega_hat_bar_d;
    e.s_hat = e.omega_hat_e + k * e.q_hat_e.vec();
    return e;
}

PsiTerms feedforward_terms(const Mat3& J_hat, const EstimatedErrors& est, const DesiredState& desired, double k) {
    return psi_terms(J_hat, est.q_hat_e, est.omega_hat_e, est.omega_hat_bar_d, desired.omega_d_dot, k);
}

Vec3 robust_term(const Vec3& s_hat, const UnitQuaternion& q_hat_e, const RobustCoefficients& a, double gamma,
                 double epsilon) {
    const double magnitude = a.a1 * (norm(q_hat_e.vec()) + gamma) + a.a0;
    const double n = norm(s_hat);
    if (n >= epsilon) return (-magnitude / n) * s_hat;
    return (-magnitude / epsilon) * s_hat;
}

Vec3 virtual_control(const Vec3& s_hat, const Mat3& K, const Vec3& u_s, const Vec3& psi_hat, const Vec3& psi_hat_d,
                     const Vec3& tau_d_hat) {
    return -(K * s_hat) + u_s + psi_hat_d - psi_hat - tau_d_hat;
}

GainConditionReport check_gain_conditions(const ControllerGains& gains, const RobustCoefficients& a,
                                          const UncertaintyBudget& budget) {
    GainConditionReport r;
    r.lambda_min_K = gains.lambda_min_K();
    r.threshold = a.a3 + budget.rho_E * (0.5 * gains.k * budget.J_hat_norm + gains.lambda_max_K());
    r.margin = r.lambda_min_K - r.threshold;
    r.lyapunov_ok = r.margin > 0.0;
    r.rho_s = rho_sliding(budget, gains.k);
    r.epsilon_margin = gains.epsilon - r.rho_s;
    r.boundary_ok = r.epsilon_margin > 0.0;
    return r;
}

ControlOutput control_step(const ObserverOutput& obs, const DesiredState& desired, const ControllerGains& gains,
                           const ModelEstimates& model, const RobustCoefficients& a, const ActuatorBank& bank,
                           std::span<const double> health_estimate) {
    ControlOutput out;
    auto& diag = out.diagnostics;
    diag.errors = estimated_errors(obs, desired, gains.k);
    const PsiTerms ff = feedforward_terms(model.J_hat, diag.errors, desired, gains.k);
    diag.u_s = robust_term(diag.errors.s_hat, diag.errors.q_hat_e, a, gains.gamma, gains.epsilon);
    diag.outside_layer = norm(diag.errors.s_hat) >= gains.epsilon;
    out.u = virtual_control(diag.errors.s_hat, gains.K, diag.u_s, ff.psi, ff.psi_d, model.tau_d_hat);
    out.tau_u = saturate(allocate(bank, health_estimate, out.u), bank.tau_max());
    return out;
}

Vec3 residual_uncertainty(const Mat3& J, const TrackingError& truth, const ModelEstimates& model,
                          const EstimatedErrors& est, const DesiredState& desired, double k, const Vec3& tau_d) {
    const PsiTerms p = psi_terms(J, truth, desired, k);
    const PsiTerms ph = feedforward_terms(model.J_hat, est, desired, k);
    return p.psi - ph.psi + ph.psi_d - p.psi_d + tau_d - model.tau_d_hat;
}

}  // namespace ftac
