#pragma once

#include "ftac/estimation.hpp"

namespace ftac {

/// Constants bounding every uncertainty the controller must reject.
struct UncertaintyBudget {
    double rho_q = 0.0;      // ‖q̃ᵥ‖ ultimate bound
    double rho_w = 0.0;      // ‖ω̃‖ ultimate bound, rad/s
    double rho_J = 0.0;      // ‖Ĵ − J‖
    double rho_d = 0.0;      // ‖τ̂_d − τ_d‖, N·m
    double rho_d_hat = 0.0;  // ‖τ̂_d‖, N·m
    double lambda_l = 1.0;   // lower bound on λ_min(J)
    double lambda_r = 1.0;   // upper bound on λ_max(J)
    double rho_v = 0.0;      // ‖ω_d‖, rad/s
    double rho_a = 0.0;      // ‖ω̇_d‖, rad/s²
    double rho_E = 0.0;      // ‖H‖
    double J_hat_norm = 0.0;  // ‖Ĵ‖ (spectral)

    /// Throws BudgetViolation on any out-of-range entry.
    void validate() const;

    [[nodiscard]] Assumption1Budget observer() const { return {rho_q, rho_w}; }
};

}  // namespace ftac
