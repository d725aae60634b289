#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ftac/budget.hpp"
#include "ftac/controller.hpp"

namespace ftac {

/// Coefficients of the fault-mismatch bound ‖H·u‖ ≤ ρ_E(b₃‖s‖ + b₂‖q_e‖² + b₁‖q_e‖ + b₀).
struct BCoefficients {
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
};

[[nodiscard]] BCoefficients b_coefficients(const UncertaintyBudget& budget, const ControllerGains& gains,
                                           const RobustCoefficients& a);

struct BoundCoefficients {
    double rho_0 = 0.0;
    double rho_s = 0.0;
    RobustCoefficients a;
    BCoefficients b;
    double kappa = 0.0;        // λ_min(K) − a₃ − ρ_E b₃
    double kappa_prime = 0.0;  // κ + (a₁γ + a₀)/ε
};

/// Derives every coefficient from the budget and gains.
[[nodiscard]] BoundCoefficients bound_coefficients(const UncertaintyBudget& budget, const ControllerGains& gains);
/// Same, with externally fixed robust coefficients (e.g. rounded published values).
[[nodiscard]] BoundCoefficients bound_coefficients(const UncertaintyBudget& budget, const ControllerGains& gains,
                                                   const RobustCoefficients& a);

/// The comparison functions φ₁ (outside the boundary layer), φ₂ (inside) and φ̄ = max(φ₁, φ₂).
/// The second argument is the vanishing slack δ; predictions evaluate at y = 0.
class PhiFunctions {
public:
    PhiFunctions(const BoundCoefficients& c, const ControllerGains& gains, const UncertaintyBudget& budget);

    [[nodiscard]] double phi1(double x, double y = 0.0) const;
    [[nodiscard]] double phi2(double x, double y = 0.0) const;
    [[nodiscard]] double phi_bar(double x, double y = 0.0) const;

private:
    BoundCoefficients c_;
    double lambda_max_K_;
    double epsilon_;
    double gamma_;
    double rho_E_;
};

struct BoundStep {
    double s = 0.0;
    double q = 0.0;
};

struct BoundTrace {
    std::vector<BoundStep> loop1;
    std::vector<BoundStep> loop2;
    std::size_t switch_index = 0;  // 1-based overall iteration at which loop 2 began; 0 if never
    double s_inf = 0.0;
    double q_inf = 0.0;
    double s_inf_prime = std::numeric_limits<double>::quiet_NaN();
    double q_inf_prime = std::numeric_limits<double>::quiet_NaN();
    bool loop2_active = false;

    [[nodiscard]] std::size_t total_iterations() const { return loop1.size() + loop2.size(); }
    [[nodiscard]] double s_final() const { return loop2_active ? s_inf_prime : s_inf; }
    [[nodiscard]] double q_final() const { return loop2_active ? q_inf_prime : q_inf; }
    /// Lemma-1 conversion with Λ = kI: ‖ω_e‖ ≤ 2·s̄.
    [[nodiscard]] double omega_bound() const { return 2.0 * s_final(); }
};

inline constexpr std::size_t kMaxBoundIterations = 100000;

/// s̄ᵢ = sqrt(λ_r/λ_l)·φ̄(q̄ᵢ₋₁, 0)/κ, q̄ᵢ = s̄ᵢ/k from q̄₀ = 1 until |Δq̄| ≤ η.
/// Throws GainConditionViolated if κ ≤ 0, NotContractive if q̄₁ ≥ 1.
[[nodiscard]] BoundTrace loop1_iterate(const BoundCoefficients& c, const ControllerGains& gains,
                                       const UncertaintyBudget& budget, double eta);

/// Refinement inside the boundary layer with κ′ and φ₂, seeded by q̄₀′ = q̄∞.
/// Throws NotActivated unless s̄∞ + ρ_s < ε.
[[nodiscard]] BoundTrace loop2_iterate(BoundTrace trace, const BoundCoefficients& c, const ControllerGains& gains,
                                       const UncertaintyBudget& budget, double eta);

struct PredictOptions {
    double eta = 1e-6;
    bool loop2 = true;
    std::optional<RobustCoefficients> stated_coefficients;  // overrides the derived a₀..a₃
};

struct Prediction {
    BoundCoefficients coefficients;
    GainConditionReport gains_report;
    BoundTrace trace;
    double eta = 1e-6;
    double q_bound = 0.0;      // ‖q_e,vec‖
    double omega_bound = 0.0;  // ‖ω_e‖, rad/s
    double theta_bound = 0.0;  // principal angle, rad
};

/// Both loops end to end. Throws GainConditionViolated when the gain conditions fail.
[[nodiscard]] Prediction predict(const UncertaintyBudget& budget, const ControllerGains& gains,
                                 const PredictOptions& options = {});

/// Cartesian grid of gains; K = K_scale·I₃.
struct GainGrid {
    std::vector<double> k;
    std::vector<double> K_scale;
    std::vector<double> epsilon;
    std::vector<double> gamma;
};

struct SweepRow {
    ControllerGains gains;
    double K_scale = 0.0;
    bool passed = false;
    std::string failure;
    double q_bound = std::numeric_limits<double>::quiet_NaN();
    double omega_bound = std::numeric_limits<double>::quiet_NaN();
    double theta_bound = std::numeric_limits<double>::quiet_NaN();
    std::size_t loop1_iterations = 0;
    std::size_t loop2_iterations = 0;
};

/// Evaluates predict() over the grid (concurrently); rows sorted by q-bound, failing rows last.
[[nodiscard]] std::vector<SweepRow> gain_sweep(const UncertaintyBudget& budget, const GainGrid& grid,
                                               double eta = 1e-6);

}  // namespace ftac
