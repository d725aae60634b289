#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "ftac/rigid_body.hpp"
#include "ftac/so3.hpp"

namespace ftac {

using Rng = std::mt19937_64;

struct SensorSample {
    UnitQuaternion qm;  // measured attitude
    Vec3 omega_m;       // gyro, rad/s
};

struct GyroState {
    Vec3 b;  // bias, rad/s
};

struct ObserverOutput {
    UnitQuaternion q_hat;
    Vec3 omega_hat;
};

/// Ultimate bounds on ‖q̃ᵥ‖ and ‖ω̃‖ required of any observer.
struct Assumption1Budget {
    double rho_q = 0.0;
    double rho_w = 0.0;

    /// Throws BudgetViolation unless 0 ≤ ρ_q < 1 and ρ_w ≥ 0.
    void validate() const;
};

struct SensorNoise {
    double attitude_sigma = 0.0;  // rad, std of the principal error angle
    double gyro_sigma = 0.0;      // rad/s
    double bias_walk = 0.0;       // rad/s^{3/2}
};

/// Measurement model: q_m = q ⊗ q̃_m⁻¹ with q̃_m = [cos(θ/2), e·sin(θ/2)], θ ~ N(0, σ²), e uniform on S²;
/// ω_m = ω + b + η_u. The bias then takes one random-walk step of variance σ_v²·dt.
[[nodiscard]] std::pair<SensorSample, GyroState> sensor_sample(const SpacecraftState& truth, const GyroState& gyro,
                                                               const SensorNoise& noise, Rng& rng, double dt);

/// Uniformly distributed unit vector.
[[nodiscard]] Vec3 random_unit_vector(Rng& rng);

/// Deterministic smooth error injection for the synthetic observer. Each error has constant norm
/// (its amplitude) and a direction sweeping the sphere at the given rate.
struct SyntheticErrorProfile {
    double q_amplitude = 0.0;  // ‖q̃ᵥ‖
    double w_amplitude = 0.0;  // ‖ω̃‖, rad/s
    double q_frequency = 0.01;
    double w_frequency = 0.013;
    double q_phase = 0.0;
    double w_phase = 1.0;

    [[nodiscard]] UnitQuaternion q_error(double t) const;
    [[nodiscard]] Vec3 w_error(double t) const;
};

/// q̂ = q ⊗ q̃⁻¹, ω̂ = ω + ω̃. Throws BudgetViolation if the profile exceeds the budget.
[[nodiscard]] ObserverOutput synthetic_observer(const SpacecraftState& truth, const Assumption1Budget& budget,
                                                const SyntheticErrorProfile& profile, double t);

struct EstimationError {
    UnitQuaternion q_tilde;  // q̂⁻¹ ⊗ q, scalar part ≥ 0
    Vec3 w_tilde;            // ω̂ − ω
};

[[nodiscard]] EstimationError estimation_error(const SpacecraftState& truth, const ObserverOutput& obs);

struct BiasObserverState {
    UnitQuaternion q_hat;
    Vec3 b_hat;
};

struct BiasObserverGains {
    double k_o = 1.0;
    double k_b = 0.1;
};

struct BiasObserverResult {
    BiasObserverState next;
    ObserverOutput output;  // estimate at the sample time
};

/// Multiplicative complementary observer with gyro-bias estimation.
[[nodiscard]] BiasObserverResult bias_observer_step(const BiasObserverState& prev, const SensorSample& sample,
                                                    const BiasObserverGains& gains, double dt);

struct EstimationErrorSample {
    double qtilde_norm = 0.0;
    double wtilde_norm = 0.0;
};

/// Index of the first sample of the final `fraction` of n samples. Throws EmptyTail if the window is empty.
[[nodiscard]] std::size_t tail_start_index(std::size_t n, double fraction);

/// Tail maxima of ‖q̃ᵥ‖ and ‖ω̃‖ across all traces.
[[nodiscard]] Assumption1Budget estimate_assumption1_bounds(std::span<const std::vector<EstimationErrorSample>> traces,
                                                            double tail_fraction);

}  // namespace ftac
