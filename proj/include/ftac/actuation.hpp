#pragma once

#include <span>
#include <vector>

#include "ftac/so3.hpp"
#include "ftac/time_profile.hpp"

namespace ftac {

/// Thruster-pair bank: m unit torque directions (columns of D) and a per-pair torque limit.
class ActuatorBank {
public:
    /// Throws ConfigError unless m ≥ 3, every direction is unit within 1e-12 and rank(D) = 3.
    ActuatorBank(std::vector<Vec3> directions, double tau_max);

    /// Builds D from a 3×m row-major list.
    [[nodiscard]] static ActuatorBank from_rows(const std::vector<std::vector<double>>& rows, double tau_max);

    [[nodiscard]] std::size_t size() const { return d_.size(); }
    [[nodiscard]] const std::vector<Vec3>& directions() const { return d_; }
    [[nodiscard]] double tau_max() const { return tau_max_; }

    /// Σ wᵢ dᵢ dᵢᵀ = D·diag(w)·Dᵀ.
    [[nodiscard]] Mat3 weighted_gram(std::span<const double> w) const;

private:
    std::vector<Vec3> d_;
    double tau_max_;
};

/// Per-pair health indicators eᵢ(t), clamped to [0, 1]. Also used for the estimate Ê(t).
struct HealthProfile {
    std::vector<TimeProfile> indicators;

    [[nodiscard]] std::vector<double> at(double t) const;
    [[nodiscard]] std::size_t size() const { return indicators.size(); }

    [[nodiscard]] static HealthProfile healthy(std::size_t m);
};

/// τ_c = D·E·τ_u.
[[nodiscard]] Vec3 effective_torque(const ActuatorBank& bank, std::span<const double> health,
                                    std::span<const double> tau_u);
[[nodiscard]] Vec3 effective_torque(const ActuatorBank& bank, const HealthProfile& health,
                                    std::span<const double> tau_u, double t);

/// τ_u = Ê²Dᵀ(DÊ³Dᵀ)⁻¹u, the minimizer of τ_uᵀÊ⁻¹τ_u subject to D·Ê·τ_u = u.
/// Throws RankDeficient when DÊ³Dᵀ is singular (smallest singular value ≤ 1e-10·largest).
[[nodiscard]] std::vector<double> allocate(const ActuatorBank& bank, std::span<const double> health_estimate,
                                           const Vec3& u);

/// Componentwise clamp to [−tau_max, tau_max].
[[nodiscard]] std::vector<double> saturate(std::span<const double> tau_u, double tau_max);

/// H = D·Ẽ·Ê²·Dᵀ(D·Ê³·Dᵀ)⁻¹ with Ẽ = E − Ê.
[[nodiscard]] Mat3 h_matrix(const ActuatorBank& bank, std::span<const double> health,
                            std::span<const double> health_estimate);

/// max over the grid of ‖H(t)‖.
[[nodiscard]] double rho_E_estimate(const ActuatorBank& bank, const HealthProfile& health,
                                    const HealthProfile& estimate, std::span<const double> t_grid);

/// Throws RankDeficient if rank(D·Ê(t)) < 3 at any grid time.
void check_full_actuation(const ActuatorBank& bank, const HealthProfile& estimate, std::span<const double> t_grid);

}  // namespace ftac
