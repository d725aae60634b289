#include "ftac/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ftac/errors.hpp"

namespace ftac {

namespace {

/// Inverse of a symmetric positive semidefinite Gram matrix, or RankDeficient.
Mat3 checked_gram_inverse(const Mat3& g) {
    const auto ev = symmetric_eigenvalues(g);
    if (!(ev[0] > 1e-10 * ev[2])) throw RankDeficient("D·Ê³·Dᵀ is rank deficient; the bank is not fully actuated");
    auto inv = inverse(g, 0.0);
    if (!inv) throw RankDeficient("D·Ê³·Dᵀ is singular");
    return *inv;
}

void require_size(const ActuatorBank& bank, std::size_t n, const char* what) {
    if (n != bank.size())
        throw ConfigError(std::string(what) + " has " + std::to_string(n) + " entries, bank has " +
                          std::to_string(bank.size()));
}

}  // namespace

ActuatorBank::ActuatorBank(std::vector<Vec3> directions, double tau_max) : d_(std::move(directions)), tau_max_(tau_max) {
    if (d_.size() < 3) throw ConfigError("actuator bank needs at least 3 pairs");
    if (!(tau_max_ > 0.0)) throw ConfigError("tau_max must be positive");
    for (const auto& d : d_)
        if (std::abs(norm(d) - 1.0) > 1e-12) throw ConfigError("actuator directions must be unit vectors");
    const std::vector<double> ones(d_.size(), 1.0);
    const auto ev = symmetric_eigenvalues(weighted_gram(ones));
    if (!(ev[0] > 1e-10 * ev[2])) throw ConfigError("actuator distribution matrix must have rank 3");
}

ActuatorBank ActuatorBank::from_rows(const std::vector<std::vector<double>>& rows, double tau_max) {
    if (rows.size() != 3) throw ConfigError("distribution matrix must have 3 rows");
    const std::size_t m = rows[0].size();
    if (rows[1].size() != m || rows[2].size() != m) throw ConfigError("distribution matrix rows differ in length");
    std::vector<Vec3> cols(m);
    for (std::size_t i = 0; i < m; ++i) cols[i] = {rows[0][i], rows[1][i], rows[2][i]};
    return {std::move(cols), tau_max};
}

Mat3 ActuatorBank::weighted_gram(std::span<const double> w) const {
    Mat3 g{};
    for (std::size_t i = 0; i < d_.size(); ++i) g += w[i] * outer(d_[i], d_[i]);
    return g;
}

std::vector<double> HealthProfile::at(double t) const {
    std::vector<double> e(indicators.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::clamp(indicators[i].value(t), 0.0, 1.0);
    return e;
}

HealthProfile HealthProfile::healthy(std::size_t m) {
    return {std::vector<TimeProfile>(m, TimeProfile::constant(1.0))};
}

Vec3 effective_torque(const ActuatorBank& bank, std::span<const double> health, std::span<const double> tau_u) {
    require_size(bank, health.size(), "health vector");
    require_size(bank, tau_u.size(), "command vector");
    Vec3 tau{};
    for (std::size_t i = 0; i < bank.size(); ++i) tau += (health[i] * tau_u[i]) * bank.directions()[i];
    return tau;
}

Vec3 effective_torque(const ActuatorBank& bank, const HealthProfile& health, std::span<const double> tau_u, double t) {
    const auto e = health.at(t);
    return effective_torque(bank, e, tau_u);
}

std::vector<double> allocate(const ActuatorBank& bank, std::span<const double> e_hat, const Vec3& u) {
    require_size(bank, e_hat.size(), "health estimate");
    const std::size_t m = bank.size();
    std::vector<double> cube(m);
    for (std::size_t i = 0; i < m; ++i) cube[i] = e_hat[i] * e_hat[i] * e_hat[i];
    const Vec3 y = checked_gram_inverse(bank.weighted_gram(cube)) * u;
    std::vector<double> tau(m);
    for (std::size_t i = 0; i < m; ++i) tau[i] = e_hat[i] * e_hat[i] * dot(bank.directions()[i], y);
    return tau;
}

std::vector<double> saturate(std::span<const double> tau_u, double tau_max) {
    std::vector<double> out(tau_u.begin(), tau_u.end());
    for (auto& v : out) v = std::clamp(v, -tau_max, tau_max);
    return out;
}

Mat3 h_matrix(const ActuatorBank& bank, std::span<const double> e, std::span<const double> e_hat) {
    require_size(bank, e.size(), "health vector");
    require_size(bank, e_hat.size(), "health estimate");
    const std::size_t m = bank.size();
    std::vector<double> cube(m), mismatch(m);
    for (std::size_t i = 0; i < m; ++i) {
        cube[i] = e_hat[i] * e_hat[i] * e_hat[i];
        mismatch[i] = (e[i] - e_hat[i]) * e_hat[i] * e_hat[i];
    }
    return bank.weighted_gram(mismatch) * checked_gram_inverse(bank.weighted_gram(cube));
}

double rho_E_estimate(const ActuatorBank& bank, const HealthProfile& health, const HealthProfile& estimate,
                      std::span<const double> t_grid) {
    if (t_grid.empty()) throw Error("rho_E_estimate needs a nonempty time grid");
    double worst = 0.0;
    for (double t : t_grid) worst = std::max(worst, spectral_norm(h_matrix(bank, health.at(t), estimate.at(t))));
    return worst;
}

void check_full_actuation(const ActuatorBank& bank, const HealthProfile& estimate, std::span<const double> t_grid) {
    for (double t : t_grid) {
        const auto e = estimate.at(t);
        std::vector<double> sq(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) sq[i] = e[i] * e[i];
        // rank(D·Ê) = rank(D·Ê²·Dᵀ)
        const auto ev = symmetric_eigenvalues(bank.weighted_gram(sq));
        if (!(ev[0] > 1e-10 * ev[2]))
            throw RankDeficient("D·Ê(t) loses rank at t = " + std::to_string(t));
    }
}

}  // namespace ftac
