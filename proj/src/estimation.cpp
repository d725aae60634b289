#include "ftac/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "ftac/errors.hpp"

namespace ftac {

void Assumption1Budget::validate() const {
    if (!(rho_q >= 0.0 && rho_q < 1.0)) throw BudgetViolation("rho_q must lie in [0, 1)");
    if (!(rho_w >= 0.0)) throw BudgetViolation("rho_w must be nonnegative");
}

Vec3 random_unit_vector(Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    for (;;) {
        const Vec3 v{n01(rng), n01(rng), n01(rng)};
        const double n = norm(v);
        if (n > 1e-12) return v / n;
    }
}

std::pair<SensorSample, GyroState> sensor_sample(const SpacecraftState& truth, const GyroState& gyro,
                                                 const SensorNoise& noise, Rng& rng, double dt) {
    std::normal_distribution<double> n01(0.0, 1.0);

    const Vec3 axis = random_unit_vector(rng);
    const double theta = noise.attitude_sigma * n01(rng);
    const UnitQuaternion q_err = UnitQuaternion::from_axis_angle(axis, theta);

    const Vec3 eta_u{noise.gyro_sigma * n01(rng), noise.gyro_sigma * n01(rng), noise.gyro_sigma * n01(rng)};
    SensorSample sample{truth.q * q_err.inverse(), truth.omega + gyro.b + eta_u};

    const double walk = noise.bias_walk * std::sqrt(dt);
    const Vec3 step{walk * n01(rng), walk * n01(rng), walk * n01(rng)};
    return {sample, GyroState{gyro.b + step}};
}

namespace {

Vec3 sweeping_direction(double rate, double phase, double t) {
    const double a = rate * t + phase;
    const double b = 0.61 * rate * t + 0.5 * phase;
    return {std::cos(a) * std::cos(b), std::sin(a) * std::cos(b), std::sin(b)};
}

}  // namespace

UnitQuaternion SyntheticErrorProfile::q_error(double t) const {
    const Vec3 v = q_amplitude * sweeping_direction(q_frequency, q_phase, t);
    return {std::sqrt(std::max(0.0, 1.0 - dot(v, v))), v};
}

Vec3 SyntheticErrorProfile::w_error(double t) const {
    return w_amplitude * sweeping_direction(w_frequency, w_phase, t);
}

ObserverOutput synthetic_observer(const SpacecraftState& truth, const Assumption1Budget& budget,
                                  const SyntheticErrorProfile& profile, double t) {
    budget.validate();
    if (profile.q_amplitude < 0.0 || profile.q_amplitude > budget.rho_q)
        throw BudgetViolation("synthetic attitude error exceeds rho_q");
    if (profile.w_amplitude < 0.0 || profile.w_amplitude > budget.rho_w)
        throw BudgetViolation("synthetic rate error exceeds rho_w");
    return {truth.q * profile.q_error(t).inverse(), truth.omega + profile.w_error(t)};
}

EstimationError estimation_error(const SpacecraftState& truth, const ObserverOutput& obs) {
    return {(obs.q_hat.inverse() * truth.q).canonical(), obs.omega_hat - truth.omega};
}

BiasObserverResult bias_observer_step(const BiasObserverState& prev, const SensorSample& sample,
                                      const BiasObserverGains& gains, double dt) {
    const UnitQuaternion mismatch = prev.q_hat.inverse() * sample.qm;
    const double sign = mismatch.scalar() >= 0.0 ? 1.0 : -1.0;
    const Vec3 correction = (gains.k_o * sign) * mismatch.vec();
    const Vec3 omega_c = sample.omega_m - prev.b_hat + correction;

    BiasObserverResult r;
    r.next.q_hat = propagate_attitude(prev.q_hat, [&](double) { return omega_c; }, 0.0, dt);
    r.next.b_hat = prev.b_hat - (gains.k_b * sign * dt) * mismatch.vec();
    r.output = {prev.q_hat, sample.omega_m - r.next.b_hat};
    return r;
}

std::size_t tail_start_index(std::size_t n, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("tail fraction must lie in (0, 1]");
    const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    if (n == 0 || count == 0) throw EmptyTail("tail window contains no samples");
    return n - std::min(count, n);
}

Assumption1Budget estimate_assumption1_bounds(std::span<const std::vector<EstimationErrorSample>> traces,
                                              double tail_fraction) {
    if (traces.empty()) throw EmptyTail("no traces supplied");
    Assumption1Budget b;
    for (const auto& tr : traces) {
        for (std::size_t i = tail_start_index(tr.size(), tail_fraction); i < tr.size(); ++i) {
            b.rho_q = std::max(b.rho_q, tr[i].qtilde_norm);
            b.rho_w = std::max(b.rho_w, tr[i].wtilde_norm);
        }
    }
    return b;
}

}  // namespace ftac
