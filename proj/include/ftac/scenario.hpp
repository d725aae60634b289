#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftac/actuation.hpp"
#include "ftac/bound_predictor.hpp"
#include "ftac/controller.hpp"
#include "ftac/estimation.hpp"
#include "ftac/time_profile.hpp"

namespace ftac {

inline constexpr double kDegToRad = 0.017453292519943295;
inline constexpr double kRadToDeg = 57.295779513082323;

[[nodiscard]] constexpr double deg_to_rad(double deg) { return deg * kDegToRad; }
[[nodiscard]] constexpr double rad_to_deg(double rad) { return rad * kRadToDeg; }
/// °/h → rad/s.
[[nodiscard]] constexpr double deg_per_hour_to_rad_per_sec(double v) { return v * kDegToRad / 3600.0; }

enum class ObserverKind { exact, synthetic, bias };

[[nodiscard]] std::string to_string(ObserverKind kind);
[[nodiscard]] ObserverKind observer_kind_from_string(const std::string& name);

struct InitialConditions {
    enum class Mode { random, fixed };
    Mode mode = Mode::random;
    double omega_max = 0.02;          // rad/s, per axis, uniform in [−max, max]
    double theta_max = 3.14159265358979323846;  // rad, principal angle uniform in [0, max]
    UnitQuaternion q0;                // fixed mode
    Vec3 omega0;                      // fixed mode, rad/s
};

/// The four-pair bank D = [I₃ | 1/√3·(1,1,1)] with 0.02 N·m per pair.
[[nodiscard]] ActuatorBank paper_actuator_bank();

struct Scenario {
    std::string name = "custom";

    Mat3 inertia = Mat3::identity();
    Mat3 J_hat = Mat3::identity();
    VectorProfile tau_d_hat = zero_profile();

    UnitQuaternion qd0;
    VectorProfile omega_d = zero_profile();
    VectorProfile disturbance = zero_profile();

    ActuatorBank bank = paper_actuator_bank();
    HealthProfile health = HealthProfile::healthy(4);
    HealthProfile health_estimate = HealthProfile::healthy(4);

    SensorNoise noise;
    Vec3 initial_bias;  // rad/s

    ObserverKind observer = ObserverKind::exact;
    SyntheticErrorProfile synthetic;
    BiasObserverGains bias_gains;

    ControllerGains gains;
    std::optional<UncertaintyBudget> budget;
    std::optional<RobustCoefficients> stated_coefficients;

    InitialConditions initial;

    double duration = 600.0;
    double dt = 0.01;
    std::uint64_t seed = 1;
    std::size_t decimation = 10;
    double tail_fraction = 0.2;

    /// Throws ConfigError / BudgetViolation / RankDeficient / SingularInertia on an invalid scenario.
    void validate() const;

    [[nodiscard]] std::size_t step_count() const;
    /// Robust coefficients the controller uses: stated ones if given, else derived from the budget (zero without one).
    [[nodiscard]] RobustCoefficients controller_coefficients() const;
};

/// Microsatellite tracking scenario with healthy thrusters.
[[nodiscard]] Scenario paper_fault_free();
/// Same scenario with fading pairs 1, 2, 4 and pair 3 failed.
[[nodiscard]] Scenario paper_faulty();
/// Perfect model, perfect state, healthy thrusters, zero budget; starts at rest 5° off the reference.
[[nodiscard]] Scenario zero_uncertainty();

[[nodiscard]] std::vector<std::string> preset_names();

/// A preset name or a path to a JSON scenario file.
[[nodiscard]] Scenario load_scenario(const std::string& name_or_path);

[[nodiscard]] Scenario scenario_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const Scenario& s);
[[nodiscard]] nlohmann::json to_json(const UncertaintyBudget& b);
[[nodiscard]] UncertaintyBudget budget_from_json(const nlohmann::json& j, const Mat3& J_hat);

/// Worst-case values of each budget entry actually realized by the scenario, on a time grid.
struct BudgetAudit {
    double rho_J = 0.0;
    double rho_d = 0.0;
    double rho_d_hat = 0.0;
    double rho_v = 0.0;
    double rho_a = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double rho_E = 0.0;
    double J_hat_norm = 0.0;
    std::vector<std::string> exceeded;  // entries where the scenario exceeds the declared budget
};

[[nodiscard]] BudgetAudit audit_budget(const Scenario& s, double horizon, double step);

}  // namespace ftac
