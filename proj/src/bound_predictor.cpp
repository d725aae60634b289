#include "ftac/bound_predictor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "ftac/errors.hpp"

namespace ftac {

void UncertaintyBudget::validate() const {
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw BudgetViolation(std::string(name) + " must be finite and >= 0");
    };
    nonneg(rho_q, "rho_q");
    if (!(rho_q < 1.0)) throw BudgetViolation("rho_q must be < 1");
    nonneg(rho_E, "rho_E");
    if (!(rho_E < 1.0)) throw BudgetViolation("rho_E must be < 1");
    nonneg(rho_w, "rho_w");
    nonneg(rho_J, "rho_J");
    nonneg(rho_d, "rho_d");
    nonneg(rho_d_hat, "rho_d_hat");
    nonneg(rho_v, "rho_v");
    nonneg(rho_a, "rho_a");
    nonneg(J_hat_norm, "J_hat_norm");
    if (!(lambda_l > 0.0 && lambda_l <= lambda_r && std::isfinite(lambda_r)))
        throw BudgetViolation("need 0 < lambda_l <= lambda_r");
}

BCoefficients b_coefficients(const UncertaintyBudget& bg, const ControllerGains& gains, const RobustCoefficients& a) {
    const double k = gains.k;
    const double jn = bg.J_hat_norm;
    const double lmax = gains.lambda_max_K();
    const double r0 = rho_zero(bg.rho_q);
    const double rs = rho_sliding(bg, k);
    BCoefficients b;
    b.b3 = 0.5 * k * jn + lmax;
    b.b2 = 0.5 * k * k * jn;
    b.b1 = 2.0 * b.b2 * r0 + 0.5 * k * k * jn + 3.0 * k * bg.rho_v * jn + a.a1;
    b.b0 = b.b2 * r0 * r0 + 0.5 * k * (bg.rho_w + 2.0 * bg.rho_q * bg.rho_v) * jn + 3.0 * k * bg.rho_v * r0 * jn +
           lmax * rs + a.a1 * (r0 + gains.gamma) + a.a0 + (bg.rho_v * bg.rho_v + bg.rho_a) * jn + bg.rho_d_hat;
    return b;
}

BoundCoefficients bound_coefficients(const UncertaintyBudget& budget, const ControllerGains& gains) {
    return bound_coefficients(budget, gains, robust_coefficients(budget, gains.k));
}

BoundCoefficients bound_coefficients(const UncertaintyBudget& budget, const ControllerGains& gains,
                                     const RobustCoefficients& a) {
    BoundCoefficients c;
    c.rho_0 = rho_zero(budget.rho_q);
    c.rho_s = rho_sliding(budget, gains.k);
    c.a = a;
    c.b = b_coefficients(budget, gains, a);
    c.kappa = gains.lambda_min_K() - a.a3 - budget.rho_E * c.b.b3;
    c.kappa_prime = c.kappa + (a.a1 * gains.gamma + a.a0) / gains.epsilon;
    return c;
}

PhiFunctions::PhiFunctions(const BoundCoefficients& c, const ControllerGains& gains, const UncertaintyBudget& budget)
    : c_(c),
      lambda_max_K_(gains.lambda_max_K()),
      epsilon_(gains.epsilon),
      gamma_(gains.gamma),
      rho_E_(budget.rho_E) {}

double PhiFunctions::phi1(double x, double y) const {
    const auto& a = c_.a;
    const auto& b = c_.b;
    const double rs = c_.rho_s + y;
    return (a.a2 + rho_E_ * b.b2) * x * x + (2.0 / epsilon_ * a.a1 * rs + rho_E_ * b.b1) * x +
           2.0 / epsilon_ * rs * (a.a1 * (gamma_ + c_.rho_0 + y) + a.a0) + rho_E_ * b.b0 +
           (2.0 + lambda_max_K_ + a.a1) * y - (a.a1 * gamma_ - a.a1 * c_.rho_0 - lambda_max_K_ * c_.rho_s);
}

double PhiFunctions::phi2(double x, double y) const {
    const auto& a = c_.a;
    const auto& b = c_.b;
    const double rs = c_.rho_s + y;
    return (a.a2 + rho_E_ * b.b2) * x * x + (a.a1 * rs / epsilon_ + a.a1 + rho_E_ * b.b1) * x +
           rs / epsilon_ * (a.a1 * (gamma_ + c_.rho_0 + y) + a.a0) + a.a0 + rho_E_ * b.b0 + lambda_max_K_ * rs +
           2.0 * y;
}

double PhiFunctions::phi_bar(double x, double y) const { return std::max(phi1(x, y), phi2(x, y)); }

namespace {

double lambda_ratio(const UncertaintyBudget& b) { return std::sqrt(b.lambda_r / b.lambda_l); }

}  // namespace

BoundTrace loop1_iterate(const BoundCoefficients& c, const ControllerGains& gains, const UncertaintyBudget& budget,
                         double eta) {
    if (!(c.kappa > 0.0)) throw GainConditionViolated("kappa = λ_min(K) − a3 − ρ_E·b3 must be positive");
    if (!(eta > 0.0)) throw Error("eta must be positive");
    const PhiFunctions phi(c, gains, budget);
    const double scale = lambda_ratio(budget) / c.kappa;

    BoundTrace trace;
    double q_prev = 1.0;
    for (std::size_t i = 1; i <= kMaxBoundIterations; ++i) {
        const double s = scale * phi.phi_bar(q_prev, 0.0);
        const double q = s / gains.k;
        trace.loop1.push_back({s, q});
        if (i == 1 && !(q < 1.0)) {
            std::ostringstream os;
            os << "first bound q1 = " << q << " is not below 1; the sequence is not contractive";
            throw NotContractive(os.str());
        }
        if (std::abs(q - q_prev) <= eta) {
            trace.s_inf = s;
            trace.q_inf = q;
            return trace;
        }
        q_prev = q;
    }
    throw Error("loop 1 did not converge");
}

BoundTrace loop2_iterate(BoundTrace trace, const BoundCoefficients& c, const ControllerGains& gains,
                         const UncertaintyBudget& budget, double eta) {
    if (!(trace.s_inf + c.rho_s < gains.epsilon))
        throw NotActivated("s_inf + rho_s >= epsilon; the trajectory is not guaranteed to enter the boundary layer");
    const PhiFunctions phi(c, gains, budget);
    const double scale = lambda_ratio(budget) / c.kappa_prime;

    trace.loop2.clear();
    trace.switch_index = trace.loop1.size() + 1;
    double q_prev = trace.q_inf;
    for (std::size_t i = 1; i <= kMaxBoundIterations; ++i) {
        const double s = scale * phi.phi2(q_prev, 0.0);
        const double q = s / gains.k;
        trace.loop2.push_back({s, q});
        if (std::abs(q - q_prev) <= eta) {
            trace.s_inf_prime = s;
            trace.q_inf_prime = q;
            trace.loop2_active = true;
            return trace;
        }
        q_prev = q;
    }
    throw Error("loop 2 did not converge");
}

Prediction predict(const UncertaintyBudget& budget, const ControllerGains& gains, const PredictOptions& options) {
    budget.validate();
    gains.validate();
    Prediction p;
    p.eta = options.eta;
    const RobustCoefficients a = options.stated_coefficients.value_or(robust_coefficients(budget, gains.k));
    p.coefficients = bound_coefficients(budget, gains, a);
    p.gains_report = check_gain_conditions(gains, a, budget);
    if (!p.gains_report.lyapunov_ok) {
        std::ostringstream os;
        os << "λ_min(K) = " << p.gains_report.lambda_min_K << " does not exceed the threshold "
           << p.gains_report.threshold;
        throw GainConditionViolated(os.str());
    }
    if (!p.gains_report.boundary_ok) {
        std::ostringstream os;
        os << "epsilon = " << gains.epsilon << " does not exceed rho_s = " << p.gains_report.rho_s;
        throw GainConditionViolated(os.str());
    }

    p.trace = loop1_iterate(p.coefficients, gains, budget, options.eta);
    if (options.loop2 && p.trace.s_inf + p.coefficients.rho_s < gains.epsilon)
        p.trace = loop2_iterate(std::move(p.trace), p.coefficients, gains, budget, options.eta);

    p.q_bound = p.trace.q_final();
    p.omega_bound = p.trace.omega_bound();
    p.theta_bound = 2.0 * std::asin(std::min(p.q_bound, 1.0));
    return p;
}

std::vector<SweepRow> gain_sweep(const UncertaintyBudget& budget, const GainGrid& grid, double eta) {
    std::vector<SweepRow> rows;
    for (double k : grid.k)
        for (double ks : grid.K_scale)
            for (double eps : grid.epsilon)
                for (double g : grid.gamma) {
                    SweepRow r;
                    r.gains = {k, ks * Mat3::identity(), eps, g};
                    r.K_scale = ks;
                    rows.push_back(r);
                }

    auto evaluate = [&](SweepRow& r) {
        try {
            const Prediction p = predict(budget, r.gains, {eta, true, std::nullopt});
            r.passed = true;
            r.q_bound = p.q_bound;
            r.omega_bound = p.omega_bound;
            r.theta_bound = p.theta_bound;
            r.loop1_iterations = p.trace.loop1.size();
            r.loop2_iterations = p.trace.loop2.size();
        } catch (const Error& e) {
            r.passed = false;
            r.failure = e.what();
        }
    };

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(rows.size(), std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < rows.size(); i = next++) evaluate(rows[i]);
            });
    }

    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.passed != b.passed) return a.passed;
        return a.passed && a.q_bound < b.q_bound;
    });
    return rows;
}

}  // namespace ftac
