#include <doctest.h>

#include <cmath>
#include <vector>

#include "ftac/bound_predictor.hpp"
#include "ftac/errors.hpp"
#include "support.hpp"

using namespace ftac;
using namespace ftac::test;

namespace {

UncertaintyBudget listed_budget(double rho_E) {
    UncertaintyBudget b;
    b.rho_q = 2.15e-5;
    b.rho_w = 1.56e-5;
    b.rho_J = 0.5;
    b.rho_d = 3e-6;
    b.rho_d_hat = 3e-6;
    b.lambda_l = 6.0;
    b.lambda_r = 8.5;
    b.rho_v = 0.0022;
    b.rho_a = 2.2e-6;
    b.rho_E = rho_E;
    b.J_hat_norm = 8.0;
    return b;
}

RobustCoefficients stated_with_derived_a2_a3(const UncertaintyBudget& b, double k) {
    RobustCoefficients a = robust_coefficients(b, k);
    a.a1 = 0.011;
    a.a0 = 1.93e-5;
    return a;
}

/// Independent evaluation of the comparison functions and both fixed-point loops from the closed forms.
struct Oracle {
    double k, jn, lmin, lmax, eps, gam, rq, rw, rv, ra, rdh, rE, ratio;
    double a0, a1, a2, a3, b0, b1, b2, b3, r0, rs, kappa, kappa_p;

    Oracle(const UncertaintyBudget& b, double k_, double K, double eps_, double gam_, const RobustCoefficients& a)
        : k(k_), jn(b.J_hat_norm), lmin(K), lmax(K), eps(eps_), gam(gam_), rq(b.rho_q), rw(b.rho_w), rv(b.rho_v),
          ra(b.rho_a), rdh(b.rho_d_hat), rE(b.rho_E), ratio(std::sqrt(b.lambda_r / b.lambda_l)), a0(a.a0), a1(a.a1),
          a2(a.a2), a3(a.a3) {
        // 1 − sqrt(1 − ρ²) written as ρ²/(1 + sqrt(1 − ρ²)) to avoid cancellation.
        r0 = std::sqrt(2.0 * rq * rq / (1.0 + std::sqrt(1.0 - rq * rq)));
        rs = rw + 2 * rq * rv + k * r0;
        b3 = 0.5 * k * jn + lmax;
        b2 = 0.5 * k * k * jn;
        b1 = 2 * b2 * r0 + 0.5 * k * k * jn + 3 * k * rv * jn + a1;
        b0 = b2 * r0 * r0 + 0.5 * k * (rw + 2 * rq * rv) * jn + 3 * k * rv * r0 * jn + lmax * rs + a1 * (r0 + gam) +
             a0 + (rv * rv + ra) * jn + rdh;
        kappa = lmin - a3 - rE * b3;
        kappa_p = kappa + (a1 * gam + a0) / eps;
    }
    [[nodiscard]] double phi1(double x) const {
        return (a2 + rE * b2) * x * x + (2 / eps * a1 * rs + rE * b1) * x + 2 / eps * rs * (a1 * (gam + r0) + a0) +
               rE * b0 - (a1 * gam - a1 * r0 - lmax * rs);
    }
    [[nodiscard]] double phi2(double x) const {
        return (a2 + rE * b2) * x * x + (a1 * rs / eps + a1 + rE * b1) * x + rs / eps * (a1 * (gam + r0) + a0) + a0 +
               rE * b0 + lmax * rs;
    }
    [[nodiscard]] double phi_bar(double x) const { return std::max(phi1(x), phi2(x)); }
};

}  // namespace

TEST_CASE("b coefficients") {
    const auto b = listed_budget(0.0);
    const ControllerGains g;
    const auto a = robust_coefficients(b, g.k);
    const auto bc = b_coefficients(b, g, a);
    const Oracle o(b, 0.2, 0.7, 0.01, 0.01, a);
    CHECK(bc.b3 == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(bc.b2 == doctest::Approx(0.16).epsilon(1e-14));
    CHECK(bc.b1 == doctest::Approx(o.b1).epsilon(1e-14));
    CHECK(bc.b0 == doctest::Approx(o.b0).epsilon(1e-14));
    CHECK(bc.b1 == doctest::Approx(0.1812).epsilon(1e-3));
    CHECK(bc.b0 == doctest::Approx(2.1234e-4).epsilon(1e-4));

    ControllerGains zero_k = g;
    zero_k.K = Mat3::zero();
    const auto z = b_coefficients(UncertaintyBudget{0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 8.0}, zero_k, RobustCoefficients{});
    CHECK(z.b3 == doctest::Approx(0.8));
    CHECK(z.b2 == doctest::Approx(0.16));
    CHECK(z.b1 == doctest::Approx(0.16));
    CHECK(z.b0 == 0.0);
}

TEST_CASE("bound coefficients: κ and κ′") {
    const ControllerGains g;
    for (double rE : {0.0, 0.08}) {
        const auto b = listed_budget(rE);
        const auto c = bound_coefficients(b, g);
        CHECK(c.kappa == doctest::Approx(0.7 - c.a.a3 - rE * c.b.b3).epsilon(1e-14));
        CHECK(c.kappa_prime == c.kappa + (c.a.a1 * g.gamma + c.a.a0) / g.epsilon);
        CHECK(c.rho_s == doctest::Approx(rho_sliding(b, g.k)));
    }
}

TEST_CASE("comparison functions") {
    const auto b = listed_budget(0.0);
    const ControllerGains g;
    const auto c = bound_coefficients(b, g);
    const PhiFunctions phi(c, g, b);
    const Oracle o(b, 0.2, 0.7, 0.01, 0.01, c.a);

    const auto& a = c.a;
    CHECK(phi.phi2(0.0) == doctest::Approx(c.rho_s / g.epsilon * (a.a1 * (g.gamma + c.rho_0) + a.a0) + a.a0 +
                                           b.rho_E * c.b.b0 + 0.7 * c.rho_s)
                               .epsilon(1e-14));
    for (double x : {0.0, 1e-4, 0.01, 0.3, 1.0}) {
        CHECK(phi.phi1(x) == doctest::Approx(o.phi1(x)).epsilon(1e-13));
        CHECK(phi.phi2(x) == doctest::Approx(o.phi2(x)).epsilon(1e-13));
        CHECK(phi.phi_bar(x) == std::max(phi.phi1(x), phi.phi2(x)));
    }
    CHECK(phi.phi1(1.0) == doctest::Approx(0.00995).epsilon(2e-3));
    CHECK(phi.phi2(1.0) == doctest::Approx(0.020726).epsilon(1e-4));
    CHECK(phi.phi_bar(1.0) == phi.phi2(1.0));

    // With the rounded a₁ = 0.011, a₀ = 1.93e-5 the inside-layer function moves to ≈ 0.02106.
    const auto cs = bound_coefficients(b, g, stated_with_derived_a2_a3(b, g.k));
    CHECK(PhiFunctions(cs, g, b).phi2(1.0) == doctest::Approx(0.02106).epsilon(1e-3));

    Rng rng(61);
    for (int i = 0; i < 1000; ++i) {
        const double x = uniform(rng, 0.0, 1.0), dx = uniform(rng, 1e-6, 0.1);
        REQUIRE(phi.phi1(x + dx) > phi.phi1(x));
        REQUIRE(phi.phi2(x + dx) > phi.phi2(x));
        const double y = uniform(rng, 1e-8, 1e-4);
        REQUIRE(phi.phi_bar(x, y) >= phi.phi_bar(x, 0.0));
    }
}

TEST_CASE("loop 1 against the fixed-point oracle") {
    const ControllerGains g;
    for (double rE : {0.0, 0.08}) {
        const auto b = listed_budget(rE);
        const auto c = bound_coefficients(b, g);
        const Oracle o(b, 0.2, 0.7, 0.01, 0.01, c.a);
        const auto tr = loop1_iterate(c, g, b, 1e-6);

        std::vector<double> qs;
        double q = 1.0;
        for (;;) {
            const double next = o.ratio * o.phi_bar(q) / o.kappa / o.k;
            qs.push_back(next);
            if (std::abs(next - q) <= 1e-6) break;
            q = next;
        }
        REQUIRE(tr.loop1.size() == qs.size());
        for (std::size_t i = 0; i < qs.size(); ++i) {
            CHECK(tr.loop1[i].q == doctest::Approx(qs[i]).epsilon(1e-12));
            CHECK(tr.loop1[i].q == doctest::Approx(tr.loop1[i].s / g.k).epsilon(1e-15));
        }
        CHECK(tr.loop1.size() == (rE == 0.0 ? 8u : 13u));
    }
}

TEST_CASE("fault-free prediction") {
    const auto b = listed_budget(0.0);
    const ControllerGains g;
    const auto p = predict(b, g);
    CHECK(p.trace.loop1[0].q == doctest::Approx(0.18976).epsilon(1e-4));
    CHECK(p.trace.q_inf == doctest::Approx(3.406e-4).epsilon(1e-3));
    CHECK(p.trace.loop1.size() == 8);
    CHECK(p.trace.loop2.size() == 2);
    CHECK(p.trace.switch_index == 9);
    CHECK(p.trace.total_iterations() == 10);
    CHECK(p.trace.s_inf_prime == doctest::Approx(6.67e-5).epsilon(0.02));
    const double deg = 180.0 / 3.14159265358979323846;
    CHECK(p.theta_bound * deg == doctest::Approx(0.0382).epsilon(0.02));
    CHECK(p.omega_bound * deg == doctest::Approx(0.0076).epsilon(0.02));
    CHECK(p.omega_bound == 2.0 * p.trace.s_inf_prime);
    CHECK(p.theta_bound == doctest::Approx(2.0 * std::asin(p.q_bound)));

    // Rounded a₁ = 0.011, a₀ = 1.93e-5 give the first iterate ≈ 0.1928 and q̄∞ ≈ 3.42e-4.
    PredictOptions stated;
    stated.stated_coefficients = stated_with_derived_a2_a3(b, g.k);
    const auto ps = predict(b, g, stated);
    CHECK(ps.trace.loop1[0].q == doctest::Approx(0.1928).epsilon(1e-3));
    CHECK(ps.trace.q_inf == doctest::Approx(3.42e-4).epsilon(2e-3));
    CHECK(ps.trace.total_iterations() == 10);
}

TEST_CASE("faulty prediction") {
    const auto b = listed_budget(0.08);
    const auto p = predict(b, ControllerGains{});
    CHECK(p.trace.loop1.size() == 13);
    CHECK(p.trace.loop2.size() == 4);
    CHECK(p.trace.total_iterations() == 17);
    CHECK(p.trace.s_inf_prime == doctest::Approx(1.53e-4).epsilon(0.05));
    CHECK(p.q_bound == doctest::Approx(7.67e-4).epsilon(0.05));
    CHECK(p.omega_bound * 180.0 / 3.14159265358979323846 == doctest::Approx(0.018).epsilon(0.05));
}

TEST_CASE("property: both sequences strictly decrease and loop 2 stays below the loop-1 limit") {
    Rng rng(62);
    int activated = 0;
    for (int i = 0; i < 300; ++i) {
        auto b = listed_budget(uniform(rng, 0.0, 0.1));
        b.rho_q *= uniform(rng, 0.1, 3.0);
        b.rho_w *= uniform(rng, 0.1, 3.0);
        b.rho_J *= uniform(rng, 0.1, 1.5);
        ControllerGains g;
        g.k = uniform(rng, 0.1, 0.4);
        g.K = uniform(rng, 0.5, 1.5) * Mat3::identity();
        Prediction p;
        try {
            p = predict(b, g);
        } catch (const GainConditionViolated&) {
            continue;
        } catch (const NotContractive&) {
            continue;
        }
        for (std::size_t j = 1; j < p.trace.loop1.size(); ++j) REQUIRE(p.trace.loop1[j].s < p.trace.loop1[j - 1].s);
        if (p.trace.loop2_active) {
            ++activated;
            for (std::size_t j = 1; j < p.trace.loop2.size(); ++j)
                REQUIRE(p.trace.loop2[j].s < p.trace.loop2[j - 1].s);
            for (const auto& st : p.trace.loop2) REQUIRE(st.s < p.trace.s_inf);
        }
    }
    CHECK(activated > 50);
}

TEST_CASE("property: fixed-point residual at convergence") {
    const double eta = 1e-6;
    for (double rE : {0.0, 0.04, 0.08}) {
        const auto b = listed_budget(rE);
        const ControllerGains g;
        const auto c = bound_coefficients(b, g);
        const PhiFunctions phi(c, g, b);
        const auto tr = loop1_iterate(c, g, b, eta);
        const double ratio = std::sqrt(b.lambda_r / b.lambda_l);
        CHECK(std::abs(tr.q_inf - ratio * phi.phi_bar(tr.q_inf) / (c.kappa * g.k)) <= 2 * eta);
        const auto t2 = loop2_iterate(tr, c, g, b, eta);
        CHECK(std::abs(t2.q_inf_prime - ratio * phi.phi2(t2.q_inf_prime) / (c.kappa_prime * g.k)) <= 2 * eta);
    }
}

TEST_CASE("property: enlarging a budget entry never tightens the bound") {
    const ControllerGains g;
    double UncertaintyBudget::*fields[] = {&UncertaintyBudget::rho_q,    &UncertaintyBudget::rho_w,
                                           &UncertaintyBudget::rho_J,    &UncertaintyBudget::rho_d,
                                           &UncertaintyBudget::rho_d_hat, &UncertaintyBudget::lambda_r,
                                           &UncertaintyBudget::rho_v,    &UncertaintyBudget::rho_a,
                                           &UncertaintyBudget::rho_E,    &UncertaintyBudget::J_hat_norm};
    for (double rE : {0.0, 0.08}) {
        const auto base = listed_budget(rE);
        const double q0 = predict(base, g).q_bound;
        for (auto f : fields) {
            auto larger = base;
            larger.*f = base.*f == 0.0 ? 0.01 : base.*f * 1.2;
            CHECK(predict(larger, g).q_bound >= q0);
        }
        auto smaller_l = base;
        smaller_l.lambda_l *= 0.9;
        CHECK(predict(smaller_l, g).q_bound >= q0);
    }
}

TEST_CASE("prediction is deterministic") {
    const auto b = listed_budget(0.08);
    const auto p1 = predict(b, ControllerGains{});
    const auto p2 = predict(b, ControllerGains{});
    REQUIRE(p1.trace.loop1.size() == p2.trace.loop1.size());
    REQUIRE(p1.trace.loop2.size() == p2.trace.loop2.size());
    for (std::size_t i = 0; i < p1.trace.loop1.size(); ++i) CHECK(p1.trace.loop1[i].s == p2.trace.loop1[i].s);
    for (std::size_t i = 0; i < p1.trace.loop2.size(); ++i) CHECK(p1.trace.loop2[i].s == p2.trace.loop2[i].s);
    CHECK(p1.q_bound == p2.q_bound);
}

TEST_CASE("errors") {
    const auto b = listed_budget(0.08);
    ControllerGains weak;
    weak.K = 0.1 * Mat3::identity();
    CHECK_THROWS_AS((void)predict(b, weak), GainConditionViolated);
    CHECK_THROWS_AS((void)loop1_iterate(bound_coefficients(b, weak), weak, b, 1e-6), GainConditionViolated);

    // A huge rate budget keeps κ positive but pushes the first iterate above 1.
    auto loose = listed_budget(0.0);
    loose.rho_w = 5e-3;
    loose.rho_J = 2.0;
    ControllerGains g;
    g.epsilon = 0.05;
    const auto c = bound_coefficients(loose, g);
    REQUIRE(c.kappa > 0.0);
    CHECK_THROWS_AS((void)loop1_iterate(c, g, loose, 1e-6), NotContractive);

    // Loop 1 limit outside the layer: loop 2 refuses to run and predict() keeps the loop-1 limit.
    auto wide = listed_budget(0.0);
    wide.rho_w = 4e-3;
    ControllerGains tight = g;
    tight.epsilon = 0.0045;
    const auto cw = bound_coefficients(wide, tight);
    const auto tr = loop1_iterate(cw, tight, wide, 1e-6);
    REQUIRE(tr.s_inf + cw.rho_s >= tight.epsilon);
    CHECK_THROWS_AS((void)loop2_iterate(tr, cw, tight, wide, 1e-6), NotActivated);
    const auto p = predict(wide, tight);
    CHECK_FALSE(p.trace.loop2_active);
    CHECK(p.q_bound == tr.q_inf);

    PredictOptions no2;
    no2.loop2 = false;
    const auto p1 = predict(listed_budget(0.0), ControllerGains{}, no2);
    CHECK_FALSE(p1.trace.loop2_active);
    CHECK(p1.trace.loop2.empty());
    CHECK(p1.q_bound == p1.trace.q_inf);
}

TEST_CASE("zero budget collapses the bound") {
    UncertaintyBudget z;
    z.lambda_l = 6.25;
    z.lambda_r = 8.0;
    z.J_hat_norm = 8.0;
    const auto p = predict(z, ControllerGains{});
    CHECK(p.q_bound < 1e-9);
    CHECK(p.omega_bound < 1e-9);
}

TEST_CASE("gain sweep") {
    const auto b = listed_budget(0.08);
    GainGrid grid{{0.2}, {0.1, 0.4, 0.7, 1.0, 1.5}, {0.01}, {0.01}};
    const auto rows = gain_sweep(b, grid);
    REQUIRE(rows.size() == 5);

    const auto ref = predict(b, ControllerGains{});
    bool found = false;
    std::vector<std::pair<double, double>> passing;
    for (const auto& r : rows) {
        if (r.K_scale == 0.1) {
            CHECK_FALSE(r.passed);
            CHECK_FALSE(r.failure.empty());
        }
        if (r.K_scale == 0.7) {
            found = true;
            CHECK(r.passed);
            CHECK(r.q_bound == ref.q_bound);
            CHECK(r.omega_bound == ref.omega_bound);
            CHECK(r.loop1_iterations == 13);
            CHECK(r.loop2_iterations == 4);
        }
        if (r.passed) passing.emplace_back(r.K_scale, r.q_bound);
    }
    CHECK(found);
    // Sorted by q-bound with failures last, and the bound falls as K grows.
    for (std::size_t i = 1; i < passing.size(); ++i) {
        CHECK(passing[i].second >= passing[i - 1].second);
        CHECK(passing[i].first < passing[i - 1].first);
    }
    CHECK_FALSE(rows.back().passed);
}
