#include <doctest.h>

#include <cmath>

#include "ftac/errors.hpp"
#include "ftac/rigid_body.hpp"
#include "support.hpp"

using namespace ftac;
using namespace ftac::test;

namespace {

const TorqueFn kNoTorque = [](double, const SpacecraftState&) { return Vec3{}; };

/// Solves A x = b by Gaussian elimination with partial pivoting.
Vec3 solve_ref(Mat3 a, Vec3 b) {
    std::array<double, 3> r{b.x, b.y, b.z};
    for (std::size_t c = 0; c < 3; ++c) {
        std::size_t p = c;
        for (std::size_t i = c + 1; i < 3; ++i)
            if (std::abs(a(i, c)) > std::abs(a(p, c))) p = i;
        for (std::size_t j = 0; j < 3; ++j) std::swap(a(c, j), a(p, j));
        std::swap(r[c], r[p]);
        for (std::size_t i = c + 1; i < 3; ++i) {
            const double f = a(i, c) / a(c, c);
            for (std::size_t j = c; j < 3; ++j) a(i, j) -= f * a(c, j);
            r[i] -= f * r[c];
        }
    }
    std::array<double, 3> x{};
    for (std::size_t i = 3; i-- > 0;) {
        double acc = r[i];
        for (std::size_t j = i + 1; j < 3; ++j) acc -= a(i, j) * x[j];
        x[i] = acc / a(i, i);
    }
    return {x[0], x[1], x[2]};
}

double energy(const Mat3& j, const Vec3& w) { return 0.5 * dot(w, j * w); }

}  // namespace

TEST_CASE("inertia validation") {
    CHECK_NOTHROW(InertiaMatrix{paper_inertia()});
    Mat3 asym = paper_inertia();
    asym(0, 1) += 1e-6;
    CHECK_THROWS_AS(InertiaMatrix{asym}, Error);
    CHECK_THROWS_AS(InertiaMatrix{diag(1.0, -1.0, 1.0)}, SingularInertia);
    CHECK_THROWS_AS(InertiaMatrix{diag(1.0, 0.0, 1.0)}, SingularInertia);
    const InertiaMatrix j(paper_inertia());
    CHECK(j.lambda_min() > 6.0);
    CHECK(j.lambda_max() < 8.5);
}

TEST_CASE("attitude kinematics") {
    const Vec4 zero = attitude_kinematics(SpacecraftState{UnitQuaternion::from_axis_angle({1, 2, 3}, 0.7), {}});
    for (double c : zero) CHECK(c == 0.0);
    const Vec4 spin = attitude_kinematics(SpacecraftState{UnitQuaternion::identity(), {0, 0, 2}});
    CHECK(spin[0] == 0.0);
    CHECK(spin[1] == 0.0);
    CHECK(spin[2] == 0.0);
    CHECK(spin[3] == 1.0);

    Rng rng(21);
    for (int i = 0; i < 1000; ++i) {
        const UnitQuaternion q = random_quat(rng);
        const Vec4 qa = q.as_array();
        const Vec4 qd = attitude_kinematics(qa, random_vec(rng, 5.0));
        CHECK(std::abs(qa[0] * qd[0] + qa[1] * qd[1] + qa[2] * qd[2] + qa[3] * qd[3]) < 1e-14);
    }
}

TEST_CASE("Euler dynamics") {
    Rng rng(22);
    const InertiaMatrix iso(Mat3::identity());
    for (int i = 0; i < 100; ++i) CHECK(norm(euler_dynamics(iso, random_vec(rng), {}, {})) == 0.0);

    const Mat3 jm = paper_inertia();
    const InertiaMatrix j(jm);
    const Vec3 w{0.01, 0.0, 0.0};
    const Vec3 ref = solve_ref(jm, -cross_ref(w, jm * w));
    CHECK(max_abs_diff(euler_dynamics(j, w, {}, {}), ref) < 1e-18);

    for (int i = 0; i < 200; ++i) {
        const Mat3 a = random_spd(rng, 1.0, 10.0);
        const Vec3 om = random_vec(rng), tc = random_vec(rng), td = random_vec(rng);
        const Vec3 r = solve_ref(a, tc + td - cross_ref(om, a * om));
        CHECK(max_abs_diff(euler_dynamics(InertiaMatrix(a), om, tc, td), r) < 1e-12);
    }
}

TEST_CASE("torque-free motion conserves energy and angular momentum magnitude") {
    const Mat3 jm = paper_inertia();
    const InertiaMatrix j(jm);
    SpacecraftState x{UnitQuaternion::from_axis_angle({1, -1, 2}, 0.3), {0.05, -0.02, 0.03}};
    const double e0 = energy(jm, x.omega);
    const double h0 = norm(jm * x.omega);
    double max_e_100 = 0.0;
    for (std::size_t step = 0; step < 50000; ++step) {
        x = rk4_step(j, x, 0.01 * static_cast<double>(step), 0.01, kNoTorque, kNoTorque, step);
        if (step < 10000) max_e_100 = std::max(max_e_100, std::abs(energy(jm, x.omega) - e0));
    }
    CHECK(max_e_100 < 1e-9);
    CHECK(std::abs(energy(jm, x.omega) - e0) / e0 < 1e-7);
    CHECK(std::abs(norm(jm * x.omega) - h0) / h0 < 1e-7);
}

TEST_CASE("tracking errors") {
    Rng rng(23);
    const double k = 0.2;
    for (int i = 0; i < 200; ++i) {
        const UnitQuaternion qd = random_quat(rng);
        const Vec3 wd = random_vec(rng, 0.1);
        const TrackingError perfect = tracking_errors({qd, wd}, {qd, wd, {}}, k);
        CHECK(norm(perfect.qe.vec()) < 1e-15);
        CHECK(max_abs_diff(perfect.omega_bar_d, wd) < 1e-15);
        CHECK(norm(perfect.omega_e) < 1e-15);
        CHECK(norm(perfect.s) < 1e-15);

        const UnitQuaternion q = random_quat(rng);
        const TrackingError e = tracking_errors({q, random_vec(rng)}, {qd, wd, {}}, k);
        const Vec4 back = (qd * e.qe).as_array();
        const Vec4 qa = q.as_array();
        for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(back[c] - qa[c]) < 1e-12);
        CHECK(max_abs_diff(e.s, e.omega_e + k * e.qe.vec()) == 0.0);

        // ω_e = 0 case.
        const Vec3 wbar = rotation_matrix(e.qe) * wd;
        const TrackingError z = tracking_errors({q, wbar}, {qd, wd, {}}, k);
        CHECK(max_abs_diff(z.s, k * z.qe.vec()) < 1e-15);
    }
}

TEST_CASE("Ξ matrix") {
    Rng rng(24);
    const Mat3 jm = paper_inertia();
    const Vec3 we{0.1, -0.2, 0.3};
    const Mat3 xi0 = xi_matrix(jm, we, {});
    CHECK(max_abs_diff(xi0, skew(jm * we)) == 0.0);
    CHECK(max_abs_diff(xi0, -1.0 * xi0.transpose()) == 0.0);

    for (int i = 0; i < 10000; ++i) {
        const Mat3 j = random_spd(rng, 1.0, 10.0);
        const UnitQuaternion qe = random_quat(rng);
        const Vec3 w = random_vec(rng), wbar = random_vec(rng);
        const double k = uniform(rng, 0.01, 2.0);
        const Mat3 xi = xi_matrix(j, w, wbar);
        if (i < 200) {
            // Columnwise assembly from cross products.
            for (std::size_t c = 0; c < 3; ++c) {
                Vec3 e{};
                e[c] = 1.0;
                const Vec3 col = cross_ref(j * (w + wbar), e) - cross_ref(wbar, j * e) - j * cross_ref(wbar, e);
                CHECK(max_abs_diff(xi * e, col) < 1e-13);
            }
        }
        const Vec3 s = w + k * qe.vec();
        const double scale = dot(s, s) * spectral_norm(j) * (norm(w) + norm(wbar));
        REQUIRE(std::abs(dot(s, xi * s)) <= 1e-14 * scale);
        const Mat3 qx = skew(qe.vec());
        REQUIRE(std::abs(dot(s, (qx * j + j * qx) * s)) <= 1e-14 * dot(s, s) * spectral_norm(j));
    }
}

TEST_CASE("ψ terms special cases") {
    const Mat3 jm = paper_inertia();
    const Vec3 wd{0.002, 0.001, -0.001};
    const Vec3 wd_dot{1e-6, 0.0, 2e-6};
    const PsiTerms p = psi_terms(jm, UnitQuaternion::identity(), {}, wd, wd_dot, 0.2);
    CHECK(norm(p.psi) == 0.0);
    CHECK(max_abs_diff(p.psi_d, cross_ref(wd, jm * wd) + jm * wd_dot) < 1e-20);

    const PsiTerms still = psi_terms(jm, UnitQuaternion::from_axis_angle({1, 1, 0}, 0.4), {0.1, 0, 0}, {}, {}, 0.2);
    CHECK(norm(still.psi_d) == 0.0);
}

TEST_CASE("ṡ vanishes at equilibrium with feedforward τ_c = ψ_d") {
    const Mat3 jm = paper_inertia();
    const InertiaMatrix j(jm);
    const DesiredState d{UnitQuaternion::from_axis_angle({0, 0, 1}, 0.2), {0.002, 0.0, 0.001}, {0.0, 1e-6, 0.0}};
    const TrackingError err = tracking_errors({d.qd, d.omega_d}, d, 0.2);
    const PsiTerms p = psi_terms(jm, err, d, 0.2);
    CHECK(norm(s_dot_rhs(j, err, d, 0.2, p.psi_d, {})) < 1e-18);
}

TEST_CASE("analytic J·ṡ matches finite differences along the nonlinear flow") {
    Rng rng(25);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        const Mat3 jm = random_spd(rng, 1.0, 10.0);
        const InertiaMatrix j(jm);
        const double k = uniform(rng, 0.05, 1.0);
        const Vec3 a = random_vec(rng, 0.2), b = random_vec(rng, 0.2), c = random_vec(rng, 2.0);
        const VectorFn wd = [=](double t) {
            return Vec3{a.x + b.x * std::sin(c.x * t), a.y + b.y * std::sin(c.y * t), a.z + b.z * std::sin(c.z * t)};
        };
        const VectorFn wd_dot = [=](double t) {
            return Vec3{b.x * c.x * std::cos(c.x * t), b.y * c.y * std::cos(c.y * t), b.z * c.z * std::cos(c.z * t)};
        };
        const Vec3 tc = random_vec(rng), td = random_vec(rng);
        const TorqueFn ctrl = [tc](double, const SpacecraftState&) { return tc; };
        const TorqueFn dist = [td](double, const SpacecraftState&) { return td; };

        const double t0 = uniform(rng, 0.0, 10.0);
        const SpacecraftState x0{random_quat(rng), random_vec(rng, 0.5)};
        const UnitQuaternion qd0 = random_quat(rng);

        auto s_at = [&](double dt) {
            const SpacecraftState x = rk4_step(j, x0, t0, dt, ctrl, dist);
            const UnitQuaternion qd = propagate_attitude(qd0, wd, t0, dt);
            return tracking_errors(x, {qd, wd(t0 + dt), wd_dot(t0 + dt)}, k).s;
        };
        const Vec3 fd = (jm * s_at(h) - jm * s_at(-h)) / (2.0 * h);

        const DesiredState d{qd0, wd(t0), wd_dot(t0)};
        const TrackingError err = tracking_errors(x0, d, k);
        const Vec3 analytic = j_s_dot(jm, err, d, k, tc, td);
        REQUIRE(norm(fd - analytic) / norm(analytic) < 1e-6);
    }
}

TEST_CASE("RK4: isotropic torque-free body keeps ω") {
    const InertiaMatrix j(3.0 * Mat3::identity());
    SpacecraftState x{UnitQuaternion::identity(), {0.1, -0.2, 0.3}};
    const Vec3 w0 = x.omega;
    for (std::size_t i = 0; i < 1000; ++i) {
        x = rk4_step(j, x, 0.0, 0.01, kNoTorque, kNoTorque);
        REQUIRE(max_abs_diff(x.omega, w0) < 1e-12);
    }
}

TEST_CASE("RK4: pure spin matches the closed form and converges at fourth order") {
    const InertiaMatrix j(paper_inertia().data[0] * Mat3::identity());
    auto spin_error = [&](double w, double dt, double horizon) {
        SpacecraftState x{UnitQuaternion::identity(), {0, 0, w}};
        const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x = rk4_step(j, x, 0.0, dt, kNoTorque, kNoTorque);
            const double t = dt * static_cast<double>(i + 1);
            worst = std::max(worst, std::abs(x.q.scalar() - std::cos(0.5 * w * t)));
            worst = std::max(worst, std::abs(x.q.vec().z - std::sin(0.5 * w * t)));
        }
        return worst;
    };
    CHECK(spin_error(0.5, 0.01, 10.0) < 1e-8);
    const double coarse = spin_error(2.0, 0.2, 20.0);
    const double fine = spin_error(2.0, 0.1, 20.0);
    CHECK(coarse / fine > 12.0);
    CHECK(coarse / fine < 20.0);
}

TEST_CASE("RK4: quaternion norm preserved over 10⁶ steps") {
    const InertiaMatrix j(paper_inertia());
    SpacecraftState x{UnitQuaternion::from_axis_angle({1, 2, 3}, 1.0), {0.02, -0.01, 0.015}};
    double worst = 0.0;
    for (std::size_t i = 0; i < 1000000; ++i) {
        x = rk4_step(j, x, 0.0, 0.01, kNoTorque, kNoTorque);
        const Vec4 q = x.q.as_array();
        worst = std::max(worst, std::abs(std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]) - 1.0));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("RK4 reports non-finite states with the step index") {
    const InertiaMatrix j(paper_inertia());
    const TorqueFn bad = [](double, const SpacecraftState&) { return Vec3{std::nan(""), 0.0, 0.0}; };
    try {
        (void)rk4_step(j, {UnitQuaternion::identity(), {}}, 0.0, 0.01, bad, kNoTorque, 42);
        FAIL("expected NonFiniteState");
    } catch (const NonFiniteState& e) {
        CHECK(e.step() == 42);
    }
}

TEST_CASE("desired attitude is propagated from ω_d") {
    const double w = 0.05;
    DesiredPropagator p({UnitQuaternion::identity(), [w](double) { return Vec3{w, 0.0, 0.0}; },
                         [](double) { return Vec3{}; }});
    for (int i = 0; i < 1000; ++i) p.advance(0.01);
    CHECK(p.time() == doctest::Approx(10.0));
    CHECK(p.current().qd.scalar() == doctest::Approx(std::cos(0.5 * w * 10.0)).epsilon(1e-12));
    CHECK(p.current().qd.vec().x == doctest::Approx(std::sin(0.5 * w * 10.0)).epsilon(1e-12));
}
