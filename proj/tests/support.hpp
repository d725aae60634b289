#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ftac/estimation.hpp"
#include "ftac/so3.hpp"

/// Hand-rolled generators and independent reference computations shared by the test suites.
namespace ftac::test {

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Vec3 random_vec(Rng& rng, double scale = 1.0) {
    return {uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

inline Vec3 random_direction(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        const Vec3 v{n(rng), n(rng), n(rng)};
        const double l = norm(v);
        if (l > 1e-6) return v / l;
    }
}

/// Uniform on S³ (both hemispheres).
inline UnitQuaternion random_quat(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        const Vec4 q{n(rng), n(rng), n(rng), n(rng)};
        const double l = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        if (l > 1e-6) return UnitQuaternion(q);
    }
}

/// Rotation of angle uniform in [0, max_angle] about a random axis.
inline UnitQuaternion random_small_quat(Rng& rng, double max_angle) {
    return UnitQuaternion::from_axis_angle(random_direction(rng), uniform(rng, 0.0, max_angle));
}

/// Random symmetric positive-definite matrix with eigenvalues in [lo, hi].
inline Mat3 random_spd(Rng& rng, double lo, double hi) {
    const UnitQuaternion q = random_quat(rng);
    const Vec3 a = q.vec();
    const double w = q.scalar();
    // Active rotation matrix written out entrywise.
    Mat3 r{};
    r.data = {1 - 2 * (a.y * a.y + a.z * a.z), 2 * (a.x * a.y - w * a.z),     2 * (a.x * a.z + w * a.y),
              2 * (a.x * a.y + w * a.z),     1 - 2 * (a.x * a.x + a.z * a.z), 2 * (a.y * a.z - w * a.x),
              2 * (a.x * a.z - w * a.y),     2 * (a.y * a.z + w * a.x),     1 - 2 * (a.x * a.x + a.y * a.y)};
    const Mat3 d = diag(uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi));
    Mat3 m = r * d * r.transpose();
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) m(j, i) = m(i, j) = 0.5 * (m(i, j) + m(j, i));
    return m;
}

template <std::size_t R, std::size_t C>
double max_abs_diff(const Matrix<R, C>& a, const Matrix<R, C>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < R * C; ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

inline double max_abs_diff(const Vec3& a, const Vec3& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

/// Componentwise cross product.
inline Vec3 cross_ref(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Hamilton product on raw 4-vectors, no normalization.
inline Vec4 hamilton_ref(const Vec4& a, const Vec4& b) {
    return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

/// Direction-cosine matrix of the frame rotated by `angle` about unit `axis`:
/// the transpose of the Rodrigues rotation.
inline Mat3 dcm_ref(const Vec3& axis, double angle) {
    const double c = std::cos(angle), s = std::sin(angle), v = 1.0 - c;
    const double x = axis.x, y = axis.y, z = axis.z;
    Mat3 rod{};
    rod.data = {c + x * x * v,     x * y * v - z * s, x * z * v + y * s,  //
                y * x * v + z * s, c + y * y * v,     y * z * v - x * s,  //
                z * x * v - y * s, z * y * v + x * s, c + z * z * v};
    return rod.transpose();
}

inline Mat3 paper_inertia() {
    Mat3 j{};
    j.data = {8.0, 0.15, -0.27, 0.15, 6.75, -0.1, -0.27, -0.1, 6.25};
    return j;
}

}  // namespace ftac::test
