#include "ftac/so3.hpp"

#include "ftac/errors.hpp"

namespace ftac {

std::optional<Mat3> inverse(const Mat3& m, double tol) {
    double scale = 0.0;
    for (double v : m.data) scale = std::max(scale, std::abs(v));
    const double det = determinant(m);
    if (!(std::abs(det) > tol * scale * scale * scale)) return std::nullopt;
    Mat3 inv{};
    inv(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    inv(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    inv(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    inv(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    inv(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    inv(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    inv(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    inv(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    inv(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return inv * (1.0 / det);
}

UnitQuaternion::UnitQuaternion(double q0, const Vec3& v) {
    const double n = std::sqrt(q0 * q0 + dot(v, v));
    if (!std::isfinite(n) || n == 0.0) throw Error("quaternion must be finite and nonzero");
    q0_ = q0 / n;
    v_ = v / n;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
    const double n = norm(axis);
    if (!(n > 0.0)) throw Error("rotation axis must be nonzero");
    return {std::cos(0.5 * angle), axis * (std::sin(0.5 * angle) / n)};
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
    const double a0 = a.scalar();
    const double b0 = b.scalar();
    const Vec3& av = a.vec();
    const Vec3& bv = b.vec();
    return {a0 * b0 - dot(av, bv), a0 * bv + b0 * av + cross(av, bv)};
}

Mat3 rotation_matrix(const UnitQuaternion& q) {
    const Mat3 qx = skew(q.vec());
    return Mat3::identity() - (2.0 * q.scalar()) * qx + 2.0 * (qx * qx);
}

Mat3 g_matrix(const UnitQuaternion& q) {
    return q.scalar() * Mat3::identity() + skew(q.vec());
}

ErrorMatrices error_matrices(const UnitQuaternion& qt) {
    const double d = qt.scalar() - 1.0;
    const Vec3& v = qt.vec();
    const Mat3 lower = d * Mat3::identity() + skew(v);

    ErrorMatrices out{};
    out.M(0, 0) = d;
    for (std::size_t j = 0; j < 3; ++j) {
        out.M(0, j + 1) = v[j];
        out.M(j + 1, 0) = -v[j];
        out.E(j, 0) = -v[j];
        for (std::size_t c = 0; c < 3; ++c) {
            out.M(j + 1, c + 1) = lower(j, c);
            out.E(j, c + 1) = lower(j, c);
        }
    }
    return out;
}

double principal_angle(const UnitQuaternion& q) {
    // Equal to 2·acos(|q0|); the atan2 form keeps precision near θ = 0.
    return 2.0 * std::atan2(norm(q.vec()), std::abs(q.scalar()));
}

}  // namespace ftac
