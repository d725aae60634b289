#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

namespace ftac {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    [[nodiscard]] constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
    [[nodiscard]] constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

[[nodiscard]] constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
[[nodiscard]] constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
[[nodiscard]] constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
[[nodiscard]] constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
[[nodiscard]] constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
[[nodiscard]] constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }

[[nodiscard]] constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
[[nodiscard]] constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
[[nodiscard]] inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
[[nodiscard]] inline bool is_finite(const Vec3& a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Dense row-major R×C matrix of doubles.
template <std::size_t R, std::size_t C>
struct Matrix {
    std::array<double, R * C> data{};

    static constexpr std::size_t rows = R;
    static constexpr std::size_t cols = C;

    [[nodiscard]] constexpr double operator()(std::size_t i, std::size_t j) const { return data[i * C + j]; }
    [[nodiscard]] constexpr double& operator()(std::size_t i, std::size_t j) { return data[i * C + j]; }

    [[nodiscard]] static constexpr Matrix zero() { return Matrix{}; }
    [[nodiscard]] static constexpr Matrix identity()
        requires(R == C)
    {
        Matrix m{};
        for (std::size_t i = 0; i < R; ++i) m(i, i) = 1.0;
        return m;
    }

    constexpr Matrix& operator+=(const Matrix& o) {
        for (std::size_t i = 0; i < R * C; ++i) data[i] += o.data[i];
        return *this;
    }
    constexpr Matrix& operator-=(const Matrix& o) {
        for (std::size_t i = 0; i < R * C; ++i) data[i] -= o.data[i];
        return *this;
    }
    constexpr Matrix& operator*=(double s) {
        for (auto& v : data) v *= s;
        return *this;
    }

    [[nodiscard]] constexpr Matrix<C, R> transpose() const {
        Matrix<C, R> t{};
        for (std::size_t i = 0; i < R; ++i)
            for (std::size_t j = 0; j < C; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
};

template <std::size_t R, std::size_t C>
[[nodiscard]] constexpr Matrix<R, C> operator+(Matrix<R, C> a, const Matrix<R, C>& b) { return a += b; }
template <std::size_t R, std::size_t C>
[[nodiscard]] constexpr Matrix<R, C> operator-(Matrix<R, C> a, const Matrix<R, C>& b) { return a -= b; }
template <std::size_t R, std::size_t C>
[[nodiscard]] constexpr Matrix<R, C> operator*(double s, Matrix<R, C> a) { return a *= s; }
template <std::size_t R, std::size_t C>
[[nodiscard]] constexpr Matrix<R, C> operator*(Matrix<R, C> a, double s) { return a *= s; }

template <std::size_t R, std::size_t N, std::size_t C>
[[nodiscard]] constexpr Matrix<R, C> operator*(const Matrix<R, N>& a, const Matrix<N, C>& b) {
    Matrix<R, C> m{};
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t k = 0; k < N; ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < C; ++j) m(i, j) += aik * b(k, j);
        }
    return m;
}

template <std::size_t R, std::size_t C>
[[nodiscard]] constexpr std::array<double, R> operator*(const Matrix<R, C>& a, const std::array<double, C>& v) {
    std::array<double, R> out{};
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) out[i] += a(i, j) * v[j];
    return out;
}

using Mat3 = Matrix<3, 3>;
using Vec4 = std::array<double, 4>;

[[nodiscard]] constexpr Vec3 operator*(const Mat3& m, const Vec3& v) {
    return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
            m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
            m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

[[nodiscard]] constexpr Mat3 diag(double a, double b, double c) {
    Mat3 m{};
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
}

[[nodiscard]] constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 m{};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
    return m;
}

/// v^×, so that skew(v)·w = v × w.
[[nodiscard]] constexpr Mat3 skew(const Vec3& v) {
    Mat3 m{};
    m(0, 1) = -v.z;
    m(0, 2) = v.y;
    m(1, 0) = v.z;
    m(1, 2) = -v.x;
    m(2, 0) = -v.y;
    m(2, 1) = v.x;
    return m;
}

[[nodiscard]] constexpr double determinant(const Mat3& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

/// Adjugate inverse; nullopt when |det| ≤ tol·‖m‖³ (max-abs scale).
[[nodiscard]] std::optional<Mat3> inverse(const Mat3& m, double tol = 1e-12);

/// Eigenvalues of a symmetric N×N matrix (cyclic Jacobi), ascending.
template <std::size_t N>
[[nodiscard]] std::array<double, N> symmetric_eigenvalues(Matrix<N, N> a, double tol = 1e-14) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            scale += a(i, i) * a(i, i);
            for (std::size_t j = i + 1; j < N; ++j) off += a(i, j) * a(i, j);
        }
        if (off <= tol * tol * std::max(scale, 1e-300)) break;
        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < N; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::array<double, N> ev{};
    for (std::size_t i = 0; i < N; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Singular values of an R×C matrix, ascending (sqrt of eig(AᵀA), clamped ≥ 0).
template <std::size_t R, std::size_t C>
[[nodiscard]] std::array<double, C> singular_values(const Matrix<R, C>& a) {
    auto ev = symmetric_eigenvalues(a.transpose() * a);
    for (auto& v : ev) v = std::sqrt(std::max(v, 0.0));
    return ev;
}

/// Induced 2-norm.
template <std::size_t R, std::size_t C>
[[nodiscard]] double spectral_norm(const Matrix<R, C>& a) {
    return singular_values(a).back();
}

/// Scalar-first unit quaternion. Every constructor normalizes.
class UnitQuaternion {
public:
    constexpr UnitQuaternion() = default;
    /// Normalizes (q0, v); throws ftac::Error on zero or non-finite input.
    UnitQuaternion(double q0, const Vec3& v);
    explicit UnitQuaternion(const Vec4& q) : UnitQuaternion(q[0], {q[1], q[2], q[3]}) {}

    [[nodiscard]] static constexpr UnitQuaternion identity() { return {}; }
    /// [cos(θ/2), n·sin(θ/2)]; the axis is normalized.
    [[nodiscard]] static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);

    [[nodiscard]] constexpr double scalar() const { return q0_; }
    [[nodiscard]] constexpr const Vec3& vec() const { return v_; }
    [[nodiscard]] constexpr Vec4 as_array() const { return {q0_, v_.x, v_.y, v_.z}; }

    [[nodiscard]] constexpr UnitQuaternion inverse() const {
        UnitQuaternion q;
        q.q0_ = q0_;
        q.v_ = -v_;
        return q;
    }

    /// Same rotation with the scalar part made non-negative.
    [[nodiscard]] constexpr UnitQuaternion canonical() const { return q0_ < 0.0 ? negated() : *this; }
    [[nodiscard]] constexpr UnitQuaternion negated() const {
        UnitQuaternion q;
        q.q0_ = -q0_;
        q.v_ = -v_;
        return q;
    }

private:
    double q0_ = 1.0;
    Vec3 v_{};
};

/// Hamilton product, renormalized.
[[nodiscard]] UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);
[[nodiscard]] inline UnitQuaternion quat_mul(const UnitQuaternion& a, const UnitQuaternion& b) { return a * b; }
[[nodiscard]] constexpr UnitQuaternion quat_inv(const UnitQuaternion& q) { return q.inverse(); }

/// R(q) = I₃ − 2 q0 qv^× + 2 qv^× qv^×.
[[nodiscard]] Mat3 rotation_matrix(const UnitQuaternion& q);

/// G(q) = q0 I₃ + qv^×.
[[nodiscard]] Mat3 g_matrix(const UnitQuaternion& q);

/// Attitude-estimate error operators: q̂_e = q_e + M(q̃) q_e and q̂_e,vec = q_e,vec + E(q̃) q_e.
struct ErrorMatrices {
    Matrix<4, 4> M;
    Matrix<3, 4> E;
};

[[nodiscard]] ErrorMatrices error_matrices(const UnitQuaternion& qt);

/// Principal rotation angle 2·acos(|q0|) in [0, π].
[[nodiscard]] double principal_angle(const UnitQuaternion& q);

[[nodiscard]] inline Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

}  // namespace ftac
