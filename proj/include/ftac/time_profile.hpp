#pragma once

#include <array>
#include <string>

#include "ftac/so3.hpp"

namespace ftac {

/// Closed-form scalar signal of time.
///   constant:     offset
///   sinusoid:     offset + amplitude·sin(frequency·t + phase)
///   abs_sinusoid: offset + amplitude·|sin(frequency·t + phase)|
struct TimeProfile {
    enum class Kind { constant, sinusoid, abs_sinusoid };

    Kind kind = Kind::constant;
    double offset = 0.0;
    double amplitude = 0.0;
    double frequency = 0.0;  // rad/s
    double phase = 0.0;      // rad

    [[nodiscard]] static TimeProfile constant(double value) { return {Kind::constant, value, 0.0, 0.0, 0.0}; }
    [[nodiscard]] static TimeProfile sine(double offset, double amplitude, double frequency, double phase = 0.0) {
        return {Kind::sinusoid, offset, amplitude, frequency, phase};
    }
    [[nodiscard]] static TimeProfile cosine(double offset, double amplitude, double frequency);
    [[nodiscard]] static TimeProfile abs_sine(double offset, double amplitude, double frequency, double phase = 0.0) {
        return {Kind::abs_sinusoid, offset, amplitude, frequency, phase};
    }

    [[nodiscard]] double value(double t) const;
    /// Time derivative (one-sided at the kinks of abs_sinusoid).
    [[nodiscard]] double rate(double t) const;
    /// Upper bound of |value(t)| over all t.
    [[nodiscard]] double peak() const;
};

[[nodiscard]] TimeProfile::Kind profile_kind_from_string(const std::string& name);
[[nodiscard]] std::string to_string(TimeProfile::Kind kind);

using VectorProfile = std::array<TimeProfile, 3>;

[[nodiscard]] Vec3 evaluate(const VectorProfile& p, double t);
[[nodiscard]] Vec3 evaluate_rate(const VectorProfile& p, double t);
[[nodiscard]] VectorProfile zero_profile();

}  // namespace ftac
