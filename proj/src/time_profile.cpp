#include "ftac/time_profile.hpp"

#include <cmath>
#include <numbers>

#include "ftac/errors.hpp"

namespace ftac {

TimeProfile TimeProfile::cosine(double offset, double amplitude, double frequency) {
    return sine(offset, amplitude, frequency, 0.5 * std::numbers::pi);
}

double TimeProfile::value(double t) const {
    switch (kind) {
        case Kind::constant:
            return offset;
        case Kind::sinusoid:
            return offset + amplitude * std::sin(frequency * t + phase);
        case Kind::abs_sinusoid:
            return offset + amplitude * std::abs(std::sin(frequency * t + phase));
    }
    return offset;
}

double TimeProfile::rate(double t) const {
    switch (kind) {
        case Kind::constant:
            return 0.0;
        case Kind::sinusoid:
            return amplitude * frequency * std::cos(frequency * t + phase);
        case Kind::abs_sinusoid: {
            const double arg = frequency * t + phase;
            const double sign = std::sin(arg) >= 0.0 ? 1.0 : -1.0;
            return sign * amplitude * frequency * std::cos(arg);
        }
    }
    return 0.0;
}

double TimeProfile::peak() const {
    return kind == Kind::constant ? std::abs(offset) : std::abs(offset) + std::abs(amplitude);
}

TimeProfile::Kind profile_kind_from_string(const std::string& name) {
    if (name == "constant") return TimeProfile::Kind::constant;
    if (name == "sinusoid") return TimeProfile::Kind::sinusoid;
    if (name == "abs_sinusoid") return TimeProfile::Kind::abs_sinusoid;
    throw ConfigError("unknown time profile type '" + name + "'");
}

std::string to_string(TimeProfile::Kind kind) {
    switch (kind) {
        case TimeProfile::Kind::constant:
            return "constant";
        case TimeProfile::Kind::sinusoid:
            return "sinusoid";
        case TimeProfile::Kind::abs_sinusoid:
            return "abs_sinusoid";
    }
    return "constant";
}

Vec3 evaluate(const VectorProfile& p, double t) { return {p[0].value(t), p[1].value(t), p[2].value(t)}; }

Vec3 evaluate_rate(const VectorProfile& p, double t) { return {p[0].rate(t), p[1].rate(t), p[2].rate(t)}; }

VectorProfile zero_profile() {
    return {TimeProfile::constant(0.0), TimeProfile::constant(0.0), TimeProfile::constant(0.0)};
}

}  // namespace ftac
