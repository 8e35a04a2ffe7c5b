#pragma once

#include <cmath>

namespace rotorlab {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }
inline double rpm_to_rad_s(double rpm) { return rpm * 2.0 * kPi / 60.0; }

// Wrap an angle to [0, 2*pi).
inline double wrap_2pi(double a) {
    double w = std::fmod(a, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w;
}

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Unit quaternion, scalar-first. Represents body-to-world attitude.
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    void normalize() {
        const double n = norm();
        if (n > 0.0) {
            w /= n; x /= n; y /= n; z /= n;
        }
    }
};

inline Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

// Attitude kinematics: qdot = 0.5 * q * (0, omega_body).
inline Quat quat_derivative(const Quat& q, const Vec3& omega_body) {
    const Quat w{0.0, omega_body.x, omega_body.y, omega_body.z};
    Quat d = q * w;
    d.w *= 0.5; d.x *= 0.5; d.y *= 0.5; d.z *= 0.5;
    return d;
}

} // namespace rotorlab
