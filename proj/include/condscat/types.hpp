#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace condscat {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    Vec2 operator/(double a) const { return {x / a, y / a}; }
    Vec2 operator-() const { return {-x, -y}; }
    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double a, Vec2 v) { return v * a; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 rotate(Vec2 a, double t) {
    const double c = std::cos(t), s = std::sin(t);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}
inline Vec2 polar_point(double r, double t) { return {r * std::cos(t), r * std::sin(t)}; }

// OpenMP kernels keep a serial reference path
enum class Exec { serial, parallel };

// value and gradient of a complex scalar field
struct FieldSample {
    cplx value{};
    std::array<cplx, 2> grad{};
};

// bad user input: invalid geometry, medium, config (CLI exit code 1)
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// numerical failure: singular system, quadrature budget exhausted (CLI exit code 2)
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace condscat
