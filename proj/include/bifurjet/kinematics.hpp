#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bifurjet {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    Vec3 unit() const {
        const double n = norm();
        if (n == 0.0) throw std::domain_error("cannot normalize zero vector");
        return {x / n, y / n, z / n};
    }
};

// Energy-momentum four-vector in GeV, metric (+,-,-,-).
struct FourVector {
    double e = 0.0, px = 0.0, py = 0.0, pz = 0.0;

    Vec3 p3() const { return {px, py, pz}; }
    double p() const { return p3().norm(); }
    double pt() const { return std::hypot(px, py); }
    double mass2() const { return e * e - px * px - py * py - pz * pz; }
    double mass() const { return std::sqrt(std::max(0.0, mass2())); }
    double cos_theta() const {
        const double pm = p();
        return pm == 0.0 ? 0.0 : pz / pm;
    }

    FourVector operator+(const FourVector& o) const {
        return {e + o.e, px + o.px, py + o.py, pz + o.pz};
    }
    FourVector& operator+=(const FourVector& o) {
        e += o.e; px += o.px; py += o.py; pz += o.pz;
        return *this;
    }
    FourVector operator*(double s) const { return {e * s, px * s, py * s, pz * s}; }
};

inline FourVector massless(double energy, const Vec3& direction) {
    const Vec3 u = direction.unit();
    return {energy, energy * u.x, energy * u.y, energy * u.z};
}

// cos of the opening angle between the momenta of a and b
inline double cos_angle(const FourVector& a, const FourVector& b) {
    const double na = a.p(), nb = b.p();
    if (na == 0.0 || nb == 0.0)
        throw std::domain_error("angle undefined for zero-momentum input");
    const double c = a.p3().dot(b.p3()) / (na * nb);
    return std::clamp(c, -1.0, 1.0);
}

// Rodrigues rotation of v about `axis` by `angle` radians.
inline Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
    const Vec3 k = axis.unit();
    const double c = std::cos(angle), s = std::sin(angle);
    return v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c));
}

inline FourVector rotate(const FourVector& v, const Vec3& axis, double angle) {
    const Vec3 r = rotate(v.p3(), axis, angle);
    return {v.e, r.x, r.y, r.z};
}

// Rotation taking direction `from` onto direction `to` (shortest arc).
inline Vec3 rotate_onto(const Vec3& v, const Vec3& from, const Vec3& to) {
    const Vec3 f = from.unit(), t = to.unit();
    const Vec3 axis = f.cross(t);
    const double s = axis.norm();
    const double c = std::clamp(f.dot(t), -1.0, 1.0);
    if (s < 1e-300) {
        if (c > 0.0) return v;  // already aligned
        // antiparallel: rotate pi about any axis orthogonal to f
        Vec3 ortho = std::abs(f.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        ortho = (ortho - f * f.dot(ortho)).unit();
        return rotate(v, ortho, M_PI);
    }
    return rotate(v, axis, std::atan2(s, c));
}

// Boost by velocity beta (of the new frame's origin as seen from the old one):
// takes a rest-frame vector to the frame where the parent moves with +beta.
inline FourVector boost(const FourVector& v, const Vec3& beta) {
    const double b2 = beta.norm2();
    if (b2 >= 1.0) throw std::domain_error("boost velocity >= c");
    if (b2 == 0.0) return v;
    const double gamma = 1.0 / std::sqrt(1.0 - b2);
    const double bp = beta.dot(v.p3());
    const double k = (gamma - 1.0) / b2;
    const Vec3 p = v.p3() + beta * (k * bp + gamma * v.e);
    return {gamma * (v.e + bp), p.x, p.y, p.z};
}

}  // namespace bifurjet
