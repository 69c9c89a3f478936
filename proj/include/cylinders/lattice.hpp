#pragma once

// Exact planar lattice arithmetic: integral vectors, unimodular matrices,
// rational cones and their Hirzebruch-Jung subdivision.

#include "cylinders/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <ostream>
#include <string>
#include <vector>

namespace cylinders {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer abs_int(const Integer& a) { return a < 0 ? Integer(-a) : a; }

inline Integer gcd_int(Integer a, Integer b)
{
    a = abs_int(a);
    b = abs_int(b);
    while (b != 0) {
        Integer r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

inline bool is_integral(const Rational& r) { return denominator(r) == 1; }

inline std::string to_string(const Rational& r)
{
    if (denominator(r) == 1)
        return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

/// Integral tangent vector in some chart.
struct IntVec {
    Integer x{0};
    Integer y{0};

    IntVec() = default;
    IntVec(Integer x_, Integer y_) : x(std::move(x_)), y(std::move(y_)) {}
    IntVec(long long x_, long long y_) : x(x_), y(y_) {}

    bool is_zero() const { return x == 0 && y == 0; }

    friend IntVec operator+(const IntVec& a, const IntVec& b) { return {a.x + b.x, a.y + b.y}; }
    friend IntVec operator-(const IntVec& a, const IntVec& b) { return {a.x - b.x, a.y - b.y}; }
    friend IntVec operator-(const IntVec& a) { return {-a.x, -a.y}; }
    friend IntVec operator*(const Integer& k, const IntVec& a) { return {k * a.x, k * a.y}; }
    IntVec& operator+=(const IntVec& o)
    {
        x += o.x;
        y += o.y;
        return *this;
    }

    friend bool operator==(const IntVec&, const IntVec&) = default;
    friend auto operator<=>(const IntVec& a, const IntVec& b)
    {
        if (a.x != b.x)
            return a.x < b.x ? std::strong_ordering::less : std::strong_ordering::greater;
        if (a.y != b.y)
            return a.y < b.y ? std::strong_ordering::less : std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string str() const { return "(" + x.str() + "," + y.str() + ")"; }
};

inline std::ostream& operator<<(std::ostream& os, const IntVec& v) { return os << v.str(); }

/// Rational point or vector in a chart.
struct RatVec {
    Rational x{0};
    Rational y{0};

    RatVec() = default;
    RatVec(Rational x_, Rational y_) : x(std::move(x_)), y(std::move(y_)) {}
    explicit RatVec(const IntVec& v) : x(v.x), y(v.y) {}

    bool is_zero() const { return x == 0 && y == 0; }

    friend RatVec operator+(const RatVec& a, const RatVec& b) { return {a.x + b.x, a.y + b.y}; }
    friend RatVec operator-(const RatVec& a, const RatVec& b) { return {a.x - b.x, a.y - b.y}; }
    friend RatVec operator-(const RatVec& a) { return {-a.x, -a.y}; }
    friend RatVec operator*(const Rational& k, const RatVec& a) { return {k * a.x, k * a.y}; }
    friend bool operator==(const RatVec&, const RatVec&) = default;

    std::string str() const { return "(" + to_string(x) + "," + to_string(y) + ")"; }
};

inline std::ostream& operator<<(std::ostream& os, const RatVec& v) { return os << v.str(); }

inline Integer det(const IntVec& a, const IntVec& b) { return a.x * b.y - a.y * b.x; }
inline Rational det(const RatVec& a, const RatVec& b) { return a.x * b.y - a.y * b.x; }
inline Integer dot(const IntVec& a, const IntVec& b) { return a.x * b.x + a.y * b.y; }
inline Rational dot(const RatVec& a, const RatVec& b) { return a.x * b.x + a.y * b.y; }

/// gcd(|x|,|y|); the multiplicity of v over its primitive direction.
inline Integer lattice_length(const IntVec& v)
{
    if (v.is_zero())
        throw Error(ErrorKind::ZeroVector, "lattice length of the zero vector");
    return gcd_int(v.x, v.y);
}

inline IntVec primitive(const IntVec& v)
{
    Integer g = lattice_length(v);
    return {v.x / g, v.y / g};
}

inline bool is_primitive(const IntVec& v) { return !v.is_zero() && lattice_length(v) == 1; }

/// Smallest positive integer multiple of a rational vector that is integral,
/// divided down to a primitive vector. Direction is preserved.
inline IntVec primitive_direction(const RatVec& v)
{
    if (v.is_zero())
        throw Error(ErrorKind::ZeroVector, "direction of the zero vector");
    Integer l = boost::multiprecision::lcm(denominator(v.x), denominator(v.y));
    IntVec w{numerator(v.x) * (l / denominator(v.x)), numerator(v.y) * (l / denominator(v.y))};
    return primitive(w);
}

/// 2x2 integer matrix with determinant +1 or -1.
class UniMatrix {
public:
    UniMatrix() : a_(1), b_(0), c_(0), d_(1) {}
    UniMatrix(Integer a, Integer b, Integer c, Integer d)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d))
    {
        Integer dt = det();
        if (dt != 1 && dt != -1)
            throw Error(ErrorKind::InvalidData, "matrix is not unimodular (det " + dt.str() + ")");
    }

    static UniMatrix identity() { return {}; }

    const Integer& a() const { return a_; }
    const Integer& b() const { return b_; }
    const Integer& c() const { return c_; }
    const Integer& d() const { return d_; }

    Integer det() const { return a_ * d_ - b_ * c_; }
    Integer trace() const { return a_ + d_; }
    bool is_identity() const { return a_ == 1 && b_ == 0 && c_ == 0 && d_ == 1; }

    UniMatrix inverse() const
    {
        // Unimodular: the adjugate divided by det stays integral.
        Integer dt = det();
        return {d_ * dt, -b_ * dt, -c_ * dt, a_ * dt};
    }

    IntVec operator()(const IntVec& v) const { return {a_ * v.x + b_ * v.y, c_ * v.x + d_ * v.y}; }
    RatVec operator()(const RatVec& v) const
    {
        return {Rational(a_) * v.x + Rational(b_) * v.y, Rational(c_) * v.x + Rational(d_) * v.y};
    }

    friend UniMatrix operator*(const UniMatrix& m, const UniMatrix& n)
    {
        return {m.a_ * n.a_ + m.b_ * n.c_, m.a_ * n.b_ + m.b_ * n.d_,
                m.c_ * n.a_ + m.d_ * n.c_, m.c_ * n.b_ + m.d_ * n.d_};
    }

    friend bool operator==(const UniMatrix&, const UniMatrix&) = default;

    std::string str() const
    {
        return "[[" + a_.str() + "," + b_.str() + "],[" + c_.str() + "," + d_.str() + "]]";
    }

private:
    Integer a_, b_, c_, d_;
};

/// Strictly convex 2-D cone spanned by two primitive generators in
/// counterclockwise order.
class RatCone {
public:
    RatCone(const IntVec& g1, const IntVec& g2)
    {
        IntVec p1 = primitive(g1);
        IntVec p2 = primitive(g2);
        Integer dt = det(p1, p2);
        if (dt == 0)
            throw Error(ErrorKind::InvalidData, "cone generators are linearly dependent");
        if (dt > 0) {
            g1_ = p1;
            g2_ = p2;
        } else {
            g1_ = p2;
            g2_ = p1;
        }
    }

    const IntVec& g1() const { return g1_; }
    const IntVec& g2() const { return g2_; }
    Integer multiplicity() const { return det(g1_, g2_); }

    /// Closed-cone membership of an arbitrary vector.
    bool contains(const IntVec& v) const { return det(g1_, v) >= 0 && det(v, g2_) >= 0; }

    friend bool operator==(const RatCone&, const RatCone&) = default;

private:
    IntVec g1_, g2_;
};

inline bool is_unimodular(const RatCone& c) { return c.multiplicity() == 1; }

/// Floor division for integers with positive divisor.
inline Integer floor_div(const Integer& a, const Integer& b)
{
    Integer q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        q -= 1;
    return q;
}

/// Hirzebruch-Jung subdivision: inserts the lattice points on the boundary of
/// the convex hull of the nonzero lattice points of the cone. Consecutive rays
/// u_{j-1}, u_j, u_{j+1} satisfy u_{j-1} + u_{j+1} = b_j u_j with b_j >= 2.
inline std::vector<RatCone> unimodular_subdivide(const RatCone& cone)
{
    std::vector<IntVec> rays{cone.g1()};
    IntVec left = cone.g1();
    const IntVec& right = cone.g2();
    while (det(left, right) > 1) {
        const Integer n = det(left, right);
        // p with det(left, p) = 1 via the extended Euclidean algorithm on left.
        Integer old_r = left.x, r = left.y, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            Integer q = floor_div(old_r, r);
            Integer tmp = old_r - q * r;
            old_r = r;
            r = tmp;
            tmp = old_s - q * s;
            old_s = s;
            s = tmp;
            tmp = old_t - q * t;
            old_t = t;
            t = tmp;
        }
        // old_s*left.x + old_t*left.y = old_r = +-1
        IntVec p{-old_t * old_r, old_s * old_r};
        // Shift along left so that 0 <= det(p, right) < n.
        Integer k = floor_div(det(p, right), n);
        p = p - k * left;
        rays.push_back(p);
        left = p;
    }
    rays.push_back(right);
    std::vector<RatCone> out;
    for (std::size_t i = 0; i + 1 < rays.size(); ++i)
        out.emplace_back(rays[i], rays[i + 1]);
    return out;
}

} // namespace cylinders
