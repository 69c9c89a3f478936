#pragma once

// Effective curve classes as exponent vectors over named generators, and
// Laurent series in z with coefficients in Z[NE], truncated by class degree.

#include "cylinders/lattice.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cylinders {

class CurveClass {
public:
    CurveClass() = default;

    static CurveClass generator(const std::string& name, int power = 1)
    {
        CurveClass c;
        if (power < 0)
            throw Error(ErrorKind::InvalidData, "negative exponent in a curve class");
        if (power > 0)
            c.e_[name] = power;
        return c;
    }

    /// "0", "E", "E^2 F", "E^1*F^3".
    static CurveClass parse(const std::string& text)
    {
        CurveClass c;
        std::string t = text;
        for (char& ch : t)
            if (ch == '*' || ch == '+' || ch == ',')
                ch = ' ';
        std::istringstream in(t);
        std::string tok;
        while (in >> tok) {
            if (tok == "0")
                continue;
            std::string name = tok;
            int power = 1;
            auto hat = tok.find('^');
            if (hat != std::string::npos) {
                name = tok.substr(0, hat);
                try {
                    std::size_t used = 0;
                    power = std::stoi(tok.substr(hat + 1), &used);
                    if (used != tok.size() - hat - 1)
                        throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    throw Error(ErrorKind::Schema, "bad curve class term '" + tok + "'");
                }
            }
            if (name.empty() || power < 0)
                throw Error(ErrorKind::Schema, "bad curve class term '" + tok + "'");
            c = c + generator(name, power);
        }
        return c;
    }

    int degree() const
    {
        int d = 0;
        for (const auto& [n, k] : e_)
            d += k;
        return d;
    }
    bool is_zero() const { return e_.empty(); }
    int exponent(const std::string& name) const
    {
        auto it = e_.find(name);
        return it == e_.end() ? 0 : it->second;
    }
    const std::map<std::string, int>& exponents() const { return e_; }

    friend CurveClass operator+(const CurveClass& a, const CurveClass& b)
    {
        CurveClass c = a;
        for (const auto& [n, k] : b.e_)
            c.e_[n] += k;
        return c;
    }

    /// a - b when the difference is effective.
    std::optional<CurveClass> minus(const CurveClass& b) const
    {
        CurveClass c = *this;
        for (const auto& [n, k] : b.e_) {
            int have = c.exponent(n);
            if (have < k)
                return std::nullopt;
            if (have == k)
                c.e_.erase(n);
            else
                c.e_[n] = have - k;
        }
        return c;
    }

    friend bool operator==(const CurveClass&, const CurveClass&) = default;
    friend bool operator<(const CurveClass& a, const CurveClass& b)
    {
        if (a.degree() != b.degree())
            return a.degree() < b.degree();
        return a.e_ < b.e_;
    }

    std::string str() const
    {
        if (e_.empty())
            return "0";
        std::string s;
        for (const auto& [n, k] : e_) {
            if (!s.empty())
                s += " ";
            s += n + "^" + std::to_string(k);
        }
        return s;
    }

private:
    std::map<std::string, int> e_;
};

/// Every effective class over the given generators with degree <= bound.
inline std::vector<CurveClass> classes_up_to(const std::vector<std::string>& gens, int bound)
{
    std::vector<CurveClass> out{CurveClass{}};
    for (const auto& g : gens) {
        std::vector<CurveClass> next;
        for (const auto& c : out)
            for (int k = 0; c.degree() + k <= bound; ++k)
                next.push_back(c + CurveClass::generator(g, k));
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct SeriesKey {
    CurveClass cls;
    IntVec exp;

    friend bool operator==(const SeriesKey&, const SeriesKey&) = default;
    friend bool operator<(const SeriesKey& a, const SeriesKey& b)
    {
        if (!(a.cls == b.cls))
            return a.cls < b.cls;
        return a.exp < b.exp;
    }
};

/// Finite sum of c * t^cls * z^exp; terms whose class degree exceeds `order`
/// are dropped.
class Series {
public:
    explicit Series(int order) : order_(order) {}

    static Series one(int order)
    {
        Series s(order);
        s.add({CurveClass{}, {0, 0}}, 1);
        return s;
    }
    static Series monomial(const CurveClass& c, const IntVec& e, const Integer& coeff, int order)
    {
        Series s(order);
        s.add({c, e}, coeff);
        return s;
    }

    int order() const { return order_; }
    const std::map<SeriesKey, Integer>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const SeriesKey& k, const Integer& c)
    {
        if (c == 0 || k.cls.degree() > order_)
            return;
        auto [it, fresh] = terms_.try_emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    Integer coefficient(const CurveClass& c, const IntVec& e) const
    {
        auto it = terms_.find({c, e});
        return it == terms_.end() ? Integer(0) : it->second;
    }

    friend Series operator+(const Series& a, const Series& b)
    {
        Series s = a;
        for (const auto& [k, c] : b.terms_)
            s.add(k, c);
        return s;
    }
    friend Series operator-(const Series& a, const Series& b)
    {
        Series s = a;
        for (const auto& [k, c] : b.terms_)
            s.add(k, -c);
        return s;
    }
    friend Series operator*(const Series& a, const Series& b)
    {
        Series s(std::min(a.order_, b.order_));
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) {
                if (ka.cls.degree() + kb.cls.degree() > s.order_)
                    continue;
                s.add({ka.cls + kb.cls, ka.exp + kb.exp}, ca * cb);
            }
        return s;
    }

    /// Multiply every exponent by z^v.
    Series shifted(const IntVec& v) const
    {
        Series s(order_);
        for (const auto& [k, c] : terms_)
            s.add({k.cls, k.exp + v}, c);
        return s;
    }

    /// Inverse of a series of the form 1 + (terms of positive degree).
    Series inverse() const
    {
        Series g = *this - one(order_);
        for (const auto& [k, c] : g.terms_)
            if (k.cls.degree() == 0)
                throw Error(ErrorKind::InvalidData, "series is not invertible modulo the truncation");
        Series neg = Series(order_) - g;
        Series acc = one(order_), p = one(order_);
        for (int j = 1; j <= order_; ++j) {
            p = p * neg;
            acc = acc + p;
        }
        return acc;
    }

    Series pow(long long e) const
    {
        if (e < 0)
            return inverse().pow(-e);
        Series r = one(order_), base = *this;
        while (e > 0) {
            if (e & 1)
                r = r * base;
            e >>= 1;
            if (e)
                base = base * base;
        }
        return r;
    }

    friend bool operator==(const Series& a, const Series& b) { return a.terms_ == b.terms_; }

    std::string str() const
    {
        if (terms_.empty())
            return "0";
        std::string s;
        for (const auto& [k, c] : terms_) {
            if (!s.empty())
                s += " + ";
            s += c.str();
            if (!k.cls.is_zero())
                s += "*t[" + k.cls.str() + "]";
            if (!k.exp.is_zero())
                s += "*z" + k.exp.str();
        }
        return s;
    }

private:
    int order_;
    std::map<SeriesKey, Integer> terms_;
};

} // namespace cylinders
