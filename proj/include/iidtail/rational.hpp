#pragma once

// Exact rational arithmetic on top of GMP's mpq_class.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iidtail {

using Rational = mpq_class;
using Integer = mpz_class;

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses "p/q", "p", or a plain decimal such as "-0.125" into a canonical
/// rational. Throws ParseError on malformed input or a zero denominator.
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    if (s.empty()) throw ParseError("empty rational");

    auto is_int = [](std::string_view v) {
        std::size_t i = (!v.empty() && (v[0] == '-' || v[0] == '+')) ? 1 : 0;
        if (i == v.size()) return false;
        for (; i < v.size(); ++i)
            if (v[i] < '0' || v[i] > '9') return false;
        return true;
    };
    auto strip_plus = [](std::string v) {
        if (!v.empty() && v[0] == '+') v.erase(v.begin());
        return v;
    };

    if (const auto slash = s.find('/'); slash != std::string::npos) {
        const std::string num = s.substr(0, slash);
        const std::string den = s.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) throw ParseError("malformed rational '" + s + "'");
        Integer n(strip_plus(num), 10), d(strip_plus(den), 10);
        if (d == 0) throw ParseError("zero denominator in '" + s + "'");
        Rational r(n, d);
        r.canonicalize();
        return r;
    }
    if (const auto dot = s.find('.'); dot != std::string::npos) {
        std::string whole = s.substr(0, dot);
        const std::string frac = s.substr(dot + 1);
        bool negative = !whole.empty() && whole[0] == '-';
        if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.erase(whole.begin());
        if (whole.empty()) whole = "0";
        if (!is_int(whole) || (!frac.empty() && !is_int(frac)) || frac.find_first_of("+-") != std::string::npos)
            throw ParseError("malformed decimal '" + s + "'");
        Integer scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        Integer n(whole + frac, 10);
        Rational r(negative ? Integer(-n) : n, scale);
        r.canonicalize();
        return r;
    }
    if (!is_int(s)) throw ParseError("malformed rational '" + s + "'");
    return Rational(Integer(strip_plus(s), 10));
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational abs_value(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational from_int(std::int64_t v) { return Rational(Integer(std::to_string(v), 10)); }

inline Rational ratio(std::int64_t num, std::int64_t den)
{
    Rational r(Integer(std::to_string(num), 10), Integer(std::to_string(den), 10));
    r.canonicalize();
    return r;
}

inline Rational min_of(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }

} // namespace iidtail
