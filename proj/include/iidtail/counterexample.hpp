#pragma once

// Weighted sums of i.i.d. variables admit no universal tail comparison.
//
// Y takes N - 1 with probability 1/N and -1 otherwise, so sum_{i<=M} Y_i =
// A = N B - M with B ~ Binomial(M, 1/N). With m = M^(1/3):
//   S_M = M^(-2/3) sum (Y_i + 1/m) = 1 + A / m^2,
//   S_M + X_{M+1} = 1 + A / m^2 + Y + 1/m.
// Thresholds on A / m^2 are decided by cubing (|A|^3 against M^2 theta^3);
// signs of c m^2 + m + A are decided by exact rational brackets of m.

#include "iidtail/rational.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>

namespace iidtail {

namespace detail {

inline Integer integer_cbrt(const Integer& v)
{
    if (v < 0) throw std::invalid_argument("integer_cbrt of a negative value");
    Integer r;
    mpz_root(r.get_mpz_t(), v.get_mpz_t(), 3);
    return r;
}

inline bool is_perfect_cube(const Integer& v) { return integer_cbrt(v) * integer_cbrt(v) * integer_cbrt(v) == v; }

inline Integer floor_div(const Integer& a, const Integer& b)
{
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Integer ceil_div(const Integer& a, const Integer& b)
{
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

/// Sign of c m^2 + m + a at m = M^(1/3), M >= 1.
inline int sign_at_cube_root(const Rational& c, const Integer& a, const Integer& M)
{
    auto eval = [&](const Rational& m) { return Rational(c * m * m + m + a); };
    const Integer r0 = integer_cbrt(M);
    if (r0 * r0 * r0 == M) return sgn(eval(Rational(r0)));
    // m is irrational of degree 3, so a nonzero quadratic cannot vanish at it
    // and the bracket eventually separates the value from 0.
    Integer D = 1;
    for (;;) {
        const Integer r = integer_cbrt(M * D * D * D);
        const Rational lo(r, D), hi(Integer(r + 1), D);
        const Rational sq_lo = c >= 0 ? Rational(lo * lo) : Rational(hi * hi);
        const Rational sq_hi = c >= 0 ? Rational(hi * hi) : Rational(lo * lo);
        if (c * sq_lo + lo + a > 0) return 1;
        if (c * sq_hi + hi + a < 0) return -1;
        D *= 16;
    }
}

/// First v in [lo, hi] with pred(v) for pred monotone false -> true;
/// hi + 1 if none.
inline Integer first_true(Integer lo, Integer hi, const std::function<bool(const Integer&)>& pred)
{
    Integer end = hi + 1;
    while (lo < end) {
        const Integer mid = floor_div(lo + end, 2);
        if (pred(mid)) end = mid;
        else lo = mid + 1;
    }
    return end;
}

} // namespace detail

/// Law of A = N B - M, B ~ Binomial(M, 1/N), with exact interval masses.
class CenteredBinomial {
public:
    CenteredBinomial(std::uint64_t N, std::uint64_t M) : N_(N), M_(M)
    {
        if (N < 2) throw std::invalid_argument("N must be at least 2");
        if (M < 1) throw std::invalid_argument("M must be at least 1");
        mpz_ui_pow_ui(denominator_.get_mpz_t(), N, M);
    }

    std::uint64_t N() const noexcept { return N_; }
    std::uint64_t M() const noexcept { return M_; }
    Integer min_value() const { return -Integer(std::to_string(M_), 10); }
    Integer max_value() const { return Integer(std::to_string(M_), 10) * Integer(std::to_string(N_ - 1), 10); }

    /// Pr(a_lo <= A <= a_hi).
    Rational mass_between(const Integer& a_lo, const Integer& a_hi) const
    {
        const Integer M(std::to_string(M_), 10), N(std::to_string(N_), 10);
        Integer b_lo = detail::ceil_div(a_lo + M, N), b_hi = detail::floor_div(a_hi + M, N);
        if (b_lo < 0) b_lo = 0;
        if (b_hi > M) b_hi = M;
        if (b_lo > b_hi) return 0;
        const auto lo = b_lo.get_ui(), hi = b_hi.get_ui();
        // w_b = C(M, b) (N - 1)^(M - b); w_{b+1} = w_b (M - b) / ((b + 1)(N - 1)).
        Integer w, pw;
        mpz_bin_uiui(w.get_mpz_t(), M_, lo);
        mpz_ui_pow_ui(pw.get_mpz_t(), N_ - 1, M_ - lo);
        w *= pw;
        Integer sum = 0;
        for (auto b = lo;; ++b) {
            sum += w;
            if (b == hi) break;
            w *= Integer(std::to_string(M_ - b), 10);
            mpz_divexact_ui(w.get_mpz_t(), w.get_mpz_t(), (b + 1) * (N_ - 1));
        }
        Rational r(sum, denominator_);
        r.canonicalize();
        return r;
    }

private:
    std::uint64_t N_, M_;
    Integer denominator_;
};

/// Largest w with |A| <= w  <=>  |A| / M^(2/3) <= theta, for theta >= 0.
inline Integer centered_window(std::uint64_t M, const Rational& theta)
{
    const Integer m(std::to_string(M), 10);
    const Integer p = theta.get_num(), q = theta.get_den();
    return detail::integer_cbrt(detail::floor_div(m * m * p * p * p, q * q * q));
}

/// Pr(|sum_{i<=M} Y_i| > M^(2/3) theta), exactly.
inline Rational centered_sum_tail(std::uint64_t N, std::uint64_t M, const Rational& theta)
{
    if (theta < 0) return 1;
    const CenteredBinomial law(N, M);
    const Integer w = centered_window(M, theta);
    return 1 - law.mass_between(-w, w);
}

/// Double-precision version of centered_sum_tail(N, M, 1/N) for screening.
inline double centered_sum_tail_approx(std::uint64_t N, std::uint64_t M)
{
    const Integer w = centered_window(M, Rational(1, N));
    const double Md = static_cast<double>(M), Nd = static_cast<double>(N);
    const double wd = w.get_d();
    const auto b_lo = static_cast<std::int64_t>(std::ceil((Md - wd) / Nd));
    const auto b_hi = static_cast<std::int64_t>(std::floor((Md + wd) / Nd));
    const double lp = std::log(1.0 / Nd), lq = std::log1p(-1.0 / Nd), lm = std::lgamma(Md + 1);
    double inside = 0;
    for (auto b = std::max<std::int64_t>(b_lo, 0); b <= std::min<std::int64_t>(b_hi, static_cast<std::int64_t>(M)); ++b) {
        const double bd = static_cast<double>(b);
        inside += std::exp(lm - std::lgamma(bd + 1) - std::lgamma(Md - bd + 1) + bd * lp + (Md - bd) * lq);
    }
    return 1 - inside;
}

struct FindMResult {
    std::optional<std::uint64_t> M;
    std::uint64_t scanned = 0;
    std::uint64_t screened_out = 0;
    std::uint64_t exact_checks = 0;
    Rational tail_at_M = 0;
};

/// Smallest M in [N^3, cap] with centered_sum_tail(N, M, 1/N) <= 1/N.
/// A double-precision screen discards candidates whose approximate tail
/// exceeds 1/N by more than `screen_slack`; every accepted M is confirmed
/// exactly. A negative slack disables the screen.
inline FindMResult find_M(std::uint64_t N, std::uint64_t cap, double screen_slack = 1e-6)
{
    if (N < 2) throw std::invalid_argument("N must be at least 2");
    if (N > 2'000'000) throw std::invalid_argument("N too large");
    const std::uint64_t start = N * N * N;
    if (cap < start) throw std::invalid_argument("cap " + std::to_string(cap) + " is below N^3 = " + std::to_string(start));
    const Rational bound(1, N);
    FindMResult out;
    for (std::uint64_t M = start; M <= cap; ++M) {
        ++out.scanned;
        if (screen_slack >= 0 && centered_sum_tail_approx(N, M) > 1.0 / static_cast<double>(N) + screen_slack) {
            ++out.screened_out;
            continue;
        }
        ++out.exact_checks;
        const Rational tail = centered_sum_tail(N, M, bound);
        if (tail <= bound) {
            out.M = M;
            out.tail_at_M = tail;
            return out;
        }
        if (M == cap) break;
    }
    return out;
}

struct CounterexampleReport {
    std::uint64_t N = 0;
    std::uint64_t M = 0;
    bool M_is_cube = false;
    /// Pr(|M^(-2/3) sum Y_i| > 1/N) against 1/N.
    Rational center_tail;
    Rational center_bound;
    bool center_ok = false;
    /// Pr(|S_M| > 1/2) against 1 - 1/N (lower bound).
    Rational far_tail;
    Rational far_bound;
    bool far_ok = false;
    /// Pr(|S_M + X_{M+1}| > 3/N) against 2/N (upper bound).
    Rational near_tail;
    Rational near_bound;
    bool near_ok = false;
    /// At t = 1/2 and c = N/6: Pr(|S_M| > t) against c Pr(|S_M + X_{M+1}| > t/c).
    /// Failure here means every c <= N/6 fails as a comparison constant.
    Rational contrast_c;
    Rational contrast_lhs;
    Rational contrast_rhs;
    bool contrast_refutes = false;

    bool ok() const noexcept { return center_ok && far_ok && near_ok && contrast_refutes; }
};

/// Exact probabilities for the instance (N, M).
inline CounterexampleReport verify_counterexample(std::uint64_t N, std::uint64_t M)
{
    const CenteredBinomial law(N, M);
    const Integer Mz(std::to_string(M), 10);
    const Integer Nz(std::to_string(N), 10);
    const Integer M2 = Mz * Mz;
    CounterexampleReport r;
    r.N = N;
    r.M = M;
    r.M_is_cube = detail::is_perfect_cube(Mz);

    r.center_bound = Rational(1, N);
    r.center_tail = centered_sum_tail(N, M, r.center_bound);
    r.center_ok = r.center_tail <= r.center_bound;

    // |1 + A/m^2| <= 1/2  <=>  -27 M^2 <= 8 A^3 <= -M^2.
    {
        const Integer lo = detail::first_true(law.min_value(), law.max_value(),
                                              [&](const Integer& a) { return 8 * a * a * a >= -27 * M2; });
        const Integer hi_end = detail::first_true(law.min_value(), law.max_value(),
                                                  [&](const Integer& a) { return 8 * a * a * a > -M2; });
        r.far_tail = 1 - law.mass_between(lo, hi_end - 1);
        r.far_bound = 1 - Rational(1, N);
        r.far_ok = r.far_tail >= r.far_bound;
    }

    // For the extra summand y, |1 + y + 1/m + A/m^2| <= 3/N  <=>
    //   (1 + y + 3/N) m^2 + m + A >= 0  and  (1 + y - 3/N) m^2 + m + A <= 0.
    {
        const Rational three_over_n(3, N);
        Rational near = 0;
        const std::pair<std::int64_t, Rational> branches[] = {
            {static_cast<std::int64_t>(N) - 1, Rational(1, N)},
            {-1, Rational(Integer(Nz - 1), Nz)},
        };
        for (const auto& [y, py] : branches) {
            const Rational base = 1 + Rational(y);
            const Rational c_low = base + three_over_n, c_high = base - three_over_n;
            const Integer lo = detail::first_true(law.min_value(), law.max_value(), [&](const Integer& a) {
                return detail::sign_at_cube_root(c_low, a, Mz) >= 0;
            });
            const Integer hi_end = detail::first_true(law.min_value(), law.max_value(), [&](const Integer& a) {
                return detail::sign_at_cube_root(c_high, a, Mz) > 0;
            });
            near += py * (1 - law.mass_between(lo, hi_end - 1));
        }
        r.near_tail = near;
        r.near_bound = Rational(2, N);
        r.near_ok = r.near_tail <= r.near_bound;
    }

    // t = 1/2 and c = N/6 give t/c = 3/N, so the right side is exactly
    // c times the near tail.
    r.contrast_c = Rational(Nz, 6);
    r.contrast_c.canonicalize();
    r.contrast_lhs = r.far_tail;
    r.contrast_rhs = r.contrast_c * r.near_tail;
    r.contrast_refutes = r.contrast_lhs > r.contrast_rhs;
    return r;
}

inline nlohmann::json to_json(const CounterexampleReport& r)
{
    auto prob = [](const Rational& v, const Rational& bound, const char* relation, bool ok) {
        return nlohmann::json{{"value", to_string(v)},
                              {"value_approx", v.get_d()},
                              {"bound", to_string(bound)},
                              {"relation", relation},
                              {"ok", ok}};
    };
    return {{"N", r.N},
            {"M", r.M},
            {"M_is_cube", r.M_is_cube},
            {"center_tail", prob(r.center_tail, r.center_bound, "<=", r.center_ok)},
            {"far_tail", prob(r.far_tail, r.far_bound, ">=", r.far_ok)},
            {"near_tail", prob(r.near_tail, r.near_bound, "<=", r.near_ok)},
            {"contrast",
             {{"t", "1/2"},
              {"c", to_string(r.contrast_c)},
              {"lhs", to_string(r.contrast_lhs)},
              {"rhs", to_string(r.contrast_rhs)},
              {"refutes_all_c_up_to", to_string(r.contrast_c)},
              {"refutes", r.contrast_refutes}}},
            {"ok", r.ok()}};
}

} // namespace iidtail
