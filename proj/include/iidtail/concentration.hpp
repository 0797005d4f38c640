#pragma once

// Concentration points: x is a t-concentration point of X when
// Pr(||X - x|| <= t) > 2/3. In dimension 1 the full set of such points is
// computed exactly; above that only support atoms are tried as centres.

#include "iidtail/dist.hpp"
#include "iidtail/report.hpp"

#include <numeric>
#include <optional>
#include <vector>

namespace iidtail {

/// Mass a closed ball must strictly exceed.
inline const Rational& concentration_level()
{
    static const Rational two_thirds = ratio(2, 3);
    return two_thirds;
}

struct Interval {
    Rational lo;
    Rational hi;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted, pairwise disjoint closed intervals (possibly degenerate).
class ConcentrationSet {
public:
    ConcentrationSet() = default;
    explicit ConcentrationSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {}

    bool empty() const noexcept { return intervals_.empty(); }
    std::span<const Interval> intervals() const noexcept { return intervals_; }
    const Rational& min() const { return intervals_.front().lo; }
    const Rational& max() const { return intervals_.back().hi; }

    bool contains(const Rational& x) const
    {
        for (const auto& iv : intervals_)
            if (iv.lo <= x && x <= iv.hi) return true;
        return false;
    }

    friend bool operator==(const ConcentrationSet&, const ConcentrationSet&) = default;

private:
    std::vector<Interval> intervals_;
};

/// Exact {x : Pr(|X - x| <= t) > 2/3} for a one-dimensional X.
///
/// The window [x - t, x + t] changes content only where an atom a enters
/// (x = a - t) or leaves (x = a + t); both ends are inside the closed window.
/// The sweep evaluates the window mass at each breakpoint and on each open gap
/// between breakpoints, then stitches the qualifying pieces into intervals.
inline ConcentrationSet concentration_set(const DiscreteDist& x, const Rational& t)
{
    if (x.dim() != 1) throw std::invalid_argument("concentration_set requires a one-dimensional distribution");
    if (t < 0) throw std::invalid_argument("concentration radius must be nonnegative");

    const auto atoms = x.atoms(); // sorted by location
    const std::size_t n = atoms.size();
    std::vector<Rational> prefix(n + 1);
    prefix[0] = 0;
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + atoms[i].p;

    std::vector<Rational> breaks;
    breaks.reserve(2 * n);
    for (const auto& a : atoms) {
        breaks.push_back(a.x[0] - t);
        breaks.push_back(a.x[0] + t);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // Window [c - t, c + t] holds atoms first..last-1; c only increases.
    std::size_t first = 0, last = 0;
    auto window_mass = [&](const Rational& c) {
        const Rational lo = c - t, hi = c + t;
        while (first < n && atoms[first].x[0] < lo) ++first;
        while (last < n && atoms[last].x[0] <= hi) ++last;
        return last > first ? Rational(prefix[last] - prefix[first]) : Rational(0);
    };

    std::vector<Interval> out;
    bool open_run = false;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
        const bool point_in = window_mass(breaks[i]) > concentration_level();
        if (point_in) {
            if (!open_run) out.push_back(Interval{breaks[i], breaks[i]});
            out.back().hi = breaks[i];
            open_run = true;
        } else {
            open_run = false;
        }
        if (i + 1 < breaks.size()) {
            const Rational mid = (breaks[i] + breaks[i + 1]) / 2;
            const bool gap_in = window_mass(mid) > concentration_level();
            // Upper semicontinuity: a qualifying gap always has qualifying ends.
            if (gap_in && !open_run) {
                out.push_back(Interval{breaks[i], breaks[i]});
                open_run = true;
            }
            if (!gap_in) open_run = false;
        }
    }
    return ConcentrationSet(std::move(out));
}

struct ConcentrationPoint {
    bool found = false;
    std::optional<Point> witness;
    /// Set when the answer only considered support atoms as centres.
    bool approximate = false;
};

/// Pr(||X - c|| <= t) for an explicit centre.
inline Rational ball_mass(const DiscreteDist& x, const Point& centre, const Rational& t, NormKind norm)
{
    const Rational level = threshold_level(t, norm);
    Rational m = 0;
    for (const auto& a : x.atoms())
        if (norm_level(a.x - centre, norm) <= level) m += a.p;
    return m;
}

inline ConcentrationPoint has_concentration_point(const DiscreteDist& x, const Rational& t, NormKind norm)
{
    require_norm_dim(norm, x.dim());
    ConcentrationPoint out;
    if (x.dim() == 1) {
        // Every norm coincides with |.| on the line.
        const auto set = concentration_set(x, t);
        if (set.empty()) return out;
        out.found = true;
        for (const auto& a : x.atoms())
            if (set.contains(a.x[0])) {
                out.witness = a.x;
                return out;
            }
        out.witness = Point{set.intervals().front().lo};
        return out;
    }
    out.approximate = true;
    for (const auto& a : x.atoms())
        if (ball_mass(x, a.x, t, norm) > concentration_level()) {
            out.found = true;
            out.witness = a.x;
            return out;
        }
    return out;
}

namespace detail {

inline InequalityReport bound_report(ClaimId claim, const Rational& t, const Rational& lhs, const Rational& rhs)
{
    InequalityReport r;
    r.claim = claim;
    r.worst_t = t;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.points_checked = 1;
    r.status = r.margin < 0 ? Status::violated : Status::holds;
    if (r.status == Status::violated) r.witness = Witness{t, lhs, rhs};
    return r;
}

inline InequalityReport vacuous_report(ClaimId claim, const Rational& t, std::string note)
{
    InequalityReport r;
    r.claim = claim;
    r.worst_t = t;
    r.status = Status::vacuous;
    r.note = std::move(note);
    return r;
}

} // namespace detail

/// sup |x + y - z| over concentration points x of X, y of Y, z of X + Y,
/// checked against 3t. The supremum sits at interval endpoints.
inline InequalityReport check_lemma2(const DiscreteDist& x, const DiscreteDist& y, const Rational& t,
                                     const Limits& limits = {})
{
    const auto cx = concentration_set(x, t);
    const auto cy = concentration_set(y, t);
    const auto cz = concentration_set(convolve(x, y, limits), t);
    if (cx.empty() || cy.empty() || cz.empty())
        return detail::vacuous_report(ClaimId::lemma2, t, "a concentration set is empty");
    const Rational upper = cx.max() + cy.max() - cz.min();
    const Rational lower = cx.min() + cy.min() - cz.max();
    auto r = detail::bound_report(ClaimId::lemma2, t, max_of(abs_value(upper), abs_value(lower)), 3 * t);
    r.c1 = 3;
    return r;
}

struct Corollary3Report {
    /// |k s_j - j s_k| <= 3(k + j)t over independent choices of s_j and s_k.
    InequalityReport unrefined;
    /// |k s_j - j s_k| <= 3(j + k - 2 gcd(j, k))t with one choice per index.
    InequalityReport refined;
};

inline Corollary3Report check_corollary3_sums(std::span<const DiscreteDist> sums, unsigned k, const Rational& t)
{
    std::vector<ConcentrationSet> sets;
    for (unsigned i = 0; i < k; ++i) {
        sets.push_back(concentration_set(sums[i], t));
        if (sets.back().empty()) {
            const std::string note = "S_" + std::to_string(i + 1) + " has no concentration point";
            auto a = detail::vacuous_report(ClaimId::corollary3, t, note);
            auto b = detail::vacuous_report(ClaimId::corollary3_refined, t, note);
            a.k = b.k = k;
            return {a, b};
        }
    }
    const auto& ck = sets[k - 1];
    const Rational kk = k;
    std::optional<InequalityReport> worst_plain, worst_refined;
    for (unsigned j = 1; j <= k; ++j) {
        const auto& cj = sets[j - 1];
        const Rational jj = j;
        const Rational spread =
            max_of(kk * cj.max() - jj * ck.min(), jj * ck.max() - kk * cj.min());
        const Rational shared = (j == k) ? Rational(0) : spread;
        const unsigned h = std::gcd(j, k);

        auto plain = detail::bound_report(ClaimId::corollary3, t, spread, 3 * Rational(k + j) * t);
        auto refined = detail::bound_report(ClaimId::corollary3_refined, t, shared,
                                            3 * Rational(static_cast<long>(j + k) - 2L * h) * t);
        plain.j = refined.j = j;
        plain.k = refined.k = k;
        if (!worst_plain || plain.margin < worst_plain->margin) worst_plain = plain;
        if (!worst_refined || refined.margin < worst_refined->margin) worst_refined = refined;
    }
    worst_plain->points_checked = worst_refined->points_checked = k;
    return {*worst_plain, *worst_refined};
}

inline Corollary3Report check_corollary3(const DiscreteDist& x, unsigned k, const Rational& t,
                                         const Limits& limits = {})
{
    if (x.dim() != 1) throw std::invalid_argument("check_corollary3 requires a one-dimensional distribution");
    if (k == 0) throw std::invalid_argument("check_corollary3 requires k >= 1");
    const auto sums = partial_sums(x, k, limits);
    return check_corollary3_sums(sums, k, t);
}

enum class CaseId { case1, case2, case3 };

inline std::string_view to_string(CaseId c)
{
    switch (c) {
    case CaseId::case1: return "case1";
    case CaseId::case2: return "case2";
    case CaseId::case3: return "case3";
    }
    return "?";
}

/// Which branch of the three-way case split applies at (j, k, t), with the
/// quantities that select it and the branch's concluding bound.
struct CaseVerdict {
    CaseId id = CaseId::case1;
    /// Pr(||S_{k-j}|| > 9t/10); zero when j = k.
    Rational far_probability = 0;
    /// Case 2: an index i whose S_i has no (t/10)-concentration point.
    std::optional<unsigned> index_without_point;
    /// Case 3: the chosen concentration points s_1..s_k.
    std::vector<Point> points;

    /// Concluding bound, read as bound_lhs <= bound_rhs:
    ///   case1: Pr(||S_j|| > t) <= 3/2 Pr(||S_k|| > t/10)
    ///   case2: 1/3 <= Pr(||S_k|| > t/10)
    ///   case3: 2/3 <= Pr(||S_k|| >= t/10)
    Rational bound_lhs = 0;
    Rational bound_rhs = 0;
    bool bound_holds = false;

    /// Pr(||S_j|| > t) and Pr(||S_k|| > t/10), for the cross-check against
    /// the (3, 10) comparison at this t.
    Rational tail_j = 0;
    Rational tail_k = 0;
    /// Whether the branch's bound, as verified, forces tail_j <= 3 tail_k.
    bool implies_comparison = false;
    bool approximate = false;
};

/// sums[i] must hold the law of S_{i+1}, for i < k.
inline CaseVerdict classify_case_sums(std::span<const DiscreteDist> sums, unsigned j, unsigned k,
                                      const Rational& t, NormKind norm)
{
    if (j == 0 || j > k) throw std::invalid_argument("classify_case requires 1 <= j <= k");
    if (sums.size() < k) throw std::invalid_argument("classify_case needs the laws of S_1..S_k");
    const Rational tenth = t / 10;
    CaseVerdict v;
    v.tail_j = tail(sums[j - 1], norm, t, Mode::strict);
    v.tail_k = tail(sums[k - 1], norm, tenth, Mode::strict);
    v.far_probability = (j == k) ? Rational(0) : tail(sums[k - j - 1], norm, 9 * t / 10, Mode::strict);

    if (v.far_probability <= ratio(1, 3)) {
        v.id = CaseId::case1;
        v.bound_lhs = v.tail_j;
        v.bound_rhs = ratio(3, 2) * v.tail_k;
        v.bound_holds = v.bound_lhs <= v.bound_rhs;
        v.implies_comparison = v.bound_holds;
        return v;
    }
    for (unsigned i = 1; i <= k; ++i) {
        const auto cp = has_concentration_point(sums[i - 1], tenth, norm);
        v.approximate = v.approximate || cp.approximate;
        if (!cp.found) {
            v.id = CaseId::case2;
            v.index_without_point = i;
            v.points.clear();
            v.bound_lhs = ratio(1, 3);
            v.bound_rhs = v.tail_k;
            v.bound_holds = v.bound_lhs <= v.bound_rhs;
            v.implies_comparison = v.bound_holds; // 3 tail_k >= 1 >= tail_j
            return v;
        }
        v.points.push_back(*cp.witness);
    }
    v.id = CaseId::case3;
    v.bound_lhs = ratio(2, 3);
    v.bound_rhs = tail(sums[k - 1], norm, tenth, Mode::weak);
    v.bound_holds = v.bound_lhs <= v.bound_rhs;
    // The strict tail also clears 2/3 here, since ||s_k|| > 2t/10 when j < k.
    v.implies_comparison = v.bound_holds && ratio(2, 3) <= v.tail_k;
    return v;
}

inline CaseVerdict classify_case(const DiscreteDist& x, unsigned j, unsigned k, const Rational& t, NormKind norm,
                                 const Limits& limits = {})
{
    if (j == 0 || j > k) throw std::invalid_argument("classify_case requires 1 <= j <= k");
    const auto sums = partial_sums(x, k, limits);
    return classify_case_sums(sums, j, k, t, norm);
}

} // namespace iidtail
