#pragma once

// Exact checks of tail comparisons lhs(t) <= rhs(t) for every t > 0.
//
// Both sides are finite combinations of step functions of the threshold
// level, each jumping only at known critical levels. Between two consecutive
// criticals nothing changes, so evaluating every critical, one point inside
// every gap, and one point past the last critical covers all t > 0 in both
// strict and weak mode.

#include "iidtail/concentration.hpp"
#include "iidtail/dist.hpp"
#include "iidtail/report.hpp"

#include <optional>
#include <vector>

namespace iidtail {

/// A step function of the level u >= 0, stored by its value at each jump
/// point and on each open gap between jump points.
class StepTable {
public:
    StepTable() = default;

    /// Tabulates f at the jump points `crit` (sorted, distinct, >= 0) and at
    /// one interior point of every gap.
    template <typename F>
    static StepTable tabulate(std::vector<Rational> crit, F&& f)
    {
        StepTable t;
        t.crit_ = std::move(crit);
        const std::size_t n = t.crit_.size();
        t.at_crit_.reserve(n);
        t.gap_.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == 0)
                t.gap_.push_back(n == 0 ? f(Rational(1)) : (t.crit_[0] > 0 ? f(t.crit_[0] / 2) : Rational(0)));
            else if (i == n)
                t.gap_.push_back(f(t.crit_[n - 1] + 1));
            else
                t.gap_.push_back(f((t.crit_[i - 1] + t.crit_[i]) / 2));
            if (i < n) t.at_crit_.push_back(f(t.crit_[i]));
        }
        return t;
    }

    std::span<const Rational> criticals() const noexcept { return crit_; }

    Rational at(const Rational& level) const
    {
        const auto it = std::lower_bound(crit_.begin(), crit_.end(), level);
        const auto i = static_cast<std::size_t>(it - crit_.begin());
        if (it != crit_.end() && *it == level) return at_crit_[i];
        return gap_[i];
    }

private:
    std::vector<Rational> crit_;
    std::vector<Rational> at_crit_;
    std::vector<Rational> gap_;
};

inline StepTable tail_table(const TailCurve& curve, Mode mode)
{
    std::vector<Rational> crit(curve.criticals().begin(), curve.criticals().end());
    return StepTable::tabulate(std::move(crit), [&](const Rational& u) { return curve.at_level(u, mode); });
}

/// factor * table(u / scale), where scale is a level factor.
struct ScaledTerm {
    const StepTable* table = nullptr;
    Rational factor = 1;
    Rational scale = 1;
};

/// Pointwise maximum of scaled terms (a single term for most claims).
struct Side {
    std::vector<ScaledTerm> terms;

    Rational at(const Rational& level) const
    {
        Rational best = 0;
        bool first = true;
        for (const auto& term : terms) {
            const Rational v = term.factor * term.table->at(level / term.scale);
            if (first || v > best) best = v;
            first = false;
        }
        return best;
    }

    void collect_criticals(std::vector<Rational>& out) const
    {
        for (const auto& term : terms)
            for (const auto& c : term.table->criticals()) out.push_back(c * term.scale);
    }
};

inline Side single(const StepTable& table, Rational factor = 1, Rational scale = 1)
{
    return Side{{ScaledTerm{&table, std::move(factor), std::move(scale)}}};
}

/// Positive criticals of both sides, the midpoint of every gap (starting at
/// 0), and one point beyond the last critical.
inline std::vector<Rational> evaluation_levels(const Side& lhs, const Side& rhs)
{
    std::vector<Rational> crit;
    lhs.collect_criticals(crit);
    rhs.collect_criticals(crit);
    std::erase_if(crit, [](const Rational& c) { return c <= 0; });
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

    std::vector<Rational> out;
    out.reserve(2 * crit.size() + 1);
    Rational prev = 0;
    for (const auto& c : crit) {
        out.push_back((prev + c) / 2);
        out.push_back(c);
        prev = c;
    }
    out.push_back(prev + 1);
    return out;
}

/// Fills the outcome fields of `header` by comparing the sides at every
/// evaluation level. Margin and worst_t refer to levels where lhs > 0; with
/// none the report is vacuous.
inline InequalityReport compare_sides(const Side& lhs, const Side& rhs, InequalityReport header)
{
    InequalityReport r = std::move(header);
    const auto levels = evaluation_levels(lhs, rhs);
    bool any_lhs = false, have = false;
    for (const auto& u : levels) {
        const Rational l = lhs.at(u);
        const Rational h = rhs.at(u);
        // Points with lhs = 0 cannot fail; the worst point is sought where
        // the left side is live.
        if (l <= 0) continue;
        const Rational m = h - l;
        any_lhs = true;
        if (!have || m < r.margin) {
            r.worst_t = u;
            r.lhs = l;
            r.rhs = h;
            r.margin = m;
            have = true;
        }
    }
    r.points_checked = levels.size();
    r.t_squared = r.norm == NormKind::euclidean;
    if (r.margin < 0) {
        r.status = Status::violated;
        r.witness = Witness{r.worst_t, r.lhs, r.rhs};
    } else {
        r.status = any_lhs ? Status::holds : Status::vacuous;
    }
    return r;
}

struct Modes {
    Mode lhs = Mode::strict;
    Mode rhs = Mode::strict;

    static Modes both(Mode m) { return Modes{m, m}; }
};

struct Constants {
    Rational c1;
    Rational c2;
};

namespace defaults {
inline Constants theorem1() { return {3, 10}; }
inline Constants levy_ottaviani() { return {3, 3}; }
inline Constants corollary4() { return {9, 30}; }
inline Constants corollary5() { return {10, 90}; }
inline Constants corollary6() { return {6, 20}; }
inline Constants latala_sharp() { return {2, ratio(3, 2)}; }
inline std::vector<Constants> latala_theorem1() { return {{4, 5}, {2, 7}}; }
inline std::vector<Constants> latala_corollary4() { return {{4, 6}, {2, 8}}; }
} // namespace defaults

inline const char* external_claim_note() { return "external claim (Latala); confirmed empirically, not proven here"; }

/// Laws, tail curves, and tabulated tails of S_1..S_K for one distribution,
/// shared across all checks on that distribution. Running-maximum tables are
/// built on first use, so an instance is not safe to share across threads.
class PartialSumTable {
public:
    PartialSumTable(const DiscreteDist& x, unsigned max_k, NormKind norm, const Limits& limits = {})
        : x_(x), norm_(norm), limits_(limits)
    {
        if (max_k == 0) throw std::invalid_argument("need at least one partial sum");
        require_norm_dim(norm, x.dim());
        laws_ = partial_sums(x, max_k, limits);
        for (const auto& law : laws_) {
            curves_.push_back(tail_curve(law, norm));
            strict_.push_back(tail_table(curves_.back(), Mode::strict));
            weak_.push_back(tail_table(curves_.back(), Mode::weak));
        }
    }

    const DiscreteDist& base() const noexcept { return x_; }
    unsigned max_k() const noexcept { return static_cast<unsigned>(laws_.size()); }
    NormKind norm() const noexcept { return norm_; }
    const Limits& limits() const noexcept { return limits_; }
    const DiscreteDist& law(unsigned i) const { return laws_.at(i - 1); }
    const TailCurve& curve(unsigned i) const { return curves_.at(i - 1); }
    std::span<const DiscreteDist> laws() const noexcept { return laws_; }
    const StepTable& table(unsigned i, Mode mode) const
    {
        return mode == Mode::strict ? strict_.at(i - 1) : weak_.at(i - 1);
    }

    /// Tabulated Pr(sup_{i<=k} ||S_i|| > t) (or >= t in weak mode). Every
    /// path maximum is a norm level of some S_i, so jumps sit on the union
    /// of their criticals; each sample runs the absorbing dynamic program
    /// once for all k at the same time.
    const StepTable& path_max_table(unsigned k, Mode mode)
    {
        auto& cache = mode == Mode::strict ? path_strict_ : path_weak_;
        if (cache.empty()) {
            std::vector<Rational> crit;
            for (const auto& c : curves_) crit.insert(crit.end(), c.criticals().begin(), c.criticals().end());
            std::sort(crit.begin(), crit.end());
            crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

            const unsigned kmax = max_k();
            std::map<Rational, std::vector<Rational>> samples;
            auto sample = [&](const Rational& u) -> const std::vector<Rational>& {
                auto it = samples.find(u);
                if (it == samples.end()) {
                    const auto fe = first_exceedance_at_level(x_, kmax, norm_, u, mode, limits_);
                    std::vector<Rational> cumulative(kmax);
                    Rational run = 0;
                    for (unsigned i = 0; i < kmax; ++i) cumulative[i] = run += fe.exceedance[i];
                    it = samples.emplace(u, std::move(cumulative)).first;
                }
                return it->second;
            };
            for (unsigned i = 0; i < kmax; ++i)
                cache.push_back(StepTable::tabulate(crit, [&](const Rational& u) { return sample(u)[i]; }));
        }
        return cache.at(k - 1);
    }

private:
    DiscreteDist x_;
    NormKind norm_;
    Limits limits_;
    std::vector<DiscreteDist> laws_;
    std::vector<TailCurve> curves_;
    std::vector<StepTable> strict_, weak_;
    std::vector<StepTable> path_strict_, path_weak_;
};

namespace detail {

inline InequalityReport header(ClaimId claim, unsigned j, unsigned k, const Constants& c, NormKind norm, Modes m)
{
    InequalityReport r;
    r.claim = claim;
    r.j = j;
    r.k = k;
    r.c1 = c.c1;
    r.c2 = c.c2;
    r.norm = norm;
    r.lhs_mode = m.lhs;
    r.rhs_mode = m.rhs;
    return r;
}

inline void require_positive(const Constants& c)
{
    if (c.c1 <= 0 || c.c2 <= 0) throw std::invalid_argument("constants must be positive");
}

} // namespace detail

/// Pr(||S_j|| > t) <= c1 Pr(||S_k|| > t / c2) for 1 <= j <= k.
inline InequalityReport check_theorem1(const PartialSumTable& sums, unsigned j, unsigned k, const Constants& c,
                                       Modes modes = {}, ClaimId claim = ClaimId::theorem1)
{
    if (j == 0 || j > k) throw std::invalid_argument("theorem1 requires 1 <= j <= k");
    if (k > sums.max_k()) throw std::invalid_argument("partial-sum table too short");
    detail::require_positive(c);
    const NormKind norm = sums.norm();
    const Side lhs = single(sums.table(j, modes.lhs));
    const Side rhs = single(sums.table(k, modes.rhs), c.c1, level_scale(c.c2, norm));
    return compare_sides(lhs, rhs, detail::header(claim, j, k, c, norm, modes));
}

inline InequalityReport check_theorem1(const DiscreteDist& x, unsigned j, unsigned k, const Constants& c,
                                       NormKind norm, Modes modes = {}, const Limits& limits = {})
{
    if (j == 0 || j > k) throw std::invalid_argument("theorem1 requires 1 <= j <= k");
    return check_theorem1(PartialSumTable(x, k, norm, limits), j, k, c, modes);
}

/// Pr(||X_1|| > t) <= 2 Pr(||X_1 + X_2|| > 2t/3).
inline InequalityReport check_latala_sharp(const PartialSumTable& sums, Modes modes = {})
{
    auto r = check_theorem1(sums, 1, 2, defaults::latala_sharp(), modes, ClaimId::latala_sharp);
    r.note = external_claim_note();
    return r;
}

inline InequalityReport check_latala_sharp(const DiscreteDist& x, NormKind norm, Modes modes = {},
                                           const Limits& limits = {})
{
    return check_latala_sharp(PartialSumTable(x, 2, norm, limits), modes);
}

/// Pr(sup_{j<=k} ||S_j|| > t) <= 3 sup_{j<=k} Pr(||S_j|| > t/3).
inline InequalityReport check_levy_ottaviani(PartialSumTable& sums, unsigned k, Modes modes = {})
{
    if (k == 0 || k > sums.max_k()) throw std::invalid_argument("levy_ottaviani requires 1 <= k <= table size");
    const NormKind norm = sums.norm();
    const Side lhs = single(sums.path_max_table(k, modes.lhs));
    Side rhs;
    for (unsigned j = 1; j <= k; ++j) rhs.terms.push_back(ScaledTerm{&sums.table(j, modes.rhs), 3, level_scale(3, norm)});
    return compare_sides(lhs, rhs, detail::header(ClaimId::levy_ottaviani, 0, k, defaults::levy_ottaviani(), norm, modes));
}

inline InequalityReport check_levy_ottaviani(const DiscreteDist& x, unsigned k, NormKind norm, Modes modes = {},
                                             const Limits& limits = {})
{
    if (k == 0) throw std::invalid_argument("levy_ottaviani requires k >= 1");
    PartialSumTable sums(x, k, norm, limits);
    return check_levy_ottaviani(sums, k, modes);
}

/// Pr(sup_{j<=k} ||S_j|| > t) <= c1 Pr(||S_k|| > t / c2).
inline InequalityReport check_corollary4(PartialSumTable& sums, unsigned k, const Constants& c, Modes modes = {},
                                         ClaimId claim = ClaimId::corollary4)
{
    if (k == 0 || k > sums.max_k()) throw std::invalid_argument("corollary4 requires 1 <= k <= table size");
    detail::require_positive(c);
    const NormKind norm = sums.norm();
    const Side lhs = single(sums.path_max_table(k, modes.lhs));
    const Side rhs = single(sums.table(k, modes.rhs), c.c1, level_scale(c.c2, norm));
    return compare_sides(lhs, rhs, detail::header(claim, 0, k, c, norm, modes));
}

inline InequalityReport check_corollary4(const DiscreteDist& x, unsigned k, const Constants& c, NormKind norm,
                                         Modes modes = {}, const Limits& limits = {})
{
    if (k == 0) throw std::invalid_argument("corollary4 requires k >= 1");
    PartialSumTable sums(x, k, norm, limits);
    return check_corollary4(sums, k, c, modes);
}

/// Pr(||sum alpha_i X_i|| > t) <= c1 Pr(||S_k|| > t / c2) with |alpha_i| <= 1.
inline InequalityReport check_corollary5(const PartialSumTable& sums, std::span<const Rational> alphas,
                                         const Constants& c, Modes modes = {})
{
    if (alphas.empty()) throw std::invalid_argument("corollary5 requires at least one weight");
    for (const auto& a : alphas)
        if (abs_value(a) > 1) throw std::invalid_argument("weight " + to_string(a) + " out of range [-1, 1]");
    const auto k = static_cast<unsigned>(alphas.size());
    if (k > sums.max_k()) throw std::invalid_argument("partial-sum table too short");
    detail::require_positive(c);
    const NormKind norm = sums.norm();
    const auto weighted = tail_curve(weighted_iid_sum(sums.base(), alphas, sums.limits()), norm);
    const StepTable lhs_table = tail_table(weighted, modes.lhs);
    const Side lhs = single(lhs_table);
    const Side rhs = single(sums.table(k, modes.rhs), c.c1, level_scale(c.c2, norm));
    auto r = compare_sides(lhs, rhs, detail::header(ClaimId::corollary5, 0, k, c, norm, modes));
    r.variant = "alphas=";
    for (std::size_t i = 0; i < alphas.size(); ++i) r.variant += (i ? ";" : "") + to_string(alphas[i]);
    return r;
}

inline InequalityReport check_corollary5(const DiscreteDist& x, std::span<const Rational> alphas, const Constants& c,
                                         NormKind norm, Modes modes = {}, const Limits& limits = {})
{
    if (alphas.empty()) throw std::invalid_argument("corollary5 requires at least one weight");
    for (const auto& a : alphas)
        if (abs_value(a) > 1) throw std::invalid_argument("weight " + to_string(a) + " out of range [-1, 1]");
    return check_corollary5(PartialSumTable(x, static_cast<unsigned>(alphas.size()), norm, limits), alphas, c, modes);
}

/// Pr(||S_j|| > t) <= (c1 j / k) Pr(||S_k|| > k t / (c2 j)) for 1 <= k <= j.
inline InequalityReport check_corollary6(const PartialSumTable& sums, unsigned j, unsigned k, const Constants& c,
                                         Modes modes = {})
{
    if (k == 0 || k > j) throw std::invalid_argument("corollary6 requires 1 <= k <= j");
    if (j > sums.max_k()) throw std::invalid_argument("partial-sum table too short");
    detail::require_positive(c);
    const NormKind norm = sums.norm();
    const Rational growth = Rational(j) / Rational(k);
    const Side lhs = single(sums.table(j, modes.lhs));
    const Side rhs = single(sums.table(k, modes.rhs), c.c1 * growth, level_scale(c.c2 * growth, norm));
    return compare_sides(lhs, rhs, detail::header(ClaimId::corollary6, j, k, c, norm, modes));
}

inline InequalityReport check_corollary6(const DiscreteDist& x, unsigned j, unsigned k, const Constants& c,
                                         NormKind norm, Modes modes = {}, const Limits& limits = {})
{
    if (k == 0 || k > j) throw std::invalid_argument("corollary6 requires 1 <= k <= j");
    return check_corollary6(PartialSumTable(x, j, norm, limits), j, k, c, modes);
}

/// Evaluates both sides of a report's claim directly at one threshold t
/// (level-space if the report is squared), without the step-table machinery.
/// Used to audit the finite reduction.
struct DirectSides {
    Rational lhs;
    Rational rhs;
};

inline DirectSides theorem1_direct(const DiscreteDist& x, unsigned j, unsigned k, const Constants& c, NormKind norm,
                                   const Rational& level, Modes modes = {})
{
    const auto sj = iid_sum(x, j);
    const auto sk = iid_sum(x, k);
    return {tail_curve(sj, norm).at_level(level, modes.lhs),
            c.c1 * tail_curve(sk, norm).at_level(level / level_scale(c.c2, norm), modes.rhs)};
}

/// Consistency of the three-way case split with the (3, 10) comparison: at
/// every evaluation level of check_theorem1, exactly one case is selected,
/// its concluding bound verifies, and it forces the comparison at that t.
/// Returns the number of levels audited; throws std::logic_error on a
/// mismatch. One-dimensional laws only, where concentration is exact.
inline std::size_t cross_check_cases(const PartialSumTable& sums, unsigned j, unsigned k)
{
    if (sums.base().dim() != 1) throw std::invalid_argument("cross_check_cases requires dimension 1");
    const auto report = check_theorem1(sums, j, k, defaults::theorem1());
    const Side lhs = single(sums.table(j, Mode::strict));
    const Side rhs = single(sums.table(k, Mode::strict), 3, level_scale(10, sums.norm()));
    std::size_t audited = 0;
    for (const auto& u : evaluation_levels(lhs, rhs)) {
        // The norm is |.| on the line, so a level is the threshold itself
        // except in euclidean mode.
        if (sums.norm() == NormKind::euclidean) break;
        const auto v = classify_case_sums(sums.laws(), j, k, u, sums.norm());
        if (!v.bound_holds || !v.implies_comparison)
            throw std::logic_error("case split inconsistent at t=" + to_string(u));
        if (!(v.tail_j <= 3 * v.tail_k) || report.status == Status::violated)
            throw std::logic_error("case split disagrees with the comparison check at t=" + to_string(u));
        ++audited;
    }
    return audited;
}

} // namespace iidtail
