#pragma once

// Simulated tail probabilities with exact-coverage (Clopper-Pearson)
// binomial intervals, and interval-separated verdicts on tail comparisons.
//
// Realization r of a run with seed s draws from CounterRng(derive_seed(s, r)),
// so counts do not depend on how realizations are split across threads.
// Discrete laws are simulated on an integer lattice (common denominator),
// which keeps threshold comparisons exact.

#include "iidtail/dist.hpp"
#include "iidtail/inequalities.hpp"
#include "iidtail/rng.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <variant>

namespace iidtail {

struct GaussianFamily {
    double mean = 0;
    double sd = 1;
};

/// a with probability p, b otherwise.
struct TwoPointFamily {
    double a = -1;
    double p = 0.5;
    double b = 1;
};

/// shift + U^(-1/alpha), U uniform on (0, 1).
struct ShiftedParetoFamily {
    double alpha = 1;
    double shift = 0;
};

/// Family of the i.i.d. summands. Continuous families act coordinatewise
/// (independent coordinates) when dim > 1.
struct SamplerSpec {
    std::variant<DiscreteDist, GaussianFamily, TwoPointFamily, ShiftedParetoFamily> family =
        DiscreteDist::point_mass(Point{Rational(0)});
    std::size_t dim = 1;

    static SamplerSpec discrete(DiscreteDist d)
    {
        SamplerSpec s;
        s.dim = d.dim();
        s.family = std::move(d);
        return s;
    }

    std::string name() const
    {
        switch (family.index()) {
        case 0: return "discrete";
        case 1: return "gaussian";
        case 2: return "two_point";
        default: return "shifted_pareto";
        }
    }

    void validate() const
    {
        if (dim < 1) throw std::invalid_argument("dimension must be at least 1");
        if (const auto* d = std::get_if<DiscreteDist>(&family)) {
            if (d->dim() != dim) throw std::invalid_argument("sampler dimension does not match the distribution");
        } else if (const auto* g = std::get_if<GaussianFamily>(&family)) {
            if (!(g->sd > 0) || !std::isfinite(g->mean) || !std::isfinite(g->sd))
                throw std::invalid_argument("gaussian family needs finite mean and sd > 0");
        } else if (const auto* t = std::get_if<TwoPointFamily>(&family)) {
            if (!(t->p > 0 && t->p < 1) || !std::isfinite(t->a) || !std::isfinite(t->b))
                throw std::invalid_argument("two_point family needs 0 < p < 1 and finite values");
        } else if (const auto* s = std::get_if<ShiftedParetoFamily>(&family)) {
            if (!(s->alpha > 0) || !std::isfinite(s->shift))
                throw std::invalid_argument("shifted_pareto family needs alpha > 0 and a finite shift");
        }
    }
};

inline nlohmann::json to_json(const SamplerSpec& s)
{
    nlohmann::json j = {{"family", s.name()}, {"dim", s.dim}};
    if (const auto* g = std::get_if<GaussianFamily>(&s.family)) {
        j["mean"] = g->mean;
        j["sd"] = g->sd;
    } else if (const auto* t = std::get_if<TwoPointFamily>(&s.family)) {
        j["a"] = t->a;
        j["p"] = t->p;
        j["b"] = t->b;
    } else if (const auto* p = std::get_if<ShiftedParetoFamily>(&s.family)) {
        j["alpha"] = p->alpha;
        j["shift"] = p->shift;
    }
    return j;
}

struct BinomialInterval {
    double lo = 0;
    double hi = 1;
};

/// Clopper-Pearson interval for `hits` successes in n trials at level 1 - delta.
inline BinomialInterval clopper_pearson(std::uint64_t hits, std::uint64_t n, double delta)
{
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (hits > n) throw std::invalid_argument("more hits than trials");
    if (n == 0) return {0, 1};
    const auto x = static_cast<double>(hits), nd = static_cast<double>(n);
    BinomialInterval iv;
    iv.lo = hits == 0 ? 0.0 : boost::math::ibeta_inv(x, nd - x + 1, delta / 2);
    iv.hi = hits == n ? 1.0 : boost::math::ibeta_inv(x + 1, nd - x, 1 - delta / 2);
    return iv;
}

/// One tail to count per realization: ||S_index|| > t, or the running
/// maximum sup_{i <= index} ||S_i|| > t.
struct TailQuery {
    unsigned index = 1;
    bool path_max = false;
    Rational t = 0;
    Mode mode = Mode::strict;
};

namespace detail {

class DiscreteLattice {
public:
    DiscreteLattice(const DiscreteDist& d, unsigned max_k)
    {
        Integer lcd = 1;
        for (const auto& a : d.atoms())
            for (const auto& c : a.x.coords()) mpz_lcm(lcd.get_mpz_t(), lcd.get_mpz_t(), c.get_den().get_mpz_t());
        Integer biggest = 0;
        for (const auto& a : d.atoms())
            for (const auto& c : a.x.coords()) {
                const Integer v = abs(Integer(c.get_num() * (lcd / c.get_den())));
                if (v > biggest) biggest = v;
            }
        // Partial sums and their squared norms must stay well inside 64 bits.
        if (lcd > Integer(1) << 40 || biggest * max_k > Integer(1) << 30)
            throw std::invalid_argument("discrete law too wide for exact lattice simulation");
        scale_ = Rational(lcd);
        dim_ = d.dim();
        double run = 0;
        for (const auto& a : d.atoms()) {
            for (const auto& c : a.x.coords()) coords_.push_back(Integer(c.get_num() * (lcd / c.get_den())).get_si());
            run += a.p.get_d();
            cumulative_.push_back(run);
        }
        cumulative_.back() = 1.0;
    }

    std::size_t pick(CounterRng& rng) const
    {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
    }

    const std::int64_t* atom(std::size_t i) const { return coords_.data() + i * dim_; }
    const Rational& scale() const noexcept { return scale_; }

private:
    Rational scale_;
    std::size_t dim_ = 1;
    std::vector<std::int64_t> coords_;
    std::vector<double> cumulative_;
};

inline __int128 lattice_level(std::span<const std::int64_t> s, NormKind norm)
{
    __int128 v = 0;
    for (const auto c : s) {
        const __int128 a = c < 0 ? -static_cast<__int128>(c) : c;
        if (norm == NormKind::euclidean) v += a * a;
        else v = std::max(v, a);
    }
    return v;
}

inline double real_level(std::span<const double> s, NormKind norm)
{
    double v = 0;
    for (const double c : s) {
        if (norm == NormKind::euclidean) v += c * c;
        else v = std::max(v, std::fabs(c));
    }
    return v;
}

inline std::int64_t clamp_to_i64(const Integer& v)
{
    if (v > Integer(std::numeric_limits<std::int64_t>::max())) return std::numeric_limits<std::int64_t>::max();
    if (v < Integer(std::numeric_limits<std::int64_t>::min())) return std::numeric_limits<std::int64_t>::min();
    return v.get_si();
}

} // namespace detail

/// Hit counts for each query over n realizations of S_1..S_K, K the largest
/// index queried.
inline std::vector<std::uint64_t> count_exceedances(const SamplerSpec& spec, NormKind norm,
                                                    std::span<const TailQuery> queries, std::uint64_t n,
                                                    std::uint64_t seed, unsigned threads = 1)
{
    spec.validate();
    require_norm_dim(norm, spec.dim);
    unsigned K = 0;
    for (const auto& q : queries) {
        if (q.index == 0) throw std::invalid_argument("partial-sum index must be at least 1");
        if (q.t < 0) throw std::invalid_argument("threshold must be nonnegative");
        K = std::max(K, q.index);
    }
    std::vector<std::uint64_t> hits(queries.size(), 0);
    if (queries.empty() || n == 0) return hits;
    const std::size_t dim = spec.dim;

    // A realization exceeds a strict integer threshold when level > thr,
    // and a weak one when level >= thr; both are stored as "level > cut".
    std::optional<detail::DiscreteLattice> lattice;
    std::vector<__int128> int_cut;
    std::vector<double> real_cut;
    if (const auto* d = std::get_if<DiscreteDist>(&spec.family)) {
        lattice.emplace(*d, K);
        for (const auto& q : queries) {
            const Rational thr = threshold_level(q.t * lattice->scale(), norm);
            Integer cut;
            if (q.mode == Mode::strict) mpz_fdiv_q(cut.get_mpz_t(), thr.get_num_mpz_t(), thr.get_den_mpz_t());
            else {
                mpz_cdiv_q(cut.get_mpz_t(), thr.get_num_mpz_t(), thr.get_den_mpz_t());
                cut -= 1;
            }
            int_cut.push_back(detail::clamp_to_i64(cut));
        }
    } else {
        for (const auto& q : queries) real_cut.push_back(threshold_level(q.t, norm).get_d());
    }

    auto run_range = [&](std::uint64_t begin, std::uint64_t end, std::vector<std::uint64_t>& local) {
        std::vector<std::int64_t> isum(dim);
        std::vector<double> rsum(dim);
        std::vector<__int128> ilevel(K), ipath(K);
        std::vector<double> rlevel(K), rpath(K);
        for (std::uint64_t r = begin; r < end; ++r) {
            CounterRng rng(derive_seed(seed, r));
            std::fill(isum.begin(), isum.end(), 0);
            std::fill(rsum.begin(), rsum.end(), 0.0);
            for (unsigned i = 0; i < K; ++i) {
                if (lattice) {
                    const auto* a = lattice->atom(lattice->pick(rng));
                    for (std::size_t c = 0; c < dim; ++c) isum[c] += a[c];
                    ilevel[i] = detail::lattice_level(isum, norm);
                    ipath[i] = i ? std::max(ipath[i - 1], ilevel[i]) : ilevel[i];
                } else {
                    for (std::size_t c = 0; c < dim; ++c) {
                        double x = 0;
                        if (const auto* g = std::get_if<GaussianFamily>(&spec.family)) x = g->mean + g->sd * rng.normal();
                        else if (const auto* t = std::get_if<TwoPointFamily>(&spec.family)) x = rng.uniform() < t->p ? t->a : t->b;
                        else if (const auto* p = std::get_if<ShiftedParetoFamily>(&spec.family))
                            x = p->shift + std::pow(rng.uniform(), -1.0 / p->alpha);
                        rsum[c] += x;
                    }
                    rlevel[i] = detail::real_level(rsum, norm);
                    rpath[i] = i ? std::max(rpath[i - 1], rlevel[i]) : rlevel[i];
                }
            }
            for (std::size_t q = 0; q < queries.size(); ++q) {
                const unsigned i = queries[q].index - 1;
                bool hit;
                if (lattice) {
                    hit = (queries[q].path_max ? ipath[i] : ilevel[i]) > int_cut[q];
                } else {
                    const double v = queries[q].path_max ? rpath[i] : rlevel[i];
                    hit = queries[q].mode == Mode::strict ? v > real_cut[q] : v >= real_cut[q];
                }
                local[q] += hit;
            }
        }
    };

    const unsigned workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, n)));
    if (workers == 1) {
        run_range(0, n, hits);
        return hits;
    }
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(queries.size(), 0));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] { run_range(n * w / workers, n * (w + 1) / workers, partial[w]); });
    }
    for (const auto& p : partial)
        for (std::size_t q = 0; q < hits.size(); ++q) hits[q] += p[q];
    return hits;
}

struct TailEstimate {
    double estimate = 0;
    double lo = 0;
    double hi = 1;
    std::uint64_t hits = 0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    double delta = 0.05;
};

inline nlohmann::json to_json(const TailEstimate& e)
{
    return {{"estimate", e.estimate}, {"lo", e.lo}, {"hi", e.hi}, {"hits", e.hits},
            {"n", e.n},               {"seed", e.seed}, {"delta", e.delta}};
}

inline TailEstimate make_estimate(std::uint64_t hits, std::uint64_t n, std::uint64_t seed, double delta)
{
    TailEstimate e;
    e.hits = hits;
    e.n = n;
    e.seed = seed;
    e.delta = delta;
    e.estimate = n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
    const auto iv = clopper_pearson(hits, n, delta);
    e.lo = iv.lo;
    e.hi = iv.hi;
    return e;
}

/// Estimate of Pr(||S_k|| > t) from n realizations.
inline TailEstimate estimate_tail(const SamplerSpec& spec, unsigned k, const Rational& t, NormKind norm,
                                  std::uint64_t n, std::uint64_t seed, double delta, unsigned threads = 1)
{
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
    const TailQuery q{k, false, t, Mode::strict};
    const auto hits = count_exceedances(spec, norm, std::span(&q, 1), n, seed, threads);
    return make_estimate(hits[0], n, seed, delta);
}

enum class McClaim { theorem1, latala_sharp, levy_ottaviani, corollary4, corollary6 };

inline std::string_view to_string(McClaim c)
{
    switch (c) {
    case McClaim::theorem1: return "theorem1";
    case McClaim::latala_sharp: return "latala_sharp";
    case McClaim::levy_ottaviani: return "levy_ottaviani";
    case McClaim::corollary4: return "corollary4";
    case McClaim::corollary6: return "corollary6";
    }
    return "?";
}

inline McClaim parse_mc_claim(std::string_view s)
{
    if (s == "theorem1") return McClaim::theorem1;
    if (s == "latala_sharp") return McClaim::latala_sharp;
    if (s == "levy" || s == "levy_ottaviani") return McClaim::levy_ottaviani;
    if (s == "corollary4") return McClaim::corollary4;
    if (s == "corollary6") return McClaim::corollary6;
    throw std::invalid_argument("unknown claim '" + std::string(s) + "' for Monte Carlo checks");
}

struct McClaimSpec {
    McClaim claim = McClaim::theorem1;
    unsigned j = 1;
    unsigned k = 2;
    Constants constants = defaults::theorem1();

    /// Claim-specific constants when the caller supplies none.
    static Constants default_constants(McClaim c)
    {
        switch (c) {
        case McClaim::theorem1: return defaults::theorem1();
        case McClaim::latala_sharp: return defaults::latala_sharp();
        case McClaim::levy_ottaviani: return defaults::levy_ottaviani();
        case McClaim::corollary4: return defaults::corollary4();
        case McClaim::corollary6: return defaults::corollary6();
        }
        return defaults::theorem1();
    }
};

enum class McVerdict { holds, violation, inconclusive };

inline std::string_view to_string(McVerdict v)
{
    switch (v) {
    case McVerdict::holds: return "holds-with-confidence";
    case McVerdict::violation: return "violation-with-confidence";
    case McVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct McTerm {
    Rational factor;
    TailEstimate tail;
};

struct McPoint {
    Rational t;
    TailEstimate lhs;
    std::vector<McTerm> rhs;
    double rhs_lo = 0;
    double rhs_hi = 0;
    McVerdict verdict = McVerdict::inconclusive;
};

struct McReport {
    McClaimSpec claim;
    std::vector<McPoint> points;
    std::uint64_t budget = 0;
    std::uint64_t seed = 0;
    double delta = 0.05;

    std::size_t count(McVerdict v) const
    {
        return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [&](const McPoint& p) { return p.verdict == v; }));
    }
};

/// Geometric default grid 2^-3 .. 2^5 (an arbitrary choice).
inline std::vector<Rational> default_mc_grid()
{
    std::vector<Rational> g;
    for (int e = -3; e <= 5; ++e) g.push_back(e < 0 ? ratio(1, std::int64_t{1} << -e) : Rational(std::int64_t{1} << e));
    return g;
}

/// Interval-separated verdicts on lhs(t) <= rhs(t) at each grid point. Each
/// of the 1 + (number of rhs terms) intervals has level 1 - delta / (count),
/// so the per-t verdict errs with probability at most delta.
inline McReport mc_check(const McClaimSpec& claim, const SamplerSpec& spec, NormKind norm,
                         std::span<const Rational> grid, std::uint64_t budget, std::uint64_t seed, double delta,
                         unsigned threads = 1)
{
    if (grid.empty()) throw std::invalid_argument("t grid must be nonempty");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
    const auto& c = claim.constants;
    if (c.c1 <= 0 || c.c2 <= 0) throw std::invalid_argument("constants must be positive");
    const unsigned j = claim.j, k = claim.k;

    // Left query plus (factor, index, scale) right terms, threshold-free.
    bool lhs_path = false;
    unsigned lhs_index = 0;
    struct Term { Rational factor; unsigned index; Rational scale; };
    std::vector<Term> terms;
    switch (claim.claim) {
    case McClaim::theorem1:
        if (j == 0 || j > k) throw std::invalid_argument("theorem1 requires 1 <= j <= k");
        lhs_index = j;
        terms.push_back({c.c1, k, c.c2});
        break;
    case McClaim::latala_sharp:
        lhs_index = 1;
        terms.push_back({c.c1, 2, c.c2});
        break;
    case McClaim::levy_ottaviani:
        if (k == 0) throw std::invalid_argument("levy_ottaviani requires k >= 1");
        lhs_path = true;
        lhs_index = k;
        for (unsigned i = 1; i <= k; ++i) terms.push_back({c.c1, i, c.c2});
        break;
    case McClaim::corollary4:
        if (k == 0) throw std::invalid_argument("corollary4 requires k >= 1");
        lhs_path = true;
        lhs_index = k;
        terms.push_back({c.c1, k, c.c2});
        break;
    case McClaim::corollary6: {
        if (k == 0 || k > j) throw std::invalid_argument("corollary6 requires 1 <= k <= j");
        const Rational growth = Rational(j) / Rational(k);
        lhs_index = j;
        terms.push_back({c.c1 * growth, k, c.c2 * growth});
        break;
    }
    }

    std::vector<TailQuery> queries;
    for (const auto& t : grid) {
        if (t < 0) throw std::invalid_argument("grid thresholds must be nonnegative");
        queries.push_back({lhs_index, lhs_path, t, Mode::strict});
        for (const auto& term : terms) queries.push_back({term.index, false, t / term.scale, Mode::strict});
    }
    const auto hits = count_exceedances(spec, norm, queries, budget, seed, threads);
    const double part = delta / static_cast<double>(1 + terms.size());

    McReport rep;
    rep.claim = claim;
    rep.budget = budget;
    rep.seed = seed;
    rep.delta = delta;
    std::size_t q = 0;
    for (const auto& t : grid) {
        McPoint p;
        p.t = t;
        p.lhs = make_estimate(hits[q++], budget, seed, part);
        for (const auto& term : terms) {
            McTerm mt{term.factor, make_estimate(hits[q++], budget, seed, part)};
            const double f = term.factor.get_d();
            p.rhs_lo = std::max(p.rhs_lo, f * mt.tail.lo);
            p.rhs_hi = std::max(p.rhs_hi, f * mt.tail.hi);
            p.rhs.push_back(std::move(mt));
        }
        if (budget > 0 && p.lhs.lo > p.rhs_hi) p.verdict = McVerdict::violation;
        else if (budget > 0 && p.lhs.hi <= p.rhs_lo) p.verdict = McVerdict::holds;
        rep.points.push_back(std::move(p));
    }
    return rep;
}

inline nlohmann::json to_json(const McReport& r)
{
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : r.points) {
        nlohmann::json rhs = nlohmann::json::array();
        for (const auto& t : p.rhs) rhs.push_back({{"factor", to_string(t.factor)}, {"tail", to_json(t.tail)}});
        points.push_back({{"t", to_string(p.t)},
                          {"lhs", to_json(p.lhs)},
                          {"rhs_terms", rhs},
                          {"rhs_lo", p.rhs_lo},
                          {"rhs_hi", p.rhs_hi},
                          {"verdict", to_string(p.verdict)}});
    }
    return {{"claim", to_string(r.claim.claim)},
            {"j", r.claim.j},
            {"k", r.claim.k},
            {"c1", to_string(r.claim.constants.c1)},
            {"c2", to_string(r.claim.constants.c2)},
            {"budget", r.budget},
            {"seed", r.seed},
            {"delta", r.delta},
            {"points", points},
            {"holds", r.count(McVerdict::holds)},
            {"violations", r.count(McVerdict::violation)},
            {"inconclusive", r.count(McVerdict::inconclusive)}};
}

/// Seeds used for the regression battery of Monte Carlo checks.
inline std::vector<std::uint64_t> standard_seed_battery() { return {1, 2, 3, 5, 8, 13, 21, 34}; }

} // namespace iidtail
