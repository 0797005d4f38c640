#pragma once

// Lower bounds on admissible comparison constants by searching for small
// distributions with a large tail ratio
//   sup_t Pr(||S_j|| > t) / Pr(||S_k|| > t / c2).
// The search runs Nelder-Mead on a double-precision surrogate; every reported
// number comes from an exact re-score of a rational snapped candidate.

#include "iidtail/inequalities.hpp"
#include "iidtail/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <map>

namespace iidtail {

/// A nonnegative rational or +infinity.
struct ExtendedRatio {
    bool infinite = false;
    Rational value = 0;

    static ExtendedRatio inf() { return {true, 0}; }

    friend bool operator<(const ExtendedRatio& a, const ExtendedRatio& b)
    {
        if (a.infinite) return false;
        if (b.infinite) return true;
        return a.value < b.value;
    }
    friend bool operator==(const ExtendedRatio& a, const ExtendedRatio& b)
    {
        return a.infinite == b.infinite && (a.infinite || a.value == b.value);
    }
    bool operator>(const Rational& r) const { return infinite || value > r; }

    std::string str() const { return infinite ? "inf" : to_string(value); }
    double approx() const { return infinite ? std::numeric_limits<double>::infinity() : value.get_d(); }
};

struct RatioValue {
    ExtendedRatio ratio;
    /// Level at which the supremum is attained (first such level).
    Rational t = 0;
};

/// Least c1 for which Pr(||S_j|| > t) <= c1 Pr(||S_k|| > t / c2) holds for
/// all t on this law. Infinite when some t has rhs = 0 < lhs; 0 when the
/// left side vanishes.
inline RatioValue ratio_objective(const PartialSumTable& sums, unsigned j, unsigned k, const Rational& c2)
{
    if (j == 0 || j > k) throw std::invalid_argument("ratio_objective requires 1 <= j <= k");
    if (k > sums.max_k()) throw std::invalid_argument("partial-sum table too short");
    if (c2 <= 0) throw std::invalid_argument("c2 must be positive");
    const Side lhs = single(sums.table(j, Mode::strict));
    const Side rhs = single(sums.table(k, Mode::strict), 1, level_scale(c2, sums.norm()));
    RatioValue best;
    for (const auto& u : evaluation_levels(lhs, rhs)) {
        const Rational l = lhs.at(u);
        if (l <= 0) continue;
        const Rational h = rhs.at(u);
        const ExtendedRatio v = h > 0 ? ExtendedRatio{false, l / h} : ExtendedRatio::inf();
        if (best.ratio < v) {
            best.ratio = v;
            best.t = u;
        }
    }
    return best;
}

inline RatioValue ratio_objective(const DiscreteDist& x, unsigned j, unsigned k, const Rational& c2,
                                  NormKind norm = NormKind::abs1d, const Limits& limits = {})
{
    if (j == 0 || j > k) throw std::invalid_argument("ratio_objective requires 1 <= j <= k");
    return ratio_objective(PartialSumTable(x, k, norm, limits), j, k, c2);
}

struct SearchSpace {
    int n_atoms = 2;
    Rational value_lo = -4;
    Rational value_hi = 4;
    /// Atom locations snap to multiples of 1 / lattice_den.
    int lattice_den = 2;
    /// Probabilities snap to integer weights over prob_den.
    int prob_den = 1000;
    unsigned j = 1;
    unsigned k = 2;
    Rational c2 = 1;
    NormKind norm = NormKind::abs1d;

    void validate() const
    {
        if (n_atoms < 2 || n_atoms > 6) throw std::invalid_argument("n_atoms must lie in 2..6");
        if (!(value_lo < value_hi)) throw std::invalid_argument("empty value box");
        if (lattice_den < 1 || prob_den < n_atoms) throw std::invalid_argument("invalid lattice denominators");
        if (j == 0 || j > k) throw std::invalid_argument("search requires 1 <= j <= k");
        if (k > 12) throw std::invalid_argument("k too large for exhaustive tails");
        if (c2 <= 0) throw std::invalid_argument("c2 must be positive");
        if (norm == NormKind::euclidean) throw std::invalid_argument("search runs on the line with |.|");
    }
};

struct SearchBudget {
    std::uint64_t evaluations = 10000;
    unsigned restarts = 20;
    std::uint64_t seed = 1;
};

/// Upper bounds that proven (or claimed) comparisons put on the ratio.
struct SoundnessGuard {
    Rational min_c2;
    Rational max_ratio;
    const char* source;
};

inline std::vector<SoundnessGuard> soundness_guards()
{
    return {{10, 3, "theorem1 (3, 10)"}, {7, 2, "latala (2, 7)"}, {5, 4, "latala (4, 5)"}};
}

struct SearchResult {
    DiscreteDist best_dist = DiscreteDist::point_mass(Point{Rational(0)});
    Rational best_t = 0;
    ExtendedRatio achieved_ratio;
    std::uint64_t evaluations = 0;
    std::uint64_t seed = 0;
    unsigned best_restart = 0;
    std::vector<ExtendedRatio> trace;
    std::optional<std::string> guard_tripped;
};

namespace detail {

/// Numerator range [lo, hi] of lattice points inside the value box.
inline std::pair<std::int64_t, std::int64_t> lattice_range(const SearchSpace& s)
{
    const Rational lo = s.value_lo * s.lattice_den, hi = s.value_hi * s.lattice_den;
    Integer a, b;
    mpz_cdiv_q(a.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    mpz_fdiv_q(b.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    return {a.get_si(), b.get_si()};
}

/// Parameter vector -> candidate law (locations snapped, probabilities raw).
struct Decoded {
    std::vector<std::int64_t> loc;  // numerators over lattice_den
    std::vector<double> prob;
};

inline Decoded decode(const SearchSpace& s, std::span<const double> theta)
{
    const auto [lo_i, hi_i] = lattice_range(s);
    Decoded d;
    const auto n = static_cast<std::size_t>(s.n_atoms);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::clamp(theta[i] * s.lattice_den, static_cast<double>(lo_i), static_cast<double>(hi_i));
        d.loc.push_back(static_cast<std::int64_t>(std::llround(v)));
    }
    double norm = 1;
    for (std::size_t i = n; i < 2 * n - 1; ++i) norm += theta[i] * theta[i];
    for (std::size_t i = n; i < 2 * n - 1; ++i) d.prob.push_back(theta[i] * theta[i] / norm);
    d.prob.push_back(1 / norm);
    return d;
}

/// Exact law with probabilities rounded to weights over prob_den (each >= 1).
inline DiscreteDist snap(const SearchSpace& s, const Decoded& d)
{
    std::map<std::int64_t, std::int64_t> w;
    for (std::size_t i = 0; i < d.loc.size(); ++i)
        w[d.loc[i]] += std::max<std::int64_t>(1, std::llround(d.prob[i] * s.prob_den));
    std::int64_t total = 0;
    for (const auto& [x, v] : w) total += v;
    std::vector<std::pair<Rational, Rational>> atoms;
    for (const auto& [x, v] : w) atoms.emplace_back(ratio(x, s.lattice_den), ratio(v, total));
    return DiscreteDist::from_scalars(std::move(atoms));
}

/// Double-precision ratio on integer lattice keys.
inline double surrogate(const SearchSpace& s, const Decoded& d)
{
    std::map<std::int64_t, double> base;
    for (std::size_t i = 0; i < d.loc.size(); ++i) base[d.loc[i]] += d.prob[i];
    std::map<std::int64_t, double> cur = base, sj;
    for (unsigned i = 1; i < s.k; ++i) {
        if (i == s.j) sj = cur;
        std::map<std::int64_t, double> next;
        for (const auto& [a, pa] : cur)
            for (const auto& [b, pb] : base) next[a + b] += pa * pb;
        cur = std::move(next);
    }
    if (s.j == s.k) sj = cur;
    auto levels = [](const std::map<std::int64_t, double>& m) {
        std::map<std::int64_t, double> by;
        for (const auto& [x, p] : m) by[x < 0 ? -x : x] += p;
        return std::vector<std::pair<std::int64_t, double>>(by.begin(), by.end());
    };
    const auto lj = levels(sj), lk = levels(cur);
    const double c2 = s.c2.get_d();
    auto tail = [](const std::vector<std::pair<std::int64_t, double>>& lv, double u) {
        double t = 0;
        for (auto it = lv.rbegin(); it != lv.rend() && static_cast<double>(it->first) > u; ++it) t += it->second;
        return t;
    };
    std::vector<double> crit;
    for (const auto& [v, p] : lj) crit.push_back(static_cast<double>(v));
    for (const auto& [v, p] : lk) crit.push_back(static_cast<double>(v) * c2);
    std::sort(crit.begin(), crit.end());
    double best = 0, prev = 0;
    auto probe = [&](double u) {
        const double l = tail(lj, u);
        if (l <= 1e-300) return;
        const double h = tail(lk, u / c2);
        best = std::max(best, h > 0 ? l / h : std::numeric_limits<double>::infinity());
    };
    for (const double c : crit) {
        if (c <= 0) continue;
        probe((prev + c) / 2);
        probe(c);
        prev = c;
    }
    probe(prev + 1);
    return best;
}

struct Restart {
    std::vector<double> best_theta;
    double best_value = -1;
    std::uint64_t evaluations = 0;
};

inline std::vector<double> initial_point(const SearchSpace& s, CounterRng& rng)
{
    const auto n = static_cast<std::size_t>(s.n_atoms);
    const auto [lo, hi] = lattice_range(s);
    std::vector<double> theta;
    for (std::size_t i = 0; i < n; ++i) theta.push_back(static_cast<double>(rng.between(lo, hi)) / s.lattice_den);
    for (std::size_t i = 0; i + 1 < n; ++i) theta.push_back(0.5 + rng.uniform());
    return theta;
}

/// Nelder-Mead maximization with jitter restarts of the simplex around the
/// incumbent when it stalls or collapses.
inline Restart nelder_mead(const SearchSpace& s, std::vector<double> start, std::uint64_t budget, CounterRng& rng)
{
    Restart out;
    out.best_theta = start;
    const std::size_t dim = start.size();
    const double box = Rational(s.value_hi - s.value_lo).get_d();
    auto f = [&](const std::vector<double>& th) {
        ++out.evaluations;
        const double v = surrogate(s, decode(s, th));
        if (v > out.best_value) {
            out.best_value = v;
            out.best_theta = th;
        }
        return -v;
    };
    auto make_simplex = [&](const std::vector<double>& centre, double scale) {
        std::vector<std::pair<double, std::vector<double>>> simplex;
        simplex.emplace_back(0, centre);
        for (std::size_t i = 0; i < dim; ++i) {
            auto v = centre;
            const double step = i < static_cast<std::size_t>(s.n_atoms) ? 0.5 * box : 0.5;
            v[i] += scale * step * (rng.uniform() < 0.5 ? -1 : 1);
            simplex.emplace_back(0, std::move(v));
        }
        return simplex;
    };
    if (budget == 0) return out;
    auto simplex = make_simplex(start, 1.0);
    for (auto& [v, x] : simplex) {
        if (out.evaluations >= budget) return out;
        v = f(x);
    }
    std::uint64_t stall = 0;
    double last_best = out.best_value;
    while (out.evaluations < budget) {
        std::sort(simplex.begin(), simplex.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        const double spread = std::fabs(simplex.back().first - simplex.front().first);
        if (out.best_value > last_best) {
            last_best = out.best_value;
            stall = 0;
        } else {
            ++stall;
        }
        if (spread < 1e-12 || stall > 40) {
            // Kick: fresh simplex around a jittered incumbent.
            auto centre = out.best_theta;
            for (std::size_t i = 0; i < dim; ++i) centre[i] += (rng.uniform() - 0.5) * (i < static_cast<std::size_t>(s.n_atoms) ? 2.0 / s.lattice_den : 0.2);
            simplex = make_simplex(centre, 0.25 + rng.uniform());
            for (auto& [v, x] : simplex) {
                if (out.evaluations >= budget) return out;
                v = f(x);
            }
            stall = 0;
            continue;
        }
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
            for (std::size_t c = 0; c < dim; ++c) centroid[c] += simplex[i].second[c] / static_cast<double>(dim);
        auto along = [&](double a) {
            std::vector<double> p(dim);
            for (std::size_t c = 0; c < dim; ++c) p[c] = centroid[c] + a * (simplex.back().second[c] - centroid[c]);
            return p;
        };
        auto xr = along(-1.0);
        const double fr = f(xr);
        if (fr < simplex.front().first) {
            if (out.evaluations >= budget) break;
            auto xe = along(-2.0);
            const double fe = f(xe);
            simplex.back() = fe < fr ? std::make_pair(fe, xe) : std::make_pair(fr, xr);
        } else if (fr < simplex[simplex.size() - 2].first) {
            simplex.back() = {fr, xr};
        } else {
            if (out.evaluations >= budget) break;
            auto xc = fr < simplex.back().first ? along(-0.5) : along(0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, simplex.back().first)) {
                simplex.back() = {fc, xc};
            } else {
                for (std::size_t i = 1; i < simplex.size() && out.evaluations < budget; ++i) {
                    for (std::size_t c = 0; c < dim; ++c)
                        simplex[i].second[c] = simplex[0].second[c] + 0.5 * (simplex[i].second[c] - simplex[0].second[c]);
                    simplex[i].first = f(simplex[i].second);
                }
            }
        }
    }
    return out;
}

} // namespace detail

/// Deterministic given (space, budget). Evaluations are split evenly over
/// restarts; each restart's incumbent is snapped and re-scored exactly, and
/// the best exact ratio wins (ties to the lowest restart index).
inline SearchResult search(const SearchSpace& space, const SearchBudget& budget)
{
    space.validate();
    if (budget.restarts == 0) throw std::invalid_argument("at least one restart is required");
    SearchResult res;
    res.seed = budget.seed;
    bool have = false;
    for (unsigned r = 0; r < budget.restarts; ++r) {
        CounterRng rng(derive_seed(budget.seed, r));
        const auto start = detail::initial_point(space, rng);
        const std::uint64_t share = budget.evaluations / budget.restarts + (r < budget.evaluations % budget.restarts);
        const auto run = detail::nelder_mead(space, start, share, rng);
        res.evaluations += run.evaluations;
        const auto dist = detail::snap(space, detail::decode(space, run.best_theta));
        const auto exact = ratio_objective(dist, space.j, space.k, space.c2, space.norm);
        res.trace.push_back(exact.ratio);
        if (!have || res.achieved_ratio < exact.ratio) {
            res.achieved_ratio = exact.ratio;
            res.best_dist = dist;
            res.best_t = exact.t;
            res.best_restart = r;
            have = true;
        }
    }
    for (const auto& g : soundness_guards())
        if (space.c2 >= g.min_c2 && res.achieved_ratio > g.max_ratio) {
            res.guard_tripped = "ratio " + res.achieved_ratio.str() + " exceeds " + to_string(g.max_ratio) +
                                " allowed by " + g.source + " at c2=" + to_string(space.c2);
            break;
        }
    return res;
}

inline nlohmann::json to_json(const SearchSpace& s)
{
    return {{"n_atoms", s.n_atoms},         {"value_box", {to_string(s.value_lo), to_string(s.value_hi)}},
            {"lattice_den", s.lattice_den}, {"prob_den", s.prob_den},
            {"j", s.j},                     {"k", s.k},
            {"c2", to_string(s.c2)},        {"norm", to_string(s.norm)}};
}

inline nlohmann::json to_json(const SearchResult& r)
{
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& v : r.trace) trace.push_back(v.str());
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : r.best_dist.atoms()) atoms.push_back({{"x", to_string(a.x[0])}, {"p", to_string(a.p)}});
    nlohmann::json j = {{"achieved_ratio", r.achieved_ratio.str()},
                        {"achieved_ratio_approx", r.achieved_ratio.approx()},
                        {"best_t", to_string(r.best_t)},
                        {"best_dist", atoms},
                        {"best_restart", r.best_restart},
                        {"evaluations", r.evaluations},
                        {"seed", r.seed},
                        {"trace", trace},
                        {"guard_tripped", r.guard_tripped.has_value()}};
    if (r.achieved_ratio.infinite) j["note"] = "no finite c1 exists for this c2 on this instance";
    if (r.guard_tripped) j["guard_message"] = *r.guard_tripped;
    return j;
}

/// Campaign file: {"space": {...}, "budget": {...}}; every field optional.
inline std::pair<SearchSpace, SearchBudget> parse_campaign(const nlohmann::json& doc)
{
    SearchSpace s;
    SearchBudget b;
    auto rat = [](const nlohmann::json& v, const char* where) {
        try {
            if (v.is_string()) return parse_rational(v.get<std::string>());
            if (v.is_number_integer()) return from_int(v.get<std::int64_t>());
        } catch (const ParseError& e) {
            throw ParseError(std::string(where) + ": " + e.what());
        }
        throw ParseError(std::string(where) + ": expected a rational");
    };
    try {
        if (!doc.is_object()) throw ParseError("/: expected an object");
        if (doc.contains("space")) {
            const auto& sp = doc.at("space");
            if (sp.contains("n_atoms")) s.n_atoms = sp.at("n_atoms").get<int>();
            if (sp.contains("value_box")) {
                const auto& box = sp.at("value_box");
                if (!box.is_array() || box.size() != 2) throw ParseError("/space/value_box: expected [lo, hi]");
                s.value_lo = rat(box[0], "/space/value_box/0");
                s.value_hi = rat(box[1], "/space/value_box/1");
            }
            if (sp.contains("lattice_den")) s.lattice_den = sp.at("lattice_den").get<int>();
            if (sp.contains("prob_den")) s.prob_den = sp.at("prob_den").get<int>();
            if (sp.contains("j")) s.j = sp.at("j").get<unsigned>();
            if (sp.contains("k")) s.k = sp.at("k").get<unsigned>();
            if (sp.contains("c2")) s.c2 = rat(sp.at("c2"), "/space/c2");
            if (sp.contains("norm")) s.norm = parse_norm(sp.at("norm").get<std::string>());
        }
        if (doc.contains("budget")) {
            const auto& bu = doc.at("budget");
            if (bu.contains("evaluations")) b.evaluations = bu.at("evaluations").get<std::uint64_t>();
            if (bu.contains("restarts")) b.restarts = bu.at("restarts").get<unsigned>();
            if (bu.contains("seed")) b.seed = bu.at("seed").get<std::uint64_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("campaign: ") + e.what());
    }
    s.validate();
    return {s, b};
}

enum class ProbeFamily { rare_bernoulli, constant, pm_one };

inline ProbeFamily parse_probe_family(std::string_view s)
{
    if (s == "rare_bernoulli") return ProbeFamily::rare_bernoulli;
    if (s == "constant") return ProbeFamily::constant;
    if (s == "pm_one") return ProbeFamily::pm_one;
    throw std::invalid_argument("unknown probe family '" + std::string(s) + "'");
}

inline std::string_view to_string(ProbeFamily f)
{
    switch (f) {
    case ProbeFamily::rare_bernoulli: return "rare_bernoulli";
    case ProbeFamily::constant: return "constant";
    case ProbeFamily::pm_one: return "pm_one";
    }
    return "?";
}

struct ProbeRow {
    Rational parameter;  // p for rare_bernoulli, c2 otherwise
    Rational c2;
    ExtendedRatio ratio;
};

struct ProbeReport {
    ProbeFamily family = ProbeFamily::pm_one;
    std::string claim = "theorem1";
    unsigned j = 1, k = 2;
    std::vector<ProbeRow> rows;
    /// Ratios nonincreasing in c2 along each fixed-law sweep.
    bool monotone_in_c2 = true;
    /// Constant family: least c2 for which the claim can hold with c1 >= 1.
    std::optional<Rational> c2_lower_bound;
    bool c2_bound_verified = false;
};

namespace detail {

inline DiscreteDist rare_bernoulli(const Rational& p)
{
    return DiscreteDist::from_scalars({{0, 1 - p}, {1, p}});
}

inline DiscreteDist pm_one() { return DiscreteDist::from_scalars({{-1, ratio(1, 2)}, {1, ratio(1, 2)}}); }

inline std::vector<Rational> default_c2_sweep()
{
    return {ratio(1, 4), ratio(1, 2), Rational(1), ratio(3, 2), Rational(2), Rational(3), Rational(5), Rational(7),
            Rational(10)};
}

} // namespace detail

/// Canned necessity families. `claim` is "theorem1" or "corollary6".
/// rare_bernoulli sweeps p over 10^-1..10^-4 at each c2 of the sweep;
/// pm_one and constant sweep c2.
inline ProbeReport probe_necessity(ProbeFamily family, unsigned j, unsigned k, std::string claim = "theorem1",
                                   std::vector<Rational> c2_sweep = {}, const Rational& c1 = 1)
{
    if (claim != "theorem1" && claim != "corollary6") throw std::invalid_argument("probe claim must be theorem1 or corollary6");
    if (claim == "theorem1" && (j == 0 || j > k)) throw std::invalid_argument("theorem1 requires 1 <= j <= k");
    if (claim == "corollary6" && (k == 0 || k > j)) throw std::invalid_argument("corollary6 requires 1 <= k <= j");
    if (c1 <= 0) throw std::invalid_argument("c1 must be positive");
    if (c2_sweep.empty()) c2_sweep = detail::default_c2_sweep();
    for (const auto& c : c2_sweep)
        if (c <= 0) throw std::invalid_argument("c2 values must be positive");
    std::sort(c2_sweep.begin(), c2_sweep.end());

    ProbeReport rep;
    rep.family = family;
    rep.claim = claim;
    rep.j = j;
    rep.k = k;
    const unsigned big = std::max(j, k), lhs_i = j, rhs_i = k;

    // Least c1 at (law, c2); corollary6 folds j/k into both constants.
    auto needed_c1 = [&](const PartialSumTable& sums, const Rational& c2) {
        if (claim == "theorem1") return ratio_objective(sums, j, k, c2).ratio;
        const Rational growth = Rational(j) / Rational(k);
        const Side lhs = single(sums.table(lhs_i, Mode::strict));
        const Side rhs = single(sums.table(rhs_i, Mode::strict), 1, level_scale(c2 * growth, sums.norm()));
        ExtendedRatio best;
        for (const auto& u : evaluation_levels(lhs, rhs)) {
            const Rational l = lhs.at(u);
            if (l <= 0) continue;
            const Rational h = rhs.at(u);
            const ExtendedRatio v = h > 0 ? ExtendedRatio{false, l / (growth * h)} : ExtendedRatio::inf();
            if (best < v) best = v;
        }
        return best;
    };

    auto sweep = [&](const DiscreteDist& law, const Rational& param) {
        const PartialSumTable sums(law, big, NormKind::abs1d);
        std::optional<ExtendedRatio> prev;
        for (const auto& c2 : c2_sweep) {
            const auto r = needed_c1(sums, c2);
            if (prev && *prev < r) rep.monotone_in_c2 = false;
            prev = r;
            rep.rows.push_back({family == ProbeFamily::rare_bernoulli ? param : c2, c2, r});
        }
    };

    switch (family) {
    case ProbeFamily::rare_bernoulli:
        for (const auto& p : {ratio(1, 10), ratio(1, 100), ratio(1, 1000), ratio(1, 10000)}) sweep(detail::rare_bernoulli(p), p);
        break;
    case ProbeFamily::pm_one: sweep(detail::pm_one(), 0); break;
    case ProbeFamily::constant: {
        const auto law = DiscreteDist::point_mass(Point{Rational(1)});
        sweep(law, 0);
        // S_i = i: the left side is live for t < j and the right side for
        // t < k * scale, so the claim needs k * scale >= j.
        const Rational bound = claim == "theorem1" ? Rational(Rational(j) / Rational(k)) : Rational(1);
        rep.c2_lower_bound = bound;
        const PartialSumTable sums(law, big, NormKind::abs1d);
        const Constants at{std::max(c1, Rational(1)), bound};
        const Constants below{std::max(c1, Rational(1)), bound * ratio(99, 100)};
        if (claim == "theorem1")
            rep.c2_bound_verified = check_theorem1(sums, j, k, at).ok() && !check_theorem1(sums, j, k, below).ok();
        else
            rep.c2_bound_verified = check_corollary6(sums, j, k, at).ok() && !check_corollary6(sums, j, k, below).ok();
        break;
    }
    }
    return rep;
}

inline nlohmann::json to_json(const ProbeReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json o = {{"c2", to_string(row.c2)}, {"min_c1", row.ratio.str()}, {"min_c1_approx", row.ratio.approx()}};
        if (r.family == ProbeFamily::rare_bernoulli) o["p"] = to_string(row.parameter);
        rows.push_back(o);
    }
    nlohmann::json j = {{"family", to_string(r.family)}, {"claim", r.claim},  {"j", r.j},
                        {"k", r.k},                       {"rows", rows},      {"monotone_in_c2", r.monotone_in_c2}};
    if (r.c2_lower_bound) {
        j["c2_lower_bound"] = to_string(*r.c2_lower_bound);
        j["c2_bound_verified"] = r.c2_bound_verified;
    }
    return j;
}

} // namespace iidtail
