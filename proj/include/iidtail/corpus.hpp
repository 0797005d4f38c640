#pragma once

// Seeded random corpora of small lattice distributions and batch checking of
// the tail comparisons against them.

#include "iidtail/concentration.hpp"
#include "iidtail/dist_io.hpp"
#include "iidtail/inequalities.hpp"
#include "iidtail/rng.hpp"

#include <json.hpp>

#include <atomic>
#include <map>
#include <ostream>
#include <thread>

namespace iidtail {

struct CorpusShape {
    std::size_t dim = 1;
    NormKind norm = NormKind::abs1d;
};

struct CorpusConfig {
    std::uint64_t seed = 0;
    std::size_t count = 500;
    int max_atoms = 5;
    /// Atom coordinates are n / denominator with n in [num_lo, num_hi].
    int num_lo = -6;
    int num_hi = 6;
    int denominator = 2;
    /// Atom weights are integers in [1, max_weight], normalized.
    int max_weight = 9;
    unsigned max_k = 6;
    /// Instance i uses shapes[i % shapes.size()].
    std::vector<CorpusShape> shapes{CorpusShape{}};
    std::vector<Mode> modes{Mode::strict, Mode::weak};
    /// Radii for the concentration checks.
    std::vector<Rational> radii{ratio(1, 4), ratio(1, 2), Rational(1), Rational(2), Rational(4)};
    unsigned threads = 1;
    Limits limits{};

    void validate() const
    {
        if (max_atoms < 1) throw std::invalid_argument("max_atoms must be at least 1");
        if (denominator < 1) throw std::invalid_argument("denominator must be at least 1");
        if (num_lo > num_hi) throw std::invalid_argument("empty numerator range");
        if (max_weight < 1) throw std::invalid_argument("max_weight must be at least 1");
        if (max_k < 1) throw std::invalid_argument("max_k must be at least 1");
        if (shapes.empty()) throw std::invalid_argument("at least one dimension/norm shape is required");
        for (const auto& s : shapes) {
            if (s.dim < 1) throw std::invalid_argument("dimension must be at least 1");
            require_norm_dim(s.norm, s.dim);
        }
        if (modes.empty()) throw std::invalid_argument("at least one mode is required");
        for (const auto& r : radii)
            if (r < 0) throw std::invalid_argument("radii must be nonnegative");
    }
};

inline nlohmann::json to_json(const CorpusConfig& c)
{
    nlohmann::json shapes = nlohmann::json::array();
    for (const auto& s : c.shapes) shapes.push_back({{"dim", s.dim}, {"norm", to_string(s.norm)}});
    nlohmann::json modes = nlohmann::json::array();
    for (const auto m : c.modes) modes.push_back(to_string(m));
    nlohmann::json radii = nlohmann::json::array();
    for (const auto& r : c.radii) radii.push_back(to_string(r));
    return {{"seed", c.seed},           {"count", c.count},       {"max_atoms", c.max_atoms},
            {"num_lo", c.num_lo},       {"num_hi", c.num_hi},     {"denominator", c.denominator},
            {"max_weight", c.max_weight}, {"max_k", c.max_k},     {"shapes", shapes},
            {"modes", modes},           {"radii", radii},         {"max_support", c.limits.max_support}};
}

namespace detail {

inline Point random_lattice_point(CounterRng& rng, const CorpusConfig& c, std::size_t dim)
{
    std::vector<Rational> coords;
    coords.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) coords.push_back(ratio(rng.between(c.num_lo, c.num_hi), c.denominator));
    return Point(std::move(coords));
}

} // namespace detail

/// Distribution number `index` of the corpus; a pure function of the seed.
inline DiscreteDist corpus_instance(const CorpusConfig& c, std::size_t index)
{
    CounterRng rng(derive_seed(c.seed, index));
    const std::size_t dim = c.shapes[index % c.shapes.size()].dim;
    const auto n = static_cast<std::size_t>(rng.between(1, c.max_atoms));
    std::map<Point, std::int64_t> weights;
    // Lattice may be smaller than n; a bounded number of draws keeps this total.
    for (std::size_t tries = 0; weights.size() < n && tries < 20 * n; ++tries) {
        auto p = detail::random_lattice_point(rng, c, dim);
        if (!weights.contains(p)) weights.emplace(std::move(p), rng.between(1, c.max_weight));
    }
    std::int64_t total = 0;
    for (const auto& [p, w] : weights) total += w;
    std::vector<Atom> atoms;
    for (auto& [p, w] : weights) atoms.push_back(Atom{p, ratio(w, total)});
    return DiscreteDist::from_atoms(dim, std::move(atoms));
}

/// Weight vector of length k with entries m/4, m in [-4, 4].
inline std::vector<Rational> corpus_weights(const CorpusConfig& c, std::size_t index, unsigned k)
{
    CounterRng rng(derive_seed(c.seed ^ 0x5bd1e995ULL, index * 64 + k));
    std::vector<Rational> alphas;
    for (unsigned i = 0; i < k; ++i) alphas.push_back(ratio(rng.between(-4, 4), 4));
    return alphas;
}

/// Second law for the two-variable concentration check.
inline DiscreteDist corpus_partner(const CorpusConfig& c, std::size_t index)
{
    CorpusConfig shifted = c;
    shifted.seed = splitmix64(c.seed ^ 0x2545f4914f6cdd1dULL);
    return corpus_instance(shifted, index);
}

enum class CorpusClaim {
    theorem1,
    levy_ottaviani,
    corollary4,
    corollary5,
    corollary6,
    latala_sharp,
    latala_alt,
    lemma2,
    corollary3,
};

struct ClaimSpec {
    CorpusClaim claim = CorpusClaim::theorem1;
    std::optional<Constants> constants;
    std::string text;
};

/// Parses "name" or "name:c1:c2", e.g. "theorem1:3:10", "levy", "latala_alt".
inline ClaimSpec parse_claim_spec(std::string_view text)
{
    static const std::map<std::string, CorpusClaim, std::less<>> names{
        {"theorem1", CorpusClaim::theorem1},       {"levy", CorpusClaim::levy_ottaviani},
        {"levy_ottaviani", CorpusClaim::levy_ottaviani}, {"corollary4", CorpusClaim::corollary4},
        {"corollary5", CorpusClaim::corollary5},   {"corollary6", CorpusClaim::corollary6},
        {"latala_sharp", CorpusClaim::latala_sharp}, {"latala_alt", CorpusClaim::latala_alt},
        {"latala", CorpusClaim::latala_alt},       {"lemma2", CorpusClaim::lemma2},
        {"corollary3", CorpusClaim::corollary3},
    };
    ClaimSpec spec;
    spec.text = std::string(text);
    const auto colon = text.find(':');
    const auto name = text.substr(0, colon);
    const auto it = names.find(name);
    if (it == names.end()) throw std::invalid_argument("unknown claim '" + std::string(name) + "'");
    spec.claim = it->second;
    if (colon != std::string_view::npos) {
        const auto rest = text.substr(colon + 1);
        const auto colon2 = rest.find(':');
        if (colon2 == std::string_view::npos)
            throw std::invalid_argument("claim '" + spec.text + "': expected name:c1:c2");
        switch (spec.claim) {
        case CorpusClaim::theorem1:
        case CorpusClaim::corollary4:
        case CorpusClaim::corollary5:
        case CorpusClaim::corollary6: break;
        default: throw std::invalid_argument("claim '" + std::string(name) + "' takes no constants");
        }
        const Constants c{parse_rational(rest.substr(0, colon2)), parse_rational(rest.substr(colon2 + 1))};
        if (c.c1 <= 0 || c.c2 <= 0) throw std::invalid_argument("claim '" + spec.text + "': constants must be positive");
        spec.constants = c;
    }
    return spec;
}

inline std::vector<ClaimSpec> parse_claim_list(std::string_view text)
{
    std::vector<ClaimSpec> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        if (!item.empty()) out.push_back(parse_claim_spec(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("no claims given");
    return out;
}

struct CorpusRow {
    std::size_t instance = 0;
    InequalityReport report;
};

struct InstanceResult {
    std::size_t index = 0;
    DiscreteDist dist = DiscreteDist::point_mass(Point{Rational(0)});
    std::optional<std::string> skipped;
    std::vector<CorpusRow> rows;
};

namespace detail {

inline void run_claim(const ClaimSpec& spec, const CorpusConfig& c, std::size_t index, PartialSumTable& sums,
                      std::vector<CorpusRow>& rows)
{
    const unsigned K = sums.max_k();
    auto add = [&](InequalityReport r) { rows.push_back(CorpusRow{index, std::move(r)}); };
    const bool one_d = sums.base().dim() == 1;

    for (const Mode mode : c.modes) {
        const auto m = Modes::both(mode);
        switch (spec.claim) {
        case CorpusClaim::theorem1:
            for (unsigned k = 1; k <= K; ++k)
                for (unsigned j = 1; j <= k; ++j)
                    add(check_theorem1(sums, j, k, spec.constants.value_or(defaults::theorem1()), m));
            break;
        case CorpusClaim::levy_ottaviani:
            for (unsigned k = 1; k <= K; ++k) add(check_levy_ottaviani(sums, k, m));
            break;
        case CorpusClaim::corollary4:
            for (unsigned k = 1; k <= K; ++k)
                add(check_corollary4(sums, k, spec.constants.value_or(defaults::corollary4()), m));
            break;
        case CorpusClaim::corollary5:
            for (unsigned k = 1; k <= K; ++k) {
                const auto alphas = corpus_weights(c, index, k);
                add(check_corollary5(sums, alphas, spec.constants.value_or(defaults::corollary5()), m));
            }
            break;
        case CorpusClaim::corollary6:
            for (unsigned j = 1; j <= K; ++j)
                for (unsigned k = 1; k <= j; ++k)
                    add(check_corollary6(sums, j, k, spec.constants.value_or(defaults::corollary6()), m));
            break;
        case CorpusClaim::latala_sharp:
            if (K >= 2) add(check_latala_sharp(sums, m));
            break;
        case CorpusClaim::latala_alt:
            for (const auto& cc : defaults::latala_theorem1())
                for (unsigned k = 1; k <= K; ++k)
                    for (unsigned j = 1; j <= k; ++j) {
                        auto r = check_theorem1(sums, j, k, cc, m, ClaimId::latala_alt);
                        r.variant = "theorem1";
                        r.note = external_claim_note();
                        add(std::move(r));
                    }
            for (const auto& cc : defaults::latala_corollary4())
                for (unsigned k = 1; k <= K; ++k) {
                    auto r = check_corollary4(sums, k, cc, m, ClaimId::latala_alt);
                    r.variant = "corollary4";
                    r.note = external_claim_note();
                    add(std::move(r));
                }
            break;
        case CorpusClaim::lemma2:
        case CorpusClaim::corollary3:
            break;
        }
    }

    // Concentration checks do not depend on the strict/weak mode.
    if (!one_d) return;
    if (spec.claim == CorpusClaim::lemma2) {
        const auto partner = corpus_partner(c, index);
        for (const auto& t : c.radii) {
            add(check_lemma2(sums.base(), partner, t, c.limits));
            add(check_lemma2(sums.base(), sums.base(), t, c.limits));
        }
    } else if (spec.claim == CorpusClaim::corollary3) {
        for (const auto& t : c.radii) {
            const auto r = check_corollary3_sums(sums.laws(), K, t);
            add(r.unrefined);
            add(r.refined);
        }
    }
}

} // namespace detail

inline InstanceResult run_instance(const CorpusConfig& c, std::span<const ClaimSpec> claims, std::size_t index)
{
    InstanceResult out;
    out.index = index;
    out.dist = corpus_instance(c, index);
    try {
        PartialSumTable sums(out.dist, c.max_k, c.shapes[index % c.shapes.size()].norm, c.limits);
        for (const auto& spec : claims) detail::run_claim(spec, c, index, sums, out.rows);
    } catch (const SupportCapExceeded& e) {
        out.skipped = e.what();
        out.rows.clear();
    }
    return out;
}

struct ClaimTally {
    std::size_t checks = 0;
    std::size_t holds = 0;
    std::size_t vacuous = 0;
    std::size_t violated = 0;
    std::optional<CorpusRow> tightest;
};

struct CorpusAggregate {
    CorpusConfig config;
    std::vector<ClaimSpec> claims;
    std::size_t instances = 0;
    std::vector<std::pair<std::size_t, std::string>> skipped;
    std::vector<CorpusRow> rows;
    std::map<std::size_t, DiscreteDist> violating_instances;
    std::map<std::string, ClaimTally> by_claim;
    ClaimTally total;

    std::size_t violations() const noexcept { return total.violated; }
};

inline std::string tally_key(const InequalityReport& r)
{
    std::string key(to_string(r.claim));
    if (!r.variant.empty() && r.claim == ClaimId::latala_alt) key += "/" + r.variant;
    return key;
}

inline void tally(ClaimTally& t, const CorpusRow& row)
{
    ++t.checks;
    switch (row.report.status) {
    case Status::holds: ++t.holds; break;
    case Status::vacuous: ++t.vacuous; break;
    case Status::violated: ++t.violated; break;
    }
    if (row.report.status != Status::vacuous && (!t.tightest || row.report.margin < t.tightest->report.margin))
        t.tightest = row;
}

/// Runs every claim on every corpus instance. Instances may be evaluated on
/// several threads; results are merged in instance order.
inline CorpusAggregate run_corpus(const CorpusConfig& config, std::vector<ClaimSpec> claims)
{
    config.validate();
    std::vector<InstanceResult> results(config.count);
    const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < config.count; ++i) results[i] = run_instance(config, claims, i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < config.count;) results[i] = run_instance(config, claims, i);
            });
    }

    CorpusAggregate agg;
    agg.config = config;
    agg.claims = std::move(claims);
    agg.instances = config.count;
    for (auto& res : results) {
        if (res.skipped) {
            agg.skipped.emplace_back(res.index, *res.skipped);
            continue;
        }
        bool violated = false;
        for (auto& row : res.rows) {
            tally(agg.total, row);
            tally(agg.by_claim[tally_key(row.report)], row);
            violated = violated || row.report.status == Status::violated;
            agg.rows.push_back(std::move(row));
        }
        if (violated) agg.violating_instances.emplace(res.index, res.dist);
    }
    return agg;
}

inline nlohmann::json to_json(const ClaimTally& t)
{
    nlohmann::json j = {{"checks", t.checks}, {"holds", t.holds}, {"vacuous", t.vacuous}, {"violated", t.violated}};
    if (t.tightest) {
        auto w = to_json(t.tightest->report);
        w["instance"] = t.tightest->instance;
        j["tightest"] = w;
    }
    return j;
}

inline nlohmann::json to_json(const CorpusAggregate& a)
{
    nlohmann::json claims = nlohmann::json::array();
    for (const auto& c : a.claims) claims.push_back(c.text);
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& [i, why] : a.skipped) skipped.push_back({{"instance", i}, {"reason", why}});
    nlohmann::json by_claim = nlohmann::json::object();
    for (const auto& [k, t] : a.by_claim) by_claim[k] = to_json(t);
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& row : a.rows)
        if (row.report.status == Status::violated) {
            auto v = to_json(row.report);
            v["instance"] = row.instance;
            violations.push_back(std::move(v));
        }
    nlohmann::json dists = nlohmann::json::object();
    for (const auto& [i, d] : a.violating_instances) dists[std::to_string(i)] = dist_to_json(d);
    return {{"config", to_json(a.config)},
            {"claims", claims},
            {"instances", a.instances},
            {"skipped_count", a.skipped.size()},
            {"skipped", skipped},
            {"summary", to_json(a.total)},
            {"by_claim", by_claim},
            {"violations", violations},
            {"violating_distributions", dists}};
}

/// One row per check; rationals as p/q strings plus an approximate float
/// margin column.
inline void write_checks_csv(std::ostream& out, std::span<const CorpusRow> rows)
{
    out << "instance,claim,variant,j,k,c1,c2,norm,lhs_mode,rhs_mode,worst_t,t_squared,lhs,rhs,margin,"
           "margin_approx,status\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        out << row.instance << ',' << to_string(r.claim) << ',' << r.variant << ',' << r.j << ',' << r.k << ','
            << to_string(r.c1) << ',' << to_string(r.c2) << ',' << to_string(r.norm) << ',' << to_string(r.lhs_mode)
            << ',' << to_string(r.rhs_mode) << ',' << to_string(r.worst_t) << ',' << (r.t_squared ? 1 : 0) << ','
            << to_string(r.lhs) << ',' << to_string(r.rhs) << ',' << to_string(r.margin) << ','
            << r.margin.get_d() << ',' << to_string(r.status) << '\n';
    }
}

inline void write_corpus_csv(std::ostream& out, const CorpusAggregate& a) { write_checks_csv(out, a.rows); }

} // namespace iidtail
