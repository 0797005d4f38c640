// iidtail: batch front end for the exact tail-inequality checkers.
//
// Exit codes: 0 all checks hold, 1 violation (or no instance found),
// 2 usage or input error, 3 internal soundness guard tripped.

#include "iidtail/concentration.hpp"
#include "iidtail/corpus.hpp"
#include "iidtail/counterexample.hpp"
#include "iidtail/dist_io.hpp"
#include "iidtail/inequalities.hpp"
#include "iidtail/montecarlo.hpp"
#include "iidtail/search.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

using namespace iidtail;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_violation = 1;
constexpr int exit_usage = 2;
constexpr int exit_guard = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string utc_now()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<Rational> parse_rational_list(const std::string& text)
{
    std::vector<Rational> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_rational(item));
    return out;
}

/// Inputs read during a run; their digests go into the manifest.
class Inputs {
public:
    DiscreteDist load(const std::string& path)
    {
        const std::string text = read_file(path);
        record(path, text);
        try {
            return parse_dist_json(text);
        } catch (const ParseError& e) {
            throw ParseError(path + ": " + e.what());
        }
    }

    json load_json(const std::string& path)
    {
        const std::string text = read_file(path);
        record(path, text);
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(path + ": JSON syntax error at byte " + std::to_string(e.byte));
        }
    }

    json digests() const { return entries_; }

private:
    void record(const std::string& path, const std::string& text)
    {
        entries_.push_back({{"path", path}, {"fnv1a64", fnv1a64(text)}, {"bytes", text.size()}});
    }

    json entries_ = json::array();
};

/// Shared state of one invocation: the subcommand, its parsed options and
/// the output settings.
struct Run {
    std::string name;
    CLI::App* app = nullptr;
    Inputs inputs;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
    std::string started_utc = utc_now();
    std::string out_dir;
    bool write_json = true;
    bool write_csv = true;
    std::uint64_t seed = 0;

    json params() const
    {
        json p = json::object();
        for (const CLI::Option* opt : app->get_options()) {
            const std::string key = opt->get_single_name();
            if (key == "help" || key == "json" || key == "csv") continue;
            const auto& res = opt->results();
            if (opt->get_expected_min() == 0)
                p[key] = !res.empty();
            else if (res.empty())
                p[key] = opt->get_default_str();
            else if (res.size() == 1)
                p[key] = res.front();
            else
                p[key] = res;
        }
        p["json"] = write_json;
        p["csv"] = write_csv;
        return p;
    }

    json manifest(const std::string& outcome) const
    {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return {{"subcommand", name},
                {"params", params()},
                {"seed", seed},
                {"version", IIDTAIL_VERSION},
                {"inputs", inputs.digests()},
                {"outcome", outcome},
                {"wall_clock", {{"started_utc", started_utc}, {"elapsed_seconds", elapsed}}}};
    }

    void write_file(const std::string& filename, const std::string& content) const
    {
        std::filesystem::create_directories(out_dir);
        const auto path = std::filesystem::path(out_dir) / filename;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out << content;
    }

    /// Prints the report and, with --out, also stores it as <name>_report.json.
    void emit(json report) const
    {
        const std::string text = report.dump(2) + "\n";
        std::cout << text;
        if (!out_dir.empty() && write_json) write_file(name + "_report.json", text);
    }
};

struct Output {
    std::string dir;
    bool json = true;
    bool csv = false;
};

void add_output_options(CLI::App* sub, Output& out)
{
    sub->add_option("--out", out.dir, "Directory for report artifacts");
    sub->add_flag("--json,!--no-json", out.json, "Write the JSON report artifact");
    sub->add_flag("--csv,!--no-csv", out.csv, "Write the per-check CSV artifact");
}

NormKind resolve_norm(const std::string& text, std::size_t dim)
{
    if (text == "auto") return dim == 1 ? NormKind::abs1d : NormKind::sup;
    return parse_norm(text);
}

std::vector<Modes> resolve_modes(const std::string& text)
{
    if (text == "both") return {Modes::both(Mode::strict), Modes::both(Mode::weak)};
    return {Modes::both(parse_mode(text))};
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
    std::vector<std::string> files;
    std::string claim = "theorem1";
    std::string c1, c2;
    unsigned j = 1, k = 2;
    std::string norm = "auto";
    std::string mode = "strict";
    std::string alphas;
    std::string t;
    std::string partner;
};

Constants verify_constants(const VerifyOptions& o, Constants fallback, bool overridable)
{
    if (!overridable && (!o.c1.empty() || !o.c2.empty()))
        throw UsageError("claim '" + o.claim + "' has fixed constants; --c1/--c2 do not apply");
    Constants c = fallback;
    if (!o.c1.empty()) c.c1 = parse_rational(o.c1);
    if (!o.c2.empty()) c.c2 = parse_rational(o.c2);
    return c;
}

std::vector<InequalityReport> verify_one(const VerifyOptions& o, const DiscreteDist& x, Inputs& inputs)
{
    const NormKind norm = resolve_norm(o.norm, x.dim());
    std::vector<InequalityReport> out;
    const auto& name = o.claim;
    auto need_t = [&] {
        if (o.t.empty()) throw UsageError("claim '" + name + "' needs --t");
        const Rational t = parse_rational(o.t);
        if (t < 0) throw UsageError("--t must be nonnegative");
        return t;
    };
    if (name == "lemma2") {
        verify_constants(o, {}, false);
        const Rational t = need_t();
        const DiscreteDist y = o.partner.empty() ? x : inputs.load(o.partner);
        if (x.dim() != 1 || y.dim() != 1) throw UsageError("lemma2 runs on one-dimensional distributions");
        out.push_back(check_lemma2(x, y, t));
        return out;
    }
    if (name == "corollary3") {
        verify_constants(o, {}, false);
        const Rational t = need_t();
        if (x.dim() != 1) throw UsageError("corollary3 runs on one-dimensional distributions");
        if (o.k == 0) throw UsageError("--k must be at least 1");
        const auto r = check_corollary3(x, o.k, t);
        out.push_back(r.unrefined);
        out.push_back(r.refined);
        return out;
    }
    for (const Modes& m : resolve_modes(o.mode)) {
        if (name == "theorem1") {
            out.push_back(check_theorem1(x, o.j, o.k, verify_constants(o, defaults::theorem1(), true), norm, m));
        } else if (name == "latala") {
            verify_constants(o, {}, false);
            if (o.j == 0 || o.j > o.k) throw UsageError("latala requires 1 <= j <= k");
            PartialSumTable sums(x, o.k, norm);
            for (const auto& c : defaults::latala_theorem1()) {
                auto r = check_theorem1(sums, o.j, o.k, c, m, ClaimId::latala_alt);
                r.note = external_claim_note();
                out.push_back(std::move(r));
            }
        } else if (name == "latala_sharp") {
            verify_constants(o, {}, false);
            out.push_back(check_latala_sharp(x, norm, m));
        } else if (name == "levy" || name == "levy_ottaviani") {
            verify_constants(o, {}, false);
            out.push_back(check_levy_ottaviani(x, o.k, norm, m));
        } else if (name == "corollary4") {
            out.push_back(check_corollary4(x, o.k, verify_constants(o, defaults::corollary4(), true), norm, m));
        } else if (name == "corollary5") {
            if (o.alphas.empty()) throw UsageError("corollary5 needs --alphas");
            const auto alphas = parse_rational_list(o.alphas);
            out.push_back(check_corollary5(x, alphas, verify_constants(o, defaults::corollary5(), true), norm, m));
        } else if (name == "corollary6") {
            out.push_back(check_corollary6(x, o.j, o.k, verify_constants(o, defaults::corollary6(), true), norm, m));
        } else {
            throw UsageError("unknown claim '" + name + "'");
        }
    }
    return out;
}

int cmd_verify(Run& run, const VerifyOptions& o)
{
    std::vector<CorpusRow> rows;
    json checks = json::array();
    std::size_t holds = 0, vacuous = 0, violated = 0;
    for (std::size_t i = 0; i < o.files.size(); ++i) {
        const DiscreteDist x = run.inputs.load(o.files[i]);
        for (auto& r : verify_one(o, x, run.inputs)) {
            auto j = to_json(r);
            j["file"] = o.files[i];
            checks.push_back(std::move(j));
            holds += r.status == Status::holds;
            vacuous += r.status == Status::vacuous;
            violated += r.status == Status::violated;
            rows.push_back(CorpusRow{i, std::move(r)});
        }
    }
    const std::string outcome = violated ? "violation" : "holds";
    json report = {{"manifest", run.manifest(outcome)},
                   {"summary", {{"checks", rows.size()}, {"holds", holds}, {"vacuous", vacuous}, {"violated", violated}}},
                   {"checks", checks}};
    run.emit(std::move(report));
    if (!run.out_dir.empty() && run.write_csv) {
        std::ostringstream csv;
        write_checks_csv(csv, rows);
        run.write_file("verify_checks.csv", csv.str());
    }
    return violated ? exit_violation : exit_ok;
}

// ---------------------------------------------------------------- corpus

struct CorpusOptions {
    CorpusConfig config;
    std::string claims = "theorem1";
    std::string shapes = "1:abs1d";
    std::string modes = "strict,weak";
    std::string radii = "1/4,1/2,1,2,4";
    std::size_t max_support = 0;
};

int cmd_corpus(Run& run, CorpusOptions o)
{
    auto& c = o.config;
    c.seed = run.seed;
    if (c.threads == 0) c.threads = std::max(1u, std::thread::hardware_concurrency());
    c.shapes.clear();
    for (const auto& item : split(o.shapes, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw UsageError("--shapes expects entries like 1:abs1d or 2:sup");
        c.shapes.push_back(CorpusShape{std::stoul(parts[0]), parse_norm(parts[1])});
    }
    c.modes.clear();
    for (const auto& m : split(o.modes, ',')) c.modes.push_back(parse_mode(m));
    c.radii = parse_rational_list(o.radii);
    if (o.max_support) c.limits.max_support = o.max_support;
    c.validate();
    const auto claims = parse_claim_list(o.claims);

    const auto agg = run_corpus(c, claims);
    const std::string outcome = agg.violations() ? "violation" : "holds";
    json report = to_json(agg);
    report["manifest"] = run.manifest(outcome);
    if (run.out_dir.empty()) run.out_dir = ".";
    if (run.write_json) run.write_file("corpus_report.json", report.dump(2) + "\n");
    if (run.write_csv) {
        std::ostringstream csv;
        write_corpus_csv(csv, agg);
        run.write_file("corpus_checks.csv", csv.str());
    }
    json brief = {{"manifest", report["manifest"]},
                  {"instances", report["instances"]},
                  {"skipped_count", report["skipped_count"]},
                  {"summary", report["summary"]},
                  {"by_claim", report["by_claim"]}};
    std::cout << brief.dump(2) << "\n";
    return agg.violations() ? exit_violation : exit_ok;
}

// ---------------------------------------------------------------- search

struct SearchOptions {
    SearchSpace space;
    SearchBudget budget;
    std::string c2 = "1";
    std::string lo = "-4", hi = "4";
    std::string campaign;
    std::string probe;
    std::string probe_claim = "theorem1";
    std::string c2_sweep;
    std::string c1 = "1";
};

int cmd_search(Run& run, SearchOptions o)
{
    if (!o.probe.empty()) {
        const auto family = parse_probe_family(o.probe);
        const auto sweep = o.c2_sweep.empty() ? std::vector<Rational>{} : parse_rational_list(o.c2_sweep);
        const auto r = probe_necessity(family, o.space.j, o.space.k, o.probe_claim, sweep, parse_rational(o.c1));
        run.emit({{"manifest", run.manifest("probe")}, {"probe", to_json(r)}});
        return exit_ok;
    }
    SearchSpace space = o.space;
    SearchBudget budget = o.budget;
    if (!o.campaign.empty()) {
        std::tie(space, budget) = parse_campaign(run.inputs.load_json(o.campaign));
        run.seed = budget.seed;
    } else {
        space.c2 = parse_rational(o.c2);
        space.value_lo = parse_rational(o.lo);
        space.value_hi = parse_rational(o.hi);
        budget.seed = run.seed;
    }
    const auto r = search(space, budget);
    const std::string outcome = r.guard_tripped ? "guard_tripped" : "lower_bound";
    run.emit({{"manifest", run.manifest(outcome)},
              {"space", to_json(space)},
              {"budget", {{"evaluations", budget.evaluations}, {"restarts", budget.restarts}, {"seed", budget.seed}}},
              {"result", to_json(r)}});
    if (r.guard_tripped) {
        std::cerr << "soundness guard tripped: " << *r.guard_tripped << "\n";
        return exit_guard;
    }
    return exit_ok;
}

// ---------------------------------------------------------------- counterexample

struct CounterexampleOptions {
    std::uint64_t N = 2;
    std::uint64_t cap = 100000;
    std::uint64_t M = 0;
    bool no_screen = false;
};

int cmd_counterexample(Run& run, const CounterexampleOptions& o)
{
    if (o.N < 2) throw UsageError("--N must be at least 2");
    json report = json::object();
    std::optional<std::uint64_t> M;
    if (o.M) {
        if (o.M < o.N * o.N * o.N) throw UsageError("--M must be at least N^3");
        M = o.M;
    } else {
        const auto f = find_M(o.N, o.cap, o.no_screen ? -1.0 : 1e-6);
        report["search"] = {{"cap", o.cap},
                            {"found", f.M.has_value()},
                            {"scanned", f.scanned},
                            {"screened_out", f.screened_out},
                            {"exact_checks", f.exact_checks}};
        if (f.M) report["search"]["M"] = *f.M;
        else report["search"]["tail_at_cap_approx"] = centered_sum_tail_approx(o.N, o.cap);
        M = f.M;
    }
    bool ok = false;
    if (M) {
        const auto r = verify_counterexample(o.N, *M);
        report["instance"] = to_json(r);
        ok = r.ok();
    }
    const std::string outcome = !M ? "not_found" : ok ? "verified" : "failed";
    report["manifest"] = run.manifest(outcome);
    run.emit(std::move(report));
    return ok ? exit_ok : exit_violation;
}

// ---------------------------------------------------------------- mc

struct McOptions {
    std::string family = "discrete";
    std::string dist;
    double mean = 0, sd = 1, a = -1, p = 0.5, b = 1, alpha = 1, shift = 0;
    std::size_t dim = 1;
    unsigned k = 1, j = 1;
    std::string t = "1";
    std::uint64_t n = 10000;
    double delta = 0.05;
    unsigned threads = 1;
    std::string norm = "auto";
    std::string claim;
    std::string c1, c2;
    std::string grid;
};

int cmd_mc(Run& run, const McOptions& o)
{
    SamplerSpec spec;
    if (o.family == "discrete") {
        if (o.dist.empty()) throw UsageError("--family discrete needs --dist <file>");
        spec = SamplerSpec::discrete(run.inputs.load(o.dist));
    } else {
        if (!o.dist.empty()) throw UsageError("--dist only applies to --family discrete");
        if (o.family == "gaussian") spec.family = GaussianFamily{o.mean, o.sd};
        else if (o.family == "two_point") spec.family = TwoPointFamily{o.a, o.p, o.b};
        else if (o.family == "shifted_pareto") spec.family = ShiftedParetoFamily{o.alpha, o.shift};
        else throw UsageError("unknown family '" + o.family + "'");
        spec.dim = o.dim;
    }
    spec.validate();
    const NormKind norm = resolve_norm(o.norm, spec.dim);
    const unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());

    if (o.claim.empty()) {
        const Rational t = parse_rational(o.t);
        if (t < 0) throw UsageError("--t must be nonnegative");
        const auto e = estimate_tail(spec, o.k, t, norm, o.n, run.seed, o.delta, threads);
        json est = to_json(e);
        est["k"] = o.k;
        est["t"] = to_string(t);
        est["norm"] = to_string(norm);
        run.emit({{"manifest", run.manifest("estimate")}, {"sampler", to_json(spec)}, {"estimate", est}});
        return exit_ok;
    }
    McClaimSpec claim;
    claim.claim = parse_mc_claim(o.claim);
    claim.j = o.j;
    claim.k = o.k;
    claim.constants = McClaimSpec::default_constants(claim.claim);
    if (!o.c1.empty()) claim.constants.c1 = parse_rational(o.c1);
    if (!o.c2.empty()) claim.constants.c2 = parse_rational(o.c2);
    const auto grid = o.grid.empty() ? default_mc_grid() : parse_rational_list(o.grid);
    const auto r = mc_check(claim, spec, norm, grid, o.n, run.seed, o.delta, threads);
    const bool violated = r.count(McVerdict::violation) > 0;
    run.emit({{"manifest", run.manifest(violated ? "violation" : "no_violation")},
              {"sampler", to_json(spec)},
              {"check", to_json(r)}});
    return violated ? exit_violation : exit_ok;
}

// ---------------------------------------------------------------- show

struct ShowOptions {
    std::string file;
    std::string norm = "auto";
    unsigned k = 1;
    bool json = false;
};

int cmd_show(Run& run, const ShowOptions& o)
{
    const DiscreteDist x = run.inputs.load(o.file);
    const NormKind norm = resolve_norm(o.norm, x.dim());
    if (o.k == 0) throw UsageError("--k must be at least 1");
    const DiscreteDist s = iid_sum(x, o.k);
    const auto curve = tail_curve(s, norm);
    const bool sq = curve.squared();
    if (o.json) {
        json steps = json::array();
        for (std::size_t i = 0; i < curve.criticals().size(); ++i)
            steps.push_back({{sq ? "t_squared" : "t", to_string(curve.criticals()[i])},
                             {"tail_above", to_string(curve.values()[i])}});
        run.emit({{"manifest", run.manifest("shown")},
                  {"distribution", dist_to_json(x)},
                  {"k", o.k},
                  {"norm", to_string(norm)},
                  {"sum_distribution", dist_to_json(s)},
                  {"tail_curve", steps}});
        return exit_ok;
    }
    std::cout << "distribution (dim " << x.dim() << ", " << x.atoms().size() << " atoms)\n";
    for (const auto& a : x.atoms()) {
        std::cout << "  x = (";
        for (std::size_t c = 0; c < a.x.coords().size(); ++c) std::cout << (c ? ", " : "") << to_string(a.x[c]);
        std::cout << ")  p = " << to_string(a.p) << "\n";
    }
    std::cout << "tail of ||S_" << o.k << "|| under " << to_string(norm) << " (" << s.atoms().size()
              << " support points)\n";
    std::cout << "  " << (sq ? "t^2 range" : "t range") << "  Pr(norm > t)\n";
    Rational prev = 0;
    Rational above = 1;
    for (std::size_t i = 0; i < curve.criticals().size(); ++i) {
        const Rational& c = curve.criticals()[i];
        if (i == 0 && c == 0) {
            above = curve.values()[i];
            continue;
        }
        std::cout << "  [" << to_string(prev) << ", " << to_string(c) << ")  " << to_string(above) << "\n";
        prev = c;
        above = curve.values()[i];
    }
    std::cout << "  [" << to_string(prev) << ", inf)  " << to_string(above) << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact verification of tail comparison inequalities for sums of i.i.d. vectors"};
    app.require_subcommand(1);
    app.set_version_flag("--version", IIDTAIL_VERSION);

    Run run;
    std::map<std::string, Output> outputs;
    outputs["corpus"].csv = true;

    VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "Check one claim on distribution spec files");
    verify->add_option("files", vo.files, "Distribution spec files")->required();
    verify->add_option("--claim", vo.claim,
                       "theorem1, latala, latala_sharp, levy, corollary4, corollary5, corollary6, lemma2, corollary3")
        ->capture_default_str();
    verify->add_option("--c1", vo.c1, "Constant c1 (claim default if omitted)");
    verify->add_option("--c2", vo.c2, "Constant c2 (claim default if omitted)");
    verify->add_option("--j", vo.j, "Index j")->capture_default_str();
    verify->add_option("--k", vo.k, "Index k")->capture_default_str();
    verify->add_option("--norm", vo.norm, "abs1d, sup, euclidean or auto")->capture_default_str();
    verify->add_option("--mode", vo.mode, "strict, weak or both")->capture_default_str();
    verify->add_option("--alphas", vo.alphas, "Comma-separated weights for corollary5");
    verify->add_option("--t", vo.t, "Radius for lemma2 and corollary3");
    verify->add_option("--partner", vo.partner, "Second distribution for lemma2 (defaults to the first)");
    add_output_options(verify, outputs[verify->get_name()]);

    CorpusOptions co;
    auto* corpus = app.add_subcommand("corpus", "Run claims over a seeded random corpus");
    corpus->add_option("--seed", run.seed, "Corpus seed")->capture_default_str();
    corpus->add_option("--count", co.config.count, "Number of instances")->capture_default_str();
    corpus->add_option("--max-atoms", co.config.max_atoms, "Largest support size")->capture_default_str();
    corpus->add_option("--num-lo", co.config.num_lo, "Smallest lattice numerator")->capture_default_str();
    corpus->add_option("--num-hi", co.config.num_hi, "Largest lattice numerator")->capture_default_str();
    corpus->add_option("--denominator", co.config.denominator, "Lattice denominator")->capture_default_str();
    corpus->add_option("--max-weight", co.config.max_weight, "Largest integer probability weight")
        ->capture_default_str();
    corpus->add_option("--max-k", co.config.max_k, "Largest number of summands")->capture_default_str();
    corpus->add_option("--claims", co.claims, "Comma-separated claims, optionally name:c1:c2")->capture_default_str();
    corpus->add_option("--shapes", co.shapes, "Comma-separated dim:norm shapes")->capture_default_str();
    corpus->add_option("--modes", co.modes, "Comma-separated modes")->capture_default_str();
    corpus->add_option("--radii", co.radii, "Radii for the concentration claims")->capture_default_str();
    corpus->add_option("--max-support", co.max_support, "Support cap per sum (0 keeps the default)");
    corpus->add_option("--threads", co.config.threads, "Worker threads (0 uses all cores)")->capture_default_str();
    add_output_options(corpus, outputs[corpus->get_name()]);

    SearchOptions so;
    auto* search_cmd = app.add_subcommand("search", "Maximize the tail ratio over a lattice family");
    search_cmd->add_option("--j", so.space.j, "Index j")->capture_default_str();
    search_cmd->add_option("--k", so.space.k, "Index k")->capture_default_str();
    search_cmd->add_option("--c2", so.c2, "Scale c2")->capture_default_str();
    search_cmd->add_option("--atoms", so.space.n_atoms, "Atoms per candidate")->capture_default_str();
    search_cmd->add_option("--lo", so.lo, "Smallest atom location")->capture_default_str();
    search_cmd->add_option("--hi", so.hi, "Largest atom location")->capture_default_str();
    search_cmd->add_option("--lattice-den", so.space.lattice_den, "Location lattice denominator")
        ->capture_default_str();
    search_cmd->add_option("--prob-den", so.space.prob_den, "Probability snapping denominator")
        ->capture_default_str();
    search_cmd->add_option("--budget", so.budget.evaluations, "Objective evaluations")->capture_default_str();
    search_cmd->add_option("--restarts", so.budget.restarts, "Independent restarts")->capture_default_str();
    search_cmd->add_option("--seed", run.seed, "Search seed")->capture_default_str();
    search_cmd->add_option("--campaign", so.campaign, "JSON campaign file (overrides space and budget flags)");
    search_cmd->add_option("--probe", so.probe, "Run a necessity probe: rare_bernoulli, constant or pm_one");
    search_cmd->add_option("--probe-claim", so.probe_claim, "theorem1 or corollary6")->capture_default_str();
    search_cmd->add_option("--c2-sweep", so.c2_sweep, "Comma-separated c2 values for the probe");
    search_cmd->add_option("--c1", so.c1, "c1 for the probe's constant-law bound")->capture_default_str();
    add_output_options(search_cmd, outputs[search_cmd->get_name()]);

    CounterexampleOptions xo;
    auto* cx = app.add_subcommand("counterexample", "Find and verify the centered binomial instance for N");
    cx->add_option("--N", xo.N, "Parameter N >= 2")->required();
    cx->add_option("--cap", xo.cap, "Largest M to scan")->capture_default_str();
    cx->add_option("--M", xo.M, "Verify this M instead of searching");
    cx->add_flag("--no-screen", xo.no_screen, "Skip the floating-point screen in the scan");
    add_output_options(cx, outputs[cx->get_name()]);

    McOptions mo;
    auto* mc = app.add_subcommand("mc", "Monte Carlo tail estimates and claim checks");
    mc->add_option("--family", mo.family, "discrete, gaussian, two_point or shifted_pareto")->capture_default_str();
    mc->add_option("--dist", mo.dist, "Distribution spec file for the discrete family");
    mc->add_option("--mean", mo.mean, "Gaussian mean")->capture_default_str();
    mc->add_option("--sd", mo.sd, "Gaussian standard deviation")->capture_default_str();
    mc->add_option("--a", mo.a, "Two-point low value")->capture_default_str();
    mc->add_option("--p", mo.p, "Two-point probability of the high value")->capture_default_str();
    mc->add_option("--b", mo.b, "Two-point high value")->capture_default_str();
    mc->add_option("--alpha", mo.alpha, "Pareto tail index")->capture_default_str();
    mc->add_option("--shift", mo.shift, "Pareto shift")->capture_default_str();
    mc->add_option("--dim", mo.dim, "Dimension for continuous families (independent coordinates)")
        ->capture_default_str();
    mc->add_option("--k", mo.k, "Number of summands")->capture_default_str();
    mc->add_option("--j", mo.j, "Index j for claims that use it")->capture_default_str();
    mc->add_option("--t", mo.t, "Threshold for a single estimate")->capture_default_str();
    mc->add_option("--n", mo.n, "Realizations per estimate")->capture_default_str();
    mc->add_option("--seed", run.seed, "Sampling seed")->capture_default_str();
    mc->add_option("--delta", mo.delta, "Total error probability per verdict")->capture_default_str();
    mc->add_option("--threads", mo.threads, "Worker threads (0 uses all cores)")->capture_default_str();
    mc->add_option("--norm", mo.norm, "abs1d, sup, euclidean or auto")->capture_default_str();
    mc->add_option("--claim", mo.claim, "theorem1, latala_sharp, levy_ottaviani, corollary4 or corollary6");
    mc->add_option("--c1", mo.c1, "Constant c1 (claim default if omitted)");
    mc->add_option("--c2", mo.c2, "Constant c2 (claim default if omitted)");
    mc->add_option("--grid", mo.grid, "Comma-separated thresholds (default 1/8 .. 32)");
    add_output_options(mc, outputs[mc->get_name()]);

    ShowOptions wo;
    auto* show = app.add_subcommand("show", "Print a distribution spec and the tail curve of S_k");
    show->add_option("file", wo.file, "Distribution spec file")->required();
    show->add_option("--norm", wo.norm, "abs1d, sup, euclidean or auto")->capture_default_str();
    show->add_option("--k", wo.k, "Number of summands")->capture_default_str();
    show->add_flag("--json", wo.json, "Emit JSON instead of a table");
    show->add_option("--out", outputs["show"].dir, "Directory for the JSON artifact");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        for (auto* sub : app.get_subcommands()) {
            run.name = sub->get_name();
            run.app = sub;
        }
        const Output& out = outputs[run.name];
        run.out_dir = out.dir;
        run.write_json = out.json;
        run.write_csv = out.csv;
        if (run.name == "verify") return cmd_verify(run, vo);
        if (run.name == "corpus") return cmd_corpus(run, co);
        if (run.name == "search") return cmd_search(run, so);
        if (run.name == "counterexample") return cmd_counterexample(run, xo);
        if (run.name == "mc") return cmd_mc(run, mo);
        if (run.name == "show") return cmd_show(run, wo);
    } catch (const std::logic_error& e) {
        // invalid_argument and friends: bad parameters.
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
