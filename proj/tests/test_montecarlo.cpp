#include "iidtail/montecarlo.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace iidtail;
using oracle::coin;

namespace {

// Binomial CDF by direct summation in log space.
double binom_cdf(std::uint64_t x, std::uint64_t n, double p)
{
    if (p <= 0) return 1;
    if (p >= 1) return x >= n ? 1 : 0;
    double s = 0;
    for (std::uint64_t i = 0; i <= x; ++i)
        s += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                      (n - i) * std::log1p(-p));
    return s;
}

// Clopper-Pearson endpoints by bisection on the defining tail equations.
BinomialInterval bisect_interval(std::uint64_t x, std::uint64_t n, double delta)
{
    auto solve = [](auto f) {
        double lo = 0, hi = 1;
        for (int i = 0; i < 200; ++i) {
            const double mid = (lo + hi) / 2;
            (f(mid) ? hi : lo) = mid;
        }
        return (lo + hi) / 2;
    };
    BinomialInterval iv;
    // lo: Pr(X >= x | p) = delta/2, increasing in p.
    iv.lo = x == 0 ? 0 : solve([&](double p) { return 1 - binom_cdf(x - 1, n, p) >= delta / 2; });
    // hi: Pr(X <= x | p) = delta/2, decreasing in p.
    iv.hi = x == n ? 1 : solve([&](double p) { return binom_cdf(x, n, p) <= delta / 2; });
    return iv;
}

SamplerSpec gaussian(double mean, double sd)
{
    SamplerSpec s;
    s.family = GaussianFamily{mean, sd};
    return s;
}

} // namespace

TEST(ClopperPearson, MatchesBisection)
{
    for (std::uint64_t n : {1u, 7u, 30u, 200u})
        for (std::uint64_t x = 0; x <= n; x += std::max<std::uint64_t>(1, n / 9))
            for (double d : {0.01, 0.1, 0.5}) {
                const auto a = clopper_pearson(x, n, d);
                const auto b = bisect_interval(x, n, d);
                EXPECT_NEAR(a.lo, b.lo, 1e-9) << x << "/" << n << " d=" << d;
                EXPECT_NEAR(a.hi, b.hi, 1e-9) << x << "/" << n << " d=" << d;
                EXPECT_LE(a.lo, static_cast<double>(x) / n);
                EXPECT_GE(a.hi, static_cast<double>(x) / n);
            }
    EXPECT_NEAR(clopper_pearson(0, 10, 0.05).hi, 1 - std::pow(0.025, 0.1), 1e-12);
    EXPECT_NEAR(clopper_pearson(10, 10, 0.05).lo, std::pow(0.025, 0.1), 1e-12);
    EXPECT_EQ(clopper_pearson(0, 0, 0.05).hi, 1);
    EXPECT_THROW(clopper_pearson(1, 1, 0), std::invalid_argument);
}

TEST(EstimateTail, Examples)
{
    const auto e = estimate_tail(SamplerSpec::discrete(coin()), 2, 1, NormKind::abs1d, 100000, 11, 0.01);
    EXPECT_LE(e.lo, 0.5);
    EXPECT_GE(e.hi, 0.5);
    EXPECT_LE(e.lo, e.estimate);
    EXPECT_GE(e.hi, e.estimate);

    const auto none = estimate_tail(SamplerSpec::discrete(coin()), 3, 100, NormKind::abs1d, 1000, 1, 0.05);
    EXPECT_EQ(none.hits, 0u);
    EXPECT_EQ(none.lo, 0);
    EXPECT_GT(none.hi, 0);

    const auto all = estimate_tail(gaussian(0, 1), 4, 0, NormKind::abs1d, 1000, 1, 0.05);
    EXPECT_EQ(all.hits, 1000u);
    EXPECT_EQ(all.estimate, 1.0);
    EXPECT_EQ(all.hi, 1.0);
}

TEST(EstimateTail, BoundaryThresholdsAreExactOnLattices)
{
    // |S_2| takes 0 or 2/10 exactly; a threshold of 2/10 is never exceeded.
    const auto x = DiscreteDist::from_scalars({{ratio(-1, 10), ratio(1, 2)}, {ratio(1, 10), ratio(1, 2)}});
    const auto s = SamplerSpec::discrete(x);
    EXPECT_EQ(estimate_tail(s, 2, ratio(2, 10), NormKind::abs1d, 5000, 3, 0.05).hits, 0u);
    const TailQuery weak{2, false, ratio(2, 10), Mode::weak};
    const auto h = count_exceedances(s, NormKind::abs1d, std::span(&weak, 1), 5000, 3);
    EXPECT_GT(h[0], 2000u);
    EXPECT_LT(h[0], 3000u);
}

TEST(EstimateTail, DeterministicAndThreadInvariant)
{
    std::mt19937_64 rng(2);
    const auto spec = SamplerSpec::discrete(oracle::random_dist_1d(rng, 4, -6, 6, 3));
    const std::vector<TailQuery> qs{{3, false, ratio(1, 3), Mode::strict}, {3, true, 1, Mode::strict},
                                    {1, false, 0, Mode::weak}};
    const auto a = count_exceedances(spec, NormKind::abs1d, qs, 20000, 99);
    EXPECT_EQ(a, count_exceedances(spec, NormKind::abs1d, qs, 20000, 99));
    EXPECT_EQ(a, count_exceedances(spec, NormKind::abs1d, qs, 20000, 99, 4));
    EXPECT_NE(a, count_exceedances(spec, NormKind::abs1d, qs, 20000, 100));
    EXPECT_EQ(a[2], 20000u);
    const auto g = estimate_tail(gaussian(0, 1), 3, 1, NormKind::abs1d, 5000, 4, 0.05, 1);
    EXPECT_EQ(g.hits, estimate_tail(gaussian(0, 1), 3, 1, NormKind::abs1d, 5000, 4, 0.05, 3).hits);
}

TEST(EstimateTail, ContinuousFamiliesMatchClosedForms)
{
    // Pr(|N(0, 2)| > 1) for a sum of two standard normals.
    const double g = std::erfc(1.0 / 2.0);
    const auto eg = estimate_tail(gaussian(0, 1), 2, 1, NormKind::abs1d, 40000, 5, 0.001);
    EXPECT_LE(eg.lo, g);
    EXPECT_GE(eg.hi, g);

    SamplerSpec tp;
    tp.family = TwoPointFamily{0, 0.3, 1};
    // S_2 > 1 iff both draws are 1.
    const auto et = estimate_tail(tp, 2, ratio(3, 2), NormKind::abs1d, 40000, 6, 0.001);
    EXPECT_LE(et.lo, 0.49);
    EXPECT_GE(et.hi, 0.49);

    SamplerSpec pa;
    pa.family = ShiftedParetoFamily{2, 0};
    const auto ep = estimate_tail(pa, 1, 3, NormKind::abs1d, 40000, 7, 0.001);
    EXPECT_LE(ep.lo, 1.0 / 9);
    EXPECT_GE(ep.hi, 1.0 / 9);

    SamplerSpec plane = gaussian(0, 1);
    plane.dim = 2;
    // ||(Z1, Z2)||^2 is exponential with mean 2.
    const auto e2 = estimate_tail(plane, 1, 1, NormKind::euclidean, 40000, 8, 0.001);
    EXPECT_LE(e2.lo, std::exp(-0.5));
    EXPECT_GE(e2.hi, std::exp(-0.5));
}

TEST(EstimateTail, InvalidFamilies)
{
    EXPECT_THROW(estimate_tail(gaussian(0, 0), 1, 1, NormKind::abs1d, 10, 1, 0.1), std::invalid_argument);
    SamplerSpec tp;
    tp.family = TwoPointFamily{0, 1.5, 1};
    EXPECT_THROW(estimate_tail(tp, 1, 1, NormKind::abs1d, 10, 1, 0.1), std::invalid_argument);
    SamplerSpec pa;
    pa.family = ShiftedParetoFamily{-1, 0};
    EXPECT_THROW(estimate_tail(pa, 1, 1, NormKind::abs1d, 10, 1, 0.1), std::invalid_argument);
    EXPECT_THROW(estimate_tail(gaussian(0, 1), 1, 1, NormKind::abs1d, 10, 1, 1.5), std::invalid_argument);
}

TEST(Calibration, CoverageOnDiscreteLaws)
{
    std::mt19937_64 rng(13);
    int covered = 0, runs = 0;
    for (int law = 0; law < 5; ++law) {
        const auto x = oracle::random_dist_1d(rng, 4, -6, 6, 2);
        const unsigned k = 1 + static_cast<unsigned>(rng() % 4);
        const Rational t = ratio(static_cast<int>(rng() % 12), 2);
        const double exact = tail(iid_sum(x, k), NormKind::abs1d, t, Mode::strict).get_d();
        for (int s = 0; s < 100; ++s) {
            const auto e = estimate_tail(SamplerSpec::discrete(x), k, t, NormKind::abs1d, 200,
                                         derive_seed(law, s), 0.1);
            covered += e.lo <= exact && exact <= e.hi;
            ++runs;
        }
    }
    EXPECT_EQ(runs, 500);
    EXPECT_GE(covered, 435);
}

TEST(McCheck, CoinExamples)
{
    const std::vector<Rational> grid{ratio(1, 2)};
    const auto spec = SamplerSpec::discrete(coin());
    const auto ok = mc_check({McClaim::theorem1, 1, 2, defaults::theorem1()}, spec, NormKind::abs1d, grid, 2000, 1, 0.05);
    EXPECT_EQ(ok.points[0].verdict, McVerdict::holds);
    const auto bad = mc_check({McClaim::theorem1, 1, 2, {1, 1}}, spec, NormKind::abs1d, grid, 2000, 1, 0.05);
    EXPECT_EQ(bad.points[0].verdict, McVerdict::violation);
    const auto none = mc_check({McClaim::theorem1, 1, 2, {1, 1}}, spec, NormKind::abs1d, grid, 0, 1, 0.05);
    EXPECT_EQ(none.points[0].verdict, McVerdict::inconclusive);
    EXPECT_THROW(mc_check({}, spec, NormKind::abs1d, std::vector<Rational>{}, 10, 1, 0.05), std::invalid_argument);
    EXPECT_EQ(to_json(bad)["violations"], 1);
}

TEST(McCheck, ProvenClaimsNeverFlaggedAcrossSeedBattery)
{
    std::vector<SamplerSpec> specs{SamplerSpec::discrete(coin()), gaussian(0, 1), gaussian(1, 2)};
    SamplerSpec tp;
    tp.family = TwoPointFamily{-1, 0.1, 3};
    specs.push_back(tp);
    SamplerSpec pa;
    pa.family = ShiftedParetoFamily{1.5, -2};
    specs.push_back(pa);
    const std::vector<McClaimSpec> claims{
        {McClaim::theorem1, 1, 2, defaults::theorem1()},     {McClaim::theorem1, 2, 5, defaults::theorem1()},
        {McClaim::levy_ottaviani, 0, 4, defaults::levy_ottaviani()},
        {McClaim::corollary4, 0, 4, defaults::corollary4()}, {McClaim::corollary6, 4, 2, defaults::corollary6()},
        {McClaim::latala_sharp, 1, 2, defaults::latala_sharp()},
    };
    const auto grid = default_mc_grid();
    std::size_t holds = 0;
    for (const auto seed : standard_seed_battery())
        for (const auto& s : specs)
            for (const auto& c : claims) {
                const auto r = mc_check(c, s, NormKind::abs1d, grid, 400, seed, 0.05);
                EXPECT_EQ(r.count(McVerdict::violation), 0u) << to_json(r).dump();
                holds += r.count(McVerdict::holds);
            }
    EXPECT_GT(holds, 0u);
}
