#include "iidtail/search.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace iidtail;
using oracle::coin;
using oracle::delta;

TEST(RatioObjective, Examples)
{
    const auto r = ratio_objective(coin(), 1, 2, 1);
    EXPECT_FALSE(r.ratio.infinite);
    EXPECT_EQ(r.ratio.value, 2);
    EXPECT_LT(r.t, 1);
    EXPECT_EQ(ratio_objective(delta(0), 1, 3, 1).ratio.value, 0);
    EXPECT_EQ(ratio_objective(coin(), 1, 2, ratio(3, 2)).ratio.value, 2);
    // Rare Bernoulli with c2 < 1/2: S_2 never exceeds t / c2 > 2 for t near 1.
    EXPECT_TRUE(ratio_objective(DiscreteDist::from_scalars({{0, ratio(9, 10)}, {1, ratio(1, 10)}}), 1, 2, ratio(1, 4))
                    .ratio.infinite);
    EXPECT_THROW(ratio_objective(coin(), 2, 1, 1), std::invalid_argument);
    EXPECT_THROW(ratio_objective(coin(), 1, 2, 0), std::invalid_argument);
}

TEST(RatioObjective, IsTheLeastValidConstant)
{
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 60; ++rep) {
        const auto x = oracle::random_dist_1d(rng, 4, -6, 6, 2);
        const unsigned k = 1 + static_cast<unsigned>(rng() % 4), j = 1 + static_cast<unsigned>(rng() % k);
        const Rational c2 = ratio(1 + static_cast<int>(rng() % 12), 2);
        const auto r = ratio_objective(x, j, k, c2);
        if (r.ratio.infinite) {
            EXPECT_FALSE(check_theorem1(x, j, k, {1000000, c2}, NormKind::abs1d).ok());
            continue;
        }
        if (r.ratio.value == 0) continue;
        EXPECT_TRUE(check_theorem1(x, j, k, {r.ratio.value, c2}, NormKind::abs1d).ok());
        EXPECT_FALSE(check_theorem1(x, j, k, {r.ratio.value * ratio(999, 1000), c2}, NormKind::abs1d).ok());
    }
}

TEST(ExtendedRatio, Ordering)
{
    EXPECT_TRUE((ExtendedRatio{false, 5} < ExtendedRatio::inf()));
    EXPECT_FALSE((ExtendedRatio::inf() < ExtendedRatio{false, 5}));
    EXPECT_FALSE(ExtendedRatio::inf() < ExtendedRatio::inf());
    EXPECT_TRUE(ExtendedRatio::inf() > Rational(1000));
    EXPECT_EQ(ExtendedRatio::inf().str(), "inf");
}

TEST(Search, ZeroBudgetReturnsInitialPoint)
{
    SearchSpace s;
    const auto r = search(s, {0, 1, 42});
    EXPECT_EQ(r.evaluations, 0u);
    ASSERT_EQ(r.trace.size(), 1u);
    EXPECT_EQ(r.achieved_ratio, ratio_objective(r.best_dist, 1, 2, 1).ratio);
}

TEST(Search, FindsTheCoinRatioAtUnitScale)
{
    SearchSpace s;
    s.c2 = 1;
    const auto r = search(s, {10000, 20, 1});
    EXPECT_LE(r.evaluations, 10000u);
    EXPECT_FALSE((r.achieved_ratio < ExtendedRatio{false, 2})) << r.achieved_ratio.str();
    EXPECT_FALSE(r.guard_tripped.has_value());
    // Reported numbers are exact re-scores.
    EXPECT_EQ(r.achieved_ratio, ratio_objective(r.best_dist, 1, 2, 1).ratio);
}

TEST(Search, Deterministic)
{
    SearchSpace s;
    s.n_atoms = 3;
    s.k = 3;
    s.c2 = 2;
    const auto a = search(s, {3000, 5, 9});
    const auto b = search(s, {3000, 5, 9});
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Search, ProvenBoundsAreNeverExceeded)
{
    for (const auto& [c2, cap] : std::vector<std::pair<Rational, Rational>>{{10, 3}, {7, 2}, {5, 4}})
        for (unsigned k : {2u, 3u}) {
            SearchSpace s;
            s.n_atoms = 3;
            s.k = k;
            s.c2 = c2;
            const auto r = search(s, {3000, 6, 5});
            EXPECT_FALSE(r.achieved_ratio > cap) << r.achieved_ratio.str();
            EXPECT_FALSE(r.guard_tripped.has_value());
        }
}

TEST(Search, SpaceValidation)
{
    SearchSpace s;
    s.n_atoms = 7;
    EXPECT_THROW(search(s, {}), std::invalid_argument);
    s = SearchSpace{};
    s.j = 3;
    EXPECT_THROW(search(s, {}), std::invalid_argument);
    s = SearchSpace{};
    EXPECT_THROW(search(s, {10, 0, 1}), std::invalid_argument);
}

TEST(Search, CampaignParsing)
{
    const auto doc = nlohmann::json::parse(R"({"space": {"n_atoms": 3, "value_box": ["-2", "5/2"], "c2": "3/2", "k": 3},
                                               "budget": {"evaluations": 500, "restarts": 2, "seed": 4}})");
    const auto [s, b] = parse_campaign(doc);
    EXPECT_EQ(s.n_atoms, 3);
    EXPECT_EQ(s.value_hi, ratio(5, 2));
    EXPECT_EQ(s.c2, ratio(3, 2));
    EXPECT_EQ(b.evaluations, 500u);
    EXPECT_THROW(parse_campaign(nlohmann::json::parse(R"({"space": {"c2": "x"}})")), ParseError);
    EXPECT_THROW(parse_campaign(nlohmann::json::parse(R"({"space": {"n_atoms": 9}})")), std::invalid_argument);
}

TEST(Probe, PmOneNeedsTwoAtUnitScale)
{
    const auto r = probe_necessity(ProbeFamily::pm_one, 1, 2, "theorem1", {1});
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].ratio.value, 2);
    const auto full = probe_necessity(ProbeFamily::pm_one, 1, 2);
    EXPECT_TRUE(full.monotone_in_c2);
}

TEST(Probe, RareBernoulliTrendBelowUnitScale)
{
    const auto r = probe_necessity(ProbeFamily::rare_bernoulli, 1, 2, "theorem1", {ratio(3, 4), 1, 2});
    EXPECT_TRUE(r.monotone_in_c2);
    // At c2 = 3/4 the needed c1 is 1/p and grows without bound as p -> 0.
    std::vector<ExtendedRatio> at_three_quarters;
    for (const auto& row : r.rows)
        if (row.c2 == ratio(3, 4)) at_three_quarters.push_back(row.ratio);
    ASSERT_EQ(at_three_quarters.size(), 4u);
    EXPECT_EQ(at_three_quarters[0].value, 10);
    EXPECT_EQ(at_three_quarters[3].value, 10000);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_TRUE(at_three_quarters[i - 1] < at_three_quarters[i]);
    for (const auto& row : r.rows) {
        if (row.c2 >= 1) {
            EXPECT_FALSE(row.ratio > 1);
        }
    }
}

TEST(Probe, ConstantFamilyBounds)
{
    const auto r = probe_necessity(ProbeFamily::constant, 4, 2, "corollary6");
    ASSERT_TRUE(r.c2_lower_bound.has_value());
    EXPECT_EQ(*r.c2_lower_bound, 1);
    EXPECT_TRUE(r.c2_bound_verified);
    const auto t = probe_necessity(ProbeFamily::constant, 3, 4, "theorem1");
    EXPECT_EQ(*t.c2_lower_bound, ratio(3, 4));
    EXPECT_TRUE(t.c2_bound_verified);
    EXPECT_THROW(probe_necessity(ProbeFamily::constant, 2, 4, "corollary6"), std::invalid_argument);
    EXPECT_THROW(parse_probe_family("gamma"), std::invalid_argument);
}
