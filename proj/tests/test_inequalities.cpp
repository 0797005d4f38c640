#include "iidtail/inequalities.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace iidtail;
using oracle::coin;
using oracle::delta;

namespace {

DiscreteDist d1(std::vector<std::pair<Rational, Rational>> atoms) { return DiscreteDist::from_scalars(std::move(atoms)); }

const NormKind abs1 = NormKind::abs1d;

// Tail of an explicit law straight from its atoms.
Rational brute_tail(const std::map<Point, Rational>& law, NormKind norm, const Rational& t, Mode mode)
{
    Rational s = 0;
    for (const auto& [x, p] : law)
        if (oracle::exceeds(x, norm, t, mode)) s += p;
    return s;
}

} // namespace

TEST(Theorem1, CoinExample)
{
    const auto r = check_theorem1(coin(), 1, 2, defaults::theorem1(), abs1);
    EXPECT_EQ(r.status, Status::holds);
    EXPECT_EQ(r.lhs, 1);
    EXPECT_EQ(r.rhs, ratio(3, 2));
    EXPECT_EQ(r.margin, ratio(1, 2));
    EXPECT_GT(r.worst_t, 0);
    EXPECT_LT(r.worst_t, 1);
    EXPECT_FALSE(r.witness.has_value());
}

TEST(Theorem1, PointMassAtZeroIsVacuous)
{
    const auto r = check_theorem1(delta(0), 2, 5, defaults::theorem1(), abs1);
    EXPECT_EQ(r.status, Status::vacuous);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(check_theorem1(delta(0), 1, 1, {ratio(1, 100), ratio(1, 100)}, abs1).status, Status::vacuous);
}

TEST(Theorem1, RareBernoulliExample)
{
    const auto x = d1({{0, ratio(99, 100)}, {1, ratio(1, 100)}});
    const auto r = check_theorem1(x, 1, 2, defaults::theorem1(), abs1);
    EXPECT_EQ(r.status, Status::holds);
    EXPECT_EQ(r.lhs, ratio(1, 100));
    EXPECT_EQ(r.rhs, ratio(597, 10000));
    EXPECT_LT(r.worst_t, 1);
}

TEST(Theorem1, ParameterChecks)
{
    EXPECT_THROW(check_theorem1(coin(), 3, 2, defaults::theorem1(), abs1), std::invalid_argument);
    EXPECT_THROW(check_theorem1(coin(), 0, 2, defaults::theorem1(), abs1), std::invalid_argument);
    EXPECT_THROW(check_theorem1(coin(), 1, 2, {0, 1}, abs1), std::invalid_argument);
    const auto plane = DiscreteDist::point_mass(Point{Rational(1), Rational(1)});
    EXPECT_THROW(check_theorem1(plane, 1, 2, defaults::theorem1(), abs1), std::invalid_argument);
}

TEST(Theorem1, SensitivityWithUnitConstants)
{
    const auto r = check_theorem1(coin(), 1, 2, {1, 1}, abs1);
    ASSERT_EQ(r.status, Status::violated);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_EQ(r.witness->lhs, 1);
    EXPECT_EQ(r.witness->rhs, ratio(1, 2));
    EXPECT_LT(r.witness->t, 1);
    EXPECT_EQ(r.margin, ratio(-1, 2));
}

TEST(Theorem1, WeakModeAndMixedModes)
{
    // Weak mode at t = 1 counts |S_1| = 1.
    const auto w = check_theorem1(coin(), 1, 2, {1, 1}, abs1, Modes::both(Mode::weak));
    EXPECT_EQ(w.status, Status::violated);
    EXPECT_EQ(w.lhs_mode, Mode::weak);
    const auto m = check_theorem1(coin(), 1, 2, defaults::theorem1(), abs1, Modes{Mode::strict, Mode::weak});
    EXPECT_EQ(m.status, Status::holds);
    EXPECT_EQ(m.rhs_mode, Mode::weak);
}

TEST(Theorem1, EuclideanThresholdsAreSquared)
{
    const auto x = DiscreteDist::from_atoms(2, {Atom{Point{Rational(1), Rational(0)}, ratio(1, 2)},
                                                Atom{Point{Rational(0), Rational(1)}, ratio(1, 2)}});
    const auto r = check_theorem1(x, 1, 2, defaults::theorem1(), NormKind::euclidean);
    EXPECT_TRUE(r.t_squared);
    EXPECT_EQ(r.status, Status::holds);
    // |X_1| = 1 always; the rhs stays at 3 until t/10 reaches sqrt 2.
    EXPECT_EQ(r.lhs, 1);
    EXPECT_EQ(r.rhs, 3);
    const auto bad = check_theorem1(x, 1, 2, {1, ratio(1, 2)}, NormKind::euclidean);
    ASSERT_EQ(bad.status, Status::violated);
    // |S_2|^2 is 4 or 2 with equal odds, so Pr(||S_2|| > 2t) = 1/2 for t^2 in [1/2, 1).
    EXPECT_EQ(bad.worst_t, ratio(1, 2));
    EXPECT_EQ(bad.margin, ratio(-1, 2));
}

TEST(LatalaSharp, CoinIsTight)
{
    const auto r = check_latala_sharp(PartialSumTable(coin(), 2, abs1));
    EXPECT_EQ(r.claim, ClaimId::latala_sharp);
    EXPECT_EQ(r.status, Status::holds);
    EXPECT_EQ(r.margin, 0);
    EXPECT_EQ(r.worst_t, ratio(1, 2));
    EXPECT_EQ(r.lhs, 1);
    EXPECT_EQ(r.rhs, 1);
    EXPECT_FALSE(r.note.empty());
}

TEST(LatalaSharp, OtherExamples)
{
    EXPECT_EQ(check_latala_sharp(delta(0), abs1).status, Status::vacuous);
    const auto r = check_latala_sharp(d1({{0, ratio(99, 100)}, {1, ratio(1, 100)}}), abs1);
    EXPECT_EQ(r.status, Status::holds);
    EXPECT_EQ(r.lhs, ratio(1, 100));
    EXPECT_EQ(r.rhs, ratio(398, 10000));
}

TEST(LevyOttaviani, Examples)
{
    const auto walk = check_levy_ottaviani(delta(1), 3, abs1);
    EXPECT_EQ(walk.status, Status::holds);
    EXPECT_EQ(walk.lhs, 1);
    EXPECT_EQ(walk.rhs, 3);
    const auto c = check_levy_ottaviani(coin(), 2, abs1);
    EXPECT_EQ(c.status, Status::holds);
    EXPECT_EQ(c.lhs, 1);
    EXPECT_EQ(c.rhs, 3);
    EXPECT_EQ(check_levy_ottaviani(delta(0), 4, abs1).status, Status::vacuous);
}

TEST(Corollary4, Examples)
{
    const auto r = check_corollary4(coin(), 2, defaults::corollary4(), abs1);
    EXPECT_EQ(r.status, Status::holds);
    EXPECT_EQ(r.lhs, 1);
    EXPECT_EQ(r.rhs, ratio(9, 2));
    EXPECT_LT(r.worst_t, 1);
    EXPECT_EQ(check_corollary4(delta(0), 3, defaults::corollary4(), abs1).status, Status::vacuous);
    // With (1, 1) the running maximum of the coin walk beats the endpoint.
    EXPECT_EQ(check_corollary4(coin(), 2, {1, 1}, abs1).status, Status::violated);
}

TEST(Corollary5, Examples)
{
    const std::vector<Rational> ones{1, 1, 1};
    const auto same = check_corollary5(coin(), ones, {1, 1}, abs1);
    EXPECT_EQ(same.status, Status::holds);
    EXPECT_EQ(same.margin, 0);

    const std::vector<Rational> half{1, ratio(1, 2)};
    EXPECT_EQ(check_corollary5(coin(), half, defaults::corollary5(), abs1).status, Status::holds);

    const std::vector<Rational> cancel{1, -1};
    const auto c = check_corollary5(delta(1), cancel, defaults::corollary5(), abs1);
    EXPECT_EQ(c.status, Status::vacuous);
    EXPECT_TRUE(c.ok());

    const std::vector<Rational> bad{1, ratio(3, 2)};
    EXPECT_THROW(check_corollary5(coin(), bad, defaults::corollary5(), abs1), std::invalid_argument);
}

TEST(Corollary6, Examples)
{
    PartialSumTable sums(delta(1), 4, abs1);
    const auto r = check_corollary6(sums, 4, 2, defaults::corollary6());
    EXPECT_EQ(r.status, Status::holds);
    const auto& s4 = sums.table(4, Mode::strict);
    const auto& s2 = sums.table(2, Mode::strict);
    const Rational t = ratio(39, 10);
    EXPECT_EQ(s4.at(t), 1);
    EXPECT_EQ(12 * s2.at(t * 2 / (20 * 4)), 12);

    EXPECT_EQ(check_corollary6(d1({{0, ratio(9, 10)}, {1, ratio(1, 10)}}), 3, 1, defaults::corollary6(), abs1).status,
              Status::holds);
    EXPECT_EQ(check_corollary6(coin(), 2, 2, defaults::corollary6(), abs1).status, Status::holds);
    EXPECT_THROW(check_corollary6(coin(), 1, 2, defaults::corollary6(), abs1), std::invalid_argument);
}

TEST(PathMaxTable, MatchesPathEnumeration)
{
    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 40; ++rep) {
        const auto x = oracle::random_dist_1d(rng, 3, -4, 4, 2);
        const unsigned k = 1 + static_cast<unsigned>(rng() % 4);
        PartialSumTable sums(x, k, abs1);
        for (const Mode mode : {Mode::strict, Mode::weak})
            for (int tn = 0; tn <= 40; ++tn) {
                const Rational t = ratio(tn, 4);
                for (unsigned i = 1; i <= k; ++i)
                    ASSERT_EQ(sums.path_max_table(i, mode).at(t), oracle::enumerate_path_max_tail(x, i, abs1, t, mode))
                        << x.str() << " i=" << i << " t=" << t;
            }
    }
}

// The finite reduction is exhaustive: dense samples of t never find a
// smaller margin than the reported one, and never flip the verdict.
TEST(CriticalReduction, DenseSamplingNeverChangesVerdict)
{
    std::mt19937_64 rng(71);
    int violated = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const auto x = oracle::random_dist_1d(rng, 4, -6, 6, 2);
        const unsigned k = 1 + static_cast<unsigned>(rng() % 4);
        const unsigned j = 1 + static_cast<unsigned>(rng() % k);
        const Constants c = rep % 2 ? defaults::theorem1()
                                    : Constants{ratio(1 + static_cast<int>(rng() % 4), 2),
                                                ratio(1 + static_cast<int>(rng() % 4), 2)};
        const Mode mode = rep % 3 ? Mode::strict : Mode::weak;
        const auto r = check_theorem1(x, j, k, c, abs1, Modes::both(mode));
        violated += r.status == Status::violated;

        const auto sj = oracle::iid_sum_law(x, j);
        const auto sk = oracle::iid_sum_law(x, k);
        const Rational top = 6 * Rational(k) * c.c2 + 2;
        for (int s = 0; s < 1000; ++s) {
            const Rational t = top * ratio(1 + static_cast<int>(rng() % 100000), 100000);
            const Rational lhs = brute_tail(sj, abs1, t, mode);
            const Rational rhs = c.c1 * brute_tail(sk, abs1, t / c.c2, mode);
            if (lhs == 0) continue;
            ASSERT_NE(r.status, Status::vacuous);
            ASSERT_GE(rhs - lhs, r.margin) << x.str() << " j=" << j << " k=" << k << " t=" << t;
        }
        if (r.status == Status::vacuous) continue;
        // The reported worst point reproduces from first principles.
        const Rational lhs = brute_tail(sj, abs1, r.worst_t, mode);
        const Rational rhs = c.c1 * brute_tail(sk, abs1, r.worst_t / c.c2, mode);
        EXPECT_EQ(rhs - lhs, r.margin);
    }
    EXPECT_GT(violated, 0);
}

TEST(CriticalReduction, WeightedSumOracle)
{
    std::mt19937_64 rng(73);
    for (int rep = 0; rep < 60; ++rep) {
        const auto x = oracle::random_dist_1d(rng, 3, -4, 4, 2);
        const unsigned k = 1 + static_cast<unsigned>(rng() % 3);
        std::vector<Rational> alphas;
        for (unsigned i = 0; i < k; ++i) alphas.push_back(ratio(static_cast<int>(rng() % 9) - 4, 4));
        const auto r = check_corollary5(x, alphas, {1, 1}, abs1);
        const auto lhs_law = oracle::weighted_sum_law(x, alphas);
        const auto rhs_law = oracle::iid_sum_law(x, k);
        for (int s = 0; s < 200; ++s) {
            const Rational t = ratio(1 + static_cast<int>(rng() % 4000), 200);
            const Rational lhs = brute_tail(lhs_law, abs1, t, Mode::strict);
            if (lhs > 0) {
                ASSERT_GE(brute_tail(rhs_law, abs1, t, Mode::strict) - lhs, r.margin);
            }
        }
    }
}

TEST(ProvenClaims, NeverViolatedOnRandomInstances)
{
    std::mt19937_64 rng(81);
    for (int rep = 0; rep < 60; ++rep) {
        const auto x = oracle::random_dist_1d(rng, 4, -6, 6, 2);
        const unsigned kmax = 1 + static_cast<unsigned>(rng() % 5);
        for (const Mode mode : {Mode::strict, Mode::weak}) {
            PartialSumTable sums(x, kmax, abs1);
            const auto m = Modes::both(mode);
            for (unsigned k = 1; k <= kmax; ++k) {
                EXPECT_TRUE(check_levy_ottaviani(sums, k, m).ok()) << x.str();
                EXPECT_TRUE(check_corollary4(sums, k, defaults::corollary4(), m).ok()) << x.str();
                for (const auto& c : defaults::latala_corollary4())
                    EXPECT_TRUE(check_corollary4(sums, k, c, m, ClaimId::latala_alt).ok()) << x.str();
                for (unsigned j = 1; j <= k; ++j) {
                    EXPECT_TRUE(check_theorem1(sums, j, k, defaults::theorem1(), m).ok());
                    EXPECT_TRUE(check_corollary6(sums, k, j, defaults::corollary6(), m).ok());
                    for (const auto& c : defaults::latala_theorem1())
                        EXPECT_TRUE(check_theorem1(sums, j, k, c, m, ClaimId::latala_alt).ok());
                }
            }
            if (kmax >= 2) {
                EXPECT_TRUE(check_latala_sharp(sums, m).ok());
            }
        }
    }
}

TEST(CaseSplit, ConsistentWithComparison)
{
    std::mt19937_64 rng(91);
    std::size_t audited = 0;
    for (int rep = 0; rep < 80; ++rep) {
        const auto x = oracle::random_dist_1d(rng, 3, -6, 6, 2, 30);
        const unsigned k = 1 + static_cast<unsigned>(rng() % 4);
        PartialSumTable sums(x, k, abs1);
        for (unsigned j = 1; j <= k; ++j) audited += cross_check_cases(sums, j, k);
    }
    EXPECT_GT(audited, 500u);
}

TEST(StepTable, EvaluatesGapsAndCriticals)
{
    const auto t = StepTable::tabulate({Rational(1), Rational(3)}, [](const Rational& u) { return u < 1 ? Rational(2) : (u <= 3 ? Rational(1) : Rational(0)); });
    EXPECT_EQ(t.at(ratio(1, 2)), 2);
    EXPECT_EQ(t.at(1), 1);
    EXPECT_EQ(t.at(2), 1);
    EXPECT_EQ(t.at(3), 1);
    EXPECT_EQ(t.at(7), 0);
}
