#pragma once

// Brute-force reference computations for tests. Every function here
// enumerates all |support|^k outcome tuples directly and shares no code path
// with the convolution / dynamic-programming engine beyond the value types.

#include "iidtail/dist.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace iidtail::oracle {

// Calls f(indices) for every tuple in [0, n)^k.
template <typename F>
void for_each_tuple(std::size_t n, unsigned k, F&& f)
{
    std::vector<std::size_t> idx(k, 0);
    while (true) {
        f(idx);
        unsigned pos = 0;
        while (pos < k && ++idx[pos] == n) idx[pos++] = 0;
        if (pos == k) return;
    }
}

inline std::map<Point, Rational> weighted_sum_law(const DiscreteDist& x, const std::vector<Rational>& alphas)
{
    std::map<Point, Rational> law;
    const auto atoms = x.atoms();
    for_each_tuple(atoms.size(), static_cast<unsigned>(alphas.size()), [&](const std::vector<std::size_t>& idx) {
        Point s = Point::zero(x.dim());
        Rational p = 1;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            s = s + atoms[idx[i]].x.scaled(alphas[i]);
            p *= atoms[idx[i]].p;
        }
        law[s] += p;
    });
    return law;
}

inline std::map<Point, Rational> iid_sum_law(const DiscreteDist& x, unsigned k)
{
    return weighted_sum_law(x, std::vector<Rational>(k, Rational(1)));
}

inline std::map<Point, Rational> as_map(const DiscreteDist& d)
{
    std::map<Point, Rational> m;
    for (const auto& a : d.atoms()) m[a.x] = a.p;
    return m;
}

inline bool exceeds(const Point& s, NormKind norm, const Rational& t, Mode mode)
{
    // Direct norm evaluation without level helpers.
    Rational v = 0;
    if (norm == NormKind::euclidean) {
        for (const auto& c : s.coords()) v += c * c;
        const Rational t2 = t * t;
        return mode == Mode::strict ? v > t2 : v >= t2;
    }
    for (const auto& c : s.coords()) {
        const Rational a = c < 0 ? Rational(-c) : c;
        if (a > v) v = a;
    }
    return mode == Mode::strict ? v > t : v >= t;
}

/// Pr(A_j) for j = 1..k by walking every path.
inline std::vector<Rational> enumerate_first_exceedance(const DiscreteDist& x, unsigned k, NormKind norm, const Rational& t,
                                              Mode mode)
{
    std::vector<Rational> out(k, Rational(0));
    const auto atoms = x.atoms();
    for_each_tuple(atoms.size(), k, [&](const std::vector<std::size_t>& idx) {
        Point s = Point::zero(x.dim());
        Rational p = 1;
        for (const auto i : idx) p *= atoms[i].p;
        for (unsigned j = 0; j < k; ++j) {
            s = s + atoms[idx[j]].x;
            if (exceeds(s, norm, t, mode)) {
                out[j] += p;
                break;
            }
        }
    });
    return out;
}

inline Rational enumerate_path_max_tail(const DiscreteDist& x, unsigned k, NormKind norm, const Rational& t, Mode mode)
{
    Rational s = 0;
    for (const auto& p : enumerate_first_exceedance(x, k, norm, t, mode)) s += p;
    return s;
}

/// Random 1-dimensional distribution on the lattice {n/den : lo <= n <= hi}
/// with integer weights in [1, max_weight].
inline DiscreteDist random_dist_1d(std::mt19937_64& rng, int max_atoms, int lo, int hi, int den, int max_weight = 9)
{
    std::uniform_int_distribution<int> n_atoms(1, max_atoms);
    std::uniform_int_distribution<int> loc(lo, hi);
    std::uniform_int_distribution<int> weight(1, max_weight);
    const int n = n_atoms(rng);
    std::map<int, int> picked;
    while (static_cast<int>(picked.size()) < n) picked.emplace(loc(rng), weight(rng));
    int total = 0;
    for (const auto& [_, w] : picked) total += w;
    std::vector<std::pair<Rational, Rational>> atoms;
    for (const auto& [v, w] : picked) atoms.emplace_back(ratio(v, den), ratio(w, total));
    return DiscreteDist::from_scalars(std::move(atoms));
}

inline DiscreteDist coin() { return DiscreteDist::from_scalars({{-1, ratio(1, 2)}, {1, ratio(1, 2)}}); }

inline DiscreteDist delta(const Rational& c) { return DiscreteDist::point_mass(Point{c}); }

} // namespace iidtail::oracle
