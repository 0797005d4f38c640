#pragma once

// Finite atomic distributions on Q^d with exact probabilities, and the
// operations the inequality checkers are built from: convolution, i.i.d. and
// weighted partial sums, norm tails, and running-maximum tails.
//
// Norm comparisons are carried out on "levels": the norm itself for abs1d and
// sup, the squared norm for euclidean. A threshold t maps to level t (or t^2),
// so every order comparison stays inside Q.

#include "iidtail/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iidtail {

enum class NormKind { abs1d, sup, euclidean };
enum class Mode { strict, weak };

inline std::string_view to_string(NormKind n)
{
    switch (n) {
    case NormKind::abs1d: return "abs1d";
    case NormKind::sup: return "sup";
    case NormKind::euclidean: return "euclidean";
    }
    return "?";
}

inline NormKind parse_norm(std::string_view s)
{
    if (s == "abs1d" || s == "abs") return NormKind::abs1d;
    if (s == "sup" || s == "max" || s == "linf") return NormKind::sup;
    if (s == "euclidean" || s == "l2") return NormKind::euclidean;
    throw ParseError("unknown norm '" + std::string(s) + "'");
}

inline std::string_view to_string(Mode m) { return m == Mode::strict ? "strict" : "weak"; }

inline Mode parse_mode(std::string_view s)
{
    if (s == "strict") return Mode::strict;
    if (s == "weak") return Mode::weak;
    throw ParseError("unknown mode '" + std::string(s) + "'");
}

class DistError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SupportCapExceeded : public DistError {
public:
    explicit SupportCapExceeded(std::size_t cap)
        : DistError("support-size cap of " + std::to_string(cap) + " atoms exceeded"), cap_(cap)
    {
    }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

/// Hard cap on the number of atoms of any intermediate support. Exceeding it
/// throws SupportCapExceeded; nothing is ever pruned.
struct Limits {
    std::size_t max_support = 2'000'000;
};

class Point {
public:
    Point() = default;
    explicit Point(std::vector<Rational> coords) : coords_(std::move(coords)) {}
    Point(std::initializer_list<Rational> coords) : coords_(coords) {}

    static Point zero(std::size_t dim) { return Point(std::vector<Rational>(dim)); }

    std::size_t dim() const noexcept { return coords_.size(); }
    const Rational& operator[](std::size_t i) const { return coords_[i]; }
    std::span<const Rational> coords() const noexcept { return coords_; }

    friend bool operator==(const Point& a, const Point& b) { return a.coords_ == b.coords_; }
    friend bool operator<(const Point& a, const Point& b)
    {
        return std::lexicographical_compare(a.coords_.begin(), a.coords_.end(), b.coords_.begin(),
                                            b.coords_.end());
    }

    friend Point operator+(const Point& a, const Point& b)
    {
        std::vector<Rational> out(a.coords_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coords_[i] + b.coords_[i];
        return Point(std::move(out));
    }
    friend Point operator-(const Point& a, const Point& b)
    {
        std::vector<Rational> out(a.coords_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coords_[i] - b.coords_[i];
        return Point(std::move(out));
    }
    Point scaled(const Rational& c) const
    {
        std::vector<Rational> out(coords_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * coords_[i];
        return Point(std::move(out));
    }

    std::string str() const
    {
        if (coords_.size() == 1) return to_string(coords_[0]);
        std::string s = "(";
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            if (i) s += ", ";
            s += to_string(coords_[i]);
        }
        return s + ")";
    }

private:
    std::vector<Rational> coords_;
};

struct Atom {
    Point x;
    Rational p;

    friend bool operator==(const Atom& a, const Atom& b) { return a.x == b.x && a.p == b.p; }
};

inline void require_norm_dim(NormKind norm, std::size_t dim)
{
    if (norm == NormKind::abs1d && dim != 1)
        throw std::invalid_argument("abs1d norm requires dimension 1, got " + std::to_string(dim));
}

/// ||x|| for abs1d/sup, ||x||^2 for euclidean.
inline Rational norm_level(const Point& x, NormKind norm)
{
    Rational out = 0;
    switch (norm) {
    case NormKind::abs1d:
    case NormKind::sup:
        for (const auto& c : x.coords()) out = max_of(out, abs_value(c));
        break;
    case NormKind::euclidean:
        for (const auto& c : x.coords()) out += c * c;
        break;
    }
    return out;
}

/// Level corresponding to a threshold t >= 0.
inline Rational threshold_level(const Rational& t, NormKind norm)
{
    return norm == NormKind::euclidean ? Rational(t * t) : t;
}

/// Factor by which levels scale when thresholds scale by c > 0.
inline Rational level_scale(const Rational& c, NormKind norm) { return threshold_level(c, norm); }

namespace detail {

// Merges atoms at coinciding points by exact addition, enforcing the cap.
class AtomAccumulator {
public:
    explicit AtomAccumulator(const Limits& limits) : cap_(limits.max_support) {}

    void add(Point x, const Rational& p)
    {
        auto [it, inserted] = atoms_.try_emplace(std::move(x), p);
        if (!inserted) {
            it->second += p;
        } else if (atoms_.size() > cap_) {
            throw SupportCapExceeded(cap_);
        }
    }

    std::vector<Atom> take()
    {
        std::vector<Atom> out;
        out.reserve(atoms_.size());
        for (auto& [x, p] : atoms_)
            if (p != 0) out.push_back(Atom{x, p});
        atoms_.clear();
        return out;
    }

private:
    std::size_t cap_;
    std::map<Point, Rational> atoms_;
};

} // namespace detail

class DiscreteDist {
public:
    /// Validates dimensions, positivity, distinctness, and total mass exactly 1.
    static DiscreteDist from_atoms(std::size_t dim, std::vector<Atom> atoms)
    {
        if (dim == 0) throw DistError("dimension must be positive");
        if (atoms.empty()) throw DistError("distribution has no atoms");
        Rational total = 0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (atoms[i].x.dim() != dim)
                throw DistError("atom " + std::to_string(i) + " has dimension " +
                                std::to_string(atoms[i].x.dim()) + ", expected " + std::to_string(dim));
            if (atoms[i].p <= 0)
                throw DistError("atom " + std::to_string(i) + " has nonpositive probability " +
                                to_string(atoms[i].p));
            total += atoms[i].p;
        }
        std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
        for (std::size_t i = 1; i < atoms.size(); ++i)
            if (atoms[i - 1].x == atoms[i].x) throw DistError("duplicate point " + atoms[i].x.str());
        if (total != 1) throw DistError("probabilities sum to " + to_string(total) + ", not 1");
        return DiscreteDist(dim, std::move(atoms));
    }

    /// One-dimensional convenience: (location, probability) pairs.
    static DiscreteDist from_scalars(std::vector<std::pair<Rational, Rational>> atoms)
    {
        std::vector<Atom> out;
        out.reserve(atoms.size());
        for (auto& [x, p] : atoms) out.push_back(Atom{Point{x}, p});
        return from_atoms(1, std::move(out));
    }

    static DiscreteDist point_mass(Point x)
    {
        const std::size_t d = x.dim();
        return from_atoms(d, {Atom{std::move(x), Rational(1)}});
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    std::span<const Atom> atoms() const noexcept { return atoms_; }

    Rational probability_of(const Point& x) const
    {
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                                   [](const Atom& a, const Point& v) { return a.x < v; });
        return (it != atoms_.end() && it->x == x) ? it->p : Rational(0);
    }

    friend bool operator==(const DiscreteDist& a, const DiscreteDist& b)
    {
        return a.dim_ == b.dim_ && a.atoms_ == b.atoms_;
    }

    std::string str() const
    {
        std::string s = "{";
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (i) s += ", ";
            s += atoms_[i].x.str() + ": " + to_string(atoms_[i].p);
        }
        return s + "}";
    }

private:
    DiscreteDist(std::size_t dim, std::vector<Atom> atoms) : dim_(dim), atoms_(std::move(atoms)) {}

    // Mass-preserving operations build results through the accumulator, whose
    // output is already sorted, merged, and strictly positive.
    friend DiscreteDist convolve(const DiscreteDist&, const DiscreteDist&, const Limits&);
    friend DiscreteDist affine(const DiscreteDist&, const Rational&, const Point&);

    std::size_t dim_ = 1;
    std::vector<Atom> atoms_;
};

/// Law of U + V for independent U ~ a, V ~ b.
inline DiscreteDist convolve(const DiscreteDist& a, const DiscreteDist& b, const Limits& limits = {})
{
    if (a.dim() != b.dim())
        throw DistError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    detail::AtomAccumulator acc(limits);
    for (const auto& u : a.atoms())
        for (const auto& v : b.atoms()) acc.add(u.x + v.x, u.p * v.p);
    return DiscreteDist(a.dim(), acc.take());
}

/// Law of scale * U + shift.
inline DiscreteDist affine(const DiscreteDist& a, const Rational& scale, const Point& shift)
{
    if (shift.dim() != a.dim()) throw DistError("shift dimension does not match distribution");
    detail::AtomAccumulator acc(Limits{});
    for (const auto& u : a.atoms()) acc.add(u.x.scaled(scale) + shift, u.p);
    return DiscreteDist(a.dim(), acc.take());
}

/// Law of S_k = X_1 + ... + X_k, by binary powering.
inline DiscreteDist iid_sum(const DiscreteDist& x, unsigned k, const Limits& limits = {})
{
    if (k == 0) throw std::invalid_argument("iid_sum requires k >= 1");
    std::optional<DiscreteDist> result;
    DiscreteDist base = x;
    while (true) {
        if (k & 1u) result = result ? convolve(*result, base, limits) : base;
        k >>= 1u;
        if (k == 0) break;
        base = convolve(base, base, limits);
    }
    return *result;
}

/// Laws of S_1, ..., S_k by sequential convolution.
inline std::vector<DiscreteDist> partial_sums(const DiscreteDist& x, unsigned k, const Limits& limits = {})
{
    std::vector<DiscreteDist> out;
    out.reserve(k);
    for (unsigned i = 0; i < k; ++i) out.push_back(i == 0 ? x : convolve(out.back(), x, limits));
    return out;
}

/// Law of sum_i alphas[i] * X_i for i.i.d. X_i ~ x.
inline DiscreteDist weighted_iid_sum(const DiscreteDist& x, std::span<const Rational> alphas,
                                     const Limits& limits = {})
{
    if (alphas.empty()) throw std::invalid_argument("weighted_iid_sum requires at least one weight");
    const Point origin = Point::zero(x.dim());
    DiscreteDist out = affine(x, alphas[0], origin);
    for (std::size_t i = 1; i < alphas.size(); ++i) out = convolve(out, affine(x, alphas[i], origin), limits);
    return out;
}

/// Exact Pr(||U|| > t) (strict) or Pr(||U|| >= t) (weak).
inline Rational tail(const DiscreteDist& a, NormKind norm, const Rational& t, Mode mode)
{
    if (t < 0) throw std::invalid_argument("tail threshold must be nonnegative");
    require_norm_dim(norm, a.dim());
    const Rational level = threshold_level(t, norm);
    Rational out = 0;
    for (const auto& atom : a.atoms()) {
        const Rational l = norm_level(atom.x, norm);
        if (mode == Mode::strict ? l > level : l >= level) out += atom.p;
    }
    return out;
}

/// Survival function t -> Pr(||U|| > t) as a right-continuous step function.
/// Criticals are the distinct norm levels of the support (squared radii in
/// euclidean mode); values[i] is the survival probability on
/// [criticals[i], criticals[i+1]), and the survival is 1 below criticals[0].
class TailCurve {
public:
    TailCurve(NormKind norm, std::vector<Rational> criticals, std::vector<Rational> masses)
        : norm_(norm), criticals_(std::move(criticals)), suffix_(criticals_.size() + 1)
    {
        suffix_.back() = 0;
        for (std::size_t i = criticals_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + masses[i];
        values_.assign(suffix_.begin() + 1, suffix_.end());
    }

    NormKind norm() const noexcept { return norm_; }
    bool squared() const noexcept { return norm_ == NormKind::euclidean; }
    std::span<const Rational> criticals() const noexcept { return criticals_; }
    std::span<const Rational> values() const noexcept { return values_; }

    Rational strict_at_level(const Rational& level) const
    {
        const auto idx = std::upper_bound(criticals_.begin(), criticals_.end(), level) - criticals_.begin();
        return suffix_[static_cast<std::size_t>(idx)];
    }
    Rational weak_at_level(const Rational& level) const
    {
        const auto idx = std::lower_bound(criticals_.begin(), criticals_.end(), level) - criticals_.begin();
        return suffix_[static_cast<std::size_t>(idx)];
    }
    Rational at_level(const Rational& level, Mode mode) const
    {
        return mode == Mode::strict ? strict_at_level(level) : weak_at_level(level);
    }
    Rational at(const Rational& t, Mode mode) const { return at_level(threshold_level(t, norm_), mode); }

private:
    NormKind norm_;
    std::vector<Rational> criticals_;
    std::vector<Rational> suffix_;
    std::vector<Rational> values_;
};

inline TailCurve tail_curve(const DiscreteDist& a, NormKind norm)
{
    require_norm_dim(norm, a.dim());
    std::map<Rational, Rational> by_level;
    for (const auto& atom : a.atoms()) by_level[norm_level(atom.x, norm)] += atom.p;
    std::vector<Rational> crit, mass;
    crit.reserve(by_level.size());
    mass.reserve(by_level.size());
    for (auto& [l, p] : by_level) {
        crit.push_back(l);
        mass.push_back(p);
    }
    return TailCurve(norm, std::move(crit), std::move(mass));
}

/// First-exceedance masses: exceedance[j-1] = Pr(A_j), where A_j is the event
/// that ||S_i|| stays within t for all i < j and leaves it at step j.
/// "Within" means <= t in strict mode and < t in weak mode.
struct FirstExceedance {
    std::vector<Rational> exceedance;
    Rational retained;

    Rational total() const
    {
        Rational s = 0;
        for (const auto& p : exceedance) s += p;
        return s;
    }
};

/// Absorbing dynamic program over the sub-probability law of S_j restricted
/// to paths that have not yet exceeded the threshold. The threshold is given
/// as a level (squared in euclidean mode).
inline FirstExceedance first_exceedance_at_level(const DiscreteDist& x, unsigned k, NormKind norm,
                                                 const Rational& level, Mode mode, const Limits& limits = {})
{
    if (k == 0) throw std::invalid_argument("path_max_tail requires k >= 1");
    if (level < 0) throw std::invalid_argument("threshold must be nonnegative");
    require_norm_dim(norm, x.dim());

    FirstExceedance out;
    out.exceedance.reserve(k);
    std::vector<Atom> alive{Atom{Point::zero(x.dim()), Rational(1)}};
    for (unsigned step = 0; step < k; ++step) {
        detail::AtomAccumulator acc(limits);
        for (const auto& u : alive)
            for (const auto& v : x.atoms()) acc.add(u.x + v.x, u.p * v.p);
        std::vector<Atom> next;
        Rational absorbed = 0;
        for (auto& atom : acc.take()) {
            const Rational l = norm_level(atom.x, norm);
            if (mode == Mode::strict ? l > level : l >= level)
                absorbed += atom.p;
            else
                next.push_back(std::move(atom));
        }
        out.exceedance.push_back(absorbed);
        alive = std::move(next);
    }
    out.retained = 0;
    for (const auto& a : alive) out.retained += a.p;
    return out;
}

inline FirstExceedance first_exceedance(const DiscreteDist& x, unsigned k, NormKind norm, const Rational& t,
                                        Mode mode, const Limits& limits = {})
{
    if (t < 0) throw std::invalid_argument("threshold must be nonnegative");
    return first_exceedance_at_level(x, k, norm, threshold_level(t, norm), mode, limits);
}

/// Exact Pr(sup_{1<=j<=k} ||S_j|| > t) (strict) or >= t (weak).
inline Rational path_max_tail(const DiscreteDist& x, unsigned k, NormKind norm, const Rational& t, Mode mode,
                              const Limits& limits = {})
{
    return first_exceedance(x, k, norm, t, mode, limits).total();
}

} // namespace iidtail
