#pragma once

// One checked inequality instance and its JSON rendering.

#include "iidtail/dist.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace iidtail {

enum class ClaimId {
    theorem1,
    levy_ottaviani,
    corollary4,
    corollary5,
    corollary6,
    latala_sharp,
    latala_alt,
    lemma2,
    corollary3,
    corollary3_refined,
};

inline std::string_view to_string(ClaimId c)
{
    switch (c) {
    case ClaimId::theorem1: return "theorem1";
    case ClaimId::levy_ottaviani: return "levy_ottaviani";
    case ClaimId::corollary4: return "corollary4";
    case ClaimId::corollary5: return "corollary5";
    case ClaimId::corollary6: return "corollary6";
    case ClaimId::latala_sharp: return "latala_sharp";
    case ClaimId::latala_alt: return "latala_alt";
    case ClaimId::lemma2: return "lemma2";
    case ClaimId::corollary3: return "corollary3";
    case ClaimId::corollary3_refined: return "corollary3_refined";
    }
    return "?";
}

enum class Status { holds, violated, vacuous };

inline std::string_view to_string(Status s)
{
    switch (s) {
    case Status::holds: return "holds";
    case Status::violated: return "violated";
    case Status::vacuous: return "vacuous";
    }
    return "?";
}

struct Witness {
    Rational t;
    Rational lhs;
    Rational rhs;
};

/// Outcome of checking lhs(t) <= rhs(t) over every threshold t > 0.
///
/// worst_t is the threshold with the smallest margin rhs - lhs (first such t
/// in increasing order). In euclidean mode thresholds are reported squared
/// (t_squared = true) so that they stay rational.
struct InequalityReport {
    ClaimId claim = ClaimId::theorem1;
    std::string variant;
    unsigned j = 0;
    unsigned k = 0;
    Rational c1 = 0;
    Rational c2 = 0;
    NormKind norm = NormKind::abs1d;
    Mode lhs_mode = Mode::strict;
    Mode rhs_mode = Mode::strict;

    Rational worst_t = 0;
    bool t_squared = false;
    Rational lhs = 0;
    Rational rhs = 0;
    Rational margin = 0;
    Status status = Status::vacuous;
    std::optional<Witness> witness;
    std::size_t points_checked = 0;
    std::string note;

    bool ok() const noexcept { return status != Status::violated; }
};

inline nlohmann::json to_json(const InequalityReport& r)
{
    nlohmann::json j = {
        {"claim", to_string(r.claim)},
        {"j", r.j},
        {"k", r.k},
        {"c1", to_string(r.c1)},
        {"c2", to_string(r.c2)},
        {"norm", to_string(r.norm)},
        {"lhs_mode", to_string(r.lhs_mode)},
        {"rhs_mode", to_string(r.rhs_mode)},
        {"worst_t", to_string(r.worst_t)},
        {"t_squared", r.t_squared},
        {"lhs", to_string(r.lhs)},
        {"rhs", to_string(r.rhs)},
        {"margin", to_string(r.margin)},
        {"status", to_string(r.status)},
        {"points_checked", r.points_checked},
    };
    if (!r.variant.empty()) j["variant"] = r.variant;
    if (!r.note.empty()) j["note"] = r.note;
    if (r.witness)
        j["witness"] = {{"t", to_string(r.witness->t)},
                        {"lhs", to_string(r.witness->lhs)},
                        {"rhs", to_string(r.witness->rhs)}};
    return j;
}

} // namespace iidtail
