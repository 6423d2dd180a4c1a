#pragma once

// Causal-condition checking and identification planning: given an influence
// diagram, a role assignment and an interaction query, decide whether the
// query is answerable from observational data and by which statistic.

#include <string>
#include <vector>

#include "mechint/diagram.hpp"

namespace mechint {

/// Maps the abstract roles onto diagram nodes.  `c` holds observed context
/// variables, `u` unobserved ones; `f` holds variables a direct-effect query
/// controls by intervention, with `sigma_f` naming the corresponding regime
/// nodes.  The context is W = c ∪ u and Z = W \ f.
struct RoleAssignment {
    std::string a;
    std::string b;
    std::string y;
    NodeSet c;
    NodeSet u;
    NodeSet f;
    std::string sigma_ab;
    NodeSet sigma_f;

    NodeSet context_w() const;        // c ∪ u
    NodeSet unmanipulated_z() const;  // (c ∪ u) \ f

    /// Throws std::invalid_argument on role violations: overlapping sets,
    /// nodes missing from the diagram, sigma_ab not a regime over exactly
    /// {a, b}, or sigma_f members not regimes over f.
    void validate(const InfluenceDiagram& d) const;

    friend bool operator==(const RoleAssignment&, const RoleAssignment&) = default;
};

/// User assertions about the study that no graph can verify.  They are
/// echoed in reports, never inferred.
///   - monotone_effects_asserted: each factor's effect on the outcome is
///     non-decreasing (known positive direction).
///   - effect_direction_known = false: the effects are monotone but of
///     unknown direction, which routes the plan to the excess-risk test.
struct AssumptionFlags {
    bool binary_ab = false;
    bool effect_direction_known = true;
    bool uniform_positivity_asserted = false;
    bool monotone_effects_asserted = false;

    friend bool operator==(const AssumptionFlags&, const AssumptionFlags&) = default;
};

enum class QueryKind { Total, ContextSpecific, DirectEffect };

/// Total:            interaction in the whole population (context empty).
/// ContextSpecific:  interaction within strata of `context` (subset of W).
/// DirectEffect:     interaction between direct effects with `controlled`
///                   held fixed by intervention; `controlled` ⊆ `context`.
struct InteractionQuery {
    QueryKind kind = QueryKind::Total;
    NodeSet context;
    NodeSet controlled;

    friend bool operator==(const InteractionQuery&, const InteractionQuery&) = default;
};

enum class Statistic { Superadditivity, ExcessRisk, None };

std::string to_string(QueryKind k);
std::string to_string(Statistic s);

struct ConditionResult {
    std::string id;  // "condition-3", "condition-4", "condition-5", "condition-7"
    NodeSet left;
    NodeSet right;
    NodeSet given;
    std::string statement;  // rendered with the "_||_" notation
    bool holds = false;
    bool required = true;

    friend bool operator==(const ConditionResult&, const ConditionResult&) = default;
};

struct IdentificationReport {
    bool identifiable = false;
    Statistic statistic = Statistic::None;
    std::vector<ConditionResult> conditions;
    std::vector<std::string> corollaries_used;
    std::string reduction;  // context-reduction note, empty when not applied
    std::vector<std::string> unverifiable_assumptions;
    std::string narrative;

    friend bool operator==(const IdentificationReport&, const IdentificationReport&) = default;
};

/// Renders "Y _||_ sAB | {A, B}"; multi-element sets are braced, an empty
/// conditioning set drops the bar.
std::string render_ci(const NodeSet& left, const NodeSet& right, const NodeSet& given);

/// Outcome unconfounded given context: Y _||_ sigma_ab | {a, b} ∪ W.
bool check_condition3(const InfluenceDiagram& d, const RoleAssignment& r);

/// Unobserved context stable across regimes: u _||_ {a, b, sigma_ab} | c.
/// Vacuously true when u is empty.
bool check_condition4(const InfluenceDiagram& d, const RoleAssignment& r);

/// Observational independence of the factors: a _||_ b | c ∪ {sigma_ab}.
bool check_condition5(const InfluenceDiagram& d, const RoleAssignment& r);

/// Outcome insensitive to how the controlled variables were generated:
/// y _||_ sigma_f | {a, b} ∪ f ∪ Z ∪ {sigma_ab}.  Throws when f or sigma_f
/// is empty.
bool check_condition7(const InfluenceDiagram& d, const RoleAssignment& r);

/// Copy of `r` with the unobserved context dropped (u = ∅); the derived
/// sets W and Z follow automatically.
RoleAssignment reduce_context(const RoleAssignment& r);

/// Full decision procedure.  Resolves the effective context for the query
/// kind, checks the graphical conditions, picks the admissible statistic
/// from the flags, and assembles the report.  Throws std::invalid_argument
/// for invalid role/query combinations.
IdentificationReport plan_identification(const InfluenceDiagram& d, const RoleAssignment& r,
                                         const InteractionQuery& q, const AssumptionFlags& flags);

}  // namespace mechint
