#include "mechint/identify.hpp"

#include <algorithm>
#include <sstream>

namespace mechint {

namespace {

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
    NodeSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
    return out;
}

NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(out, out.end()));
    return out;
}

bool is_subset(const NodeSet& inner, const NodeSet& outer) {
    return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

std::string render_set(const NodeSet& s) {
    if (s.empty()) return "{}";
    if (s.size() == 1) return *s.begin();
    std::string out = "{";
    bool first = true;
    for (const auto& n : s) {
        if (!first) out += ", ";
        out += n;
        first = false;
    }
    return out + "}";
}

}  // namespace

std::string to_string(QueryKind k) {
    switch (k) {
        case QueryKind::Total: return "total";
        case QueryKind::ContextSpecific: return "context-specific";
        case QueryKind::DirectEffect: return "direct-effect";
    }
    return "?";
}

std::string to_string(Statistic s) {
    switch (s) {
        case Statistic::Superadditivity: return "superadditivity";
        case Statistic::ExcessRisk: return "excess-risk";
        case Statistic::None: return "none";
    }
    return "?";
}

std::string render_ci(const NodeSet& left, const NodeSet& right, const NodeSet& given) {
    std::string out = render_set(left) + " _||_ " + render_set(right);
    if (!given.empty()) out += " | " + render_set(given);
    return out;
}

NodeSet RoleAssignment::context_w() const { return set_union(c, u); }

NodeSet RoleAssignment::unmanipulated_z() const { return set_difference(context_w(), f); }

void RoleAssignment::validate(const InfluenceDiagram& d) const {
    auto require_node = [&](const std::string& n, const char* role) {
        if (!d.has_node(n))
            throw std::invalid_argument(std::string("role ") + role + ": unknown node '" + n + "'");
    };
    require_node(a, "a");
    require_node(b, "b");
    require_node(y, "y");
    require_node(sigma_ab, "sigma_ab");
    if (a == b || a == y || b == y)
        throw std::invalid_argument("roles a, b, y must name distinct nodes");
    for (const auto& role : {a, b, y})
        if (d.kind(role) == NodeKind::Regime)
            throw std::invalid_argument("role node '" + role + "' must be stochastic");

    NodeSet abY{a, b, y};
    for (const auto* part : {&c, &u, &f}) {
        for (const auto& n : *part) {
            require_node(n, "context");
            if (d.kind(n) == NodeKind::Regime)
                throw std::invalid_argument("context node '" + n + "' must be stochastic");
            if (abY.count(n))
                throw std::invalid_argument("node '" + n + "' cannot be both a context variable and a/b/y");
        }
    }
    if (!set_intersection(c, u).empty() || !set_intersection(c, f).empty() ||
        !set_intersection(u, f).empty())
        throw std::invalid_argument("role sets c, u, f must be pairwise disjoint");

    if (d.kind(sigma_ab) != NodeKind::Regime)
        throw std::invalid_argument("sigma_ab node '" + sigma_ab + "' is not a regime node");
    // Children beyond {a, b} are allowed: an arrow from the factor regime
    // into a covariate encodes a regime-dependent covariate distribution.
    NodeSet sab_children;
    for (int ch : d.children(d.index(sigma_ab))) sab_children.insert(d.name(ch));
    if (!sab_children.count(a) || !sab_children.count(b))
        throw std::invalid_argument("sigma_ab must have both factors among its children");

    if (!f.empty() && sigma_f.empty())
        throw std::invalid_argument("controlled variables declared without sigma_f regime nodes");
    NodeSet covered;
    for (const auto& s : sigma_f) {
        require_node(s, "sigma_f");
        if (d.kind(s) != NodeKind::Regime)
            throw std::invalid_argument("sigma_f node '" + s + "' is not a regime node");
        bool touches_f = false;
        for (int ch : d.children(d.index(s)))
            if (f.count(d.name(ch))) {
                touches_f = true;
                covered.insert(d.name(ch));
            }
        if (!touches_f)
            throw std::invalid_argument("sigma_f node '" + s + "' has no child among the controlled variables");
    }
    if (covered != f)
        throw std::invalid_argument("every controlled variable needs a regime node in sigma_f");
}

bool check_condition3(const InfluenceDiagram& d, const RoleAssignment& r) {
    NodeSet given = set_union(NodeSet{r.a, r.b}, r.context_w());
    return d_separated(d, {{r.y}, {r.sigma_ab}, given});
}

bool check_condition4(const InfluenceDiagram& d, const RoleAssignment& r) {
    if (r.u.empty()) return true;
    return d_separated(d, {r.u, {r.a, r.b, r.sigma_ab}, r.c});
}

bool check_condition5(const InfluenceDiagram& d, const RoleAssignment& r) {
    NodeSet given = r.c;
    given.insert(r.sigma_ab);
    return d_separated(d, {{r.a}, {r.b}, given});
}

bool check_condition7(const InfluenceDiagram& d, const RoleAssignment& r) {
    if (r.f.empty() || r.sigma_f.empty())
        throw std::invalid_argument("no controlled variables declared");
    NodeSet given{r.a, r.b, r.sigma_ab};
    given = set_union(given, r.f);
    given = set_union(given, r.unmanipulated_z());
    return d_separated(d, {{r.y}, r.sigma_f, given});
}

RoleAssignment reduce_context(const RoleAssignment& r) {
    RoleAssignment out = r;
    out.u.clear();
    return out;
}

namespace {

struct EffectiveContext {
    NodeSet w;        // full effective context for condition 3
    NodeSet c;        // observed part (controlled variables count as observed)
    NodeSet u;        // unobserved part
    NodeSet f;        // controlled variables (direct-effect only)
    NodeSet z;        // unmanipulated part of the direct-effect context
};

EffectiveContext resolve_context(const RoleAssignment& r, const InteractionQuery& q) {
    EffectiveContext eff;
    switch (q.kind) {
        case QueryKind::Total:
            if (!q.context.empty() || !q.controlled.empty())
                throw std::invalid_argument("total query takes no context or controlled variables");
            break;
        case QueryKind::ContextSpecific: {
            if (!q.controlled.empty())
                throw std::invalid_argument("context-specific query takes no controlled variables");
            if (!is_subset(q.context, r.context_w()))
                throw std::invalid_argument(
                    "query context must be drawn from the declared context variables c and u");
            eff.w = q.context;
            eff.c = set_intersection(q.context, r.c);
            eff.u = set_intersection(q.context, r.u);
            break;
        }
        case QueryKind::DirectEffect: {
            if (q.controlled.empty())
                throw std::invalid_argument("direct-effect query needs controlled variables");
            if (q.controlled != r.f)
                throw std::invalid_argument(
                    "query controlled set must equal the declared role set f");
            NodeSet context = q.context.empty() ? set_union(q.controlled, r.context_w()) : q.context;
            if (!is_subset(q.controlled, context))
                throw std::invalid_argument("controlled variables must be part of the query context");
            eff.z = set_difference(context, q.controlled);
            if (!is_subset(eff.z, r.context_w()))
                throw std::invalid_argument(
                    "query context must be drawn from the declared context variables c and u");
            eff.f = q.controlled;
            eff.w = context;
            eff.c = set_union(set_intersection(eff.z, r.c), eff.f);
            eff.u = set_intersection(eff.z, r.u);
            break;
        }
    }
    return eff;
}

std::string render_query(const RoleAssignment& r, const InteractionQuery& q,
                         const EffectiveContext& eff) {
    std::string out = r.a + " * " + r.b;
    if (q.kind == QueryKind::DirectEffect) {
        out += " | " + render_set(eff.f);
        out += " [" + (eff.z.empty() ? std::string() : render_set(eff.z)) + "]";
    } else if (!eff.w.empty()) {
        out += " [" + render_set(eff.w) + "]";
    }
    return out;
}

}  // namespace

IdentificationReport plan_identification(const InfluenceDiagram& d, const RoleAssignment& r,
                                         const InteractionQuery& q, const AssumptionFlags& flags) {
    r.validate(d);
    EffectiveContext eff = resolve_context(r, q);

    // The role assignment the graphical checks see: controlled variables are
    // folded into the observed context of the reduced query.
    RoleAssignment checked = r;
    checked.c = eff.c;
    checked.u = eff.u;
    checked.f.clear();

    IdentificationReport report;
    bool structure_ok = true;

    if (q.kind == QueryKind::DirectEffect) {
        RoleAssignment for7 = r;
        for7.c = set_intersection(eff.z, r.c);
        for7.u = set_intersection(eff.z, r.u);
        for7.f = eff.f;
        bool holds7 = check_condition7(d, for7);
        NodeSet given7 = set_union(set_union(NodeSet{r.a, r.b, r.sigma_ab}, eff.f), eff.z);
        report.conditions.push_back({"condition-7",
                                     {r.y},
                                     r.sigma_f,
                                     given7,
                                     render_ci({r.y}, r.sigma_f, given7),
                                     holds7,
                                     true});
        report.corollaries_used.push_back("theorem-3");
        structure_ok = structure_ok && holds7;
    }

    // Context-reduction screen: when unobserved context is in play, failure
    // of condition 3 with u dropped rules out every choice of u.
    if (!eff.u.empty()) {
        RoleAssignment reduced = reduce_context(checked);
        bool reduced3 = check_condition3(d, reduced);
        if (reduced3) {
            report.reduction =
                "theorem-2 screen: condition-3 holds with the unobserved context removed; "
                "checking the full context next";
        } else {
            report.reduction =
                "theorem-2 screen: condition-3 fails with the unobserved context removed, so "
                "conditions 3 and 4 cannot hold jointly for any choice of unobserved context";
        }
        report.corollaries_used.push_back("theorem-2");
    }

    bool holds3 = check_condition3(d, checked);
    {
        NodeSet given = set_union(NodeSet{r.a, r.b}, eff.w);
        report.conditions.push_back({"condition-3",
                                     {r.y},
                                     {r.sigma_ab},
                                     given,
                                     render_ci({r.y}, {r.sigma_ab}, given),
                                     holds3,
                                     true});
    }

    bool holds4 = check_condition4(d, checked);
    {
        ConditionResult res{"condition-4", eff.u, {r.a, r.b, r.sigma_ab}, eff.c, "", holds4, true};
        res.statement = eff.u.empty() ? "vacuous: no unobserved context variables"
                                      : render_ci(eff.u, res.right, eff.c);
        report.conditions.push_back(std::move(res));
    }

    bool holds5 = check_condition5(d, checked);
    bool need5 = !flags.binary_ab;
    {
        NodeSet given = eff.c;
        given.insert(r.sigma_ab);
        report.conditions.push_back({"condition-5",
                                     {r.a},
                                     {r.b},
                                     given,
                                     render_ci({r.a}, {r.b}, given),
                                     holds5,
                                     need5});
    }
    if (flags.binary_ab) report.corollaries_used.push_back("corollary-1");

    if (flags.monotone_effects_asserted) {
        report.statistic = Statistic::Superadditivity;
    } else if (!flags.effect_direction_known) {
        report.statistic = Statistic::ExcessRisk;
        report.corollaries_used.push_back("corollary-2");
    } else {
        report.statistic = Statistic::None;
    }

    bool graphical_ok = structure_ok && holds3 && holds4 && (holds5 || !need5);
    report.identifiable = graphical_ok && flags.uniform_positivity_asserted &&
                          report.statistic != Statistic::None;

    report.unverifiable_assumptions = {
        "condition-1: " + r.a + " and " + r.b + " are continuous or ordered categorical scalars",
        report.statistic == Statistic::ExcessRisk
            ? "condition-6: the effects of " + r.a + " and " + r.b + " on " + r.y +
                  " are monotone, in directions not known a priori"
            : "condition-2: the effects of " + r.a + " and " + r.b + " on " + r.y +
                  " are monotone non-decreasing",
        "uniform positivity: a negative outcome has positive probability at the cutoffs in "
        "every context"};

    std::ostringstream narrative;
    narrative << "query " << render_query(r, q, eff) << ": ";
    if (report.identifiable) {
        narrative << "identifiable from observational data; test " << to_string(report.statistic)
                  << " per stratum.";
    } else if (!graphical_ok) {
        narrative << "not identifiable; failed:";
        for (const auto& cond : report.conditions)
            if (cond.required && !cond.holds) narrative << " " << cond.id;
        narrative << ".";
    } else if (report.statistic == Statistic::None) {
        narrative << "not identifiable; no admissible statistic (assert monotone effects, or "
                     "monotone effects of unknown direction, to enable a test).";
    } else {
        narrative << "not identifiable; uniform positivity was not asserted.";
    }
    if (flags.binary_ab && !holds5) {
        narrative << " condition-5 fails but is waived for binary factors.";
    }

    NodeSet downstream;
    for (const auto& factor : {r.a, r.b}) {
        NodeSet desc = d.descendants(factor);
        for (const auto& n : eff.w)
            if (desc.count(n)) downstream.insert(n);
    }
    if (!downstream.empty()) {
        narrative << " note: context variable(s) " << render_set(downstream)
                  << " lie downstream of the causal factors; stratum membership may itself "
                     "respond to interventions on them.";
    }
    report.narrative = narrative.str();

    std::sort(report.corollaries_used.begin(), report.corollaries_used.end());
    report.corollaries_used.erase(
        std::unique(report.corollaries_used.begin(), report.corollaries_used.end()),
        report.corollaries_used.end());
    return report;
}

}  // namespace mechint
