#include "mechint/gallery.hpp"

#include <map>
#include <stdexcept>

namespace mechint::gallery {

namespace {

// Two genetic-style factors A and B acting on outcome Y through mediator M,
// with covariate G feeding both mediator and outcome.
const std::string kMediation = R"(# factors A, B; mediator M; covariate G; outcome Y
node A
node B
node M
node G
node Y
regime sAB -> A, B
regime sM -> M
regime sG -> G
edge A -> M
edge A -> Y
edge B -> M
edge B -> Y
edge B -> G
edge G -> M
edge G -> Y
edge M -> Y
)";

// Adds an unobserved common influence V on covariate and outcome.
const std::string kLatentV = R"(# as mediation, plus latent V -> {G, Y}
node A
node B
node M
node G
node V
node Y
regime sAB -> A, B
regime sM -> M
regime sG -> G
edge A -> M
edge A -> Y
edge B -> M
edge B -> Y
edge B -> V
edge B -> G
edge V -> G
edge V -> Y
edge G -> M
edge G -> Y
edge M -> Y
)";

// The factor regime also influences the covariate: the distribution of G
// differs between observational and interventional data collection.
const std::string kRegimeG = R"(# mediation diagram with a regime arrow into G
node A
node B
node M
node G
node Y
regime sAB -> A, B, G
regime sM -> M
regime sG -> G
edge A -> M
edge A -> Y
edge B -> M
edge B -> Y
edge B -> G
edge G -> M
edge G -> Y
edge M -> Y
)";

// As regime_g but B does not feed the mediator.
const std::string kRegimeGNoBm = R"(# regime arrow into G; B acts on Y only directly and via G
node A
node B
node M
node G
node Y
regime sAB -> A, B, G
regime sM -> M
regime sG -> G
edge A -> M
edge A -> Y
edge B -> Y
edge B -> G
edge G -> M
edge G -> Y
edge M -> Y
)";

const std::map<std::string, const std::string*>& diagram_map() {
    static const std::map<std::string, const std::string*> m{
        {"mediation", &kMediation},
        {"latent_v", &kLatentV},
        {"regime_g", &kRegimeG},
        {"regime_g_no_bm", &kRegimeGNoBm},
    };
    return m;
}

RoleAssignment base_roles() {
    RoleAssignment r;
    r.a = "A";
    r.b = "B";
    r.y = "Y";
    r.sigma_ab = "sAB";
    return r;
}

AssumptionFlags base_flags(bool binary_ab) {
    AssumptionFlags f;
    f.binary_ab = binary_ab;
    f.effect_direction_known = true;
    f.uniform_positivity_asserted = true;
    f.monotone_effects_asserted = true;
    return f;
}

GoldenCase make_case(std::string id, std::string diagram_key, RoleAssignment roles,
                     InteractionQuery query, bool binary_ab, bool identifiable) {
    GoldenCase gc;
    gc.id = std::move(id);
    gc.diagram_key = std::move(diagram_key);
    gc.roles = std::move(roles);
    gc.query = std::move(query);
    gc.flags = base_flags(binary_ab);
    gc.expect_identifiable = identifiable;
    gc.expect_statistic = Statistic::Superadditivity;
    return gc;
}

}  // namespace

std::vector<std::string> diagram_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : diagram_map()) keys.push_back(k);
    return keys;
}

const std::string& diagram_text(const std::string& key) {
    auto it = diagram_map().find(key);
    if (it == diagram_map().end())
        throw std::invalid_argument("unknown gallery diagram '" + key + "'");
    return *it->second;
}

InfluenceDiagram diagram(const std::string& key) { return parse_diagram(diagram_text(key)); }

const std::vector<GoldenCase>& golden_cases() {
    static const std::vector<GoldenCase> cases = [] {
        std::vector<GoldenCase> out;

        {  // population-wide interaction of the total effects
            auto r = base_roles();
            out.push_back(make_case("example1-total", "mediation", r, {QueryKind::Total, {}, {}},
                                    false, true));
        }
        {  // interaction within covariate strata
            auto r = base_roles();
            r.c = {"G"};
            out.push_back(make_case("example2-stratum-g", "mediation", r,
                                    {QueryKind::ContextSpecific, {"G"}, {}}, false, true));
        }
        {  // direct-effects interaction, covariate held fixed
            auto r = base_roles();
            r.f = {"G"};
            r.sigma_f = {"sG"};
            out.push_back(make_case("example2-direct-g", "mediation", r,
                                    {QueryKind::DirectEffect, {"G"}, {"G"}}, false, true));
        }
        {  // mediator+covariate strata; factor independence fails but the
           // factors are binary
            auto r = base_roles();
            r.c = {"G", "M"};
            out.push_back(make_case("example3-stratum-mg-binary", "mediation", r,
                                    {QueryKind::ContextSpecific, {"G", "M"}, {}}, true, true));
        }
        {  // same query without the binary waiver
            auto r = base_roles();
            r.c = {"G", "M"};
            out.push_back(make_case("example3-stratum-mg-nonbinary", "mediation", r,
                                    {QueryKind::ContextSpecific, {"G", "M"}, {}}, false, false));
        }
        {
            auto r = base_roles();
            out.push_back(make_case("example4-total", "latent_v", r, {QueryKind::Total, {}, {}},
                                    true, true));
        }
        {
            auto r = base_roles();
            r.c = {"G", "M"};
            out.push_back(make_case("example4-stratum-mg", "latent_v", r,
                                    {QueryKind::ContextSpecific, {"G", "M"}, {}}, true, true));
        }
        {  // direct effects unmediated by M, within covariate strata
            auto r = base_roles();
            r.c = {"G"};
            r.f = {"M"};
            r.sigma_f = {"sM"};
            out.push_back(make_case("example4-direct-m", "latent_v", r,
                                    {QueryKind::DirectEffect, {"G", "M"}, {"M"}}, true, true));
        }
        {  // regime-dependent covariate spoils the population-wide query
            auto r = base_roles();
            out.push_back(make_case("example5-total", "regime_g", r, {QueryKind::Total, {}, {}},
                                    false, false));
        }
        {
            auto r = base_roles();
            r.c = {"G"};
            out.push_back(make_case("example5-stratum-g", "regime_g", r,
                                    {QueryKind::ContextSpecific, {"G"}, {}}, false, true));
        }
        {
            auto r = base_roles();
            r.f = {"G"};
            r.sigma_f = {"sG"};
            out.push_back(make_case("example5-direct-g", "regime_g", r,
                                    {QueryKind::DirectEffect, {"G"}, {"G"}}, false, true));
        }
        {
            auto r = base_roles();
            r.c = {"G", "M"};
            out.push_back(make_case("example6-stratum-mg", "regime_g_no_bm", r,
                                    {QueryKind::ContextSpecific, {"G", "M"}, {}}, false, true));
        }
        {
            auto r = base_roles();
            r.f = {"G", "M"};
            r.sigma_f = {"sG", "sM"};
            out.push_back(make_case("example6-direct-mg", "regime_g_no_bm", r,
                                    {QueryKind::DirectEffect, {"G", "M"}, {"G", "M"}}, false,
                                    true));
        }
        return out;
    }();
    return cases;
}

namespace {

GenerativeSpec binary_no_context_base() {
    GenerativeSpec s;
    s.context_law = {{{}, 1.0}};
    s.a_values = {0, 1};
    s.b_values = {0, 1};
    s.ab_law = {{{}, {{0, 0, 0.25}, {0, 1, 0.25}, {1, 0, 0.25}, {1, 1, 0.25}}}};
    return s;
}

}  // namespace

GenerativeSpec point_null_calibration() {
    GenerativeSpec s = binary_no_context_base();
    // lambda constant: A has no effect, so the population superadditivity is
    // exactly zero and the 5% test should reject about 5% of the time.
    s.outcome = NoisyOrLaw{{{0.9, 0.9}}, {{0.9, 0.5}}};
    s.monotone_declared = true;
    s.null_model = true;
    return s;
}

GenerativeSpec boolean_and(double flip_noise) {
    GenerativeSpec s = binary_no_context_base();
    s.outcome = BooleanAndLaw{flip_noise};
    s.monotone_declared = true;
    return s;
}

GenerativeSpec correlated_binary_null() {
    GenerativeSpec s = point_null_calibration();
    // P(A=1)=P(B=1)=0.5 with correlation 0.4.
    s.ab_law = {{{}, {{0, 0, 0.35}, {0, 1, 0.15}, {1, 0, 0.15}, {1, 1, 0.35}}}};
    return s;
}

GenerativeSpec negative_direction_null() {
    GenerativeSpec s = binary_no_context_base();
    // Product law with both factors raising the negative-outcome
    // probability: effects are monotone but point the "wrong" way.
    TableLaw law;
    const double lambda[2] = {0.7, 0.9};
    const double mu[2] = {0.6, 0.95};
    law.pi = {{{lambda[0] * mu[0], lambda[0] * mu[1]}, {lambda[1] * mu[0], lambda[1] * mu[1]}}};
    s.outcome = std::move(law);
    s.null_model = true;
    return s;
}

GenerativeSpec rare_interacting() {
    GenerativeSpec s = binary_no_context_base();
    // All positive-outcome risks at or below 1%, joint exposure ten times
    // the baseline: a strongly synergistic rare-outcome model.
    TableLaw law;
    law.pi = {{{0.999, 0.999}, {0.999, 0.99}}};
    s.outcome = std::move(law);
    s.monotone_declared = true;
    return s;
}

GenerativeSpec stratified_point_null() {
    GenerativeSpec s;
    s.context_vars = {{"G", true}};
    s.context_law = {{{0}, 0.5}, {{1}, 0.5}};
    s.a_values = {0, 1};
    s.b_values = {0, 1};
    s.ab_law = {
        {{0}, {{0, 0, 0.25}, {0, 1, 0.25}, {1, 0, 0.25}, {1, 1, 0.25}}},
        {{1}, {{0, 0, 0.24}, {0, 1, 0.16}, {1, 0, 0.36}, {1, 1, 0.24}}},
    };
    s.outcome = NoisyOrLaw{{{1.0, 0.6}, {0.9, 0.54}}, {{1.0, 0.5}, {0.8, 0.4}}};
    s.monotone_declared = true;
    s.null_model = true;
    return s;
}

}  // namespace mechint::gallery
