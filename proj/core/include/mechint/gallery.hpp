#pragma once

// Bundled study diagrams, golden identification cases, and reference
// generative specs used by the replication suites, the test-suite and the
// documentation examples.

#include <string>
#include <vector>

#include "mechint/diagram.hpp"
#include "mechint/identify.hpp"
#include "mechint/simulate.hpp"

namespace mechint::gallery {

/// Keys: "mediation", "latent_v", "regime_g", "regime_g_no_bm".
std::vector<std::string> diagram_keys();
const std::string& diagram_text(const std::string& key);  // DSL source
InfluenceDiagram diagram(const std::string& key);

struct GoldenCase {
    std::string id;
    std::string diagram_key;
    RoleAssignment roles;
    InteractionQuery query;
    AssumptionFlags flags;
    bool expect_identifiable = false;
    Statistic expect_statistic = Statistic::None;
};

/// The thirteen bundled identifiability cases with their expected verdicts.
const std::vector<GoldenCase>& golden_cases();

/// Product-form outcome law with no A effect: the population
/// superadditivity is exactly zero, making this the boundary null used for
/// type-I calibration.  Binary A and B, independent, no context.
GenerativeSpec point_null_calibration();

/// Y = (A and B) with each outcome flipped with probability `flip_noise`.
GenerativeSpec boolean_and(double flip_noise);

/// Same outcome law as point_null_calibration but with correlation 0.4
/// between the binary factors, exercising the binary-factors corollary.
GenerativeSpec correlated_binary_null();

/// Product-form table with both factors lowering the outcome risk
/// (negative direction); a null model for the unknown-direction route.
GenerativeSpec negative_direction_null();

/// Interacting model with every stratum risk at or below 1%, used to probe
/// odds-based testing under case-control sampling.
GenerativeSpec rare_interacting();

/// Two-stratum product-form null with context-dependent factor laws.
GenerativeSpec stratified_point_null();

}  // namespace mechint::gallery
