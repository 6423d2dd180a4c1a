#pragma once

// Monte Carlo and exact-enumeration validation suites shared by the
// `replicate` subcommand and the acceptance tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mechint/gallery.hpp"
#include "mechint/simulate.hpp"
#include "mechint/stats.hpp"

namespace mechint::validation {

struct McOptions {
    std::size_t replicates = 100;
    std::size_t samples = 10000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    StatKind stat = StatKind::Superadditivity;
    double tau_a = 0.0;
    double tau_b = 0.0;
    bool correction = false;
    bool relabel_ab = false;  // flip binary A/B codes before testing
};

struct McResult {
    std::size_t replicates = 0;
    std::size_t rejections = 0;
    double rate = 0.0;
};

/// Samples `replicates` observational data sets and counts the ones where
/// any estimable stratum rejects at `alpha` (one replicate per seed offset).
McResult rejection_rate(const GenerativeSpec& spec, const McOptions& opt);

struct SignAgreementResult {
    std::size_t replicates = 0;
    std::size_t agreements = 0;
    double rate = 0.0;
    int population_sign = 0;  // sign of the exact prospective statistic
};

/// For each replicate draws a case-control sample and compares the sign of
/// the odds-based statistic to the exact prospective population sign.
SignAgreementResult retrospective_sign_agreement(const GenerativeSpec& spec, std::size_t n_cases,
                                                 std::size_t n_controls, std::size_t replicates,
                                                 std::uint64_t seed,
                                                 StatKind stat = StatKind::Superadditivity);

struct GoldenOutcome {
    std::string id;
    bool expected_identifiable = false;
    bool actual_identifiable = false;
    Statistic expected_statistic = Statistic::None;
    Statistic actual_statistic = Statistic::None;
    bool pass = false;
};

/// Runs every gallery golden case through plan_identification.
std::vector<GoldenOutcome> run_golden_examples();

struct PopulationScanResult {
    std::size_t specs = 0;
    std::size_t points_checked = 0;  // (spec, threshold pair, stratum) triples
    std::size_t violations = 0;      // exact statistic above tolerance
    double max_value = 0.0;          // largest statistic seen
};

/// Draws random product-form specs (3-value factor domains, binary observed
/// context, factors independent given the context) and evaluates the exact
/// population superadditivity at every threshold pair and stratum; under
/// the product law it can never exceed zero.
PopulationScanResult population_null_scan(std::size_t n_specs, std::uint64_t seed,
                                          double tolerance = 1e-9);

/// The spec generator behind population_null_scan, exposed for reuse.
GenerativeSpec random_point_null_spec(std::mt19937_64& rng);

}  // namespace mechint::validation
