#pragma once

// Structural generative models over a finite context, discrete factor
// domains and a binary outcome: exact evaluation of the interventional
// negative-outcome probability pi_w(a, b), algebraic null checks, and
// seeded samplers for the observational, interventional and case-control
// regimes.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mechint/stats.hpp"
#include "mechint/table.hpp"

namespace mechint {

struct ContextVariable {
    std::string name;
    bool observed = true;  // observed variables define strata; others are latent
};

struct ContextAtom {
    std::vector<double> values;  // one per context variable
    double prob = 0.0;
};

/// Product outcome law pi_w(a, b) = lambda_w(a) * mu_w(b); both factors are
/// non-increasing in their argument, so the risk of a positive outcome is
/// non-decreasing in each factor.
struct NoisyOrLaw {
    std::vector<std::vector<double>> lambda;  // [atom][a-index]
    std::vector<std::vector<double>> mu;      // [atom][b-index]
};

/// Arbitrary table pi[atom][a-index][b-index].
struct TableLaw {
    std::vector<std::vector<std::vector<double>>> pi;
};

/// Binary-domain law: Y = (A and B), each outcome flipped with probability
/// flip_noise.
struct BooleanAndLaw {
    double flip_noise = 0.0;
};

using OutcomeLaw = std::variant<NoisyOrLaw, TableLaw, BooleanAndLaw>;

struct AbCell {
    double a = 0.0;
    double b = 0.0;
    double prob = 0.0;
};

/// Conditional law of (A, B) given the observed part of the context; may
/// encode dependence between A and B.
struct AbLawEntry {
    std::vector<double> c_values;  // values of the observed context variables
    std::vector<AbCell> cells;
};

struct GenerativeSpec {
    std::vector<ContextVariable> context_vars;
    std::vector<ContextAtom> context_law;  // finite support, probabilities sum to 1
    std::vector<double> a_values;          // strictly increasing
    std::vector<double> b_values;
    std::vector<AbLawEntry> ab_law;
    OutcomeLaw outcome;
    bool monotone_declared = false;  // table laws: require pi non-increasing in a and b
    bool null_model = false;         // require pi > 0 everywhere (uniform positivity)

    /// Throws std::invalid_argument on any inconsistency: unnormalized
    /// probabilities (tolerance 1e-12), out-of-domain values, shape
    /// mismatches, or violated monotonicity/positivity declarations.
    void validate() const;

    std::vector<std::string> observed_context_names() const;
    std::vector<std::string> all_context_names() const;
    int atom_index(const std::vector<double>& w) const;  // -1 when off-support
    std::size_t a_index(double a) const;                 // throws out-of-domain
    std::size_t b_index(double b) const;
};

/// Exact pi_w(a, b) = P(Y = 0 | W = w, A and B set to (a, b)).
double true_pi(const GenerativeSpec& spec, const std::vector<double>& w, double a, double b);

struct NullGridPoint {
    std::vector<double> w;
    double a_hi = 0.0, a_lo = 0.0;  // a > a'
    double b_hi = 0.0, b_lo = 0.0;  // b > b'
};

struct NullCheck {
    bool holds = true;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;   // interval check: points with pi(a', b') = 0
    std::string violation;     // first violated grid point, when any
};

/// Point null: pi(a,b) pi(a',b') = pi(a,b') pi(a',b) at every grid point,
/// within tolerance 1e-9.  The no-argument overloads scan the full grid of
/// ordered pairs from the declared domains.
NullCheck check_point_null(const GenerativeSpec& spec);
NullCheck check_point_null(const GenerativeSpec& spec, std::span<const NullGridPoint> grid);

/// Interval null: pi(a,b) >= pi(a',b) pi(a,b') / pi(a',b') for a > a',
/// b > b'; points with pi(a',b') = 0 are skipped and counted.
NullCheck check_interval_null(const GenerativeSpec& spec);
NullCheck check_interval_null(const GenerativeSpec& spec, std::span<const NullGridPoint> grid);

/// Mechanistic-interaction detector: true iff the interval null fails on
/// the full grid.
bool exhibits_interaction(const GenerativeSpec& spec);

/// Draws (W, A, B, Y) i.i.d. under the observational regime.  Byte-for-byte
/// deterministic given (spec, n, seed).  Columns: every context variable by
/// name, then A, B, Y.
DataTable sample_observational(const GenerativeSpec& spec, std::size_t n, std::uint64_t seed);

/// Context drawn as in the observational regime, A and B forced to (a, b);
/// `f_settings` overwrites named context coordinates before the outcome law
/// is evaluated (the resulting configuration must be on-support).
DataTable sample_interventional(const GenerativeSpec& spec, double a, double b,
                                const std::map<std::string, double>& f_settings, std::size_t n,
                                std::uint64_t seed);

/// Rejection-samples observational records until the requested case (Y=1)
/// and control (Y=0) counts are both met.  Throws when a class has
/// probability zero.
DataTable sample_case_control(const GenerativeSpec& spec, std::size_t n_cases,
                              std::size_t n_controls, std::uint64_t seed);

/// Exact population cross-tab of (alpha, beta, Y) probability masses per
/// observed-context stratum, for the given cutoffs; feeding the result to
/// estimate_risks yields the exact population risks.
StratifiedCounts population_counts(const GenerativeSpec& spec, double tau_a, double tau_b);

/// Exact P(Y = 1) under the observational regime.
double population_outcome_rate(const GenerativeSpec& spec);

/// Uniform double in [0, 1) built from the top 53 bits of the generator,
/// identical on every platform.
double uniform01(std::mt19937_64& rng);

/// Index draw by inverse CDF over (not necessarily normalized) weights.
std::size_t pick_weighted(std::span<const double> weights, std::mt19937_64& rng);

}  // namespace mechint
