#pragma once

// Stratum-specific risk estimation and the excess-risk / superadditivity
// tests, in prospective and retrospective (case-control) modes.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mechint/table.hpp"

namespace mechint {

enum class VariableKind { Binary, OrderedNumeric };

struct VariableSpec {
    std::string name;
    VariableKind kind = VariableKind::OrderedNumeric;
    std::optional<std::pair<double, double>> domain;  // inclusive (min, max)
};

/// Cutoff thresholds defining the indicators alpha = [A > tau_a] and
/// beta = [B > tau_b]; the inequalities are strict.
struct DichotomizationSpec {
    double tau_a = 0.0;
    double tau_b = 0.0;
};

using StratumKey = std::vector<double>;

std::string format_stratum(const std::vector<std::string>& columns, const StratumKey& key);

/// Outcome counts (or probability masses, for exact population tables) per
/// (alpha, beta, y) cell.
struct CellCounts {
    double n[2][2][2] = {};  // n[alpha][beta][y]

    double cell_total(int i, int j) const { return n[i][j][0] + n[i][j][1]; }
    double total() const;
};

struct StratifiedCounts {
    std::vector<std::string> context_columns;
    std::map<StratumKey, CellCounts> strata;
};

struct CellEstimate {
    double r = 0.0;       // risk of positive outcome
    double s = 1.0;       // 1 - r, kept exactly in sync
    double se = 0.0;      // sqrt(r (1-r) / m)
    double m = 0.0;       // denominator after any continuity correction
    bool estimable = false;
    bool corrected = false;
};

struct StratumRisks {
    StratumKey key;
    CellEstimate cell[2][2];  // [alpha][beta]
    bool all_estimable() const;
};

struct RiskEstimates {
    std::vector<std::string> context_columns;
    std::vector<StratumRisks> strata;  // in stratum-key order
    const StratumRisks& stratum(const StratumKey& key) const;  // throws when absent
};

struct StatEstimate {
    double value = 0.0;
    double se = 0.0;
};

enum class StatKind { Superadditivity, ExcessRisk };
enum class SamplingMode { Prospective, Retrospective };

std::string to_string(StatKind k);
std::string to_string(SamplingMode m);

struct TestConfig {
    StatKind stat = StatKind::Superadditivity;
    SamplingMode mode = SamplingMode::Prospective;
    DichotomizationSpec cutoffs;
    std::vector<std::string> context_columns;
    double alpha = 0.05;           // one-sided significance level
    bool correction = false;       // 0.5 continuity correction, opt-in
    std::string a_column = "A";
    std::string b_column = "B";
    std::string y_column = "Y";
    std::optional<double> baseline_rate;  // retrospective rescale, P(Y=1)
};

struct StratumResult {
    StratumKey key;
    CellCounts counts;
    bool estimable = false;
    double value = 0.0;
    double se = 0.0;
    double z = 0.0;        // value / se; meaningless unless se > 0
    double p = 1.0;        // one-sided, H1: statistic > 0
    bool corrected = false;
    std::string note;      // set when inestimable

    friend bool operator==(const StratumResult&, const StratumResult&);
};

struct TestReport {
    StatKind stat = StatKind::Superadditivity;
    SamplingMode mode = SamplingMode::Prospective;
    bool correction = false;
    double alpha = 0.05;
    std::vector<std::string> context_columns;
    std::vector<StratumResult> strata;
    std::size_t n_estimable = 0;
    std::size_t n_rejected = 0;            // estimable strata with p < alpha
    std::optional<double> min_p;           // over estimable strata
    std::string caveat;                    // retrospective approximation note

    friend bool operator==(const TestReport&, const TestReport&);
};

/// Appends "alpha" and "beta" columns: alpha = 1 iff A > tau_a (strict),
/// beta likewise.  Throws ParseError on missing columns, and
/// std::invalid_argument when values or thresholds violate the declared
/// variable domains.
DataTable dichotomize(const DataTable& records, const VariableSpec& a, const VariableSpec& b,
                      const DichotomizationSpec& spec);

/// Exact cross-tabulation of (alpha, beta, y) within strata of the context
/// columns.  Throws ParseError when records are empty or y is not binary.
StratifiedCounts tabulate(const DataTable& records, const std::vector<std::string>& context_columns,
                          const std::string& y_column = "Y");

/// R = n1 / (n0 + n1) per cell.  With `correction`, any (alpha, beta) cell
/// whose pair contains a zero gets 0.5 added to both outcome counts before
/// the ratio is formed.  Cells with an empty denominator are marked
/// inestimable rather than raising.
RiskEstimates estimate_risks(const StratifiedCounts& counts, bool correction);

/// R11 - R10 - R01 + R00 with the independent-binomial delta-method
/// standard error.  Throws std::invalid_argument when a cell is inestimable.
StatEstimate superadditivity_stat(const RiskEstimates& risks, const StratumKey& stratum);

/// R11 - R10 - R01 over the three involved cells.
StatEstimate excess_risk_stat(const RiskEstimates& risks, const StratumKey& stratum);

struct RetroStratum {
    StratumKey key;
    CellCounts counts;
    bool estimable = false;
    double value = 0.0;
    double se = 0.0;
    bool corrected = false;
    std::string note;
};

struct RetroResult {
    std::vector<RetroStratum> strata;
    std::string caveat;
};

/// Odds-based statistic for case-control data: each risk is replaced by the
/// odds n1/n0 (optionally rescaled by a population outcome rate); validity
/// is approximate and only the sign is comparable across sampling designs.
RetroResult retrospective_stats(const StratifiedCounts& counts, StatKind stat, bool correction,
                                std::optional<double> baseline_rate);

/// One-sided upper-tail p-value for a standard normal z.
double one_sided_p(double z);

/// Full pipeline: dichotomize, tabulate, estimate, and test each stratum
/// one-sidedly against H0: statistic <= 0.  No pooling across strata.
TestReport test_interaction(const DataTable& records, const TestConfig& config);

}  // namespace mechint
