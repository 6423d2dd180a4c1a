#include "mechint/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mechint/diagram.hpp"  // ParseError

namespace mechint {

std::string to_string(StatKind k) {
    return k == StatKind::Superadditivity ? "superadditivity" : "excess-risk";
}

std::string to_string(SamplingMode m) {
    return m == SamplingMode::Prospective ? "prospective" : "retrospective";
}

std::string format_stratum(const std::vector<std::string>& columns, const StratumKey& key) {
    if (columns.empty()) return "(all)";
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ",";
        out += columns[i] + "=" + format_csv_value(key[i]);
    }
    return out;
}

double CellCounts::total() const {
    double t = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int y = 0; y < 2; ++y) t += n[i][j][y];
    return t;
}

bool StratumRisks::all_estimable() const {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!cell[i][j].estimable) return false;
    return true;
}

const StratumRisks& RiskEstimates::stratum(const StratumKey& key) const {
    for (const auto& s : strata)
        if (s.key == key) return s;
    throw std::invalid_argument("unknown stratum");
}

bool operator==(const StratumResult& a, const StratumResult& b) {
    auto close = [](double x, double y) {
        if (std::isnan(x) && std::isnan(y)) return true;
        return x == y;
    };
    bool counts_equal = true;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int y = 0; y < 2; ++y)
                counts_equal = counts_equal && a.counts.n[i][j][y] == b.counts.n[i][j][y];
    return a.key == b.key && counts_equal && a.estimable == b.estimable && close(a.value, b.value) &&
           close(a.se, b.se) && close(a.z, b.z) && close(a.p, b.p) && a.corrected == b.corrected &&
           a.note == b.note;
}

bool operator==(const TestReport& a, const TestReport& b) {
    return a.stat == b.stat && a.mode == b.mode && a.correction == b.correction &&
           a.alpha == b.alpha && a.context_columns == b.context_columns && a.strata == b.strata &&
           a.n_estimable == b.n_estimable && a.n_rejected == b.n_rejected && a.min_p == b.min_p &&
           a.caveat == b.caveat;
}

DataTable dichotomize(const DataTable& records, const VariableSpec& a, const VariableSpec& b,
                      const DichotomizationSpec& spec) {
    std::size_t ai = records.column_index(a.name);
    std::size_t bi = records.column_index(b.name);

    auto check_domain = [](const VariableSpec& v, double tau) {
        if (v.domain && (tau < v.domain->first || tau > v.domain->second))
            throw std::invalid_argument("threshold for '" + v.name +
                                        "' lies outside the declared domain");
    };
    check_domain(a, spec.tau_a);
    check_domain(b, spec.tau_b);

    auto check_value = [](const VariableSpec& v, double x) {
        if (v.kind == VariableKind::Binary && x != 0.0 && x != 1.0)
            throw std::invalid_argument("binary variable '" + v.name + "' has value " +
                                        format_csv_value(x));
        if (v.domain && (x < v.domain->first || x > v.domain->second))
            throw std::invalid_argument("value " + format_csv_value(x) + " of '" + v.name +
                                        "' lies outside the declared domain");
    };

    std::vector<double> alpha(records.row_count()), beta(records.row_count());
    for (std::size_t r = 0; r < records.row_count(); ++r) {
        double av = records.rows[r][ai];
        double bv = records.rows[r][bi];
        check_value(a, av);
        check_value(b, bv);
        alpha[r] = av > spec.tau_a ? 1.0 : 0.0;  // strict: the boundary maps to 0
        beta[r] = bv > spec.tau_b ? 1.0 : 0.0;
    }
    DataTable out = records;
    out.add_column("alpha", std::move(alpha));
    out.add_column("beta", std::move(beta));
    return out;
}

StratifiedCounts tabulate(const DataTable& records, const std::vector<std::string>& context_columns,
                          const std::string& y_column) {
    if (records.row_count() == 0) throw ParseError(0, "no data");
    std::size_t ai = records.column_index("alpha");
    std::size_t bi = records.column_index("beta");
    std::size_t yi = records.column_index(y_column);
    std::vector<std::size_t> ci;
    for (const auto& col : context_columns) ci.push_back(records.column_index(col));

    StratifiedCounts counts;
    counts.context_columns = context_columns;
    for (std::size_t r = 0; r < records.row_count(); ++r) {
        double yv = records.rows[r][yi];
        if (yv != 0.0 && yv != 1.0)
            throw ParseError(0, "non-binary value " + format_csv_value(yv) + " in column '" +
                                    y_column + "'");
        double av = records.rows[r][ai];
        double bv = records.rows[r][bi];
        if ((av != 0.0 && av != 1.0) || (bv != 0.0 && bv != 1.0))
            throw ParseError(0, "non-binary alpha/beta indicator");
        StratumKey key;
        key.reserve(ci.size());
        for (auto c : ci) key.push_back(records.rows[r][c]);
        counts.strata[key].n[av > 0.5][bv > 0.5][yv > 0.5] += 1.0;
    }
    return counts;
}

RiskEstimates estimate_risks(const StratifiedCounts& counts, bool correction) {
    RiskEstimates out;
    out.context_columns = counts.context_columns;
    for (const auto& [key, cells] : counts.strata) {
        StratumRisks sr;
        sr.key = key;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                double n0 = cells.n[i][j][0];
                double n1 = cells.n[i][j][1];
                CellEstimate& est = sr.cell[i][j];
                if (correction && (n0 == 0.0 || n1 == 0.0)) {
                    n0 += 0.5;
                    n1 += 0.5;
                    est.corrected = true;
                }
                double m = n0 + n1;
                if (m <= 0.0) {
                    est.estimable = false;
                    continue;
                }
                est.m = m;
                est.r = n1 / m;
                est.s = 1.0 - est.r;
                est.se = std::sqrt(est.r * est.s / m);
                est.estimable = true;
            }
        }
        out.strata.push_back(std::move(sr));
    }
    return out;
}

namespace {

StatEstimate contrast(const StratumRisks& sr, bool include_00) {
    double value = sr.cell[1][1].r - sr.cell[1][0].r - sr.cell[0][1].r;
    double var = 0.0;
    for (auto [i, j] : {std::pair{1, 1}, {1, 0}, {0, 1}}) {
        if (!sr.cell[i][j].estimable) throw std::invalid_argument("inestimable cell");
        var += sr.cell[i][j].se * sr.cell[i][j].se;
    }
    if (include_00) {
        if (!sr.cell[0][0].estimable) throw std::invalid_argument("inestimable cell");
        value += sr.cell[0][0].r;
        var += sr.cell[0][0].se * sr.cell[0][0].se;
    }
    return {value, std::sqrt(var)};
}

}  // namespace

StatEstimate superadditivity_stat(const RiskEstimates& risks, const StratumKey& stratum) {
    return contrast(risks.stratum(stratum), /*include_00=*/true);
}

StatEstimate excess_risk_stat(const RiskEstimates& risks, const StratumKey& stratum) {
    return contrast(risks.stratum(stratum), /*include_00=*/false);
}

double one_sided_p(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

RetroResult retrospective_stats(const StratifiedCounts& counts, StatKind stat, bool correction,
                                std::optional<double> baseline_rate) {
    RetroResult out;
    out.caveat =
        "retrospective mode: risks are replaced by case/control odds, which approximate the "
        "prospective statistic only when the outcome is rare in every cell; treat the result "
        "as a sign test";

    // A common rescale factor keeps cross-cell contrasts meaningful: odds
    // scale linearly, so the sign is unaffected.
    double scale = 1.0;
    if (baseline_rate) {
        if (*baseline_rate <= 0.0 || *baseline_rate >= 1.0)
            throw std::invalid_argument("baseline rate must be in (0, 1)");
        double cases = 0.0, controls = 0.0;
        for (const auto& [key, cells] : counts.strata)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    controls += cells.n[i][j][0];
                    cases += cells.n[i][j][1];
                }
        if (cases > 0.0 && controls > 0.0)
            scale = (*baseline_rate / (1.0 - *baseline_rate)) * (controls / cases);
    }

    for (const auto& [key, cells] : counts.strata) {
        RetroStratum rs;
        rs.key = key;
        rs.counts = cells;
        double odds[2][2];
        double var[2][2];
        bool ok = true;
        bool corrected = false;
        for (int i = 0; i < 2 && ok; ++i) {
            for (int j = 0; j < 2 && ok; ++j) {
                double n0 = cells.n[i][j][0];
                double n1 = cells.n[i][j][1];
                if (correction && (n0 == 0.0 || n1 == 0.0)) {
                    n0 += 0.5;
                    n1 += 0.5;
                    corrected = true;
                }
                if (n0 <= 0.0) {
                    ok = false;
                    rs.note = n1 <= 0.0 ? "empty cell" : "zero control count without correction";
                    break;
                }
                odds[i][j] = n1 / n0;
                // delta method with independent Poisson-like cell counts
                var[i][j] = odds[i][j] * odds[i][j] * (1.0 / std::max(n1, 0.5) + 1.0 / n0);
            }
        }
        if (ok) {
            double value = odds[1][1] - odds[1][0] - odds[0][1];
            double v = var[1][1] + var[1][0] + var[0][1];
            if (stat == StatKind::Superadditivity) {
                value += odds[0][0];
                v += var[0][0];
            }
            rs.value = scale * value;
            rs.se = scale * std::sqrt(v);
            rs.corrected = corrected;
            rs.estimable = true;
        }
        out.strata.push_back(std::move(rs));
    }
    return out;
}

TestReport test_interaction(const DataTable& records, const TestConfig& config) {
    if (config.alpha <= 0.0 || config.alpha >= 1.0)
        throw std::invalid_argument("significance level must be in (0, 1)");

    VariableSpec va{config.a_column, VariableKind::OrderedNumeric, {}};
    VariableSpec vb{config.b_column, VariableKind::OrderedNumeric, {}};
    DataTable coded = dichotomize(records, va, vb, config.cutoffs);
    StratifiedCounts counts = tabulate(coded, config.context_columns, config.y_column);

    TestReport report;
    report.stat = config.stat;
    report.mode = config.mode;
    report.correction = config.correction;
    report.alpha = config.alpha;
    report.context_columns = config.context_columns;

    auto finish = [&](StratumResult& res) {
        if (res.estimable) {
            if (res.se > 0.0) {
                res.z = res.value / res.se;
                res.p = one_sided_p(res.z);
            } else {
                res.z = std::numeric_limits<double>::quiet_NaN();
                res.p = res.value > 0.0 ? 0.0 : 1.0;
            }
            ++report.n_estimable;
            if (!report.min_p || res.p < *report.min_p) report.min_p = res.p;
            if (res.p < config.alpha) ++report.n_rejected;
        }
        report.strata.push_back(std::move(res));
    };

    if (config.mode == SamplingMode::Retrospective) {
        RetroResult retro =
            retrospective_stats(counts, config.stat, config.correction, config.baseline_rate);
        report.caveat = retro.caveat;
        for (auto& rs : retro.strata) {
            StratumResult res;
            res.key = rs.key;
            res.counts = rs.counts;
            res.estimable = rs.estimable;
            res.value = rs.value;
            res.se = rs.se;
            res.corrected = rs.corrected;
            res.note = rs.note;
            finish(res);
        }
        return report;
    }

    RiskEstimates risks = estimate_risks(counts, config.correction);
    for (const auto& sr : risks.strata) {
        StratumResult res;
        res.key = sr.key;
        res.counts = counts.strata.at(sr.key);
        res.corrected = false;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) res.corrected = res.corrected || sr.cell[i][j].corrected;
        if (sr.all_estimable() || (config.stat == StatKind::ExcessRisk && sr.cell[1][1].estimable &&
                                   sr.cell[1][0].estimable && sr.cell[0][1].estimable)) {
            StatEstimate est = config.stat == StatKind::Superadditivity
                                   ? superadditivity_stat(risks, sr.key)
                                   : excess_risk_stat(risks, sr.key);
            res.value = est.value;
            res.se = est.se;
            res.estimable = true;
        } else {
            res.note = "inestimable: empty (alpha, beta) cell";
        }
        finish(res);
    }
    return report;
}

}  // namespace mechint
