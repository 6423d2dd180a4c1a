#include "mechint/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mechint {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kAlgebraTol = 1e-9;

std::string fmt(double v) { return format_csv_value(v); }

}  // namespace

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t pick_weighted(std::span<const double> weights, std::mt19937_64& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw std::invalid_argument("weights must have positive total");
    double u = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

std::vector<std::string> GenerativeSpec::observed_context_names() const {
    std::vector<std::string> out;
    for (const auto& v : context_vars)
        if (v.observed) out.push_back(v.name);
    return out;
}

std::vector<std::string> GenerativeSpec::all_context_names() const {
    std::vector<std::string> out;
    for (const auto& v : context_vars) out.push_back(v.name);
    return out;
}

int GenerativeSpec::atom_index(const std::vector<double>& w) const {
    for (std::size_t i = 0; i < context_law.size(); ++i)
        if (context_law[i].values == w) return static_cast<int>(i);
    return -1;
}

std::size_t GenerativeSpec::a_index(double a) const {
    auto it = std::find(a_values.begin(), a_values.end(), a);
    if (it == a_values.end())
        throw std::invalid_argument("value " + fmt(a) + " is not in the domain of A");
    return static_cast<std::size_t>(it - a_values.begin());
}

std::size_t GenerativeSpec::b_index(double b) const {
    auto it = std::find(b_values.begin(), b_values.end(), b);
    if (it == b_values.end())
        throw std::invalid_argument("value " + fmt(b) + " is not in the domain of B");
    return static_cast<std::size_t>(it - b_values.begin());
}

namespace {

std::vector<double> observed_projection(const GenerativeSpec& spec, const ContextAtom& atom) {
    std::vector<double> proj;
    for (std::size_t i = 0; i < spec.context_vars.size(); ++i)
        if (spec.context_vars[i].observed) proj.push_back(atom.values[i]);
    return proj;
}

const AbLawEntry& ab_entry_for(const GenerativeSpec& spec, const std::vector<double>& c_values) {
    for (const auto& entry : spec.ab_law)
        if (entry.c_values == c_values) return entry;
    throw std::invalid_argument("no (A, B) law for an observed-context configuration");
}

double pi_at(const GenerativeSpec& spec, std::size_t atom, std::size_t ai, std::size_t bi) {
    if (const auto* p = std::get_if<NoisyOrLaw>(&spec.outcome)) return p->lambda[atom][ai] * p->mu[atom][bi];
    if (const auto* t = std::get_if<TableLaw>(&spec.outcome)) return t->pi[atom][ai][bi];
    const auto& ba = std::get<BooleanAndLaw>(spec.outcome);
    bool positive = spec.a_values[ai] == 1.0 && spec.b_values[bi] == 1.0;
    return positive ? ba.flip_noise : 1.0 - ba.flip_noise;
}

void require_prob(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

void require_non_increasing(const std::vector<double>& xs, const char* what) {
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] > xs[i - 1] + kProbTol)
            throw std::invalid_argument(std::string(what) + " must be non-increasing");
}

}  // namespace

void GenerativeSpec::validate() const {
    for (const auto& v : context_vars) {
        if (v.name.empty() || v.name.find(',') != std::string::npos)
            throw std::invalid_argument("bad context variable name");
        if (v.name == "A" || v.name == "B" || v.name == "Y")
            throw std::invalid_argument("context variable may not be named A, B or Y");
    }
    for (std::size_t i = 0; i < context_vars.size(); ++i)
        for (std::size_t j = i + 1; j < context_vars.size(); ++j)
            if (context_vars[i].name == context_vars[j].name)
                throw std::invalid_argument("duplicate context variable '" + context_vars[i].name + "'");

    if (context_law.empty()) throw std::invalid_argument("context law has empty support");
    double total = 0.0;
    for (const auto& atom : context_law) {
        if (atom.values.size() != context_vars.size())
            throw std::invalid_argument("context atom arity mismatch");
        if (atom.prob < 0.0) throw std::invalid_argument("negative context probability");
        total += atom.prob;
    }
    if (std::abs(total - 1.0) > kProbTol)
        throw std::invalid_argument("context probabilities must sum to 1");
    for (std::size_t i = 0; i < context_law.size(); ++i)
        for (std::size_t j = i + 1; j < context_law.size(); ++j)
            if (context_law[i].values == context_law[j].values)
                throw std::invalid_argument("duplicate context atom");

    auto check_domain = [](const std::vector<double>& xs, const char* what) {
        if (xs.empty()) throw std::invalid_argument(std::string(what) + " domain is empty");
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (xs[i] <= xs[i - 1])
                throw std::invalid_argument(std::string(what) + " domain must be strictly increasing");
    };
    check_domain(a_values, "A");
    check_domain(b_values, "B");

    // Every observed-context configuration needs exactly one (A, B) law.
    std::vector<std::vector<double>> projections;
    for (const auto& atom : context_law) {
        auto proj = observed_projection(*this, atom);
        if (std::find(projections.begin(), projections.end(), proj) == projections.end())
            projections.push_back(proj);
    }
    if (ab_law.size() != projections.size())
        throw std::invalid_argument("ab_law must have one entry per observed-context configuration");
    for (const auto& proj : projections) {
        const AbLawEntry* found = nullptr;
        for (const auto& entry : ab_law) {
            if (entry.c_values == proj) {
                if (found) throw std::invalid_argument("duplicate ab_law entry");
                found = &entry;
            }
        }
        if (!found) throw std::invalid_argument("missing ab_law entry for an observed context");
        double cell_total = 0.0;
        for (const auto& cell : found->cells) {
            a_index(cell.a);
            b_index(cell.b);
            if (cell.prob < 0.0) throw std::invalid_argument("negative (A, B) probability");
            cell_total += cell.prob;
        }
        if (std::abs(cell_total - 1.0) > kProbTol)
            throw std::invalid_argument("(A, B) probabilities must sum to 1");
        for (std::size_t i = 0; i < found->cells.size(); ++i)
            for (std::size_t j = i + 1; j < found->cells.size(); ++j)
                if (found->cells[i].a == found->cells[j].a && found->cells[i].b == found->cells[j].b)
                    throw std::invalid_argument("duplicate (A, B) cell");
    }

    std::size_t n_atoms = context_law.size();
    if (const auto* p = std::get_if<NoisyOrLaw>(&outcome)) {
        if (p->lambda.size() != n_atoms || p->mu.size() != n_atoms)
            throw std::invalid_argument("outcome law must cover every context atom");
        for (std::size_t w = 0; w < n_atoms; ++w) {
            if (p->lambda[w].size() != a_values.size() || p->mu[w].size() != b_values.size())
                throw std::invalid_argument("outcome law arity mismatch");
            for (double v : p->lambda[w]) require_prob(v, "lambda");
            for (double v : p->mu[w]) require_prob(v, "mu");
            require_non_increasing(p->lambda[w], "lambda");
            require_non_increasing(p->mu[w], "mu");
        }
    } else if (const auto* t = std::get_if<TableLaw>(&outcome)) {
        if (t->pi.size() != n_atoms)
            throw std::invalid_argument("outcome law must cover every context atom");
        for (std::size_t w = 0; w < n_atoms; ++w) {
            if (t->pi[w].size() != a_values.size())
                throw std::invalid_argument("outcome law arity mismatch");
            for (const auto& row : t->pi[w]) {
                if (row.size() != b_values.size())
                    throw std::invalid_argument("outcome law arity mismatch");
                for (double v : row) require_prob(v, "pi");
            }
            if (monotone_declared) {
                for (std::size_t bi = 0; bi < b_values.size(); ++bi) {
                    std::vector<double> col;
                    for (std::size_t ai = 0; ai < a_values.size(); ++ai) col.push_back(t->pi[w][ai][bi]);
                    require_non_increasing(col, "pi (in a)");
                }
                for (const auto& row : t->pi[w]) require_non_increasing(row, "pi (in b)");
            }
        }
    } else {
        const auto& ba = std::get<BooleanAndLaw>(outcome);
        if (a_values != std::vector<double>{0, 1} || b_values != std::vector<double>{0, 1})
            throw std::invalid_argument("boolean-and law needs binary {0, 1} domains");
        if (!(ba.flip_noise >= 0.0 && ba.flip_noise < 0.5))
            throw std::invalid_argument("flip noise must lie in [0, 0.5)");
    }

    if (null_model) {
        for (std::size_t w = 0; w < n_atoms; ++w)
            for (std::size_t ai = 0; ai < a_values.size(); ++ai)
                for (std::size_t bi = 0; bi < b_values.size(); ++bi)
                    if (pi_at(*this, w, ai, bi) <= 0.0)
                        throw std::invalid_argument(
                            "null-model spec violates uniform positivity: pi = 0 at a grid point");
    }
}

double true_pi(const GenerativeSpec& spec, const std::vector<double>& w, double a, double b) {
    int atom = spec.atom_index(w);
    if (atom < 0) throw std::invalid_argument("context configuration is off the declared support");
    return pi_at(spec, static_cast<std::size_t>(atom), spec.a_index(a), spec.b_index(b));
}

namespace {

std::vector<NullGridPoint> full_grid(const GenerativeSpec& spec) {
    std::vector<NullGridPoint> grid;
    for (const auto& atom : spec.context_law)
        for (std::size_t ai = 1; ai < spec.a_values.size(); ++ai)
            for (std::size_t ai2 = 0; ai2 < ai; ++ai2)
                for (std::size_t bi = 1; bi < spec.b_values.size(); ++bi)
                    for (std::size_t bi2 = 0; bi2 < bi; ++bi2)
                        grid.push_back({atom.values, spec.a_values[ai], spec.a_values[ai2],
                                        spec.b_values[bi], spec.b_values[bi2]});
    return grid;
}

std::string describe_point(const NullGridPoint& g) {
    std::ostringstream out;
    out << "w=(";
    for (std::size_t i = 0; i < g.w.size(); ++i) out << (i ? "," : "") << fmt(g.w[i]);
    out << ") a=" << fmt(g.a_hi) << ">" << fmt(g.a_lo) << " b=" << fmt(g.b_hi) << ">"
        << fmt(g.b_lo);
    return out.str();
}

}  // namespace

NullCheck check_point_null(const GenerativeSpec& spec, std::span<const NullGridPoint> grid) {
    if (grid.empty()) throw std::invalid_argument("empty grid");
    NullCheck out;
    for (const auto& g : grid) {
        double hh = true_pi(spec, g.w, g.a_hi, g.b_hi);
        double ll = true_pi(spec, g.w, g.a_lo, g.b_lo);
        double hl = true_pi(spec, g.w, g.a_hi, g.b_lo);
        double lh = true_pi(spec, g.w, g.a_lo, g.b_hi);
        ++out.evaluated;
        if (std::abs(hh * ll - hl * lh) > kAlgebraTol) {
            out.holds = false;
            if (out.violation.empty()) out.violation = describe_point(g);
        }
    }
    return out;
}

NullCheck check_point_null(const GenerativeSpec& spec) {
    auto grid = full_grid(spec);
    return check_point_null(spec, grid);
}

NullCheck check_interval_null(const GenerativeSpec& spec, std::span<const NullGridPoint> grid) {
    if (grid.empty()) throw std::invalid_argument("empty grid");
    NullCheck out;
    for (const auto& g : grid) {
        if (!(g.a_hi > g.a_lo && g.b_hi > g.b_lo))
            throw std::invalid_argument("interval grid needs a > a' and b > b'");
        double ll = true_pi(spec, g.w, g.a_lo, g.b_lo);
        if (ll == 0.0) {
            ++out.skipped;
            continue;
        }
        double hh = true_pi(spec, g.w, g.a_hi, g.b_hi);
        double hl = true_pi(spec, g.w, g.a_hi, g.b_lo);
        double lh = true_pi(spec, g.w, g.a_lo, g.b_hi);
        ++out.evaluated;
        if (hh < hl * lh / ll - kAlgebraTol) {
            out.holds = false;
            if (out.violation.empty()) out.violation = describe_point(g);
        }
    }
    if (out.evaluated == 0) throw std::invalid_argument("empty evaluable grid");
    return out;
}

NullCheck check_interval_null(const GenerativeSpec& spec) {
    auto grid = full_grid(spec);
    return check_interval_null(spec, grid);
}

bool exhibits_interaction(const GenerativeSpec& spec) { return !check_interval_null(spec).holds; }

namespace {

// Cumulative structures resolved once per sampling call.
struct CompiledSpec {
    const GenerativeSpec& spec;
    std::vector<double> atom_weights;
    std::vector<const AbLawEntry*> entries;           // per atom
    std::vector<std::vector<double>> cell_weights;    // per atom, per cell
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> cell_index;  // (ai, bi)

    explicit CompiledSpec(const GenerativeSpec& s) : spec(s) {
        s.validate();
        for (const auto& atom : s.context_law) {
            atom_weights.push_back(atom.prob);
            const auto& entry = ab_entry_for(s, observed_projection(s, atom));
            entries.push_back(&entry);
            std::vector<double> w;
            std::vector<std::pair<std::size_t, std::size_t>> idx;
            for (const auto& cell : entry.cells) {
                w.push_back(cell.prob);
                idx.emplace_back(s.a_index(cell.a), s.b_index(cell.b));
            }
            cell_weights.push_back(std::move(w));
            cell_index.push_back(std::move(idx));
        }
    }
};

DataTable records_shell(const GenerativeSpec& spec) {
    DataTable t;
    t.columns = spec.all_context_names();
    t.columns.push_back("A");
    t.columns.push_back("B");
    t.columns.push_back("Y");
    return t;
}

std::vector<double> draw_record(const CompiledSpec& cs, std::mt19937_64& rng) {
    std::size_t atom = pick_weighted(cs.atom_weights, rng);
    std::size_t cell = pick_weighted(cs.cell_weights[atom], rng);
    auto [ai, bi] = cs.cell_index[atom][cell];
    double pi = pi_at(cs.spec, atom, ai, bi);
    double y = uniform01(rng) < pi ? 0.0 : 1.0;
    std::vector<double> row = cs.spec.context_law[atom].values;
    row.push_back(cs.spec.a_values[ai]);
    row.push_back(cs.spec.b_values[bi]);
    row.push_back(y);
    return row;
}

}  // namespace

DataTable sample_observational(const GenerativeSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("need at least one record");
    CompiledSpec cs(spec);
    std::mt19937_64 rng(seed);
    DataTable t = records_shell(spec);
    t.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.rows.push_back(draw_record(cs, rng));
    return t;
}

DataTable sample_interventional(const GenerativeSpec& spec, double a, double b,
                                const std::map<std::string, double>& f_settings, std::size_t n,
                                std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("need at least one record");
    CompiledSpec cs(spec);
    std::size_t ai = spec.a_index(a);
    std::size_t bi = spec.b_index(b);

    auto names = spec.all_context_names();
    std::vector<std::pair<std::size_t, double>> overrides;
    for (const auto& [name, value] : f_settings) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end())
            throw std::invalid_argument("unknown context variable '" + name + "' in settings");
        overrides.emplace_back(static_cast<std::size_t>(it - names.begin()), value);
    }

    std::mt19937_64 rng(seed);
    DataTable t = records_shell(spec);
    t.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t atom = pick_weighted(cs.atom_weights, rng);
        std::vector<double> w = spec.context_law[atom].values;
        for (auto [pos, value] : overrides) w[pos] = value;
        int effective = spec.atom_index(w);
        if (effective < 0)
            throw std::invalid_argument("setting moves the context off the declared support");
        double pi = pi_at(spec, static_cast<std::size_t>(effective), ai, bi);
        double y = uniform01(rng) < pi ? 0.0 : 1.0;
        std::vector<double> row = std::move(w);
        row.push_back(a);
        row.push_back(b);
        row.push_back(y);
        t.rows.push_back(std::move(row));
    }
    return t;
}

DataTable sample_case_control(const GenerativeSpec& spec, std::size_t n_cases,
                              std::size_t n_controls, std::uint64_t seed) {
    if (n_cases == 0 || n_controls == 0)
        throw std::invalid_argument("case and control quotas must both be positive");
    double rate = population_outcome_rate(spec);
    if (rate <= 0.0 || rate >= 1.0)
        throw std::invalid_argument("unreachable quota: one outcome class has probability zero");

    CompiledSpec cs(spec);
    std::mt19937_64 rng(seed);
    DataTable t = records_shell(spec);
    t.rows.reserve(n_cases + n_controls);
    std::size_t cases = 0, controls = 0;
    while (cases < n_cases || controls < n_controls) {
        auto row = draw_record(cs, rng);
        bool is_case = row.back() == 1.0;
        if (is_case && cases < n_cases) {
            ++cases;
            t.rows.push_back(std::move(row));
        } else if (!is_case && controls < n_controls) {
            ++controls;
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

StratifiedCounts population_counts(const GenerativeSpec& spec, double tau_a, double tau_b) {
    spec.validate();
    StratifiedCounts counts;
    counts.context_columns = spec.observed_context_names();
    for (const auto& atom : spec.context_law) {
        auto proj = observed_projection(spec, atom);
        const auto& entry = ab_entry_for(spec, proj);
        auto& cells = counts.strata[proj];
        std::size_t w = static_cast<std::size_t>(spec.atom_index(atom.values));
        for (const auto& cell : entry.cells) {
            double mass = atom.prob * cell.prob;
            if (mass == 0.0) continue;
            int i = cell.a > tau_a ? 1 : 0;
            int j = cell.b > tau_b ? 1 : 0;
            double pi = pi_at(spec, w, spec.a_index(cell.a), spec.b_index(cell.b));
            cells.n[i][j][0] += mass * pi;
            cells.n[i][j][1] += mass * (1.0 - pi);
        }
    }
    return counts;
}

double population_outcome_rate(const GenerativeSpec& spec) {
    double rate = 0.0;
    for (const auto& atom : spec.context_law) {
        const auto& entry = ab_entry_for(spec, observed_projection(spec, atom));
        std::size_t w = static_cast<std::size_t>(spec.atom_index(atom.values));
        for (const auto& cell : entry.cells)
            rate += atom.prob * cell.prob *
                    (1.0 - pi_at(spec, w, spec.a_index(cell.a), spec.b_index(cell.b)));
    }
    return rate;
}

}  // namespace mechint
