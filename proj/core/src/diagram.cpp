#include "mechint/diagram.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <sstream>

namespace mechint {

namespace {

bool valid_token(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

}  // namespace

ParseError::ParseError(int line, const std::string& reason)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + reason : reason),
      line_(line) {}

InfluenceDiagram::InfluenceDiagram(std::vector<NodeDecl> nodes, std::vector<Edge> edges) {
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeDecl& a, const NodeDecl& b) { return a.name < b.name; });
    names_.reserve(nodes.size());
    kinds_.reserve(nodes.size());
    std::map<std::string, int> idx;
    for (const auto& n : nodes) {
        if (!valid_token(n.name))
            throw std::invalid_argument("invalid node name '" + n.name + "'");
        if (!idx.emplace(n.name, static_cast<int>(names_.size())).second)
            throw std::invalid_argument("duplicate node '" + n.name + "'");
        names_.push_back(n.name);
        kinds_.push_back(n.kind);
    }

    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    parents_.assign(names_.size(), {});
    children_.assign(names_.size(), {});
    for (const auto& e : edges) {
        auto p = idx.find(e.parent);
        auto c = idx.find(e.child);
        if (p == idx.end())
            throw std::invalid_argument("unknown node '" + e.parent + "' in edge");
        if (c == idx.end())
            throw std::invalid_argument("unknown node '" + e.child + "' in edge");
        if (kinds_[static_cast<std::size_t>(c->second)] == NodeKind::Regime)
            throw std::invalid_argument("regime node '" + e.child + "' cannot have a parent");
        parents_[static_cast<std::size_t>(c->second)].push_back(p->second);
        children_[static_cast<std::size_t>(p->second)].push_back(c->second);
    }
    edges_ = std::move(edges);

    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (kinds_[i] == NodeKind::Regime) {
            if (children_[i].empty())
                throw std::invalid_argument("regime node '" + names_[i] + "' has no children");
            for (int c : children_[i])
                if (kinds_[static_cast<std::size_t>(c)] == NodeKind::Regime)
                    throw std::invalid_argument("regime node '" + names_[i] +
                                                "' has a regime child '" + name(c) + "'");
        }
    }

    // Kahn's algorithm; leftover nodes mean a directed cycle.
    std::vector<int> in_degree(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i)
        in_degree[i] = static_cast<int>(parents_[i].size());
    std::deque<int> ready;
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (in_degree[i] == 0) ready.push_back(static_cast<int>(i));
    std::size_t removed = 0;
    while (!ready.empty()) {
        int n = ready.front();
        ready.pop_front();
        ++removed;
        for (int c : children_[static_cast<std::size_t>(n)])
            if (--in_degree[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    if (removed != names_.size()) throw std::invalid_argument("cycle detected");
}

bool InfluenceDiagram::has_node(const std::string& name) const {
    return std::binary_search(names_.begin(), names_.end(), name);
}

int InfluenceDiagram::index(const std::string& name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name)
        throw std::invalid_argument("unknown node '" + name + "'");
    return static_cast<int>(it - names_.begin());
}

NodeKind InfluenceDiagram::kind(const std::string& name) const {
    return kinds_[static_cast<std::size_t>(index(name))];
}

NodeSet InfluenceDiagram::ancestral_closure(const NodeSet& seeds) const {
    std::vector<bool> seen(names_.size(), false);
    std::deque<int> work;
    for (const auto& s : seeds) {
        int i = index(s);
        if (!seen[static_cast<std::size_t>(i)]) {
            seen[static_cast<std::size_t>(i)] = true;
            work.push_back(i);
        }
    }
    while (!work.empty()) {
        int n = work.front();
        work.pop_front();
        for (int p : parents_[static_cast<std::size_t>(n)]) {
            if (!seen[static_cast<std::size_t>(p)]) {
                seen[static_cast<std::size_t>(p)] = true;
                work.push_back(p);
            }
        }
    }
    NodeSet out;
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (seen[i]) out.insert(names_[i]);
    return out;
}

NodeSet InfluenceDiagram::descendants(const std::string& name) const {
    std::vector<bool> seen(names_.size(), false);
    std::deque<int> work{index(name)};
    NodeSet out;
    while (!work.empty()) {
        int n = work.front();
        work.pop_front();
        for (int c : children_[static_cast<std::size_t>(n)]) {
            if (!seen[static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(c)] = true;
                out.insert(names_[static_cast<std::size_t>(c)]);
                work.push_back(c);
            }
        }
    }
    out.erase(name);
    return out;
}

UndirectedGraph::UndirectedGraph(std::vector<std::string> nodes,
                                 std::set<std::pair<std::string, std::string>> edges) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    nodes_ = std::move(nodes);
    adjacency_.assign(nodes_.size(), {});
    for (auto e : edges) {
        if (e.second < e.first) std::swap(e.first, e.second);
        if (e.first == e.second) continue;
        int a = index_of(e.first);
        int b = index_of(e.second);
        if (a < 0 || b < 0)
            throw std::invalid_argument("edge endpoint not in node set: " + e.first + "-" + e.second);
        edges_.emplace_back(e.first, e.second);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const auto& [a, b] : edges_) {
        adjacency_[static_cast<std::size_t>(index_of(a))].push_back(index_of(b));
        adjacency_[static_cast<std::size_t>(index_of(b))].push_back(index_of(a));
    }
}

int UndirectedGraph::index_of(const std::string& name) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), name);
    if (it == nodes_.end() || *it != name) return -1;
    return static_cast<int>(it - nodes_.begin());
}

bool UndirectedGraph::has_edge(const std::string& a, const std::string& b) const {
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    return std::binary_search(edges_.begin(), edges_.end(), key);
}

bool UndirectedGraph::separates(const NodeSet& blockers, const NodeSet& from,
                                const NodeSet& to) const {
    std::vector<bool> blocked(nodes_.size(), false);
    for (const auto& b : blockers) {
        int i = index_of(b);
        if (i >= 0) blocked[static_cast<std::size_t>(i)] = true;
    }
    std::vector<bool> target(nodes_.size(), false);
    for (const auto& t : to) {
        int i = index_of(t);
        if (i >= 0) target[static_cast<std::size_t>(i)] = true;
    }
    std::vector<bool> seen(nodes_.size(), false);
    std::deque<int> work;
    for (const auto& f : from) {
        int i = index_of(f);
        if (i < 0 || blocked[static_cast<std::size_t>(i)]) continue;
        if (target[static_cast<std::size_t>(i)]) return false;
        seen[static_cast<std::size_t>(i)] = true;
        work.push_back(i);
    }
    while (!work.empty()) {
        int n = work.front();
        work.pop_front();
        for (int m : adjacency_[static_cast<std::size_t>(n)]) {
            if (seen[static_cast<std::size_t>(m)] || blocked[static_cast<std::size_t>(m)]) continue;
            if (target[static_cast<std::size_t>(m)]) return false;
            seen[static_cast<std::size_t>(m)] = true;
            work.push_back(m);
        }
    }
    return true;
}

namespace {

// Splits a comma-separated children list.
std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && issp(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

}  // namespace

InfluenceDiagram parse_diagram(std::string_view text) {
    std::vector<NodeDecl> nodes;
    std::vector<Edge> edges;
    std::map<std::string, std::pair<NodeKind, int>> declared;  // name -> (kind, line)
    struct PendingEdge {
        Edge e;
        int line;
        bool from_regime_decl;
    };
    std::vector<PendingEdge> pending;

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
        std::string line = trim(raw);
        if (line.empty()) continue;

        std::istringstream ls(line);
        std::string keyword;
        ls >> keyword;
        std::string rest = trim(line.substr(keyword.size()));

        if (keyword == "node") {
            if (!valid_token(rest))
                throw ParseError(lineno, "expected 'node <name>'");
            if (declared.count(rest))
                throw ParseError(lineno, "duplicate node '" + rest + "'");
            declared[rest] = {NodeKind::Stochastic, lineno};
            nodes.push_back({rest, NodeKind::Stochastic});
        } else if (keyword == "edge" || keyword == "regime") {
            auto arrow = rest.find("->");
            if (arrow == std::string::npos)
                throw ParseError(lineno, "expected '" + keyword + " <name> -> <name>'");
            std::string lhs = trim(rest.substr(0, arrow));
            std::string rhs = trim(rest.substr(arrow + 2));
            if (!valid_token(lhs))
                throw ParseError(lineno, "invalid node name '" + lhs + "'");
            if (keyword == "edge") {
                if (!valid_token(rhs))
                    throw ParseError(lineno, "invalid node name '" + rhs + "'");
                pending.push_back({{lhs, rhs}, lineno, false});
            } else {
                if (declared.count(lhs))
                    throw ParseError(lineno, "duplicate node '" + lhs + "'");
                declared[lhs] = {NodeKind::Regime, lineno};
                nodes.push_back({lhs, NodeKind::Regime});
                bool any = false;
                for (const auto& part : split_list(rhs)) {
                    std::string child = trim(part);
                    if (!valid_token(child))
                        throw ParseError(lineno, "invalid node name '" + child + "'");
                    pending.push_back({{lhs, child}, lineno, true});
                    any = true;
                }
                if (!any)
                    throw ParseError(lineno, "regime '" + lhs + "' declares no children");
            }
        } else {
            throw ParseError(lineno, "unknown statement '" + keyword + "'");
        }
    }

    for (const auto& p : pending) {
        auto parent = declared.find(p.e.parent);
        auto child = declared.find(p.e.child);
        if (parent == declared.end())
            throw ParseError(p.line, "unknown node '" + p.e.parent + "' in edge");
        if (child == declared.end())
            throw ParseError(p.line, "unknown node '" + p.e.child + "' in edge");
        if (child->second.first == NodeKind::Regime)
            throw ParseError(p.line, "regime node '" + p.e.child + "' cannot have a parent");
        edges.push_back(p.e);
    }

    try {
        return InfluenceDiagram(std::move(nodes), std::move(edges));
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, e.what());  // cycles have no single offending line
    }
}

namespace {

void validate_query(const InfluenceDiagram& d, const CiQuery& q) {
    for (const auto* s : {&q.left, &q.right, &q.given})
        for (const auto& n : *s)
            if (!d.has_node(n)) throw std::invalid_argument("unknown node '" + n + "' in query");
    NodeSet seen;
    for (const auto* s : {&q.left, &q.right, &q.given})
        for (const auto& n : *s)
            if (!seen.insert(n).second)
                throw std::invalid_argument("overlapping query sets: node '" + n + "'");
}

}  // namespace

UndirectedGraph moralize(const InfluenceDiagram& d, const NodeSet& targets) {
    NodeSet closure = d.ancestral_closure(targets);
    std::set<std::pair<std::string, std::string>> edges;
    auto add = [&](const std::string& a, const std::string& b) {
        if (a < b)
            edges.emplace(a, b);
        else if (b < a)
            edges.emplace(b, a);
    };
    for (const auto& n : closure) {
        const auto& ps = d.parents(d.index(n));
        for (std::size_t i = 0; i < ps.size(); ++i) {
            add(d.name(ps[i]), n);
            for (std::size_t j = i + 1; j < ps.size(); ++j)
                add(d.name(ps[i]), d.name(ps[j]));
        }
    }
    return UndirectedGraph(std::vector<std::string>(closure.begin(), closure.end()),
                           std::move(edges));
}

bool d_separated(const InfluenceDiagram& d, const CiQuery& q) {
    validate_query(d, q);
    if (q.left.empty() || q.right.empty()) return true;
    NodeSet targets;
    targets.insert(q.left.begin(), q.left.end());
    targets.insert(q.right.begin(), q.right.end());
    targets.insert(q.given.begin(), q.given.end());
    UndirectedGraph moral = moralize(d, targets);
    return moral.separates(q.given, q.left, q.right);
}

namespace {

// Depth-first enumeration of simple paths x..y over the DAG skeleton,
// testing the usual openness rule at every interior node: chains and forks
// are open iff the node is outside the conditioning set, colliders iff the
// node or one of its descendants is inside it.  A junction at node v is a
// collider exactly when both incident path edges point into v.
class PathOracle {
public:
    PathOracle(const InfluenceDiagram& d, const NodeSet& given) : d_(d) {
        std::size_t n = d.node_count();
        given_.assign(n, false);
        for (const auto& g : given) given_[static_cast<std::size_t>(d.index(g))] = true;
        collider_open_.assign(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            if (given_[i]) {
                collider_open_[i] = true;
                continue;
            }
            for (const auto& desc : d.descendants(d.name(static_cast<int>(i)))) {
                if (given_[static_cast<std::size_t>(d.index(desc))]) {
                    collider_open_[i] = true;
                    break;
                }
            }
        }
    }

    bool connected(int x, int y) {
        target_ = y;
        on_path_.assign(d_.node_count(), false);
        on_path_[static_cast<std::size_t>(x)] = true;
        return extend(x, /*arrived_inward=*/false, /*at_start=*/true);
    }

private:
    // `arrived_inward` is true when the path edge we used to reach `node`
    // points into it (making `node` a potential collider junction).
    bool extend(int node, bool arrived_inward, bool at_start) {
        auto ni = static_cast<std::size_t>(node);
        // Leave via an outgoing edge node -> c: `node` acts as chain or fork.
        bool non_collider_open = at_start || !given_[ni];
        if (non_collider_open) {
            for (int c : d_.children(node))
                if (step_to(c, /*arrived_inward=*/true)) return true;
        }
        // Leave via an incoming edge p -> node: collider junction iff we also
        // arrived through an edge pointing into `node`.
        bool open_towards_parent =
            at_start || (arrived_inward ? collider_open_[ni] : !given_[ni]);
        if (open_towards_parent) {
            for (int p : d_.parents(node))
                if (step_to(p, /*arrived_inward=*/false)) return true;
        }
        return false;
    }

    bool step_to(int next, bool arrived_inward) {
        if (next == target_) return true;
        auto i = static_cast<std::size_t>(next);
        if (on_path_[i]) return false;
        on_path_[i] = true;
        bool found = extend(next, arrived_inward, false);
        on_path_[i] = false;
        return found;
    }

    const InfluenceDiagram& d_;
    std::vector<bool> given_;
    std::vector<bool> collider_open_;
    std::vector<bool> on_path_;
    int target_ = -1;
};

}  // namespace

bool d_separated_oracle(const InfluenceDiagram& d, const CiQuery& q) {
    if (d.node_count() > 12)
        throw std::invalid_argument("d_separated_oracle: diagram exceeds 12 nodes");
    validate_query(d, q);
    if (q.left.empty() || q.right.empty()) return true;
    PathOracle oracle(d, q.given);
    for (const auto& x : q.left)
        for (const auto& y : q.right)
            if (oracle.connected(d.index(x), d.index(y))) return false;
    return true;
}

}  // namespace mechint
