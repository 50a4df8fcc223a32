#pragma once
#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"

namespace saguaro {

struct Arrow {
    std::string name;
    int source = 0; // vertex ids are 1-based, matching the diagrams
    int target = 0;
};

struct Quiver {
    int num_vertices = 0;
    std::vector<Arrow> arrows;
    std::map<std::string, int> arrow_index;

    bool valid_vertex(int v) const { return v >= 1 && v <= num_vertices; }

    int add_arrow(const std::string& name, int s, int t) {
        if (!valid_vertex(s) || !valid_vertex(t))
            throw input_error("arrow '" + name + "' references undeclared vertex");
        if (arrow_index.count(name))
            throw input_error("duplicate arrow name '" + name + "'");
        arrow_index[name] = static_cast<int>(arrows.size());
        arrows.push_back({name, s, t});
        return static_cast<int>(arrows.size()) - 1;
    }

    bool has_double_arrows() const {
        std::set<std::pair<int, int>> seen;
        for (const auto& a : arrows)
            if (!seen.insert({a.source, a.target}).second)
                return true;
        return false;
    }

    std::vector<int> arrows_from(int v) const {
        std::vector<int> out;
        for (size_t i = 0; i < arrows.size(); ++i)
            if (arrows[i].source == v)
                out.push_back(static_cast<int>(i));
        return out;
    }
    std::vector<int> arrows_into(int v) const {
        std::vector<int> out;
        for (size_t i = 0; i < arrows.size(); ++i)
            if (arrows[i].target == v)
                out.push_back(static_cast<int>(i));
        return out;
    }
};

// A path: trivial at `source`, or a sequence of arrow indices in application
// order (arrows[0] acts first). "p after q" concatenates q's word then p's.
struct Path {
    int source = 0;
    std::vector<int> word;

    static Path trivial(int v) { return Path{v, {}}; }

    int length() const { return static_cast<int>(word.size()); }
    bool is_trivial() const { return word.empty(); }

    int target(const Quiver& q) const {
        return word.empty() ? source : q.arrows[word.back()].target;
    }

    bool composable(const Quiver& q) const {
        int at = source;
        for (int a : word) {
            if (q.arrows[a].source != at)
                return false;
            at = q.arrows[a].target;
        }
        return true;
    }

    // this after other
    Path after(const Path& other, const Quiver& q) const {
        check_internal(other.target(q) == source, "composing non-adjacent paths");
        Path p = other;
        p.word.insert(p.word.end(), word.begin(), word.end());
        return p;
    }

    // Right subpath of length k: u with p = v u (the first k arrows applied).
    Path right_subpath(int k) const {
        Path p;
        p.source = source;
        p.word.assign(word.begin(), word.begin() + k);
        return p;
    }
    // Left remainder after removing the right subpath of length k.
    Path left_part(int k, const Quiver& q) const {
        Path p;
        p.source = right_subpath(k).target(q);
        p.word.assign(word.begin() + k, word.end());
        return p;
    }

    bool operator==(const Path& o) const { return source == o.source && word == o.word; }
    bool operator<(const Path& o) const {
        return std::tie(source, word) < std::tie(o.source, o.word);
    }

    // Display in composition order: last-applied arrow first, '*' = "after".
    std::string str(const Quiver& q) const {
        if (word.empty())
            return "e" + std::to_string(source);
        std::string s;
        for (auto it = word.rbegin(); it != word.rend(); ++it) {
            if (!s.empty())
                s += "*";
            s += q.arrows[*it].name;
        }
        return s;
    }
};

// Is `u` a right subpath of `p` (p = v u)?
inline bool is_right_subpath(const Path& u, const Path& p) {
    if (u.source != p.source || u.length() > p.length())
        return false;
    return std::equal(u.word.begin(), u.word.end(), p.word.begin());
}

struct Scalar {
    long num = 1;
    long den = 1;
};

struct RelationTerm {
    Scalar coeff;
    Path path;
};

// Linear combination of parallel paths, each of length >= 2.
struct Relation {
    std::vector<RelationTerm> terms;
};

struct Presentation {
    Quiver quiver;
    std::vector<Relation> relations;
    int loewy_bound = 2;

    bool is_monomial() const {
        for (const auto& r : relations)
            if (r.terms.size() > 1)
                return false;
        return true;
    }

    void validate() const {
        if (loewy_bound < 2)
            throw input_error("loewy bound must be >= 2");
        for (const auto& r : relations) {
            if (r.terms.empty())
                throw input_error("empty relation");
            int src = r.terms[0].path.source;
            int tgt = r.terms[0].path.target(quiver);
            for (const auto& t : r.terms) {
                if (!t.path.composable(quiver))
                    throw input_error("non-composable path in relation");
                if (t.path.length() < 2)
                    throw input_error("relation path of length < 2 (not admissible)");
                if (t.path.length() >= loewy_bound)
                    throw input_error("relation path at or beyond the loewy bound survived pruning");
                if (t.path.source != src || t.path.target(quiver) != tgt)
                    throw input_error("relation terms are not parallel");
                if (t.coeff.num == 0)
                    throw input_error("zero scalar in relation");
            }
        }
    }
};

// Generators-and-relations module presentation over a fixed algebra.
struct ModuleSpecTerm {
    Scalar coeff;
    Path path;
    int gen = 0; // index into gens
};

struct ModuleSpec {
    std::vector<std::pair<std::string, int>> gens; // (name, vertex)
    std::vector<std::vector<ModuleSpecTerm>> relators;

    int gen_index(const std::string& name) const {
        for (size_t i = 0; i < gens.size(); ++i)
            if (gens[i].first == name)
                return static_cast<int>(i);
        return -1;
    }

    void validate(const Quiver& q) const {
        std::set<std::string> names;
        for (const auto& g : gens) {
            if (!names.insert(g.first).second)
                throw input_error("duplicate generator name '" + g.first + "'");
            if (!q.valid_vertex(g.second))
                throw input_error("generator '" + g.first + "' at undeclared vertex");
        }
        for (const auto& rel : relators) {
            if (rel.empty())
                throw input_error("empty module relator");
            int tgt = -1;
            for (const auto& t : rel) {
                const auto& g = gens[t.gen];
                if (t.path.source != g.second)
                    throw input_error("path " + t.path.str(q) + " does not start at generator '" +
                                      g.first + "' (vertex " + std::to_string(g.second) + ")");
                if (!t.path.composable(q))
                    throw input_error("non-composable path in module relator");
                int e = t.path.target(q);
                if (tgt == -1)
                    tgt = e;
                else if (tgt != e)
                    throw input_error("module relator terms end at different vertices");
            }
        }
    }
};

// The paper's layered labeled graphs. Layers are radical layers; an edge
// (up, down, arrow) means arrow * (up's element) generates down's line, and
// may descend more than one layer (e.g. Example 1.1's two-layer curves).
struct LayeredGraph {
    struct Node {
        int id = 0;
        int layer = 0;
        int vertex = 0;
    };
    struct Edge {
        int up = 0;
        int down = 0;
        int arrow = -1; // index into quiver arrows
    };
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<int> tops; // ids of marked layer-0 nodes
    bool canonical = true; // graph_of clears this outside the canonical regimes

    const Node* find(int id) const {
        for (const auto& n : nodes)
            if (n.id == id)
                return &n;
        return nullptr;
    }

    std::vector<int> layer_dims() const {
        std::vector<int> d;
        for (const auto& n : nodes) {
            if (static_cast<int>(d.size()) <= n.layer)
                d.resize(n.layer + 1, 0);
            d[n.layer]++;
        }
        return d;
    }
};

// Label/layer-preserving undirected-graph isomorphism. Layers orient the
// edges, so a straightforward backtracking match over layer/vertex classes.
inline bool graphs_equivalent(const LayeredGraph& g1, const LayeredGraph& g2) {
    if (g1.nodes.size() != g2.nodes.size() || g1.edges.size() != g2.edges.size())
        return false;

    auto signature = [](const LayeredGraph& g) {
        std::vector<std::tuple<int, int>> sig;
        for (const auto& n : g.nodes)
            sig.emplace_back(n.layer, n.vertex);
        std::sort(sig.begin(), sig.end());
        return sig;
    };
    if (signature(g1) != signature(g2))
        return false;

    int n = static_cast<int>(g1.nodes.size());
    std::map<int, int> idx1, idx2;
    for (int i = 0; i < n; ++i) {
        idx1[g1.nodes[i].id] = i;
        idx2[g2.nodes[i].id] = i;
    }
    // adjacency with labels, as sorted multisets per node
    auto adj = [&](const LayeredGraph& g, const std::map<int, int>& idx) {
        std::vector<std::vector<std::tuple<int, int, bool>>> a(n); // (other, arrow, is_down)
        for (const auto& e : g.edges) {
            int u = idx.at(e.up), d = idx.at(e.down);
            a[u].emplace_back(d, e.arrow, true);
            a[d].emplace_back(u, e.arrow, false);
        }
        return a;
    };
    auto a1 = adj(g1, idx1), a2 = adj(g2, idx2);

    // candidate classes by (layer, vertex, degree)
    std::vector<int> match(n, -1), used(n, 0);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    // match high-degree nodes first
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return a1[x].size() > a1[y].size();
    });

    std::function<bool(size_t)> rec = [&](size_t k) -> bool {
        if (k == order.size())
            return true;
        int u = order[k];
        for (int v = 0; v < n; ++v) {
            if (used[v])
                continue;
            if (g1.nodes[u].layer != g2.nodes[v].layer || g1.nodes[u].vertex != g2.nodes[v].vertex)
                continue;
            if (a1[u].size() != a2[v].size())
                continue;
            // consistency with already-matched neighbours
            bool ok = true;
            for (const auto& [w, arrow, down] : a1[u]) {
                if (match[w] < 0)
                    continue;
                bool found = false;
                for (const auto& [w2, arrow2, down2] : a2[v])
                    if (w2 == match[w] && arrow2 == arrow && down2 == down) {
                        found = true;
                        break;
                    }
                if (!found) {
                    ok = false;
                    break;
                }
            }
            // multiset of (layer, vertex, arrow, dir) of neighbours must agree
            if (ok) {
                auto profile = [&](const std::vector<std::tuple<int, int, bool>>& lst,
                                   const LayeredGraph& g) {
                    std::vector<std::tuple<int, int, int, bool>> p;
                    for (const auto& [w, arrow, down] : lst)
                        p.emplace_back(g.nodes[w].layer, g.nodes[w].vertex, arrow, down);
                    std::sort(p.begin(), p.end());
                    return p;
                };
                if (profile(a1[u], g1) != profile(a2[v], g2))
                    ok = false;
            }
            if (!ok)
                continue;
            match[u] = v;
            used[v] = 1;
            if (rec(k + 1))
                return true;
            match[u] = -1;
            used[v] = 0;
        }
        return false;
    };
    return rec(0);
}

// Cheap invariant key for bucketing graphs before the full equivalence test.
inline std::string graph_key(const LayeredGraph& g) {
    std::vector<std::string> nodesig;
    std::map<int, std::pair<int, int>> info;
    for (const auto& n : g.nodes)
        info[n.id] = {n.layer, n.vertex};
    for (const auto& n : g.nodes) {
        std::vector<std::string> inc;
        for (const auto& e : g.edges) {
            if (e.up == n.id)
                inc.push_back("d" + std::to_string(e.arrow) + ":" +
                              std::to_string(info[e.down].first) + "." +
                              std::to_string(info[e.down].second));
            if (e.down == n.id)
                inc.push_back("u" + std::to_string(e.arrow) + ":" +
                              std::to_string(info[e.up].first) + "." +
                              std::to_string(info[e.up].second));
        }
        std::sort(inc.begin(), inc.end());
        std::string s = std::to_string(n.layer) + "/" + std::to_string(n.vertex) + "[";
        for (const auto& x : inc)
            s += x + ",";
        s += "]";
        nodesig.push_back(s);
    }
    std::sort(nodesig.begin(), nodesig.end());
    std::string key;
    for (const auto& s : nodesig)
        key += s + ";";
    return key;
}

// Structural validation of a graph against a presentation (criterion 8's
// realizability is decided elsewhere, in realize_graph).
inline void validate_graph(const LayeredGraph& g, const Presentation& p) {
    std::map<int, const LayeredGraph::Node*> byid;
    for (const auto& n : g.nodes) {
        if (byid.count(n.id))
            throw input_error("duplicate node id " + std::to_string(n.id));
        if (!p.quiver.valid_vertex(n.vertex))
            throw input_error("node " + std::to_string(n.id) + " labels undeclared vertex");
        if (n.layer < 0)
            throw input_error("negative layer");
        byid[n.id] = &n;
    }
    for (const auto& e : g.edges) {
        if (!byid.count(e.up) || !byid.count(e.down))
            throw input_error("edge references missing node");
        if (e.arrow < 0 || e.arrow >= static_cast<int>(p.quiver.arrows.size()))
            throw input_error("edge labels unknown arrow");
        const auto& a = p.quiver.arrows[e.arrow];
        if (a.source != byid.at(e.up)->vertex || a.target != byid.at(e.down)->vertex)
            throw input_error("edge label '" + a.name + "' incompatible with vertex labels " +
                              std::to_string(byid.at(e.up)->vertex) + " -> " +
                              std::to_string(byid.at(e.down)->vertex));
        if (byid.at(e.down)->layer <= byid.at(e.up)->layer)
            throw input_error("edge does not descend");
    }
    for (int t : g.tops) {
        if (!byid.count(t))
            throw input_error("top mark on missing node");
        if (byid.at(t)->layer != 0)
            throw input_error("top mark on node outside layer 0");
    }
}

} // namespace saguaro
