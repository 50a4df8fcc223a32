#pragma once
#include <deque>
#include <set>
#include <sstream>

#include "module.hpp"

namespace saguaro {

// Canonical layered labeled graph of a module relative to its marked tops.
// Breadth-first over (node, arrow) in deterministic order; a new basis line
// becomes a node placed at its radical layer, a dependent single-line image
// becomes an amalgam edge. Dependencies spread over several nodes only occur
// outside the canonical regimes and flag the graph as best-effort.
template <class F>
LayeredGraph graph_of(const Module<F>& m) {
    const F& f = m.fld();
    if (m.tops.empty() && m.total_dim() > 0)
        throw refusal("graph_of requires marked top elements");
    if (!m.tops_generate())
        throw refusal("marked tops do not generate the module");

    auto filt = m.radical_filtration();

    LayeredGraph g;
    bool multi_line_event = false;

    struct NodeElem {
        VElem<F> elem;
        int id;
    };
    std::vector<NodeElem> nodes;
    // per-vertex: RREF span of node elements + raw rows for coordinates
    std::vector<Mat<F>> span, raw;
    std::vector<std::vector<int>> raw_node; // node id per raw row
    span.reserve(m.dims.size());
    for (size_t v = 0; v < m.dims.size(); ++v) {
        span.emplace_back(0, v == 0 ? 0 : m.dims[v], f);
        raw.emplace_back(0, v == 0 ? 0 : m.dims[v], f);
        raw_node.emplace_back();
    }

    auto add_node = [&](const VElem<F>& x) {
        int id = static_cast<int>(nodes.size());
        nodes.push_back({x, id});
        g.nodes.push_back({id, m.layer_of(x, filt), x.vertex});
        Mat<F> tmp = span[x.vertex];
        tmp.append_row(x.v);
        rref(tmp, f);
        span[x.vertex] = tmp;
        raw[x.vertex].append_row(x.v);
        raw_node[x.vertex].push_back(id);
        return id;
    };

    for (const auto& t : m.tops) {
        check_internal(!t.zero(f), "zero marked top");
        int id = add_node(t);
        g.tops.push_back(id);
    }

    size_t next = 0;
    while (next < nodes.size()) {
        auto cur = nodes[next++];
        for (size_t ai = 0; ai < m.arrows.size(); ++ai) {
            const auto& ar = m.alg->quiver().arrows[ai];
            if (ar.source != cur.elem.vertex)
                continue;
            auto img = m.act(static_cast<int>(ai), cur.elem);
            if (img.zero(f))
                continue;
            if (!in_span(span[img.vertex], img.v, f)) {
                int nid = add_node(img);
                g.edges.push_back({cur.id, nid, static_cast<int>(ai)});
            } else {
                // coordinates over existing node elements at this vertex
                Mat<F> sys(raw[img.vertex].cols, raw[img.vertex].rows, f);
                for (int r = 0; r < raw[img.vertex].rows; ++r)
                    for (int c = 0; c < raw[img.vertex].cols; ++c)
                        sys.at(c, r) = raw[img.vertex].at(r, c);
                auto coords = solve(sys, img.v, f);
                check_internal(coords.has_value(), "dependent image without coordinates");
                std::vector<int> support;
                for (size_t k = 0; k < coords->size(); ++k)
                    if (!f.is_zero((*coords)[k]))
                        support.push_back(raw_node[img.vertex][k]);
                if (support.size() != 1)
                    multi_line_event = true;
                for (int nid : support)
                    g.edges.push_back({cur.id, nid, static_cast<int>(ai)});
            }
        }
    }

    check_internal(static_cast<int>(nodes.size()) == m.total_dim(),
                   "graph node count differs from module dimension");
    bool regime_canonical = m.alg->is_monomial(); // finite-Vp callers may override
    g.canonical = regime_canonical && !multi_line_event;
    return g;
}

template <class F>
struct GraphRealization {
    bool ok = false;
    Module<F> mod;
    std::string certificate; // on refusal
    LayeredGraph computed;
};

// Convert a validated layered graph into a generators-and-relations spec and
// check the realized module reproduces the graph.
template <class F>
GraphRealization<F> realize_graph(const Algebra<F>& a, const LayeredGraph& g) {
    validate_graph(g, a.pres);
    GraphRealization<F> out;

    std::map<int, const LayeredGraph::Node*> byid;
    for (const auto& n : g.nodes)
        byid[n.id] = &n;
    std::vector<int> tops = g.tops;
    if (tops.empty())
        for (const auto& n : g.nodes)
            if (n.layer == 0)
                tops.push_back(n.id);
    if (tops.empty())
        throw input_error("graph has no layer-0 nodes");

    // spell the anchor path of every node: BFS from tops along down-edges
    std::map<int, std::pair<int, Path>> anchor; // node -> (top index, word)
    std::map<int, int> node_pos;
    for (size_t i = 0; i < g.nodes.size(); ++i)
        node_pos[g.nodes[i].id] = static_cast<int>(i);

    ModuleSpec spec;
    for (size_t ti = 0; ti < tops.size(); ++ti) {
        const auto* n = byid.at(tops[ti]);
        spec.gens.emplace_back("x" + std::to_string(ti + 1), n->vertex);
        anchor[n->id] = {static_cast<int>(ti), Path::trivial(n->vertex)};
    }

    std::deque<int> queue(tops.begin(), tops.end());
    std::vector<std::vector<std::pair<int, Path>>> extra_inpaths(g.nodes.size());
    while (!queue.empty()) {
        int uid = queue.front();
        queue.pop_front();
        auto [ti, w] = anchor.at(uid);
        // deterministic edge order: as listed
        std::map<int, std::vector<int>> out_by_arrow;
        for (const auto& e : g.edges)
            if (e.up == uid)
                out_by_arrow[e.arrow].push_back(e.down);
        for (const auto& [arrow, downs] : out_by_arrow) {
            if (downs.size() > 1)
                throw input_error("node " + std::to_string(uid) +
                                  " has two down-edges with the same arrow label");
            int did = downs[0];
            Path wa = w;
            wa.word.push_back(arrow);
            if (!anchor.count(did)) {
                anchor[did] = {ti, wa};
                queue.push_back(did);
            } else {
                extra_inpaths[node_pos[did]].push_back({ti, wa});
            }
        }
    }
    for (const auto& n : g.nodes)
        if (!anchor.count(n.id))
            throw input_error("node " + std::to_string(n.id) +
                              " is not reachable from any top (tops do not generate)");

    // relators: amalgam equalities, then kills for unrecorded arrow steps
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        int nid = g.nodes[i].id;
        auto [ati, aw] = anchor.at(nid);
        for (const auto& [ti, w] : extra_inpaths[i]) {
            std::vector<ModuleSpecTerm> rel;
            rel.push_back({Scalar{1, 1}, aw, ati});
            rel.push_back({Scalar{-1, 1}, w, ti});
            spec.relators.push_back(rel);
        }
    }
    for (const auto& n : g.nodes) {
        auto [ti, w] = anchor.at(n.id);
        std::set<int> recorded;
        for (const auto& e : g.edges)
            if (e.up == n.id)
                recorded.insert(e.arrow);
        for (int ai : a.quiver().arrows_from(n.vertex)) {
            if (recorded.count(ai))
                continue;
            Path wa = w;
            wa.word.push_back(ai);
            if (wa.length() >= a.pres.loewy_bound)
                continue; // already zero
            spec.relators.push_back({{Scalar{1, 1}, wa, ti}});
        }
    }

    Module<F> m;
    try {
        m = realize_spec(a, spec);
    } catch (const refusal& r) {
        out.ok = false;
        out.certificate = std::string("realization failed: ") + r.what();
        return out;
    }

    auto computed = graph_of(m);
    out.computed = computed;
    if (!graphs_equivalent(computed, g)) {
        auto want = g.layer_dims(), got = computed.layer_dims();
        std::ostringstream cert;
        cert << "realized module does not reproduce the graph;";
        size_t L = std::max(want.size(), got.size());
        for (size_t l = 0; l < L; ++l) {
            int w = l < want.size() ? want[l] : 0;
            int h = l < got.size() ? got[l] : 0;
            if (w != h) {
                cert << " first mismatch at layer " << l << " (wanted " << w << " nodes, got "
                     << h << ")";
                break;
            }
        }
        out.ok = false;
        out.certificate = cert.str();
        return out;
    }
    out.ok = true;
    out.mod = std::move(m);
    return out;
}

inline std::string graph_to_dot(const LayeredGraph& g, const Quiver& q) {
    std::ostringstream os;
    os << "graph module {\n  rankdir=TB;\n  node [shape=plaintext];\n";
    std::map<int, std::vector<int>> by_layer;
    for (const auto& n : g.nodes) {
        os << "  n" << n.id << " [label=\"" << n.vertex << "\"];\n";
        by_layer[n.layer].push_back(n.id);
    }
    for (const auto& [l, ids] : by_layer) {
        os << "  { rank=same;";
        for (int id : ids)
            os << " n" << id << ";";
        os << " }\n";
    }
    for (const auto& e : g.edges)
        os << "  n" << e.up << " -- n" << e.down << " [label=\"" << q.arrows[e.arrow].name
           << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace saguaro
