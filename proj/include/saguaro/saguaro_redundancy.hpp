#pragma once
#include "saguaro.hpp"

namespace saguaro {

// ---- subsaguaros (Definition 8.3) ----

// Def 8.3(a) for an index subset: every outside trunk meets the sub-sum no
// higher than the common intersection of the chosen trunks.
template <class F>
bool is_subsaguaro_index_set(const Saguaro<F>& s, const std::vector<int>& I1) {
    const F& f = s.realized->fld();
    GradedSubspace<F> V = GradedSubspace<F>::empty(s.realized->dims, f);
    for (int i : I1)
        V = subspace_sum(V, s.trunk_images[i], f);
    GradedSubspace<F> common = s.trunk_images[I1[0]];
    for (size_t k = 1; k < I1.size(); ++k)
        common = subspace_intersect(common, s.trunk_images[I1[k]], f);
    for (int j = 0; j < s.trunk_count(); ++j) {
        if (std::find(I1.begin(), I1.end(), j) != I1.end())
            continue;
        auto meet = subspace_intersect(s.trunk_images[j], V, f);
        if (!subspace_contains(common, meet, f))
            return false;
    }
    return true;
}

// The sub-sum over an ascending index set, rebuilt as a saguaro in its own
// right (remark after Observation 6.4); verified against the submodule.
template <class F>
Saguaro<F> subsaguaro_extract(const Algebra<F>& a, const Saguaro<F>& s, const std::vector<int>& I,
                              std::mt19937_64& rng) {
    const F& f = a.fld;
    check_internal(!I.empty() && std::is_sorted(I.begin(), I.end()), "bad subsaguaro index set");
    std::vector<UniserialRecord<F>> trunks;
    for (int i : I)
        trunks.push_back(s.trunks[i]);
    std::vector<Link<F>> links;
    for (size_t k = 0; k + 1 < I.size(); ++k) {
        auto w = trunk_intersection(s, I[k], I[k + 1]);
        Link<F> L;
        L.q = w.a;
        L.qp = w.b;
        L.k = witness_scalar(s, w.a, I[k], w.b, I[k + 1]);
        links.push_back(L);
    }
    auto built = build_saguaro(a, trunks, links);
    if (std::holds_alternative<SaguaroRefusal<F>>(built))
        throw internal_error("subsaguaro extraction refused: " +
                             std::get<SaguaroRefusal<F>>(built).reason);
    auto sag = std::get<Saguaro<F>>(std::move(built));

    GradedSubspace<F> V = GradedSubspace<F>::empty(s.realized->dims, f);
    for (int i : I)
        V = subspace_sum(V, s.trunk_images[i], f);
    auto sub = submodule_from(*s.realized, V);
    auto subp = make_module<F>(std::move(sub.mod));
    check_internal(is_isomorphic(sag.realized, subp, rng).isomorphic,
                   "subsaguaro rebuild is not isomorphic to the sub-sum");
    return sag;
}

// ---- redundancy (Def 8.3(c), Lemma 8.4) ----

struct RedundancyWitness {
    bool redundant = false;
    std::vector<int> I1, I2; // matched orderings: T_{I1[j]} corresponds to T_{I2[j]}
    std::string certificate; // graph-pattern description when found that way
};

namespace detail {

// Try to extend t-hat_{1j} -> t-hat_{2j} to an isomorphism V1 -> V2 that fixes
// the total intersection D; all inside the ambient realized module.
template <class F>
bool subsaguaro_iso_works(const Saguaro<F>& s, const std::vector<int>& I1,
                          const std::vector<int>& I2) {
    const F& f = s.realized->fld();
    const Module<F>& T = *s.realized;
    int nv = T.num_vertices();

    GradedSubspace<F> V1 = GradedSubspace<F>::empty(T.dims, f);
    GradedSubspace<F> V2 = GradedSubspace<F>::empty(T.dims, f);
    for (int i : I1)
        V1 = subspace_sum(V1, s.trunk_images[i], f);
    for (int i : I2)
        V2 = subspace_sum(V2, s.trunk_images[i], f);
    if (V1.dim() != V2.dim())
        return false;

    // pair-closure in doubled coordinates
    std::vector<Mat<F>> graph;
    graph.emplace_back(0, 0, f);
    for (int v = 1; v <= nv; ++v)
        graph.emplace_back(0, 2 * T.dims[v], f);
    struct P {
        VElem<F> x, y;
    };
    std::deque<P> queue;
    bool consistent = true;
    auto push = [&](const VElem<F>& x, const VElem<F>& y) {
        if (!consistent)
            return;
        auto joint = x.v;
        joint.insert(joint.end(), y.v.begin(), y.v.end());
        auto res = reduce_mod(graph[x.vertex], joint, f);
        if (is_zero_vec<F>(res, f))
            return;
        bool xzero = true, yzero = true;
        for (int c = 0; c < T.dims[x.vertex]; ++c)
            if (!f.is_zero(res[c]))
                xzero = false;
        for (int c = 0; c < T.dims[x.vertex]; ++c)
            if (!f.is_zero(res[T.dims[x.vertex] + c]))
                yzero = false;
        if (xzero && !yzero) {
            consistent = false; // not well-defined
            return;
        }
        if (!xzero && yzero) {
            consistent = false; // not injective
            return;
        }
        graph[x.vertex].append_row(res);
        rref(graph[x.vertex], f);
        queue.push_back({x, y});
    };
    for (size_t j = 0; j < I1.size(); ++j)
        push(s.tops[I1[j]], s.tops[I2[j]]);
    while (consistent && !queue.empty()) {
        auto pr = queue.front();
        queue.pop_front();
        for (size_t ai = 0; ai < T.arrows.size(); ++ai) {
            if (T.alg->quiver().arrows[ai].source != pr.x.vertex)
                continue;
            push(T.act(static_cast<int>(ai), pr.x), T.act(static_cast<int>(ai), pr.y));
        }
    }
    if (!consistent)
        return false;
    int graph_dim = 0;
    for (int v = 1; v <= nv; ++v)
        graph_dim += graph[v].rows;
    if (graph_dim != V1.dim())
        return false; // did not exhaust V1 (cannot happen) or collapsed

    // the map must fix D = intersection of all chosen trunks
    GradedSubspace<F> D = s.trunk_images[I1[0]];
    for (int i : I1)
        D = subspace_intersect(D, s.trunk_images[i], f);
    for (int i : I2)
        D = subspace_intersect(D, s.trunk_images[i], f);
    for (int v = 1; v <= nv; ++v)
        for (int r = 0; r < D.part[v].rows; ++r) {
            auto d = D.part[v].row(r);
            auto joint = d;
            joint.insert(joint.end(), d.begin(), d.end());
            if (!in_span(graph[v], joint, f))
                return false;
        }
    return true;
}

inline void subsets_of_size(int m, int sz, std::vector<int>& cur, int start,
                            const std::function<void(const std::vector<int>&)>& emit) {
    if (static_cast<int>(cur.size()) == sz) {
        emit(cur);
        return;
    }
    for (int i = start; i < m; ++i) {
        cur.push_back(i);
        subsets_of_size(m, sz, cur, i + 1, emit);
        cur.pop_back();
    }
}

} // namespace detail

// Module-level redundancy search (Def 8.3(c)).
template <class F>
RedundancyWitness is_redundant_modules(const Algebra<F>& a, const Saguaro<F>& s,
                                       std::mt19937_64& rng) {
    const F& f = a.fld;
    int m = s.trunk_count();
    if (m > 10)
        throw refusal("redundancy search capped at 10 trunks, got " + std::to_string(m));
    RedundancyWitness out;
    if (m < 2)
        return out;

    // trunk isomorphism classes, to prune the ordering matches
    std::vector<int> cls(m, -1);
    int next_cls = 0;
    for (int i = 0; i < m; ++i) {
        if (cls[i] >= 0)
            continue;
        cls[i] = next_cls++;
        for (int j = i + 1; j < m; ++j)
            if (cls[j] < 0 &&
                is_isomorphic(s.trunks[i].module, s.trunks[j].module, rng).isomorphic)
                cls[j] = cls[i];
    }

    for (int sz = 1; 2 * sz <= m && !out.redundant; ++sz) {
        std::vector<int> c1;
        detail::subsets_of_size(m, sz, c1, 0,
            [&](const std::vector<int>& I1) {
                if (out.redundant)
                    return;
                if (!is_subsaguaro_index_set(s, I1))
                    return;
                std::vector<int> c2;
                detail::subsets_of_size(m, sz, c2, 0, [&](const std::vector<int>& I2raw) {
                    if (out.redundant)
                        return;
                    for (int x : I2raw)
                        for (int y : I1)
                            if (x == y)
                                return;
                    if (!is_subsaguaro_index_set(s, I2raw))
                        return;
                    // outside condition (c)
                    GradedSubspace<F> V1 = GradedSubspace<F>::empty(s.realized->dims, f);
                    GradedSubspace<F> V2 = GradedSubspace<F>::empty(s.realized->dims, f);
                    for (int i : I1)
                        V1 = subspace_sum(V1, s.trunk_images[i], f);
                    for (int i : I2raw)
                        V2 = subspace_sum(V2, s.trunk_images[i], f);
                    for (int k = 0; k < m; ++k) {
                        if (std::find(I1.begin(), I1.end(), k) != I1.end() ||
                            std::find(I2raw.begin(), I2raw.end(), k) != I2raw.end())
                            continue;
                        auto m1 = subspace_intersect(s.trunk_images[k], V1, f);
                        auto m2 = subspace_intersect(s.trunk_images[k], V2, f);
                        if (!subspaces_equal(m1, m2, f))
                            return;
                    }
                    // orderings of I2 with matching trunk classes
                    std::vector<int> I2 = I2raw;
                    std::sort(I2.begin(), I2.end());
                    do {
                        bool typed = true;
                        for (int j = 0; j < sz; ++j)
                            if (cls[I1[j]] != cls[I2[j]])
                                typed = false;
                        if (!typed)
                            continue;
                        if (detail::subsaguaro_iso_works(s, I1, I2)) {
                            out.redundant = true;
                            out.I1 = I1;
                            out.I2 = I2;
                            return;
                        }
                    } while (std::next_permutation(I2.begin(), I2.end()));
                });
            });
    }
    return out;
}

// Graph-level redundancy (Lemma 8.4): two equivalent above-components of some
// vertex a, contiguous to the rest only through a.
inline RedundancyWitness is_redundant_graph(const LayeredGraph& g) {
    RedundancyWitness out;
    int n = static_cast<int>(g.nodes.size());
    std::map<int, int> idx;
    for (int i = 0; i < n; ++i)
        idx[g.nodes[i].id] = i;

    for (const auto& a : g.nodes) {
        // connected components of g minus a
        std::map<int, int> comp;
        int nc = 0;
        for (const auto& nnode : g.nodes) {
            if (nnode.id == a.id || comp.count(nnode.id))
                continue;
            // BFS
            std::deque<int> q{nnode.id};
            comp[nnode.id] = nc;
            while (!q.empty()) {
                int u = q.front();
                q.pop_front();
                for (const auto& e : g.edges) {
                    if (e.up == a.id || e.down == a.id)
                        continue;
                    int other = -1;
                    if (e.up == u)
                        other = e.down;
                    else if (e.down == u)
                        other = e.up;
                    if (other >= 0 && !comp.count(other)) {
                        comp[other] = nc;
                        q.push_back(other);
                    }
                }
            }
            ++nc;
        }
        // above-components: touch a only through edges descending INTO a
        std::vector<bool> above(nc, true), touches(nc, false);
        for (const auto& e : g.edges) {
            if (e.down == a.id && comp.count(e.up)) {
                touches[comp[e.up]] = true;
            } else if (e.up == a.id && comp.count(e.down)) {
                above[comp[e.down]] = false; // hangs below a
                touches[comp[e.down]] = true;
            }
        }
        // build the component graphs including the pinned copy of a
        std::vector<LayeredGraph> cg(nc);
        for (int c = 0; c < nc; ++c) {
            if (!above[c] || !touches[c])
                continue;
            LayeredGraph& h = cg[c];
            for (const auto& nnode : g.nodes)
                if (nnode.id != a.id && comp.count(nnode.id) && comp[nnode.id] == c)
                    h.nodes.push_back(nnode);
            // pinned copy of a: shift the vertex label out of range so any
            // equivalence must match a to a
            h.nodes.push_back({a.id, a.layer, -1});
            for (const auto& e : g.edges) {
                bool upin = e.up != a.id && comp.count(e.up) && comp[e.up] == c;
                bool downin = e.down != a.id && comp.count(e.down) && comp[e.down] == c;
                if (upin && downin)
                    h.edges.push_back(e);
                else if (upin && e.down == a.id)
                    h.edges.push_back(e);
            }
        }
        for (int c1 = 0; c1 < nc; ++c1) {
            if (!above[c1] || !touches[c1])
                continue;
            for (int c2 = c1 + 1; c2 < nc; ++c2) {
                if (!above[c2] || !touches[c2])
                    continue;
                if (graphs_equivalent(cg[c1], cg[c2])) {
                    out.redundant = true;
                    out.certificate = "two equivalent above-components at node " +
                                      std::to_string(a.id) + " (layer " +
                                      std::to_string(a.layer) + ", vertex " +
                                      std::to_string(a.vertex) + ")";
                    return out;
                }
            }
        }
    }
    return out;
}

// Combined verdict; under finite-Vp both searches run and must agree.
template <class F>
RedundancyWitness is_redundant(const Algebra<F>& a, const Saguaro<F>& s, bool finite_vp,
                               std::mt19937_64& rng) {
    auto mod = is_redundant_modules(a, s, rng);
    if (finite_vp) {
        auto gr = is_redundant_graph(s.graph);
        check_internal(gr.redundant == mod.redundant,
                       "Lemma 8.4: module-level and graph-level redundancy disagree");
        if (gr.redundant)
            mod.certificate = gr.certificate;
    }
    return mod;
}

// ---- Theorem 8.1, step two: decompose into irredundant saguaros ----

template <class F>
std::vector<Saguaro<F>> decompose_saguaro(const Algebra<F>& a, const Saguaro<F>& s, bool finite_vp,
                                          std::mt19937_64& rng) {
    const F& f = a.fld;
    std::vector<Saguaro<F>> result;
    std::vector<Saguaro<F>> work{s};
    while (!work.empty()) {
        Saguaro<F> cur = std::move(work.back());
        work.pop_back();
        auto red = is_redundant(a, cur, finite_vp, rng);
        if (!red.redundant) {
            result.push_back(std::move(cur));
            continue;
        }
        const Module<F>& T = *cur.realized;
        int m = cur.trunk_count();

        // V = sum Lambda(t_{1i} - t_{2i}), W = sum of trunks outside I1
        std::vector<VElem<F>> diffs;
        for (size_t j = 0; j < red.I1.size(); ++j) {
            auto x = cur.tops[red.I1[j]];
            auto y = cur.tops[red.I2[j]];
            check_internal(x.vertex == y.vertex, "witness tops across vertices");
            auto d = x;
            for (size_t c = 0; c < d.v.size(); ++c)
                d.v[c] = f.sub(d.v[c], y.v[c]);
            diffs.push_back(d);
        }
        auto Vspace = T.generated_submodule(diffs);
        std::vector<int> rest;
        for (int i = 0; i < m; ++i)
            if (std::find(red.I1.begin(), red.I1.end(), i) == red.I1.end())
                rest.push_back(i);
        GradedSubspace<F> Wspace = GradedSubspace<F>::empty(T.dims, f);
        for (int i : rest)
            Wspace = subspace_sum(Wspace, cur.trunk_images[i], f);
        check_internal(subspace_intersect(Vspace, Wspace, f).dim() == 0 &&
                           Vspace.dim() + Wspace.dim() == T.total_dim(),
                       "Thm 8.1 proof: T != V (+) W");

        work.push_back(subsaguaro_extract(a, cur, rest, rng));

        // V as a sum of saguaros on the difference generators
        std::vector<ModulePtr<F>> piece_mods;
        std::vector<VElem<F>> piece_tops_sub;
        std::vector<GradedSubspace<F>> diff_subs;
        for (const auto& d : diffs)
            diff_subs.push_back(T.generated_submodule({d}));
        // connectivity of the difference trunks
        int k = static_cast<int>(diffs.size());
        std::vector<int> group(k, -1);
        int ng = 0;
        for (int i = 0; i < k; ++i) {
            if (group[i] >= 0)
                continue;
            group[i] = ng;
            std::deque<int> q{i};
            while (!q.empty()) {
                int u = q.front();
                q.pop_front();
                for (int j = 0; j < k; ++j)
                    if (group[j] < 0 &&
                        subspace_intersect(diff_subs[u], diff_subs[j], f).dim() > 0) {
                        group[j] = ng;
                        q.push_back(j);
                    }
            }
            ++ng;
        }
        for (int gidx = 0; gidx < ng; ++gidx) {
            std::vector<int> members;
            for (int i = 0; i < k; ++i)
                if (group[i] == gidx)
                    members.push_back(i);
            // trunk records for the difference uniserials
            std::vector<UniserialRecord<F>> trs;
            GradedSubspace<F> gspace = GradedSubspace<F>::empty(T.dims, f);
            for (int i : members)
                gspace = subspace_sum(gspace, diff_subs[i], f);
            for (int i : members) {
                auto sub = submodule_from(T, diff_subs[i]);
                Module<F> um = std::move(sub.mod);
                um.tops = {sub.restrict(diff_subs[i], diffs[i], f)};
                check_internal(is_uniserial(um), "difference trunk is not uniserial");
                auto mast = mast_of_uniserial(um);
                trs.push_back(verified_uniserial(make_module<F>(std::move(um)), mast));
            }
            // find an ordering realizing the group as one saguaro
            std::vector<int> order(members.size());
            std::iota(order.begin(), order.end(), 0);
            bool done = false;
            std::sort(order.begin(), order.end());
            do {
                std::vector<UniserialRecord<F>> trunks;
                std::vector<Link<F>> links;
                bool ok = true;
                for (size_t j = 0; j < order.size(); ++j)
                    trunks.push_back(trs[order[j]]);
                for (size_t j = 0; j + 1 < order.size() && ok; ++j) {
                    int x = members[order[j]], y = members[order[j + 1]];
                    auto meet = subspace_intersect(diff_subs[x], diff_subs[y], f);
                    if (meet.dim() == 0) {
                        ok = false;
                        break;
                    }
                    int dx = trs[order[j]].module->total_dim() - meet.dim();
                    int dy = trs[order[j + 1]].module->total_dim() - meet.dim();
                    Link<F> L;
                    L.q = trs[order[j]].mast.right_subpath(dx);
                    L.qp = trs[order[j + 1]].mast.right_subpath(dy);
                    auto ex = T.act_path(L.q, diffs[x]);
                    auto ey = T.act_path(L.qp, diffs[y]);
                    if (ex.zero(f) || ey.zero(f)) {
                        ok = false;
                        break;
                    }
                    Mat<F> sys(static_cast<int>(ey.v.size()), 1, f);
                    for (size_t r = 0; r < ey.v.size(); ++r)
                        sys.at(static_cast<int>(r), 0) = ey.v[r];
                    auto sol = solve(sys, ex.v, f);
                    if (!sol) {
                        ok = false;
                        break;
                    }
                    L.k = (*sol)[0];
                    links.push_back(L);
                }
                if (!ok)
                    continue;
                auto built = build_saguaro(a, trunks, links);
                if (std::holds_alternative<SaguaroRefusal<F>>(built))
                    continue;
                auto sag = std::get<Saguaro<F>>(std::move(built));
                auto sub = submodule_from(T, gspace);
                auto subp = make_module<F>(std::move(sub.mod));
                if (!is_isomorphic(sag.realized, subp, rng).isomorphic)
                    continue;
                work.push_back(std::move(sag));
                done = true;
                break;
            } while (std::next_permutation(order.begin(), order.end()));
            check_internal(done, "Thm 8.1 proof: V-piece is not a saguaro on the differences");
        }
    }

    // verification: the outputs sum to the input up to isomorphism
    std::vector<const Module<F>*> parts;
    for (const auto& r : result)
        parts.push_back(r.realized.get());
    auto total = make_module<F>(direct_sum<F>(parts));
    check_internal(is_isomorphic(total, s.realized, rng).isomorphic,
                   "decompose_saguaro outputs do not sum to the input");
    return result;
}

// ---- Theorem 8.1, step one: enumerate irredundant saguaros ----

struct EnumerationCaps {
    int max_pairs_per_vertex = 24;
    int max_components = 8;
    size_t max_total = 4096;
};

template <class F>
std::vector<Saguaro<F>> enumerate_irredundant(const Algebra<F>& a, std::mt19937_64& rng,
                                              EnumerationCaps caps = {}) {
    const F& f = a.fld;
    auto vp = check_finite_Vp(a, rng);
    if (!vp.holds)
        throw refusal("enumerate_irredundant requires the finite-variety hypothesis (Thm 5.6)");

    auto uniserials = enumerate_uniserials(a, rng);
    // index uniserials by mast (unique per mast under finite-Vp)
    std::map<std::string, const UniserialRecord<F>*> by_mast;
    for (const auto& u : uniserials) {
        auto key = u.mast.str(a.quiver()) + "@" + std::to_string(u.mast.source);
        check_internal(!by_mast.count(key), "finite-Vp: two uniserials share a mast");
        by_mast[key] = &u;
    }
    auto find_mast = [&](const Path& p) -> const UniserialRecord<F>* {
        auto it = by_mast.find(p.str(a.quiver()) + "@" + std::to_string(p.source));
        return it == by_mast.end() ? nullptr : it->second;
    };

    std::vector<Saguaro<F>> pool;
    std::vector<std::string> keys;
    auto try_add = [&](Saguaro<F>&& s) {
        auto key = graph_key(s.graph);
        for (size_t i = 0; i < pool.size(); ++i)
            if (keys[i] == key && graphs_equivalent(pool[i].graph, s.graph))
                return false;
        if (pool.size() >= caps.max_total)
            throw refusal("irredundant enumeration exceeded the cap of " +
                          std::to_string(caps.max_total));
        pool.push_back(std::move(s));
        keys.push_back(key);
        return true;
    };

    for (const auto& u : uniserials)
        try_add(expect_saguaro(build_saguaro<F>(a, {u}, {})));

    // socle vertex of a (connected) saguaro = end vertex of any trunk's mast
    auto socle_vertex = [&](const Saguaro<F>& s) {
        return s.trunks[0].mast.target(a.quiver());
    };

    bool changed = true;
    while (changed) {
        changed = false;
        size_t snapshot = pool.size();
        for (int v = 1; v <= a.num_vertices(); ++v) {
            // attachment pairs: (pool entry with socle w, arrow w -> v), all of
            // whose trunk extensions exist as uniserials
            struct PairRef {
                size_t comp;
                int arrow;
                std::vector<const UniserialRecord<F>*> ext;
            };
            std::vector<PairRef> pairs;
            for (int ai : a.quiver().arrows_into(v)) {
                int w = a.quiver().arrows[ai].source;
                for (size_t ci = 0; ci < snapshot; ++ci) {
                    if (socle_vertex(pool[ci]) != w)
                        continue;
                    std::vector<const UniserialRecord<F>*> ext;
                    bool ok = true;
                    for (const auto& t : pool[ci].trunks) {
                        Path e = t.mast;
                        e.word.push_back(ai);
                        if (e.length() >= a.pres.loewy_bound) {
                            ok = false;
                            break;
                        }
                        auto* rec = find_mast(e);
                        if (!rec) {
                            ok = false;
                            break;
                        }
                        ext.push_back(rec);
                    }
                    if (ok)
                        pairs.push_back({ci, ai, std::move(ext)});
                }
            }
            if (static_cast<int>(pairs.size()) > caps.max_pairs_per_vertex)
                throw refusal("attachment pool at vertex " + std::to_string(v) + " has " +
                              std::to_string(pairs.size()) + " pairs (cap " +
                              std::to_string(caps.max_pairs_per_vertex) + ")");
            // subsets of pairs
            int np = static_cast<int>(pairs.size());
            for (unsigned long mask = 1; mask < (1ul << np); ++mask) {
                if (__builtin_popcountl(mask) > caps.max_components)
                    continue;
                std::vector<UniserialRecord<F>> trunks;
                std::vector<Link<F>> links;
                bool first_comp = true;
                for (int b = 0; b < np; ++b) {
                    if (!(mask & (1ul << b)))
                        continue;
                    const auto& pr = pairs[b];
                    const Saguaro<F>& C = pool[pr.comp];
                    size_t base = trunks.size();
                    for (size_t ti = 0; ti < C.trunks.size(); ++ti)
                        trunks.push_back(*pr.ext[ti]);
                    for (size_t li = 0; li < C.links.size(); ++li)
                        links.push_back(C.links[li]); // right subpaths survive extension
                    if (!first_comp) {
                        Link<F> L;
                        L.q = trunks[base - 1].mast;
                        L.qp = trunks[base].mast;
                        L.k = f.one();
                        links.insert(links.begin() + (base - 1), L);
                    }
                    first_comp = false;
                }
                auto built = build_saguaro(a, trunks, links);
                if (std::holds_alternative<SaguaroRefusal<F>>(built))
                    continue;
                auto sag = std::get<Saguaro<F>>(std::move(built));
                if (is_redundant(a, sag, true, rng).redundant)
                    continue;
                if (try_add(std::move(sag)))
                    changed = true;
            }
        }
    }
    return pool;
}

} // namespace saguaro
