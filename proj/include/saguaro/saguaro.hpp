#pragma once
#include <variant>

#include "uniserial.hpp"

namespace saguaro {

// One gluing relation q_i t_i - k_i q'_{i+1} t_{i+1} between adjacent trunks.
template <class F>
struct Link {
    Path q;  // positive-length right subpath of mast_i
    Path qp; // positive-length right subpath of mast_{i+1}
    typename F::Elem k;
};

template <class F>
struct Saguaro {
    std::vector<UniserialRecord<F>> trunks;
    std::vector<Link<F>> links; // size m-1
    ModulePtr<F> realized;
    std::vector<VElem<F>> tops;                   // canonical sequence of top elements
    std::vector<GradedSubspace<F>> trunk_images;  // the submodules T-hat_i
    LayeredGraph graph;

    int trunk_count() const { return static_cast<int>(trunks.size()); }
    int length() const { return realized->total_dim(); }
};

template <class F>
struct SaguaroRefusal {
    int failing_index = -1;
    std::string reason;
};

template <class F>
using SaguaroBuild = std::variant<Saguaro<F>, SaguaroRefusal<F>>;

// Mast of a uniserial module relative to its marked top: a maximal path acting
// nonzero end to end (DFS over arrows with nonzero action).
template <class F>
Path mast_of_uniserial(const Module<F>& u) {
    check_internal(u.tops.size() == 1, "mast_of_uniserial needs a single marked top");
    const F& f = u.fld();
    int depth = u.total_dim() - 1;
    Path p = Path::trivial(u.tops[0].vertex);
    std::function<bool(VElem<F>&, Path&, int)> dfs = [&](VElem<F>& cur, Path& acc,
                                                         int remaining) -> bool {
        if (remaining == 0)
            return true;
        for (int ai : u.alg->quiver().arrows_from(cur.vertex)) {
            auto img = u.act(ai, cur);
            if (img.zero(f))
                continue;
            acc.word.push_back(ai);
            if (dfs(img, acc, remaining - 1))
                return true;
            acc.word.pop_back();
        }
        return false;
    };
    VElem<F> cur = u.tops[0];
    check_internal(dfs(cur, p, depth), "uniserial module without a full-length mast");
    return p;
}

// ---- construction (Definition 6.1) ----

template <class F>
SaguaroBuild<F> build_saguaro(const Algebra<F>& a, std::vector<UniserialRecord<F>> trunks,
                              std::vector<Link<F>> links) {
    const F& f = a.fld;
    int m = static_cast<int>(trunks.size());
    if (m < 1)
        throw input_error("a saguaro needs at least one trunk");
    if (static_cast<int>(links.size()) != m - 1)
        throw input_error("expected " + std::to_string(m - 1) + " links for " + std::to_string(m) +
                          " trunks");
    for (auto& t : trunks) {
        check_internal(t.module->alg == &a, "trunk over a different algebra");
        if (!verify_uniserial_with_mast(*t.module, t.mast))
            throw input_error("trunk is not uniserial with its declared mast");
    }

    // condition (i): links are positive-length right subpaths with nonzero action
    for (int i = 0; i + 1 < m; ++i) {
        const auto& L = links[i];
        if (L.q.length() < 1 || L.qp.length() < 1)
            return SaguaroRefusal<F>{i, "link paths must have positive length (U inside +JT_i)"};
        if (!is_right_subpath(L.q, trunks[i].mast))
            return SaguaroRefusal<F>{i, "q_" + std::to_string(i + 1) +
                                            " is not a right subpath of its mast"};
        if (!is_right_subpath(L.qp, trunks[i + 1].mast))
            return SaguaroRefusal<F>{i, "q'_" + std::to_string(i + 2) +
                                            " is not a right subpath of its mast"};
        if (L.q.target(a.quiver()) != L.qp.target(a.quiver()))
            return SaguaroRefusal<F>{i, "link paths end at different vertices"};
        if (f.is_zero(L.k))
            return SaguaroRefusal<F>{i, "zero link scalar"};
        auto x = trunks[i].module->act_path(L.q, trunks[i].module->tops[0]);
        auto y = trunks[i + 1].module->act_path(L.qp, trunks[i + 1].module->tops[0]);
        if (x.zero(f))
            return SaguaroRefusal<F>{i, "q_i t_i = 0 in trunk " + std::to_string(i + 1)};
        if (y.zero(f))
            return SaguaroRefusal<F>{i, "q'_{i+1} t_{i+1} = 0 in trunk " + std::to_string(i + 2)};
    }

    std::vector<const Module<F>*> parts;
    for (const auto& t : trunks)
        parts.push_back(t.module.get());
    Module<F> dsum = direct_sum<F>(parts);

    std::vector<VElem<F>> relators;
    for (int i = 0; i + 1 < m; ++i) {
        auto x = trunks[i].module->act_path(links[i].q, trunks[i].module->tops[0]);
        auto y = trunks[i + 1].module->act_path(links[i].qp, trunks[i + 1].module->tops[0]);
        auto ex = embed_summand(dsum, parts, i, x);
        auto ey = embed_summand(dsum, parts, i + 1, y);
        for (size_t c = 0; c < ey.v.size(); ++c)
            ex.v[c] = f.sub(ex.v[c], f.mul(links[i].k, ey.v[c]));
        relators.push_back(ex);
    }
    auto U = dsum.generated_submodule(relators);
    auto quo = quotient_by(dsum, U);

    Saguaro<F> s;
    s.trunks = std::move(trunks);
    s.links = std::move(links);

    // condition (ii): every trunk embeds canonically
    std::vector<VElem<F>> top_imgs;
    for (int j = 0; j < m; ++j) {
        auto tj = embed_summand(dsum, parts, j, s.trunks[j].module->tops[0]);
        auto img = quo.project(tj, f);
        auto sub = quo.mod.generated_submodule({img});
        if (sub.dim() != s.trunks[j].module->total_dim())
            return SaguaroRefusal<F>{j, "trunk " + std::to_string(j + 1) +
                                            " does not embed canonically (rank " +
                                            std::to_string(sub.dim()) + " of " +
                                            std::to_string(s.trunks[j].module->total_dim()) + ")"};
        top_imgs.push_back(img);
        s.trunk_images.push_back(std::move(sub));
    }

    Module<F> realized = quo.mod;
    realized.tops = top_imgs;
    realized.assert_relations_act_zero();
    s.realized = make_module<F>(std::move(realized));
    s.tops = std::move(top_imgs);

    // Observation 6.3 runtime checks: equal trunk socles, nonzero adjacent meets
    auto soc = s.realized->socle();
    GradedSubspace<F> prev_soc;
    for (int j = 0; j < m; ++j) {
        auto tsoc = subspace_intersect(s.trunk_images[j], soc, f);
        check_internal(tsoc.dim() == 1, "trunk socle is not one-dimensional");
        if (j > 0)
            check_internal(subspaces_equal(tsoc, prev_soc, f),
                           "Obs 6.3: adjacent trunk socles differ");
        prev_soc = tsoc;
    }
    for (int i = 0; i + 1 < m; ++i) {
        auto meet = subspace_intersect(s.trunk_images[i], s.trunk_images[i + 1], f);
        auto x = s.realized->act_path(s.links[i].q, s.tops[i]);
        auto gen = s.realized->generated_submodule({x});
        check_internal(meet.dim() > 0 && subspaces_equal(meet, gen, f),
                       "Obs 6.3: adjacent intersection differs from Lambda q_i t_i");
    }

    s.graph = graph_of(*s.realized);
    return s;
}

template <class F>
Saguaro<F> expect_saguaro(SaguaroBuild<F> b) {
    if (std::holds_alternative<SaguaroRefusal<F>>(b))
        throw refusal("saguaro build refused: " + std::get<SaguaroRefusal<F>>(b).reason);
    return std::get<Saguaro<F>>(std::move(b));
}

// ---- Observation 6.4: intersection witnesses ----

template <class F>
struct IntersectionWitness {
    Path a; // right subpath of mast_i
    Path b; // right subpath of mast_j
    GradedSubspace<F> subspace;
    bool exact = true; // a t_i == b t_j on the nose (not just up to scalar)
};

namespace detail {

// Depth of a nonzero element inside an embedded trunk: trunk dim - dim(Lambda x).
template <class F>
int trunk_depth_of(const Saguaro<F>& s, int trunk, const VElem<F>& x) {
    auto sub = s.realized->generated_submodule({x});
    return s.trunks[trunk].module->total_dim() - sub.dim();
}

} // namespace detail

template <class F>
IntersectionWitness<F> trunk_intersection(const Saguaro<F>& s, int i, int j) {
    const F& f = s.realized->fld();
    if (i >= j)
        throw input_error("trunk_intersection requires i < j");
    if (i < 0 || j >= s.trunk_count())
        throw input_error("trunk index out of range");

    std::function<std::pair<Path, Path>(int, int)> witness = [&](int lo, int hi)
        -> std::pair<Path, Path> {
        if (hi == lo + 1)
            return {s.links[lo].q, s.links[lo].qp};
        auto [u, v] = witness(lo + 1, hi);
        const Path& qp = s.links[lo].qp;
        if (qp.length() <= u.length()) {
            // u = w qp; then a = w q_lo, b = v
            Path w = u.left_part(qp.length(), s.realized->alg->quiver());
            Path a = w.after(s.links[lo].q, s.realized->alg->quiver());
            return {a, v};
        }
        // qp = w u; then a = q_lo, b = w v
        Path w = qp.left_part(u.length(), s.realized->alg->quiver());
        Path b = w.after(v, s.realized->alg->quiver());
        return {s.links[lo].q, b};
    };

    auto [a_raw, b_raw] = witness(i, j);
    auto meet = subspace_intersect(s.trunk_images[i], s.trunk_images[j], f);

    // Normalize the witnesses to mast prefixes of the right depth (the raw
    // compositions can leave the mast when trunks carry curves).
    auto normalize = [&](const Path& raw, int trunk) -> Path {
        if (is_right_subpath(raw, s.trunks[trunk].mast))
            return raw;
        auto x = s.realized->act_path(raw, s.tops[trunk]);
        check_internal(!x.zero(f), "intersection witness acts as zero");
        int d = detail::trunk_depth_of(s, trunk, x);
        return s.trunks[trunk].mast.right_subpath(d);
    };
    Path a = normalize(a_raw, i);
    Path b = normalize(b_raw, j);

    IntersectionWitness<F> w;
    auto xa = s.realized->act_path(a, s.tops[i]);
    auto xb = s.realized->act_path(b, s.tops[j]);
    check_internal(!xa.zero(f) && !xb.zero(f), "Obs 6.4 witness degenerate");
    auto ga = s.realized->generated_submodule({xa});
    auto gb = s.realized->generated_submodule({xb});
    check_internal(subspaces_equal(ga, meet, f) && subspaces_equal(gb, meet, f),
                   "Obs 6.4: witness spans differ from the computed intersection");
    w.exact = xa.vertex == xb.vertex && xa.v == xb.v;
    w.a = a;
    w.b = b;
    w.subspace = meet;
    return w;
}

// Scalar relating a t_i and b t_j (both generate the same line's submodule top).
template <class F>
typename F::Elem witness_scalar(const Saguaro<F>& s, const Path& a, int i, const Path& b, int j) {
    const F& f = s.realized->fld();
    auto xa = s.realized->act_path(a, s.tops[i]);
    auto xb = s.realized->act_path(b, s.tops[j]);
    check_internal(xa.vertex == xb.vertex, "witness scalar across vertices");
    Mat<F> sys(static_cast<int>(xb.v.size()), 1, f);
    for (size_t r = 0; r < xb.v.size(); ++r)
        sys.at(static_cast<int>(r), 0) = xb.v[r];
    auto sol = solve(sys, xa.v, f);
    check_internal(sol.has_value(), "witness elements not proportional");
    return (*sol)[0];
}

template <class F>
VElem<F> scale(const VElem<F>& x, const typename F::Elem& c, const F& f) {
    auto y = x;
    for (auto& e : y.v)
        e = f.mul(c, e);
    return y;
}

// Extend an assignment on generating elements to a module map by Lambda-linear
// closure; throws internal_error when the assignment is inconsistent.
template <class F, class GenFn>
ModuleMap<F> linear_map_from_generators(const ModulePtr<F>& src, const ModulePtr<F>& tgt,
                                        GenFn gen, int count) {
    const F& f = src->fld();
    int nv = src->num_vertices();
    // graph subspace of (x, y) pairs, per vertex, columns = src dim + tgt dim
    std::vector<Mat<F>> graph;
    graph.emplace_back(0, 0, f);
    for (int v = 1; v <= nv; ++v)
        graph.emplace_back(0, src->dims[v] + tgt->dims[v], f);

    struct P {
        VElem<F> x, y;
    };
    std::deque<P> queue;
    auto push = [&](const VElem<F>& x, const VElem<F>& y) {
        check_internal(x.vertex == y.vertex, "generator pair across vertices");
        std::vector<typename F::Elem> joint = x.v;
        joint.insert(joint.end(), y.v.begin(), y.v.end());
        auto res = reduce_mod(graph[x.vertex], joint, f);
        if (is_zero_vec<F>(res, f))
            return;
        // a pair (0, y != 0) would make the map ill-defined
        bool xpart_zero = true;
        for (int c = 0; c < src->dims[x.vertex]; ++c)
            if (!f.is_zero(res[c]))
                xpart_zero = false;
        check_internal(!xpart_zero, "generator assignment does not define a module map");
        graph[x.vertex].append_row(res);
        rref(graph[x.vertex], f);
        queue.push_back({x, y});
    };
    for (int i = 0; i < count; ++i) {
        auto [x, y] = gen(i);
        push(x, y);
    }
    while (!queue.empty()) {
        auto pr = queue.front();
        queue.pop_front();
        for (size_t ai = 0; ai < src->arrows.size(); ++ai) {
            if (src->alg->quiver().arrows[ai].source != pr.x.vertex)
                continue;
            push(src->act(static_cast<int>(ai), pr.x), tgt->act(static_cast<int>(ai), pr.y));
        }
    }
    // totality on the source
    ModuleMap<F> phi;
    phi.source = src;
    phi.target = tgt;
    phi.mats.emplace_back(0, 0, f);
    for (int v = 1; v <= nv; ++v) {
        check_internal(graph[v].rows == src->dims[v],
                       "generators do not span the source module");
        // solve for the matrix: for each src unit, find its image
        Mat<F> mv(tgt->dims[v], src->dims[v], f);
        for (int c = 0; c < src->dims[v]; ++c) {
            std::vector<typename F::Elem> joint(src->dims[v] + tgt->dims[v], f.zero());
            joint[c] = f.one();
            // reduce (unit, 0) by the graph rows: the remainder is (0, -image)
            auto res = reduce_mod(graph[v], joint, f);
            for (int r = 0; r < tgt->dims[v]; ++r)
                mv.at(r, c) = f.neg(res[src->dims[v] + r]);
            for (int r = 0; r < src->dims[v]; ++r)
                check_internal(f.is_zero(res[r]), "map extraction failed");
        }
        phi.mats.push_back(std::move(mv));
    }
    return phi;
}

// ---- Observation 6.2: scalar twists ----

template <class F>
std::pair<Saguaro<F>, ModuleMap<F>> scalar_twist(const Algebra<F>& a, const Saguaro<F>& s,
                                                 const std::vector<typename F::Elem>& ks) {
    const F& f = a.fld;
    if (static_cast<int>(ks.size()) != s.trunk_count() - 1)
        throw input_error("scalar_twist needs m-1 scalars");
    for (const auto& k : ks)
        if (f.is_zero(k))
            throw input_error("scalar_twist scalars must be nonzero");

    auto links = s.links;
    for (size_t i = 0; i < links.size(); ++i)
        links[i].k = f.mul(links[i].k, ks[i]);
    auto twisted = expect_saguaro(build_saguaro(a, s.trunks, links));

    // phi(t_i) = lambda_i t'_i with lambda_1 = 1, lambda_{i+1} = lambda_i k_i
    std::vector<typename F::Elem> lambda{f.one()};
    for (size_t i = 0; i < ks.size(); ++i)
        lambda.push_back(f.mul(lambda.back(), ks[i]));

    // build phi by linear closure of the generator assignment
    ModuleMap<F> phi = linear_map_from_generators<F>(
        s.realized, twisted.realized,
        [&](int idx) { return std::make_pair(s.tops[idx], scale(twisted.tops[idx], lambda[idx], f)); },
        s.trunk_count());
    check_internal(phi.intertwines() && phi.is_iso(), "Obs 6.2 twist map is not an isomorphism");
    return {std::move(twisted), std::move(phi)};
}

// ---- Observations 6.5 / 6.6: reordering ----

template <class F>
struct ReorderOutcome {
    bool accepted = false;
    int fail_i = -1, fail_j = -1;
    std::optional<Saguaro<F>> reordered;
    std::optional<ModuleMap<F>> iso; // reordered.realized -> s.realized
};

template <class F>
ReorderOutcome<F> reorder_trunks(const Algebra<F>& a, const Saguaro<F>& s,
                                 const std::vector<int>& pi, std::mt19937_64& rng) {
    const F& f = a.fld;
    int m = s.trunk_count();
    {
        std::vector<bool> seen(m, false);
        if (static_cast<int>(pi.size()) != m)
            throw input_error("permutation size mismatch");
        for (int x : pi) {
            if (x < 0 || x >= m || seen[x])
                throw input_error("not a permutation");
            seen[x] = true;
        }
    }
    ReorderOutcome<F> out;
    // hypothesis of Obs 6.5
    auto meet = [&](int x, int y) {
        return subspace_intersect(s.trunk_images[x], s.trunk_images[y], f);
    };
    for (int i = 0; i + 1 < m; ++i) {
        auto adj = meet(pi[i], pi[i + 1]);
        for (int j = i + 1; j < m; ++j) {
            auto other = meet(pi[i], pi[j]);
            if (!subspace_contains(adj, other, f)) {
                out.fail_i = i;
                out.fail_j = j;
                return out;
            }
        }
    }
    // assemble links from intersection witnesses
    std::vector<UniserialRecord<F>> trunks;
    for (int i = 0; i < m; ++i)
        trunks.push_back(s.trunks[pi[i]]);
    std::vector<Link<F>> links;
    for (int i = 0; i + 1 < m; ++i) {
        int x = pi[i], y = pi[i + 1];
        Link<F> L;
        if (x < y) {
            auto w = trunk_intersection(s, x, y);
            L.q = w.a;
            L.qp = w.b;
            L.k = witness_scalar(s, w.a, x, w.b, y);
        } else {
            auto w = trunk_intersection(s, y, x);
            L.q = w.b;
            L.qp = w.a;
            L.k = f.inv(witness_scalar(s, w.a, y, w.b, x));
        }
        links.push_back(L);
    }
    auto built = build_saguaro(a, trunks, links);
    if (std::holds_alternative<SaguaroRefusal<F>>(built))
        throw internal_error("Obs 6.5: hypothesis held but rebuild refused: " +
                             std::get<SaguaroRefusal<F>>(built).reason);
    auto sag = std::get<Saguaro<F>>(std::move(built));
    auto iso = is_isomorphic(sag.realized, s.realized, rng);
    check_internal(iso.isomorphic, "Obs 6.5: reordered saguaro is not isomorphic to the original");
    out.accepted = true;
    out.iso = iso.witness;
    out.reordered = std::move(sag);
    return out;
}

// Observation 6.6, implemented exactly as its proof.
template <class F>
std::vector<int> move_together(const Algebra<F>& a, const Saguaro<F>& s, int s_idx, int t_idx) {
    const F& f = a.fld;
    int m = s.trunk_count();
    if (s_idx == t_idx || s_idx < 0 || t_idx < 0 || s_idx >= m || t_idx >= m)
        throw input_error("move_together needs two distinct trunk indices");
    auto meet_dim = [&](int x, int y) {
        return subspace_intersect(s.trunk_images[x], s.trunk_images[y], f).dim();
    };
    std::vector<int> Is, It;
    for (int i = 0; i < m; ++i) {
        if (i == s_idx || i == t_idx)
            continue;
        // intersections with a fixed uniserial image form a chain, so dims decide
        if (meet_dim(i, s_idx) > meet_dim(i, t_idx))
            Is.push_back(i);
        else
            It.push_back(i);
    }
    int l = static_cast<int>(Is.size()) + 1;
    std::vector<int> pi(m, -1);
    pi[l - 1] = s_idx;
    // fill l-2 .. 0 by maximal intersection with the previously placed trunk
    {
        std::vector<int> rest = Is;
        int anchor = s_idx;
        for (int slot = l - 2; slot >= 0; --slot) {
            int best = -1, bestdim = -1;
            for (int c : rest)
                if (meet_dim(c, anchor) > bestdim) {
                    best = c;
                    bestdim = meet_dim(c, anchor);
                }
            pi[slot] = best;
            anchor = best;
            rest.erase(std::find(rest.begin(), rest.end(), best));
        }
    }
    pi[l] = t_idx;
    {
        std::vector<int> rest = It;
        int anchor = t_idx;
        for (int slot = l + 1; slot < m; ++slot) {
            int best = -1, bestdim = -1;
            for (int c : rest)
                if (meet_dim(c, anchor) > bestdim) {
                    best = c;
                    bestdim = meet_dim(c, anchor);
                }
            pi[slot] = best;
            anchor = best;
            rest.erase(std::find(rest.begin(), rest.end(), best));
        }
    }
    return pi;
}

} // namespace saguaro
