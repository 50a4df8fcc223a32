#pragma once
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "algebra.hpp"

namespace saguaro {

// A module element, supported at a single vertex.
template <class F>
struct VElem {
    int vertex = 0;
    std::vector<typename F::Elem> v;
    bool zero(const F& f) const { return is_zero_vec<F>(v, f); }
};

// Vertex-graded subspace: one row-space per vertex (index 1..n; slot 0 unused).
template <class F>
struct GradedSubspace {
    std::vector<Mat<F>> part;

    static GradedSubspace empty(const std::vector<int>& dims, const F& f) {
        GradedSubspace s;
        s.part.reserve(dims.size());
        for (int d : dims)
            s.part.emplace_back(0, d, f);
        return s;
    }
    int dim() const {
        int t = 0;
        for (const auto& m : part)
            t += m.rows;
        return t;
    }
    bool contains(const VElem<F>& x, const F& f) const {
        return in_span(part[x.vertex], x.v, f);
    }
    // Add x to the span; returns true when the space grew.
    bool grow(const VElem<F>& x, const F& f) {
        auto res = reduce_mod(part[x.vertex], x.v, f);
        if (is_zero_vec<F>(res, f))
            return false;
        part[x.vertex].append_row(res);
        rref(part[x.vertex], f);
        return true;
    }
};

template <class F>
bool subspace_contains(const GradedSubspace<F>& big, const GradedSubspace<F>& small, const F& f) {
    for (size_t v = 1; v < small.part.size(); ++v)
        if (!space_contains(big.part[v], small.part[v], f))
            return false;
    return true;
}

template <class F>
bool subspaces_equal(const GradedSubspace<F>& a, const GradedSubspace<F>& b, const F& f) {
    return subspace_contains(a, b, f) && subspace_contains(b, a, f);
}

template <class F>
GradedSubspace<F> subspace_intersect(const GradedSubspace<F>& a, const GradedSubspace<F>& b,
                                     const F& f) {
    GradedSubspace<F> out;
    out.part.emplace_back(0, 0, f);
    for (size_t v = 1; v < a.part.size(); ++v)
        out.part.push_back(intersect_spaces(a.part[v], b.part[v], f));
    return out;
}

template <class F>
GradedSubspace<F> subspace_sum(const GradedSubspace<F>& a, const GradedSubspace<F>& b,
                               const F& f) {
    GradedSubspace<F> out;
    out.part.emplace_back(0, 0, f);
    for (size_t v = 1; v < a.part.size(); ++v)
        out.part.push_back(span_concat(a.part[v], b.part[v], f));
    return out;
}

// Finite-dimensional left module: per-vertex spaces plus one matrix per arrow.
template <class F>
class Module {
  public:
    using E = typename F::Elem;

    const Algebra<F>* alg = nullptr;
    std::vector<int> dims;        // [1..n]; [0] unused
    std::vector<Mat<F>> arrows;   // per arrow: dims[target] x dims[source]
    std::vector<VElem<F>> tops;   // marked top elements, single-vertex each

    Module() = default;
    Module(const Algebra<F>* a, std::vector<int> d) : alg(a), dims(std::move(d)) {
        const F& f = alg->fld;
        for (const auto& ar : alg->quiver().arrows)
            arrows.emplace_back(dims[ar.target], dims[ar.source], f);
    }

    const F& fld() const { return alg->fld; }
    int num_vertices() const { return alg->num_vertices(); }
    int total_dim() const {
        int t = 0;
        for (size_t v = 1; v < dims.size(); ++v)
            t += dims[v];
        return t;
    }
    std::vector<int> dim_vector() const {
        return std::vector<int>(dims.begin() + 1, dims.end());
    }

    VElem<F> zero_at(int v) const { return {v, zero_vec(dims[v], fld())}; }
    VElem<F> unit(int v, int i) const {
        auto x = zero_at(v);
        x.v[i] = fld().one();
        return x;
    }

    VElem<F> act(int arrow, const VElem<F>& x) const {
        const auto& a = alg->quiver().arrows[arrow];
        if (x.vertex != a.source)
            return zero_at(a.target);
        return {a.target, mat_apply(arrows[arrow], x.v, fld())};
    }

    VElem<F> act_path(const Path& p, const VElem<F>& x) const {
        if (x.vertex != p.source)
            return zero_at(p.target(alg->quiver()));
        VElem<F> cur = x;
        for (int a : p.word)
            cur = act(a, cur);
        return cur;
    }

    // Left action of a basis combination (vertex-homogeneous input assumed).
    VElem<F> act_combo(const PathCombo<F>& c, const VElem<F>& x, int out_vertex) const {
        VElem<F> acc = zero_at(out_vertex);
        for (const auto& [pid, coef] : c) {
            const Path& p = alg->path(pid);
            auto y = act_path(p, x);
            check_internal(y.vertex == out_vertex, "act_combo vertex mismatch");
            for (size_t i = 0; i < acc.v.size(); ++i)
                acc.v[i] = fld().add(acc.v[i], fld().mul(coef, y.v[i]));
        }
        return acc;
    }

    GradedSubspace<F> full_space() const {
        auto s = GradedSubspace<F>::empty(dims, fld());
        for (size_t v = 1; v < dims.size(); ++v)
            s.part[v] = Mat<F>::identity(dims[v], fld());
        return s;
    }

    // J * (subspace): arrow images of all basis rows.
    GradedSubspace<F> radical_of(const GradedSubspace<F>& s) const {
        auto out = GradedSubspace<F>::empty(dims, fld());
        for (size_t ai = 0; ai < arrows.size(); ++ai) {
            const auto& a = alg->quiver().arrows[ai];
            const Mat<F>& rows = s.part[a.source];
            for (int r = 0; r < rows.rows; ++r)
                out.grow(act(static_cast<int>(ai), {a.source, rows.row(r)}), fld());
        }
        return out;
    }

    // J^0 M = M, J^1 M, ..., down to zero.
    std::vector<GradedSubspace<F>> radical_filtration() const {
        std::vector<GradedSubspace<F>> filt;
        filt.push_back(full_space());
        while (filt.back().dim() > 0) {
            auto next = radical_of(filt.back());
            check_internal(next.dim() < filt.back().dim() || filt.back().dim() == 0,
                           "radical filtration does not descend (J-action not nilpotent)");
            filt.push_back(next);
            if (static_cast<int>(filt.size()) > alg->loewy_length + 1)
                throw internal_error("radical filtration exceeds loewy length");
        }
        return filt;
    }

    // Largest k with x in J^k M (given the filtration).
    int layer_of(const VElem<F>& x, const std::vector<GradedSubspace<F>>& filt) const {
        int k = 0;
        while (k + 1 < static_cast<int>(filt.size()) && filt[k + 1].contains(x, fld()))
            ++k;
        return k;
    }

    // Socle: intersection of arrow kernels, per source vertex.
    GradedSubspace<F> socle() const {
        auto out = GradedSubspace<F>::empty(dims, fld());
        const F& f = fld();
        for (size_t v = 1; v < dims.size(); ++v) {
            Mat<F> stacked(0, dims[v], f);
            for (size_t ai = 0; ai < arrows.size(); ++ai) {
                if (alg->quiver().arrows[ai].source != static_cast<int>(v))
                    continue;
                for (int r = 0; r < arrows[ai].rows; ++r)
                    stacked.append_row(arrows[ai].row(r));
            }
            out.part[v] = stacked.rows == 0 ? Mat<F>::identity(dims[v], f)
                                            : row_space(kernel(stacked, f), f);
        }
        return out;
    }

    // Multiplicity of each simple in M/JM and in Soc(M), indexed by vertex.
    std::vector<int> top_multiset() const {
        auto rad = radical_of(full_space());
        std::vector<int> m(dims.size(), 0);
        for (size_t v = 1; v < dims.size(); ++v)
            m[v] = dims[v] - rad.part[v].rows;
        return m;
    }
    std::vector<int> socle_multiset() const {
        auto s = socle();
        std::vector<int> m(dims.size(), 0);
        for (size_t v = 1; v < dims.size(); ++v)
            m[v] = s.part[v].rows;
        return m;
    }

    // Submodule generated by the given elements.
    GradedSubspace<F> generated_submodule(const std::vector<VElem<F>>& gens) const {
        auto s = GradedSubspace<F>::empty(dims, fld());
        std::deque<VElem<F>> queue;
        for (const auto& g : gens)
            if (s.grow(g, fld()))
                queue.push_back(g);
        while (!queue.empty()) {
            auto x = queue.front();
            queue.pop_front();
            for (size_t ai = 0; ai < arrows.size(); ++ai) {
                if (alg->quiver().arrows[ai].source != x.vertex)
                    continue;
                auto y = act(static_cast<int>(ai), x);
                if (s.grow(y, fld()))
                    queue.push_back(y);
            }
        }
        return s;
    }

    bool tops_generate() const {
        return generated_submodule(tops).dim() == total_dim();
    }

    // Spot-verify that every relation of the presentation acts as zero.
    void assert_relations_act_zero() const {
        const F& f = fld();
        for (const auto& rel : alg->pres.relations) {
            int src = rel.terms[0].path.source;
            int tgt = rel.terms[0].path.target(alg->quiver());
            for (int i = 0; i < dims[src]; ++i) {
                auto x = unit(src, i);
                auto acc = zero_at(tgt);
                for (const auto& t : rel.terms) {
                    auto y = act_path(t.path, x);
                    auto c = alg->scalar(t.coeff);
                    for (size_t j = 0; j < acc.v.size(); ++j)
                        acc.v[j] = f.add(acc.v[j], f.mul(c, y.v[j]));
                }
                check_internal(acc.zero(f), "presentation relation acts nonzero on module");
            }
        }
    }
};

template <class F>
using ModulePtr = std::shared_ptr<const Module<F>>;

template <class F, class... Args>
ModulePtr<F> make_module(Args&&... args) {
    return std::make_shared<const Module<F>>(std::forward<Args>(args)...);
}

// Module homomorphism: one matrix per vertex (target dim x source dim).
// Holds shared ownership of its endpoints so stored maps stay valid.
template <class F>
struct ModuleMap {
    ModulePtr<F> source;
    ModulePtr<F> target;
    std::vector<Mat<F>> mats; // [1..n]

    VElem<F> apply(const VElem<F>& x) const {
        return {x.vertex, mat_apply(mats[x.vertex], x.v, source->fld())};
    }

    bool intertwines() const {
        const F& f = source->fld();
        for (size_t ai = 0; ai < source->arrows.size(); ++ai) {
            const auto& a = source->alg->quiver().arrows[ai];
            auto lhs = mat_mul(mats[a.target], source->arrows[ai], f);
            auto rhs = mat_mul(target->arrows[ai], mats[a.source], f);
            if (!(lhs == rhs))
                return false;
        }
        return true;
    }

    bool is_injective() const {
        const F& f = source->fld();
        for (size_t v = 1; v < mats.size(); ++v)
            if (rank_of(mats[v], f) != source->dims[v])
                return false;
        return true;
    }
    bool is_surjective() const {
        const F& f = source->fld();
        for (size_t v = 1; v < mats.size(); ++v)
            if (rank_of(mats[v], f) != target->dims[v])
                return false;
        return true;
    }
    bool is_iso() const { return is_injective() && is_surjective(); }

    GradedSubspace<F> image() const {
        auto s = GradedSubspace<F>::empty(target->dims, target->fld());
        for (size_t v = 1; v < mats.size(); ++v) {
            Mat<F> rows(0, target->dims[v], target->fld());
            for (int c = 0; c < mats[v].cols; ++c) {
                std::vector<typename F::Elem> col;
                for (int r = 0; r < mats[v].rows; ++r)
                    col.push_back(mats[v].at(r, c));
                rows.append_row(col);
            }
            s.part[v] = row_space(rows, target->fld());
        }
        return s;
    }

    GradedSubspace<F> kernel_space() const {
        auto s = GradedSubspace<F>::empty(source->dims, source->fld());
        for (size_t v = 1; v < mats.size(); ++v)
            s.part[v] = row_space(kernel(mats[v], source->fld()), source->fld());
        return s;
    }
};

template <class F>
ModuleMap<F> map_compose(const ModuleMap<F>& g, const ModuleMap<F>& f) {
    ModuleMap<F> h;
    h.source = f.source;
    h.target = g.target;
    h.mats.emplace_back(0, 0, f.source->fld());
    for (size_t v = 1; v < f.mats.size(); ++v)
        h.mats.push_back(mat_mul(g.mats[v], f.mats[v], f.source->fld()));
    return h;
}

template <class F>
ModuleMap<F> identity_map(const ModulePtr<F>& m) {
    ModuleMap<F> id;
    id.source = m;
    id.target = m;
    id.mats.emplace_back(0, 0, m->fld());
    for (size_t v = 1; v < m->dims.size(); ++v)
        id.mats.push_back(Mat<F>::identity(m->dims[v], m->fld()));
    return id;
}

// Basis of Hom(M, N) as the solution space of the intertwining system.
template <class F>
std::vector<ModuleMap<F>> hom_space(const ModulePtr<F>& mp, const ModulePtr<F>& np) {
    const Module<F>& m = *mp;
    const Module<F>& n = *np;
    const F& f = m.fld();
    check_internal(m.alg == n.alg, "hom_space over different algebras");
    int nv = m.num_vertices();

    // unknown layout: per vertex blocks of n.dims[v] * m.dims[v]
    std::vector<int> offset(nv + 1, 0);
    int nvars = 0;
    for (int v = 1; v <= nv; ++v) {
        offset[v] = nvars;
        nvars += n.dims[v] * m.dims[v];
    }
    auto var = [&](int v, int r, int c) { return offset[v] + r * m.dims[v] + c; };

    Mat<F> sys(0, nvars, f);
    for (size_t ai = 0; ai < m.arrows.size(); ++ai) {
        const auto& a = m.alg->quiver().arrows[ai];
        int u = a.source, w = a.target;
        // f_w M_a = N_a f_u : rows indexed by (i < n.dims[w], j < m.dims[u])
        for (int i = 0; i < n.dims[w]; ++i)
            for (int j = 0; j < m.dims[u]; ++j) {
                auto row = zero_vec(nvars, f);
                bool nz = false;
                for (int k = 0; k < m.dims[w]; ++k)
                    if (!f.is_zero(m.arrows[ai].at(k, j))) {
                        row[var(w, i, k)] = f.add(row[var(w, i, k)], m.arrows[ai].at(k, j));
                        nz = true;
                    }
                for (int k = 0; k < n.dims[u]; ++k)
                    if (!f.is_zero(n.arrows[ai].at(i, k))) {
                        row[var(u, k, j)] = f.sub(row[var(u, k, j)], n.arrows[ai].at(i, k));
                        nz = true;
                    }
                if (nz)
                    sys.append_row(row);
            }
    }

    Mat<F> ker = sys.rows == 0 ? Mat<F>::identity(nvars, f) : kernel(sys, f);
    std::vector<ModuleMap<F>> out;
    for (int r = 0; r < ker.rows; ++r) {
        ModuleMap<F> h;
        h.source = mp;
        h.target = np;
        h.mats.emplace_back(0, 0, f);
        for (int v = 1; v <= nv; ++v) {
            Mat<F> mv(n.dims[v], m.dims[v], f);
            for (int i = 0; i < n.dims[v]; ++i)
                for (int j = 0; j < m.dims[v]; ++j)
                    mv.at(i, j) = ker.at(r, var(v, i, j));
            h.mats.push_back(std::move(mv));
        }
        out.push_back(std::move(h));
    }
    return out;
}

template <class F>
ModuleMap<F> combine_maps(const std::vector<ModuleMap<F>>& basis,
                          const std::vector<typename F::Elem>& coeffs, const F& f) {
    check_internal(!basis.empty(), "combine_maps on empty basis");
    ModuleMap<F> h;
    h.source = basis[0].source;
    h.target = basis[0].target;
    h.mats.emplace_back(0, 0, f);
    for (size_t v = 1; v < basis[0].mats.size(); ++v) {
        Mat<F> mv(basis[0].mats[v].rows, basis[0].mats[v].cols, f);
        for (size_t b = 0; b < basis.size(); ++b) {
            if (f.is_zero(coeffs[b]))
                continue;
            for (size_t i = 0; i < mv.a.size(); ++i)
                mv.a[i] = f.add(mv.a[i], f.mul(coeffs[b], basis[b].mats[v].a[i]));
        }
        h.mats.push_back(std::move(mv));
    }
    return h;
}

// --------- constructions ---------

template <class F>
Module<F> regular_module(const Algebra<F>& a, int e) {
    if (!a.quiver().valid_vertex(e))
        throw input_error("regular_module at undeclared vertex " + std::to_string(e));
    const F& f = a.fld;
    auto ids = a.basis_with_source(e);
    // per-vertex ordering of basis paths by target
    std::vector<std::vector<int>> by_vertex(a.num_vertices() + 1);
    std::map<int, std::pair<int, int>> pos; // path id -> (vertex, index)
    for (int id : ids) {
        int t = a.path(id).target(a.quiver());
        pos[id] = {t, static_cast<int>(by_vertex[t].size())};
        by_vertex[t].push_back(id);
    }
    std::vector<int> dims(a.num_vertices() + 1, 0);
    for (int v = 1; v <= a.num_vertices(); ++v)
        dims[v] = static_cast<int>(by_vertex[v].size());

    Module<F> m(&a, dims);
    for (size_t ai = 0; ai < a.quiver().arrows.size(); ++ai) {
        const auto& ar = a.quiver().arrows[ai];
        for (int j = 0; j < dims[ar.source]; ++j) {
            int pid = by_vertex[ar.source][j];
            auto prod = a.arrow_times(static_cast<int>(ai), PathCombo<F>{{pid, f.one()}});
            for (const auto& [qid, c] : prod) {
                auto [tv, ti] = pos.at(qid);
                check_internal(tv == ar.target, "regular module grading broken");
                m.arrows[ai].at(ti, j) = f.add(m.arrows[ai].at(ti, j), c);
            }
        }
    }
    // marked top: the class of e itself
    int eid = a.path_id(Path::trivial(e));
    auto [tv, ti] = pos.at(eid);
    auto top = m.zero_at(tv);
    top.v[ti] = f.one();
    m.tops = {top};
    m.assert_relations_act_zero();
    return m;
}

template <class F>
Module<F> direct_sum(const std::vector<const Module<F>*>& parts) {
    check_internal(!parts.empty(), "direct sum of nothing");
    const Algebra<F>& a = *parts[0]->alg;
    const F& f = a.fld;
    std::vector<int> dims(a.num_vertices() + 1, 0);
    for (auto* p : parts)
        for (size_t v = 1; v < dims.size(); ++v)
            dims[v] += p->dims[v];
    Module<F> m(&a, dims);
    std::vector<int> off(a.num_vertices() + 1, 0);
    for (auto* p : parts) {
        for (size_t ai = 0; ai < m.arrows.size(); ++ai) {
            const auto& ar = a.quiver().arrows[ai];
            for (int i = 0; i < p->dims[ar.target]; ++i)
                for (int j = 0; j < p->dims[ar.source]; ++j)
                    m.arrows[ai].at(off[ar.target] + i, off[ar.source] + j) =
                        p->arrows[ai].at(i, j);
        }
        for (const auto& t : p->tops) {
            auto nt = m.zero_at(t.vertex);
            for (size_t i = 0; i < t.v.size(); ++i)
                nt.v[off[t.vertex] + i] = t.v[i];
            m.tops.push_back(nt);
        }
        for (size_t v = 1; v < dims.size(); ++v)
            off[v] += p->dims[v];
    }
    return m;
}

// Embed the i-th summand's element into the direct sum coordinates.
template <class F>
VElem<F> embed_summand(const Module<F>& sum, const std::vector<const Module<F>*>& parts,
                       size_t index, const VElem<F>& x) {
    auto y = sum.zero_at(x.vertex);
    int off = 0;
    for (size_t i = 0; i < index; ++i)
        off += parts[i]->dims[x.vertex];
    for (size_t i = 0; i < x.v.size(); ++i)
        y.v[off + i] = x.v[i];
    return y;
}

// Quotient M/U together with the projection.
template <class F>
struct Quotient {
    Module<F> mod;
    std::vector<Mat<F>> proj; // per vertex: new_dim x old_dim
    std::vector<Mat<F>> lift; // per vertex: old_dim x new_dim (a section)

    VElem<F> project(const VElem<F>& x, const F& f) const {
        return {x.vertex, mat_apply(proj[x.vertex], x.v, f)};
    }
};

template <class F>
Quotient<F> quotient_by(const Module<F>& m, const GradedSubspace<F>& u) {
    const F& f = m.fld();
    int nv = m.num_vertices();
    Quotient<F> q;
    q.proj.emplace_back(0, 0, f);
    q.lift.emplace_back(0, 0, f);
    std::vector<int> dims(nv + 1, 0);
    std::vector<std::vector<int>> reps(nv + 1); // non-pivot columns
    for (int v = 1; v <= nv; ++v) {
        const Mat<F>& uv = u.part[v];
        std::vector<bool> is_pivot(m.dims[v], false);
        for (int r = 0; r < uv.rows; ++r) {
            int c = 0;
            while (c < uv.cols && f.is_zero(uv.at(r, c)))
                ++c;
            if (c < uv.cols)
                is_pivot[c] = true;
        }
        for (int c = 0; c < m.dims[v]; ++c)
            if (!is_pivot[c])
                reps[v].push_back(c);
        dims[v] = static_cast<int>(reps[v].size());
    }
    q.mod = Module<F>(m.alg, dims);
    for (int v = 1; v <= nv; ++v) {
        Mat<F> proj(dims[v], m.dims[v], f);
        // reduce each old unit vector mod U and read the representative coords
        for (int c = 0; c < m.dims[v]; ++c) {
            auto unitv = zero_vec(m.dims[v], f);
            unitv[c] = f.one();
            auto red = reduce_mod(u.part[v], unitv, f);
            for (int i = 0; i < dims[v]; ++i)
                proj.at(i, c) = red[reps[v][i]];
        }
        Mat<F> lift(m.dims[v], dims[v], f);
        for (int i = 0; i < dims[v]; ++i)
            lift.at(reps[v][i], i) = f.one();
        q.proj.push_back(std::move(proj));
        q.lift.push_back(std::move(lift));
    }
    for (size_t ai = 0; ai < m.arrows.size(); ++ai) {
        const auto& ar = m.alg->quiver().arrows[ai];
        q.mod.arrows[ai] =
            mat_mul(q.proj[ar.target], mat_mul(m.arrows[ai], q.lift[ar.source], f), f);
    }
    for (const auto& t : m.tops) {
        auto pt = q.project(t, f);
        if (!pt.zero(f))
            q.mod.tops.push_back(pt);
    }
    return q;
}

// Submodule (given as a graded subspace) turned into a module of its own,
// together with the inclusion.
template <class F>
struct Submodule {
    Module<F> mod;
    std::vector<Mat<F>> incl; // per vertex: ambient_dim x sub_dim

    VElem<F> include(const VElem<F>& x, const F& f) const {
        return {x.vertex, mat_apply(incl[x.vertex], x.v, f)};
    }
    // Express an ambient element (must lie in the submodule) in sub coordinates.
    VElem<F> restrict(const GradedSubspace<F>& space, const VElem<F>& x, const F& f) const {
        std::vector<typename F::Elem> coords;
        const Mat<F>& rows = space.part[x.vertex];
        auto residue = x.v;
        coords.reserve(rows.rows);
        for (int r = 0; r < rows.rows; ++r) {
            int c = 0;
            while (c < rows.cols && f.is_zero(rows.at(r, c)))
                ++c;
            check_internal(c < rows.cols, "degenerate subspace row");
            auto k = residue[c];
            coords.push_back(k);
            if (!f.is_zero(k))
                for (int j = 0; j < rows.cols; ++j)
                    residue[j] = f.sub(residue[j], f.mul(k, rows.at(r, j)));
        }
        check_internal(is_zero_vec<F>(residue, f), "element not in submodule");
        return {x.vertex, coords};
    }
};

template <class F>
Submodule<F> submodule_from(const Module<F>& m, const GradedSubspace<F>& u) {
    const F& f = m.fld();
    int nv = m.num_vertices();
    Submodule<F> s;
    s.incl.emplace_back(0, 0, f);
    std::vector<int> dims(nv + 1, 0);
    for (int v = 1; v <= nv; ++v)
        dims[v] = u.part[v].rows;
    s.mod = Module<F>(m.alg, dims);
    for (int v = 1; v <= nv; ++v) {
        Mat<F> incl(m.dims[v], dims[v], f);
        for (int r = 0; r < dims[v]; ++r)
            for (int c = 0; c < m.dims[v]; ++c)
                incl.at(c, r) = u.part[v].at(r, c);
        s.incl.push_back(std::move(incl));
    }
    for (size_t ai = 0; ai < m.arrows.size(); ++ai) {
        const auto& ar = m.alg->quiver().arrows[ai];
        for (int j = 0; j < dims[ar.source]; ++j) {
            VElem<F> amb{ar.source, u.part[ar.source].row(j)};
            auto img = m.act(static_cast<int>(ai), amb);
            auto coords = s.restrict(u, img, f);
            for (int i = 0; i < dims[ar.target]; ++i)
                s.mod.arrows[ai].at(i, j) = coords.v[i];
        }
    }
    return s;
}

// --------- realize_spec ---------

template <class F>
struct RealizedSpec {
    Module<F> mod;
    std::vector<Module<F>> owned_projectives;
    Module<F> cover;               // the ambient projective P
    GradedSubspace<F> relator_sub; // U inside P
    Quotient<F> quo;               // P -> M
};

template <class F>
RealizedSpec<F> realize_spec_full(const Algebra<F>& a, const ModuleSpec& spec) {
    spec.validate(a.quiver());
    const F& f = a.fld;
    RealizedSpec<F> out;
    for (const auto& g : spec.gens)
        out.owned_projectives.push_back(regular_module(a, g.second));
    std::vector<const Module<F>*> parts;
    for (const auto& p : out.owned_projectives)
        parts.push_back(&p);
    out.cover = direct_sum(parts);
    // NB: tops of cover are exactly the generator classes, in order.

    std::vector<VElem<F>> relator_elems;
    for (const auto& rel : spec.relators) {
        int vtx = rel[0].path.target(a.quiver());
        auto acc = out.cover.zero_at(vtx);
        for (const auto& t : rel) {
            // element p * e_g inside summand t.gen
            auto combo = a.normal_form({{a.scalar(t.coeff), t.path}});
            auto piece = out.owned_projectives[t.gen].zero_at(vtx);
            // express the combo in the regular module's coordinates
            auto& proj = out.owned_projectives[t.gen];
            auto topg = proj.tops[0];
            piece = proj.act_combo(combo, topg, vtx);
            auto emb = embed_summand(out.cover, parts, t.gen, piece);
            for (size_t i = 0; i < acc.v.size(); ++i)
                acc.v[i] = f.add(acc.v[i], emb.v[i]);
        }
        relator_elems.push_back(acc);
    }
    out.relator_sub = out.cover.generated_submodule(relator_elems);
    out.quo = quotient_by(out.cover, out.relator_sub);
    out.mod = out.quo.mod;
    out.mod.tops.clear();
    // generator images become the marked tops; each must stay out of JM
    auto rad = out.mod.radical_of(out.mod.full_space());
    for (size_t gi = 0; gi < spec.gens.size(); ++gi) {
        auto img = out.quo.project(out.cover.tops[gi], f);
        if (img.zero(f) || rad.contains(img, f))
            throw refusal("generator '" + spec.gens[gi].first +
                          "' collapses into the radical of the realized module");
        out.mod.tops.push_back(img);
    }
    out.mod.assert_relations_act_zero();
    return out;
}

template <class F>
Module<F> realize_spec(const Algebra<F>& a, const ModuleSpec& spec) {
    return realize_spec_full(a, spec).mod;
}

} // namespace saguaro
