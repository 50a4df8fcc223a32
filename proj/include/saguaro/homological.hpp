#pragma once
#include <map>
#include <random>

#include "decompose.hpp"

namespace saguaro {

template <class F>
struct ProjectiveCover {
    Module<F> cover;
    ModuleMap<F> epi; // built over shared copies; see projective_cover
    ModulePtr<F> cover_ptr;
    ModulePtr<F> target_ptr;
};

// P = (+) Lambda e ^ mult(e in top M) together with the covering epimorphism.
template <class F>
ProjectiveCover<F> projective_cover(const ModulePtr<F>& mp) {
    const Module<F>& m = *mp;
    const Algebra<F>& a = *m.alg;
    const F& f = m.fld();
    auto rad = m.radical_of(m.full_space());

    // lifts of a basis of M/JM, per vertex: unit vectors at non-pivot columns
    std::vector<std::vector<VElem<F>>> lifts(a.num_vertices() + 1);
    for (int v = 1; v <= a.num_vertices(); ++v) {
        std::vector<bool> pivot(m.dims[v], false);
        const Mat<F>& rv = rad.part[v];
        for (int r = 0; r < rv.rows; ++r) {
            int c = 0;
            while (c < rv.cols && f.is_zero(rv.at(r, c)))
                ++c;
            pivot[c] = true;
        }
        for (int c = 0; c < m.dims[v]; ++c)
            if (!pivot[c])
                lifts[v].push_back(m.unit(v, c));
    }

    std::vector<Module<F>> projs;
    std::vector<VElem<F>> gen_targets;
    for (int v = 1; v <= a.num_vertices(); ++v)
        for (const auto& u : lifts[v]) {
            projs.push_back(regular_module(a, v));
            gen_targets.push_back(u);
        }

    ProjectiveCover<F> out;
    std::vector<const Module<F>*> parts;
    for (auto& p : projs)
        parts.push_back(&p);
    if (parts.empty()) {
        std::vector<int> dims(a.num_vertices() + 1, 0);
        out.cover = Module<F>(&a, dims);
    } else {
        out.cover = direct_sum(parts);
    }
    out.cover_ptr = make_module<F>(out.cover);
    out.target_ptr = mp;

    // the epi sends each summand's basis path p*e to p * lift
    ModuleMap<F> epi;
    epi.source = out.cover_ptr;
    epi.target = mp;
    epi.mats.emplace_back(0, 0, f);
    for (int v = 1; v <= a.num_vertices(); ++v)
        epi.mats.emplace_back(m.dims[v], out.cover_ptr->dims[v], f);

    int off_base = 0;
    for (size_t k = 0; k < projs.size(); ++k) {
        const Module<F>& pk = projs[k];
        int src_vertex = gen_targets[k].vertex;
        auto ids = a.basis_with_source(src_vertex);
        // iterate pk's per-vertex basis: basis paths ordered by target as in regular_module
        std::vector<std::vector<int>> by_vertex(a.num_vertices() + 1);
        for (int id : ids)
            by_vertex[a.path(id).target(a.quiver())].push_back(id);
        std::vector<int> off(a.num_vertices() + 1, 0);
        {
            int dummy = 0;
            (void)dummy;
        }
        // offsets of this summand inside the direct sum
        std::vector<int> sum_off(a.num_vertices() + 1, 0);
        {
            std::vector<int> acc(a.num_vertices() + 1, 0);
            for (size_t j = 0; j < k; ++j)
                for (int v = 1; v <= a.num_vertices(); ++v)
                    acc[v] += projs[j].dims[v];
            sum_off = acc;
        }
        for (int v = 1; v <= a.num_vertices(); ++v) {
            for (size_t i = 0; i < by_vertex[v].size(); ++i) {
                const Path& p = a.path(by_vertex[v][i]);
                auto img = m.act_path(p, gen_targets[k]);
                for (int r = 0; r < m.dims[v]; ++r)
                    epi.mats[v].at(r, sum_off[v] + static_cast<int>(i)) = img.v[r];
            }
        }
        off_base += pk.total_dim();
    }
    check_internal(epi.intertwines(), "projective cover map does not intertwine");
    check_internal(epi.is_surjective(), "projective cover map not surjective");
    // ker(epi) inside JP (covering property)
    auto ker = epi.kernel_space();
    auto radP = out.cover_ptr->radical_of(out.cover_ptr->full_space());
    check_internal(subspace_contains(radP, ker, f), "projective cover kernel escapes JP");
    out.epi = std::move(epi);
    return out;
}

// First syzygy as a module; marked tops are minimal generators of the kernel.
template <class F>
Module<F> syzygy_once(const ModulePtr<F>& m) {
    auto pc = projective_cover(m);
    const F& f = m->fld();
    auto ker = pc.epi.kernel_space();
    // rank-nullity, asserted always
    check_internal(ker.dim() == pc.cover_ptr->total_dim() - m->total_dim(),
                   "dim Omega^1 != dim P - dim M");
    auto sub = submodule_from(*pc.cover_ptr, ker);
    // minimal generators: kernel basis vectors outside J*K
    Module<F> K = std::move(sub.mod);
    auto radK = K.radical_of(K.full_space());
    K.tops.clear();
    auto span = radK;
    for (int v = 1; v <= K.num_vertices(); ++v)
        for (int i = 0; i < K.dims[v]; ++i) {
            auto u = K.unit(v, i);
            if (span.grow(u, f))
                K.tops.push_back(u);
        }
    return K;
}

template <class F>
bool is_projective_module(const ModulePtr<F>& m) {
    if (m->total_dim() == 0)
        return true;
    auto pc = projective_cover(m);
    return pc.cover_ptr->total_dim() == m->total_dim();
}

template <class F>
Module<F> syzygy(const ModulePtr<F>& m, int k) {
    if (k <= 0)
        return *m;
    ModulePtr<F> cur = m;
    Module<F> result = *m;
    for (int i = 0; i < k; ++i) {
        result = syzygy_once(cur);
        cur = make_module<F>(result);
    }
    return result;
}

// ---- projective dimension ----

struct PdimResult {
    enum Kind { Finite, Infinite, AtLeast } kind = Finite;
    int value = 0;
    std::vector<int> chain_dims;     // dims of M, Omega^1, ...
    std::vector<std::string> cycle;  // Infinite certificate (monomial case)
    std::string note;

    bool finite() const { return kind == Finite; }
    std::string str() const {
        switch (kind) {
        case Finite:
            return std::to_string(value);
        case Infinite:
            return "infinity";
        default:
            return ">=" + std::to_string(value);
        }
    }
};

// Dependency table over a monomial algebra: Omega(Lambda p) = (+) Lambda q over
// the minimal nonzero paths q with q p = 0, giving pdim by cycle reachability.
template <class F>
class PathPdimTable {
  public:
    explicit PathPdimTable(const Algebra<F>& a) : alg(&a) {
        if (!a.is_monomial())
            throw refusal("pdim path table requires a monomial algebra");
        build();
    }

    const Algebra<F>* alg;

    PdimResult path_pdim(int path_id) const {
        auto it = table_.find(path_id);
        check_internal(it != table_.end(), "path missing from pdim table");
        return it->second;
    }

    PdimResult simple_pdim(int vertex) const {
        PdimResult r;
        auto arrows = alg->quiver().arrows_from(vertex);
        if (arrows.empty()) {
            r.kind = PdimResult::Finite;
            r.value = 0;
            return r;
        }
        int best = -1;
        for (int ai : arrows) {
            Path p;
            p.source = vertex;
            p.word = {ai};
            auto sub = path_pdim(alg->path_id(p));
            if (sub.kind == PdimResult::Infinite) {
                sub.cycle.insert(sub.cycle.begin(),
                                 "J e_" + std::to_string(vertex) + " contains Lambda*" +
                                     alg->quiver().arrows[ai].name);
                return sub;
            }
            best = std::max(best, sub.value);
        }
        r.value = best + 1;
        return r;
    }

    const std::map<int, std::vector<int>>& children() const { return children_; }

  private:
    std::map<int, std::vector<int>> children_;
    std::map<int, PdimResult> table_;

    bool concat_is_zero(const Path& q, const Path& p) const {
        // q p (q after p); zero iff too long or not a basis path
        if (q.source != p.target(alg->quiver()))
            return true;
        Path qp = q.after(p, alg->quiver());
        if (qp.length() >= alg->pres.loewy_bound)
            return true;
        int id = alg->path_id(qp);
        return id < 0 || !alg->path_is_basis(id);
    }

    void build() {
        const auto& q = alg->quiver();
        for (int pid : alg->basis) {
            const Path& p = alg->path(pid);
            int t = p.target(q);
            std::vector<int> kids;
            for (int qid : alg->basis) {
                const Path& cand = alg->path(qid);
                if (cand.source != t || cand.length() == 0)
                    continue;
                if (!concat_is_zero(cand, p))
                    continue;
                // minimality: the longest proper right subpath must act nonzero
                Path shorter = cand;
                shorter.word.pop_back();
                if (shorter.length() > 0 || true) {
                    if (!concat_is_zero(shorter, p))
                        kids.push_back(qid);
                }
            }
            children_[pid] = kids;
        }
        // nodes reaching a cycle are infinite; the rest form a DAG
        std::map<int, int> state; // 0 unvisited, 1 on stack, 2 done
        std::function<void(int)> dfs = [&](int u) {
            state[u] = 1;
            PdimResult res;
            res.kind = PdimResult::Finite;
            res.value = 0;
            bool inf = false;
            std::vector<std::string> cyc;
            int best = -1;
            for (int c : children_[u]) {
                if (state[c] == 1) {
                    inf = true;
                    cyc = {"cycle through Lambda*" + alg->path(c).str(alg->quiver())};
                    continue;
                }
                if (state[c] == 0)
                    dfs(c);
                const auto& sub = table_[c];
                if (sub.kind == PdimResult::Infinite) {
                    inf = true;
                    cyc = sub.cycle;
                    cyc.insert(cyc.begin(), "Omega(Lambda*" + alg->path(u).str(alg->quiver()) +
                                                ") contains Lambda*" +
                                                alg->path(c).str(alg->quiver()));
                } else {
                    best = std::max(best, sub.value);
                }
            }
            if (inf) {
                res.kind = PdimResult::Infinite;
                res.cycle = cyc;
            } else if (children_[u].empty()) {
                res.kind = PdimResult::Finite;
                res.value = 0;
            } else {
                res.kind = PdimResult::Finite;
                res.value = best + 1;
            }
            table_[u] = res;
            state[u] = 2;
        };
        for (int pid : alg->basis)
            if (state[pid] == 0)
                dfs(pid);
    }
};

// Lambda q as a module with its canonical generator marked.
template <class F>
Module<F> path_module(const Algebra<F>& a, const Path& q) {
    int id = a.path_id(q);
    if (id < 0 || !a.path_is_basis(id))
        throw input_error("path " + q.str(a.quiver()) + " is zero in the algebra");
    auto reg = regular_module(a, q.source);
    // locate the basis coordinate of q inside the regular module
    auto ids = a.basis_with_source(q.source);
    std::vector<std::vector<int>> by_vertex(a.num_vertices() + 1);
    for (int pid : ids)
        by_vertex[a.path(pid).target(a.quiver())].push_back(pid);
    int v = q.target(a.quiver());
    int idx = -1;
    for (size_t i = 0; i < by_vertex[v].size(); ++i)
        if (by_vertex[v][i] == id)
            idx = static_cast<int>(i);
    check_internal(idx >= 0, "basis path not found in regular module");
    auto gen = reg.unit(v, idx);
    auto sub = reg.generated_submodule({gen});
    auto s = submodule_from(reg, sub);
    Module<F> out = std::move(s.mod);
    out.tops = {s.restrict(sub, gen, a.fld)};
    return out;
}

namespace detail {

// Try to express a module as a direct sum of path modules and return their
// pdims via the table. Succeeds on monomial fixtures (syzygies of path-presented
// modules decompose into path modules).
template <class F>
std::optional<PdimResult> pdim_by_matching(const ModulePtr<F>& m, const PathPdimTable<F>& table,
                                           std::mt19937_64& rng) {
    const Algebra<F>& a = *m->alg;
    auto dec = decompose(m, rng);
    int best = 0;
    for (const auto& piece : dec.pieces) {
        bool matched = false;
        for (int pid : a.basis) {
            // quick size filter: dim Lambda q = number of basis paths with q as right subpath
            const Path& q = a.path(pid);
            int dim = 0;
            for (int rid : a.basis)
                if (is_right_subpath(q, a.path(rid)))
                    ++dim;
            if (dim != piece.piece->total_dim())
                continue;
            auto pm = make_module<F>(path_module(a, q));
            if (pm->dim_vector() != piece.piece->dim_vector())
                continue;
            if (!is_isomorphic(pm, piece.piece, rng).isomorphic)
                continue;
            auto r = table.path_pdim(pid);
            if (r.kind == PdimResult::Infinite)
                return r;
            best = std::max(best, r.value);
            matched = true;
            break;
        }
        if (!matched)
            return std::nullopt;
    }
    PdimResult r;
    r.kind = PdimResult::Finite;
    r.value = best;
    return r;
}

} // namespace detail

// Projective dimension. Exact over monomial algebras (the path table decides);
// bounded syzygy iteration otherwise.
template <class F>
PdimResult pdim(const ModulePtr<F>& m, int bound, std::mt19937_64& rng) {
    if (bound < 1)
        throw input_error("pdim bound must be >= 1");
    const Algebra<F>& a = *m->alg;
    bool monomial = a.is_monomial();
    std::optional<PathPdimTable<F>> table;
    if (monomial)
        table.emplace(a);

    PdimResult out;
    ModulePtr<F> cur = m;
    out.chain_dims.push_back(cur->total_dim());
    for (int k = 0; k <= bound; ++k) {
        if (cur->total_dim() == 0 || is_projective_module(cur)) {
            out.kind = PdimResult::Finite;
            out.value = k;
            return out;
        }
        if (monomial && k >= 1) {
            if (auto matched = detail::pdim_by_matching(cur, *table, rng)) {
                matched->chain_dims = out.chain_dims;
                if (matched->kind == PdimResult::Finite)
                    matched->value += k;
                return *matched;
            }
        }
        if (k == bound)
            break;
        cur = make_module<F>(syzygy_once(cur));
        out.chain_dims.push_back(cur->total_dim());
    }
    out.kind = PdimResult::AtLeast;
    out.value = bound;
    out.note = monomial ? "monomial matching failed; bounded iteration only" : "bounded iteration";
    return out;
}

template <class F>
int default_pdim_bound(const Algebra<F>& a) {
    return 2 * a.loewy_length * a.num_vertices();
}

template <class F>
PdimResult pdim(const ModulePtr<F>& m, std::mt19937_64& rng) {
    return pdim(m, default_pdim_bound(*m->alg), rng);
}

// sup of (finite) pdims over a list of approximations, with the witness.
template <class F>
struct FindimReport {
    int sup = 0;
    size_t witness = 0;
    std::string provenance =
        "sup p dim A_i; equals l fin dim only under contravariant finiteness of a "
        "resolving subcategory";
};

template <class F>
FindimReport<F> findim_report(const Algebra<F>& a, const std::vector<ModulePtr<F>>& mods,
                              std::mt19937_64& rng) {
    FindimReport<F> rep;
    bool any = false;
    for (size_t i = 0; i < mods.size(); ++i) {
        auto r = pdim(mods[i], default_pdim_bound(a), rng);
        if (!r.finite())
            throw refusal("findim_report input " + std::to_string(i) +
                          " has non-finite projective dimension (" + r.str() + ")");
        if (!any || r.value > rep.sup) {
            rep.sup = r.value;
            rep.witness = i;
            any = true;
        }
    }
    return rep;
}

} // namespace saguaro
