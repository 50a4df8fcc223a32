#pragma once
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "matrix.hpp"
#include "parse.hpp"
#include "quiver.hpp"

namespace saguaro {

// Linear combination of enumerated paths, sparse: (path id -> coefficient).
template <class F>
using PathCombo = std::map<int, typename F::Elem>;

// The finite-dimensional algebra KGamma/I in a normal-form path basis.
//
// All composable paths of length < loewy_bound are enumerated. Within each
// parallel class (source, target) the span of all relation instances u*r*v is
// eliminated with pivots on the smallest path in (length, name-lex) order,
// so a dead path rewrites into strictly larger basis paths. Consequences:
// J^k is spanned by the basis paths of length >= k, and left/right
// truncations of basis paths are again basis paths.
template <class F>
class Algebra {
  public:
    using E = typename F::Elem;

    Presentation pres;
    F fld;
    std::vector<Path> paths;      // all composable paths of length < L
    std::vector<int> basis;       // path ids forming the basis, sorted
    std::vector<bool> is_basis_;  // by path id
    std::vector<bool> is_dead_;   // pivot paths
    int loewy_length = 1;

    Algebra(const Presentation& p, const F& f) : pres(p), fld(f) { build(); }

    const Quiver& quiver() const { return pres.quiver; }
    int num_vertices() const { return pres.quiver.num_vertices; }
    int num_arrows() const { return static_cast<int>(pres.quiver.arrows.size()); }

    int path_id(const Path& p) const {
        auto it = path_ids_.find(key_of(p));
        return it == path_ids_.end() ? -1 : it->second;
    }
    const Path& path(int id) const { return paths[id]; }
    bool path_is_basis(int id) const { return is_basis_[id]; }

    int dim() const { return static_cast<int>(basis.size()); }

    std::vector<int> basis_with_source(int v) const {
        std::vector<int> out;
        for (int id : basis)
            if (paths[id].source == v)
                out.push_back(id);
        return out;
    }

    int dim_at_vertex_projective(int e) const {
        return static_cast<int>(basis_with_source(e).size());
    }

    // Normal form of a single enumerated path id.
    const PathCombo<F>& normal_form_of(int id) const {
        static const PathCombo<F> empty;
        if (is_basis_[id])
            check_internal(false, "normal_form_of called on basis path; handled by caller");
        auto it = rewrite_.find(id);
        if (it != rewrite_.end())
            return it->second;
        return empty;
    }

    // Normal form of an arbitrary linear combination of (possibly long) paths.
    PathCombo<F> normal_form(const std::vector<std::pair<E, Path>>& combo) const {
        PathCombo<F> out;
        for (const auto& [c, p] : combo) {
            if (fld.is_zero(c))
                continue;
            if (!p.composable(pres.quiver))
                throw input_error("non-composable path " + p.str(pres.quiver) +
                                  " in normal_form input");
            if (p.length() >= pres.loewy_bound)
                continue; // beyond the loewy bound, hence zero
            int id = path_id(p);
            check_internal(id >= 0, "enumerated path missing");
            accumulate(out, id, c);
        }
        return out;
    }

    // Product of two normal-form path classes (by id), as a basis combination.
    PathCombo<F> multiply(int left, int right) const {
        const Path& l = paths[left];
        const Path& r = paths[right];
        if (r.target(pres.quiver) != l.source)
            return {};
        Path prod = l.after(r, pres.quiver);
        PathCombo<F> out;
        if (prod.length() >= pres.loewy_bound)
            return out;
        int id = path_id(prod);
        check_internal(id >= 0, "product path missing from enumeration");
        accumulate(out, id, fld.one());
        return out;
    }

    // Left multiplication of a basis combination by one arrow.
    PathCombo<F> arrow_times(int arrow, const PathCombo<F>& x) const {
        PathCombo<F> out;
        for (const auto& [id, c] : x) {
            const Path& p = paths[id];
            if (p.target(pres.quiver) != pres.quiver.arrows[arrow].source)
                continue;
            Path q = p;
            q.word.push_back(arrow);
            if (q.length() >= pres.loewy_bound)
                continue;
            int qid = path_id(q);
            check_internal(qid >= 0, "arrow product missing from enumeration");
            accumulate(out, qid, c);
        }
        return out;
    }

    // Dimensions of J^k / J^{k+1} restricted to basis paths with given source.
    std::vector<int> radical_layer_dims(int source) const {
        std::vector<int> dims(loewy_length, 0);
        for (int id : basis)
            if (paths[id].source == source)
                dims[paths[id].length()]++;
        return dims;
    }

    bool is_left_serial() const {
        for (int v = 1; v <= num_vertices(); ++v)
            for (int d : radical_layer_dims(v))
                if (d > 1)
                    return false;
        return true;
    }

    bool is_monomial() const { return pres.is_monomial(); }

    E scalar(const Scalar& s) const {
        E num = fld.from_long(s.num);
        if (s.den == 1)
            return num;
        return fld.mul(num, fld.inv(fld.from_long(s.den)));
    }

  private:
    std::unordered_map<std::string, int> path_ids_;
    std::map<int, PathCombo<F>> rewrite_; // dead path id -> basis combination
    std::vector<int> name_rank_;          // arrow index -> rank in name order

    static std::string key_of(const Path& p) {
        std::string k = std::to_string(p.source);
        for (int a : p.word)
            k += "," + std::to_string(a);
        return k;
    }

    void accumulate(PathCombo<F>& out, int id, const E& c) const {
        if (is_basis_[id]) {
            add_term(out, id, c);
            return;
        }
        auto it = rewrite_.find(id);
        check_internal(it != rewrite_.end(), "dead path without rewrite rule");
        for (const auto& [bid, bc] : it->second)
            add_term(out, bid, fld.mul(c, bc));
    }
    void add_term(PathCombo<F>& out, int id, const E& c) const {
        auto [it, fresh] = out.emplace(id, c);
        if (!fresh) {
            it->second = fld.add(it->second, c);
            if (fld.is_zero(it->second))
                out.erase(it);
        }
    }

    // Ascending (length, name-lex, source) order used for elimination.
    bool path_less(const Path& a, const Path& b) const {
        if (a.length() != b.length())
            return a.length() < b.length();
        for (int i = a.length() - 1; i >= 0; --i) { // compare last-applied first
            if (name_rank_[a.word[i]] != name_rank_[b.word[i]])
                return name_rank_[a.word[i]] < name_rank_[b.word[i]];
        }
        return a.source < b.source;
    }

    void build() {
        pres.validate();
        const Quiver& q = pres.quiver;
        const int L = pres.loewy_bound;

        name_rank_.resize(q.arrows.size());
        {
            std::vector<int> order(q.arrows.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return q.arrows[a].name < q.arrows[b].name;
            });
            for (size_t r = 0; r < order.size(); ++r)
                name_rank_[order[r]] = static_cast<int>(r);
        }

        // Enumerate composable paths of length < L, shortest first.
        for (int v = 1; v <= q.num_vertices; ++v)
            intern(Path::trivial(v));
        size_t frontier = 0;
        while (frontier < paths.size()) {
            Path p = paths[frontier++];
            if (p.length() + 1 >= L)
                continue;
            int t = p.target(q);
            for (int a : q.arrows_from(t)) {
                Path np = p;
                np.word.push_back(a);
                intern(np);
            }
        }

        // Reject relations that degenerate in this characteristic.
        for (size_t ri = 0; ri < pres.relations.size(); ++ri) {
            bool all_zero = true;
            for (const auto& t : pres.relations[ri].terms)
                if (!fld.is_zero(scalar(t.coeff)))
                    all_zero = false;
            if (all_zero)
                throw input_error("relation " + std::to_string(ri + 1) +
                                  " vanishes identically over " + fld.name() +
                                  " (degenerate characteristic)");
        }

        // Group paths by (source, target) and sort ascending inside each class.
        std::map<std::pair<int, int>, std::vector<int>> classes;
        for (size_t id = 0; id < paths.size(); ++id)
            classes[{paths[id].source, paths[id].target(q)}].push_back(static_cast<int>(id));
        for (auto& [st, ids] : classes)
            std::sort(ids.begin(), ids.end(),
                      [&](int a, int b) { return path_less(paths[a], paths[b]); });

        is_basis_.assign(paths.size(), false);
        is_dead_.assign(paths.size(), false);

        for (auto& [st, ids] : classes) {
            auto [src, tgt] = st;
            std::map<int, int> col_of; // path id -> column
            for (size_t i = 0; i < ids.size(); ++i)
                col_of[ids[i]] = static_cast<int>(i);

            // All truncated instances u * r * v landing in this class.
            Mat<F> rows(0, static_cast<int>(ids.size()), fld);
            for (const auto& rel : pres.relations) {
                int rs = rel.terms[0].path.source;
                int rt = rel.terms[0].path.target(q);
                for (size_t vi = 0; vi < paths.size(); ++vi) {
                    const Path& v = paths[vi];
                    if (v.source != src || v.target(q) != rs)
                        continue;
                    for (size_t ui = 0; ui < paths.size(); ++ui) {
                        const Path& u = paths[ui];
                        if (u.source != rt || u.target(q) != tgt)
                            continue;
                        auto row = zero_vec(static_cast<int>(ids.size()), fld);
                        bool nonzero = false;
                        for (const auto& term : rel.terms) {
                            int total = v.length() + term.path.length() + u.length();
                            if (total >= L)
                                continue; // truncated away
                            Path inst = u.after(term.path.after(v, q), q);
                            auto it = col_of.find(path_id(inst));
                            check_internal(it != col_of.end(), "instance path missing");
                            row[it->second] =
                                fld.add(row[it->second], scalar(term.coeff));
                            nonzero = true;
                        }
                        if (nonzero && !is_zero_vec<F>(row, fld))
                            rows.append_row(row);
                    }
                }
            }
            rref(rows, fld);
            std::vector<bool> pivot(ids.size(), false);
            for (int r = 0; r < rows.rows; ++r) {
                int c = 0;
                while (c < rows.cols && fld.is_zero(rows.at(r, c)))
                    ++c;
                check_internal(c < rows.cols, "zero row after rref");
                pivot[c] = true;
                int dead_id = ids[c];
                is_dead_[dead_id] = true;
                PathCombo<F> rw;
                for (int j = c + 1; j < rows.cols; ++j)
                    if (!fld.is_zero(rows.at(r, j)))
                        rw[ids[j]] = fld.neg(rows.at(r, j));
                rewrite_[dead_id] = std::move(rw);
            }
            for (size_t i = 0; i < ids.size(); ++i)
                if (!pivot[i])
                    is_basis_[ids[i]] = true;
        }

        // Rewrites may reference dead paths of the same class (non-pivot columns are
        // basis by construction, so they do not), but assert it anyway.
        for (auto& [id, rw] : rewrite_)
            for (const auto& [bid, c] : rw)
                check_internal(is_basis_[bid], "rewrite references non-basis path");

        for (size_t id = 0; id < paths.size(); ++id)
            if (is_basis_[id])
                basis.push_back(static_cast<int>(id));

        loewy_length = 1;
        for (int id : basis)
            loewy_length = std::max(loewy_length, paths[id].length() + 1);

        // Every relation must rewrite to zero.
        for (const auto& rel : pres.relations) {
            std::vector<std::pair<E, Path>> combo;
            for (const auto& t : rel.terms)
                combo.emplace_back(scalar(t.coeff), t.path);
            check_internal(normal_form(combo).empty(), "relation does not rewrite to zero");
        }
    }

    void intern(const Path& p) {
        auto k = key_of(p);
        if (path_ids_.count(k))
            return;
        path_ids_[k] = static_cast<int>(paths.size());
        paths.push_back(p);
    }
};

template <class F>
struct LoewyData {
    int loewy_length = 1;
    std::vector<std::vector<int>> projective_layers; // per vertex
    bool left_serial = false;
};

template <class F>
LoewyData<F> loewy_data(const Algebra<F>& a) {
    LoewyData<F> d;
    d.loewy_length = a.loewy_length;
    for (int v = 1; v <= a.num_vertices(); ++v)
        d.projective_layers.push_back(a.radical_layer_dims(v));
    d.left_serial = a.is_left_serial();
    return d;
}

} // namespace saguaro
