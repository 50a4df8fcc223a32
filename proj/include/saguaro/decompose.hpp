#pragma once
#include <optional>
#include <random>

#include "graphs.hpp"
#include "module.hpp"

namespace saguaro {

enum class Certainty { Certified, Heuristic };

inline const char* certainty_name(Certainty c) {
    return c == Certainty::Certified ? "certified" : "heuristic";
}

// ---- endomorphism helpers ----

// Minimal polynomial of an endomorphism, monic, lowest-degree-first coefficients.
template <class F>
std::vector<typename F::Elem> minimal_polynomial(const ModuleMap<F>& phi, const F& f) {
    const Module<F>& m = *phi.source;
    int nv = m.num_vertices();
    int total = 0;
    for (int v = 1; v <= nv; ++v)
        total += m.dims[v] * m.dims[v];
    auto flatten = [&](const std::vector<Mat<F>>& mats) {
        std::vector<typename F::Elem> out;
        out.reserve(total);
        for (int v = 1; v <= nv; ++v)
            out.insert(out.end(), mats[v].a.begin(), mats[v].a.end());
        return out;
    };
    std::vector<std::vector<typename F::Elem>> powers;
    ModuleMap<F> cur = identity_map<F>(phi.source);
    powers.push_back(flatten(cur.mats));
    Mat<F> span(0, total, f);
    span.append_row(powers[0]);
    rref(span, f);
    while (true) {
        cur = map_compose(phi, cur);
        auto vec = flatten(cur.mats);
        if (in_span(span, vec, f)) {
            // solve for coefficients: vec = sum c_k powers[k]
            Mat<F> sys(total, static_cast<int>(powers.size()), f);
            for (size_t k = 0; k < powers.size(); ++k)
                for (int i = 0; i < total; ++i)
                    sys.at(i, static_cast<int>(k)) = powers[k][i];
            auto sol = solve(sys, vec, f);
            check_internal(sol.has_value(), "minimal polynomial solve failed");
            std::vector<typename F::Elem> poly; // x^d - sum c_k x^k
            for (auto& c : *sol)
                poly.push_back(f.neg(c));
            poly.push_back(f.one());
            return poly;
        }
        powers.push_back(vec);
        span.append_row(vec);
        rref(span, f);
        check_internal(powers.size() <= static_cast<size_t>(m.total_dim()) + 1,
                       "minimal polynomial runaway");
    }
}

namespace detail {

// Rational roots of a monic polynomial over Q via the rational root theorem.
inline std::vector<boost::multiprecision::mpq_rational>
rational_roots(const std::vector<boost::multiprecision::mpq_rational>& poly) {
    using Q = boost::multiprecision::mpq_rational;
    using Z = boost::multiprecision::mpz_int;
    // clear denominators
    Z lcm = 1;
    for (const auto& c : poly)
        lcm = boost::multiprecision::lcm(lcm, Z(boost::multiprecision::denominator(c)));
    std::vector<Z> ip;
    for (const auto& c : poly)
        ip.push_back(Z(boost::multiprecision::numerator(c)) * (lcm / Z(boost::multiprecision::denominator(c))));
    while (!ip.empty() && ip.back() == 0)
        ip.pop_back();
    if (ip.size() <= 1)
        return {};
    // strip powers of x (root 0)
    std::vector<Q> roots;
    size_t shift = 0;
    while (shift < ip.size() && ip[shift] == 0)
        ++shift;
    if (shift > 0)
        roots.push_back(Q(0));
    Z a0 = ip[shift], an = ip.back();
    auto divisors = [](Z n) {
        std::vector<Z> ds;
        if (n < 0)
            n = -n;
        for (Z d = 1; d * d <= n && d < 100000; ++d)
            if (n % d == 0) {
                ds.push_back(d);
                ds.push_back(n / d);
            }
        return ds;
    };
    auto eval = [&](const Q& x) {
        Q acc = 0;
        for (size_t k = ip.size(); k-- > 0;)
            acc = acc * x + Q(ip[k]);
        return acc;
    };
    for (const auto& p : divisors(a0))
        for (const auto& q : divisors(an))
            for (int sgn : {1, -1}) {
                Q cand = Q(p) * sgn / Q(q);
                if (eval(cand) == 0 &&
                    std::find(roots.begin(), roots.end(), cand) == roots.end())
                    roots.push_back(cand);
            }
    return roots;
}

template <class F>
std::vector<typename F::Elem> shift_candidates(const ModuleMap<F>& phi, const F& f,
                                               std::mt19937_64& rng) {
    std::vector<typename F::Elem> out;
    if constexpr (F::is_prime_field) {
        if (f.p <= 64) {
            for (std::uint64_t l = 0; l < f.p; ++l)
                out.push_back(l);
        } else {
            auto mp = minimal_polynomial(phi, f);
            // brute scan would be too big; try a handful of random shifts
            for (int i = 0; i < 16; ++i)
                out.push_back(f.random(rng));
            (void)mp;
        }
    } else {
        auto mp = minimal_polynomial(phi, f);
        for (const auto& r : rational_roots(mp))
            out.push_back(r);
    }
    return out;
}

} // namespace detail

template <class F>
ModuleMap<F> map_power(const ModuleMap<F>& phi, int n) {
    ModuleMap<F> acc = identity_map<F>(phi.source);
    for (int i = 0; i < n; ++i)
        acc = map_compose(phi, acc);
    return acc;
}

template <class F>
ModuleMap<F> map_shift(const ModuleMap<F>& phi, const typename F::Elem& lambda, const F& f) {
    ModuleMap<F> out = phi;
    for (size_t v = 1; v < out.mats.size(); ++v)
        for (int i = 0; i < out.mats[v].rows; ++i)
            out.mats[v].at(i, i) = f.sub(out.mats[v].at(i, i), lambda);
    return out;
}

// ---- isomorphism testing ----

template <class F>
struct IsoResult {
    bool isomorphic = false;
    Certainty certainty = Certainty::Certified;
    std::optional<ModuleMap<F>> witness;
};

template <class F>
std::vector<int> iso_invariants(const Module<F>& m) {
    std::vector<int> inv = m.dim_vector();
    auto filt = m.radical_filtration();
    inv.push_back(static_cast<int>(filt.size()));
    for (const auto& layer : filt)
        for (size_t v = 1; v < layer.part.size(); ++v)
            inv.push_back(layer.part[v].rows);
    for (int x : m.socle_multiset())
        inv.push_back(x);
    return inv;
}

template <class F>
IsoResult<F> is_isomorphic(const ModulePtr<F>& m, const ModulePtr<F>& n, std::mt19937_64& rng) {
    const F& f = m->fld();
    IsoResult<F> res;
    if (m->dim_vector() != n->dim_vector())
        return res; // certified no
    if (m->total_dim() == 0) {
        res.isomorphic = true;
        res.witness = identity_map<F>(m);
        return res;
    }
    if (iso_invariants(*m) != iso_invariants(*n))
        return res; // certified no
    auto H = hom_space(m, n);
    if (H.empty())
        return res; // certified no
    auto dimH = H.size();

    auto try_combo = [&](const std::vector<typename F::Elem>& c) -> bool {
        auto h = combine_maps(H, c, f);
        if (h.is_iso()) {
            res.isomorphic = true;
            res.witness = std::move(h);
            return true;
        }
        return false;
    };

    if constexpr (F::is_prime_field) {
        double combos = std::pow(static_cast<double>(f.p), static_cast<double>(dimH));
        if (combos <= 65536.0) {
            std::vector<typename F::Elem> c(dimH, f.zero());
            while (true) {
                if (try_combo(c))
                    return res;
                size_t i = 0;
                while (i < dimH) {
                    c[i] = f.add(c[i], f.one());
                    if (!f.is_zero(c[i]))
                        break;
                    ++i;
                }
                if (i == dimH)
                    break;
            }
            res.isomorphic = false;
            res.certainty = Certainty::Certified; // exhaustive
            return res;
        }
    }
    // random search; basis maps first
    for (size_t i = 0; i < dimH; ++i) {
        std::vector<typename F::Elem> c(dimH, f.zero());
        c[i] = f.one();
        if (try_combo(c))
            return res;
    }
    for (int trial = 0; trial < 120; ++trial) {
        std::vector<typename F::Elem> c(dimH);
        for (auto& x : c)
            x = f.random(rng);
        if (try_combo(c))
            return res;
    }
    res.isomorphic = false;
    res.certainty = Certainty::Heuristic;
    return res;
}

// ---- Krull-Schmidt decomposition via Fitting's lemma ----

template <class F>
struct DecompositionPiece {
    ModulePtr<F> piece;
    ModuleMap<F> inclusion; // piece -> parent
    Certainty indecomposability = Certainty::Certified;
};

template <class F>
struct DecompositionResult {
    std::vector<DecompositionPiece<F>> pieces;
    // iso classes: representative index in pieces + multiplicity
    std::vector<std::pair<size_t, int>> classes;
    Certainty certainty = Certainty::Certified;
};

namespace detail {

// One Fitting split attempt. Returns (K, I) graded subspaces on success.
template <class F>
std::optional<std::pair<GradedSubspace<F>, GradedSubspace<F>>>
fitting_split(const ModulePtr<F>& m, const ModuleMap<F>& psi) {
    const F& f = m->fld();
    int n = m->total_dim();
    auto pw = map_power(psi, n);
    auto K = pw.kernel_space();
    auto I = pw.image();
    int dk = K.dim(), di = I.dim();
    if (dk == 0 || di == 0)
        return std::nullopt;
    check_internal(dk + di == n, "Fitting dimensions do not add up");
    return std::make_pair(std::move(K), std::move(I));
}

// Exhaustive idempotent search in End(M) over a small prime field.
template <class F>
std::optional<std::pair<GradedSubspace<F>, GradedSubspace<F>>>
idempotent_split(const ModulePtr<F>& m, const std::vector<ModuleMap<F>>& E, const F& f,
                 bool& exhaustive) {
    exhaustive = false;
    if constexpr (!F::is_prime_field) {
        return std::nullopt;
    } else {
        double combos = std::pow(static_cast<double>(f.p), static_cast<double>(E.size()));
        if (combos > 65536.0)
            return std::nullopt;
        exhaustive = true;
        std::vector<typename F::Elem> c(E.size(), f.zero());
        while (true) {
            size_t i = 0;
            while (i < E.size()) {
                c[i] = f.add(c[i], f.one());
                if (!f.is_zero(c[i]))
                    break;
                ++i;
            }
            if (i == E.size())
                break;
            auto e = combine_maps(E, c, f);
            auto ee = map_compose(e, e);
            bool idem = true;
            for (size_t v = 1; v < e.mats.size() && idem; ++v)
                idem = ee.mats[v] == e.mats[v];
            if (!idem)
                continue;
            auto K = e.kernel_space();
            auto I = e.image();
            if (K.dim() == 0 || I.dim() == 0)
                continue; // 0 or identity
            check_internal(K.dim() + I.dim() == m->total_dim(), "idempotent split dims");
            return std::make_pair(std::move(K), std::move(I));
        }
        return std::nullopt;
    }
}

} // namespace detail

// Split off one direct summand pair, or certify/assume indecomposability.
template <class F>
std::optional<std::pair<GradedSubspace<F>, GradedSubspace<F>>>
try_split(const ModulePtr<F>& m, std::mt19937_64& rng, Certainty& certainty, int budget = 24) {
    const F& f = m->fld();
    certainty = Certainty::Certified;
    if (m->total_dim() <= 1)
        return std::nullopt;
    auto E = hom_space(m, m);
    check_internal(!E.empty(), "End(M) is zero for nonzero M");
    if (E.size() == 1)
        return std::nullopt; // End = K, local: certified indecomposable

    for (int trial = 0; trial < budget; ++trial) {
        std::vector<typename F::Elem> c(E.size());
        for (auto& x : c)
            x = f.random(rng);
        auto phi = combine_maps(E, c, f);
        if (auto s = detail::fitting_split(m, phi))
            return s;
        for (const auto& lambda : detail::shift_candidates(phi, f, rng)) {
            auto shifted = map_shift(phi, lambda, f);
            if (auto s = detail::fitting_split(m, shifted))
                return s;
        }
    }
    bool exhaustive = false;
    if (auto s = detail::idempotent_split(m, E, f, exhaustive))
        return s;
    certainty = exhaustive ? Certainty::Certified : Certainty::Heuristic;
    return std::nullopt;
}

template <class F>
DecompositionResult<F> decompose(const ModulePtr<F>& m, std::mt19937_64& rng) {
    const F& f = m->fld();
    DecompositionResult<F> out;
    if (m->total_dim() == 0)
        return out;

    struct WorkItem {
        ModulePtr<F> mod;
        ModuleMap<F> incl;
    };
    std::vector<WorkItem> work;
    work.push_back({m, identity_map<F>(m)});

    while (!work.empty()) {
        auto item = std::move(work.back());
        work.pop_back();
        Certainty cert = Certainty::Certified;
        auto split = try_split(item.mod, rng, cert);
        if (!split) {
            out.pieces.push_back({item.mod, item.incl, cert});
            if (cert == Certainty::Heuristic)
                out.certainty = Certainty::Heuristic;
            continue;
        }
        for (const auto& sub : {split->first, split->second}) {
            auto s = submodule_from(*item.mod, sub);
            // mark minimal generators of the summand as tops for graphing
            auto piece = make_module<F>(std::move(s.mod));
            ModuleMap<F> incl;
            incl.source = piece;
            incl.target = item.mod;
            incl.mats = s.incl;
            // patch the slot-0 placeholder
            incl.mats[0] = Mat<F>(0, 0, f);
            work.push_back({piece, map_compose(item.incl, incl)});
        }
    }

    // verify: the stacked inclusions give an isomorphism  (+) pieces -> M
    {
        int nv = m->num_vertices();
        for (int v = 1; v <= nv; ++v) {
            Mat<F> block(m->dims[v], 0, f);
            int cols = 0;
            for (const auto& p : out.pieces)
                cols += p.piece->dims[v];
            Mat<F> big(m->dims[v], cols, f);
            int off = 0;
            for (const auto& p : out.pieces) {
                for (int i = 0; i < m->dims[v]; ++i)
                    for (int j = 0; j < p.piece->dims[v]; ++j)
                        big.at(i, off + j) = p.inclusion.mats[v].at(i, j);
                off += p.piece->dims[v];
            }
            check_internal(big.rows == big.cols && is_invertible(big, f),
                           "decomposition does not reassemble to the module");
            (void)block;
        }
    }

    // group by isomorphism
    std::vector<bool> grouped(out.pieces.size(), false);
    for (size_t i = 0; i < out.pieces.size(); ++i) {
        if (grouped[i])
            continue;
        int mult = 1;
        grouped[i] = true;
        for (size_t j = i + 1; j < out.pieces.size(); ++j) {
            if (grouped[j])
                continue;
            auto r = is_isomorphic(out.pieces[i].piece, out.pieces[j].piece, rng);
            if (r.isomorphic) {
                ++mult;
                grouped[j] = true;
            } else if (r.certainty == Certainty::Heuristic) {
                out.certainty = Certainty::Heuristic;
            }
        }
        out.classes.push_back({i, mult});
    }
    return out;
}

// Decide projectivity of a piece: isomorphic to Lambda e for some vertex.
template <class F>
bool piece_is_projective(const ModulePtr<F>& piece, std::mt19937_64& rng) {
    const Algebra<F>& a = *piece->alg;
    for (int v = 1; v <= a.num_vertices(); ++v) {
        if (a.dim_at_vertex_projective(v) != piece->total_dim())
            continue;
        auto pe = make_module<F>(regular_module(a, v));
        if (is_isomorphic(pe, piece, rng).isomorphic)
            return true;
    }
    return false;
}

} // namespace saguaro
