#pragma once
#include <algorithm>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "field.hpp"

namespace saguaro {

// Dense matrix over a runtime field object. Row-major.
// Subspaces of K^n are represented as matrices whose rows form a basis,
// kept in reduced row echelon form so equal subspaces compare equal.
template <class F>
struct Mat {
    using E = typename F::Elem;
    int rows = 0, cols = 0;
    std::vector<E> a;

    Mat() = default;
    Mat(int r, int c, const F& f) : rows(r), cols(c), a(static_cast<size_t>(r) * c, f.zero()) {}

    E& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const E& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    static Mat identity(int n, const F& f) {
        Mat m(n, n, f);
        for (int i = 0; i < n; ++i)
            m.at(i, i) = f.one();
        return m;
    }

    std::vector<E> row(int r) const {
        return std::vector<E>(a.begin() + static_cast<size_t>(r) * cols,
                              a.begin() + static_cast<size_t>(r + 1) * cols);
    }
    void set_row(int r, const std::vector<E>& v) {
        std::copy(v.begin(), v.end(), a.begin() + static_cast<size_t>(r) * cols);
    }
    void append_row(const std::vector<E>& v) {
        a.insert(a.end(), v.begin(), v.end());
        ++rows;
    }

    bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

template <class F>
std::vector<typename F::Elem> zero_vec(int n, const F& f) {
    return std::vector<typename F::Elem>(n, f.zero());
}

template <class F>
bool is_zero_vec(const std::vector<typename F::Elem>& v, const F& f) {
    for (const auto& x : v)
        if (!f.is_zero(x))
            return false;
    return true;
}

template <class F>
void vec_axpy(std::vector<typename F::Elem>& y, const typename F::Elem& c,
              const std::vector<typename F::Elem>& x, const F& f) {
    for (size_t i = 0; i < y.size(); ++i)
        y[i] = f.add(y[i], f.mul(c, x[i]));
}

template <class F>
Mat<F> mat_mul(const Mat<F>& A, const Mat<F>& B, const F& f) {
    check_internal(A.cols == B.rows, "mat_mul shape mismatch");
    Mat<F> C(A.rows, B.cols, f);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const auto& aik = A.at(i, k);
            if (f.is_zero(aik))
                continue;
            for (int j = 0; j < B.cols; ++j)
                C.at(i, j) = f.add(C.at(i, j), f.mul(aik, B.at(k, j)));
        }
    return C;
}

template <class F>
std::vector<typename F::Elem> mat_apply(const Mat<F>& A, const std::vector<typename F::Elem>& x,
                                        const F& f) {
    check_internal(A.cols == static_cast<int>(x.size()), "mat_apply shape mismatch");
    auto y = zero_vec(A.rows, f);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j)
            if (!f.is_zero(A.at(i, j)))
                y[i] = f.add(y[i], f.mul(A.at(i, j), x[j]));
    return y;
}

// In-place reduced row echelon form; returns pivot column per row.
template <class F>
std::vector<int> rref(Mat<F>& m, const F& f) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int sel = -1;
        for (int i = r; i < m.rows; ++i)
            if (!f.is_zero(m.at(i, c))) {
                sel = i;
                break;
            }
        if (sel < 0)
            continue;
        if (sel != r)
            for (int j = 0; j < m.cols; ++j)
                std::swap(m.at(sel, j), m.at(r, j));
        auto piv_inv = f.inv(m.at(r, c));
        for (int j = c; j < m.cols; ++j)
            m.at(r, j) = f.mul(piv_inv, m.at(r, j));
        for (int i = 0; i < m.rows; ++i) {
            if (i == r || f.is_zero(m.at(i, c)))
                continue;
            auto factor = m.at(i, c);
            for (int j = c; j < m.cols; ++j)
                m.at(i, j) = f.sub(m.at(i, j), f.mul(factor, m.at(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    m.rows = r;
    m.a.resize(static_cast<size_t>(r) * m.cols);
    return pivots;
}

template <class F>
int rank_of(Mat<F> m, const F& f) {
    return static_cast<int>(rref(m, f).size());
}

// Basis of the right null space {x : m x = 0}, rows of the result.
template <class F>
Mat<F> kernel(Mat<F> m, const F& f) {
    int n = m.cols;
    auto pivots = rref(m, f);
    std::vector<bool> is_pivot(n, false);
    for (int c : pivots)
        is_pivot[c] = true;
    Mat<F> ker(0, n, f);
    for (int c = 0; c < n; ++c) {
        if (is_pivot[c])
            continue;
        auto v = zero_vec(n, f);
        v[c] = f.one();
        for (size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = f.neg(m.at(static_cast<int>(r), c));
        ker.append_row(v);
    }
    return ker;
}

// Solve A x = b; nullopt when inconsistent.
template <class F>
std::optional<std::vector<typename F::Elem>> solve(const Mat<F>& A,
                                                   const std::vector<typename F::Elem>& b,
                                                   const F& f) {
    Mat<F> aug(A.rows, A.cols + 1, f);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j)
            aug.at(i, j) = A.at(i, j);
        aug.at(i, A.cols) = b[i];
    }
    auto pivots = rref(aug, f);
    for (size_t r = 0; r < pivots.size(); ++r)
        if (pivots[r] == A.cols)
            return std::nullopt;
    auto x = zero_vec(A.cols, f);
    for (size_t r = 0; r < pivots.size(); ++r)
        x[pivots[r]] = aug.at(static_cast<int>(r), A.cols);
    return x;
}

// ---- Row-space (subspace) helpers. All results in RREF. ----

template <class F>
Mat<F> row_space(Mat<F> m, const F& f) {
    rref(m, f);
    return m;
}

template <class F>
Mat<F> span_concat(const Mat<F>& a, const Mat<F>& b, const F& f) {
    check_internal(a.cols == b.cols, "span_concat width mismatch");
    Mat<F> m(0, a.cols, f);
    m.a = a.a;
    m.rows = a.rows;
    m.a.insert(m.a.end(), b.a.begin(), b.a.end());
    m.rows += b.rows;
    rref(m, f);
    return m;
}

// Is v in the row space? Assumes space is in RREF.
template <class F>
bool in_span(const Mat<F>& space, std::vector<typename F::Elem> v, const F& f) {
    for (int r = 0; r < space.rows; ++r) {
        int c = 0;
        while (c < space.cols && f.is_zero(space.at(r, c)))
            ++c;
        if (c == space.cols)
            continue;
        if (!f.is_zero(v[c])) {
            auto factor = v[c];
            for (int j = c; j < space.cols; ++j)
                v[j] = f.sub(v[j], f.mul(factor, space.at(r, j)));
        }
    }
    return is_zero_vec<F>(v, f);
}

// Reduce v modulo the row space (RREF assumed); the residue has zeros in pivot columns.
template <class F>
std::vector<typename F::Elem> reduce_mod(const Mat<F>& space, std::vector<typename F::Elem> v,
                                         const F& f) {
    for (int r = 0; r < space.rows; ++r) {
        int c = 0;
        while (c < space.cols && f.is_zero(space.at(r, c)))
            ++c;
        if (c == space.cols || f.is_zero(v[c]))
            continue;
        auto factor = v[c];
        for (int j = c; j < space.cols; ++j)
            v[j] = f.sub(v[j], f.mul(factor, space.at(r, j)));
    }
    return v;
}

// Intersection of two row spaces via the kernel of [A; B] stacked pairing.
template <class F>
Mat<F> intersect_spaces(const Mat<F>& A, const Mat<F>& B, const F& f) {
    check_internal(A.cols == B.cols, "intersect width mismatch");
    if (A.rows == 0 || B.rows == 0)
        return Mat<F>(0, A.cols, f);
    // x = u A = v B  <=>  [A^T | -B^T] (u,v)^T = 0.
    Mat<F> sys(A.cols, A.rows + B.rows, f);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j)
            sys.at(j, i) = A.at(i, j);
    for (int i = 0; i < B.rows; ++i)
        for (int j = 0; j < B.cols; ++j)
            sys.at(j, A.rows + i) = f.neg(B.at(i, j));
    Mat<F> ker = kernel(sys, f);
    Mat<F> out(0, A.cols, f);
    for (int r = 0; r < ker.rows; ++r) {
        auto v = zero_vec(A.cols, f);
        for (int i = 0; i < A.rows; ++i)
            if (!f.is_zero(ker.at(r, i)))
                vec_axpy<F>(v, ker.at(r, i), A.row(i), f);
        out.append_row(v);
    }
    rref(out, f);
    return out;
}

template <class F>
bool space_contains(const Mat<F>& big, const Mat<F>& small, const F& f) {
    for (int r = 0; r < small.rows; ++r)
        if (!in_span(big, small.row(r), f))
            return false;
    return true;
}

template <class F>
bool spaces_equal(const Mat<F>& a, const Mat<F>& b, const F& f) {
    return a.rows == b.rows && space_contains(a, b, f) && space_contains(b, a, f);
}

// Invertibility of a square matrix.
template <class F>
bool is_invertible(const Mat<F>& m, const F& f) {
    if (m.rows != m.cols)
        return false;
    return rank_of(m, f) == m.rows;
}

template <class F>
Mat<F> inverse(const Mat<F>& m, const F& f) {
    check_internal(m.rows == m.cols, "inverse of non-square matrix");
    int n = m.rows;
    Mat<F> aug(n, 2 * n, f);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = f.one();
    }
    auto piv = rref(aug, f);
    check_internal(static_cast<int>(piv.size()) == n && piv[n - 1] == n - 1,
                   "inverse of singular matrix");
    Mat<F> inv(n, n, f);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            inv.at(i, j) = aug.at(i, n + j);
    return inv;
}

} // namespace saguaro
