#ifndef GRIDCURVE_LINALG_HPP
#define GRIDCURVE_LINALG_HPP

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "gridcurve/errors.hpp"
#include "gridcurve/field.hpp"

namespace gridcurve {

// Exact arithmetic rings for the incidence machinery. Both expose the same
// member interface so the elimination templates below work unchanged over
// arbitrary-precision integers and over F_p. No floating point anywhere.

struct IntRing {
    using Elem = mpz_class;

    Elem from_i64(std::int64_t v) const { return Elem(static_cast<long>(v)); }
    Elem zero() const { return Elem(0); }
    Elem one() const { return Elem(1); }
    bool is_zero(const Elem& a) const { return sgn(a) == 0; }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem neg(const Elem& a) const { return -a; }

    // Exact-division handle; Bareiss elimination only ever divides by a
    // previous pivot, so divexact applies.
    using Div = Elem;
    Div prepare_div(const Elem& q) const { return q; }
    Elem div(const Elem& a, const Div& q) const {
        Elem r;
        mpz_divexact(r.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t());
        return r;
    }

    // target = (piv*target - vc*row_c) / q, allocation-free after warmup
    void fused_update(Elem& target, const Elem& piv, const Elem& vc, const Elem& row_c,
                      const Div& q) const {
        static thread_local mpz_class tmp;
        mpz_mul(target.get_mpz_t(), piv.get_mpz_t(), target.get_mpz_t());
        mpz_mul(tmp.get_mpz_t(), vc.get_mpz_t(), row_c.get_mpz_t());
        mpz_sub(target.get_mpz_t(), target.get_mpz_t(), tmp.get_mpz_t());
        mpz_divexact(target.get_mpz_t(), target.get_mpz_t(), q.get_mpz_t());
    }

    std::string str(const Elem& a) const { return a.get_str(); }
    const char* name() const { return "int"; }

    // Scale to the primitive integer vector with positive first nonzero.
    void canonicalize(std::vector<Elem>& v) const {
        Elem g(0);
        for (const Elem& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (sgn(g) != 0)
            for (Elem& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
        for (const Elem& x : v) {
            if (sgn(x) == 0) continue;
            if (sgn(x) < 0)
                for (Elem& y : v) y = -y;
            break;
        }
    }

    // Canonical key of the rational row span: RREF over Q, rows scaled back
    // to primitive integer vectors. Unique per subspace.
    std::string span_key(const std::vector<std::vector<Elem>>& rows) const {
        std::vector<std::vector<mpq_class>> m;
        for (const auto& r : rows) {
            std::vector<mpq_class> q;
            q.reserve(r.size());
            for (const auto& x : r) q.emplace_back(x);
            m.push_back(std::move(q));
        }
        const std::size_t cols = m.empty() ? 0 : m[0].size();
        std::size_t rank = 0;
        std::vector<std::size_t> pivot_cols;
        for (std::size_t col = 0; col < cols && rank < m.size(); ++col) {
            std::size_t piv = m.size();
            for (std::size_t r = rank; r < m.size(); ++r)
                if (sgn(m[r][col]) != 0) {
                    piv = r;
                    break;
                }
            if (piv == m.size()) continue;
            std::swap(m[rank], m[piv]);
            mpq_class inv = 1 / m[rank][col];
            for (auto& x : m[rank]) x *= inv;
            for (std::size_t r = 0; r < m.size(); ++r) {
                if (r == rank || sgn(m[r][col]) == 0) continue;
                mpq_class f = m[r][col];
                for (std::size_t c = 0; c < cols; ++c) m[r][c] -= f * m[rank][c];
            }
            pivot_cols.push_back(col);
            ++rank;
        }
        std::ostringstream os;
        for (std::size_t i = 0; i < rank; ++i) {
            mpz_class l(1);
            for (const auto& x : m[i]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
            os << (i ? ";" : "");
            for (std::size_t c = 0; c < cols; ++c) {
                mpz_class z = mpz_class(m[i][c] * l);
                os << (c ? "," : "") << z.get_str();
            }
        }
        return os.str();
    }
};

struct ZpRing {
    std::uint64_t p;
    using Elem = std::uint64_t;

    explicit ZpRing(std::uint64_t p_) : p(p_) {
        if (p < 2 || p >= kModulusBudget)
            throw PreconditionViolated("modulus must lie in [2, 2^31), got " + std::to_string(p_));
    }

    Elem from_i64(std::int64_t v) const {
        std::int64_t m = v % static_cast<std::int64_t>(p);
        return static_cast<Elem>(m < 0 ? m + static_cast<std::int64_t>(p) : m);
    }
    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    bool is_zero(Elem a) const { return a == 0; }
    Elem add(Elem a, Elem b) const { return add_mod(a, b, p); }
    Elem sub(Elem a, Elem b) const { return sub_mod(a, b, p); }
    Elem mul(Elem a, Elem b) const { return mul_mod(a, b, p); }
    Elem neg(Elem a) const { return neg_mod(a, p); }

    using Div = std::uint64_t;  // cached inverse
    Div prepare_div(Elem q) const { return inv_mod(q, p); }
    Elem div(Elem a, Div qinv) const { return mul_mod(a, qinv, p); }

    void fused_update(Elem& target, Elem piv, Elem vc, Elem row_c, Div qinv) const {
        target = mul_mod(sub_mod(mul_mod(piv, target, p), mul_mod(vc, row_c, p), p), qinv, p);
    }

    std::string str(Elem a) const { return std::to_string(a); }
    const char* name() const { return "modp"; }

    void canonicalize(std::vector<Elem>& v) const {
        for (Elem x : v) {
            if (x == 0) continue;
            Elem iv = inv_mod(x, p);
            for (Elem& y : v) y = mul_mod(y, iv, p);
            break;
        }
    }

    std::string span_key(const std::vector<std::vector<Elem>>& rows) const {
        std::vector<std::vector<Elem>> m = rows;
        const std::size_t cols = m.empty() ? 0 : m[0].size();
        std::size_t rank = 0;
        for (std::size_t col = 0; col < cols && rank < m.size(); ++col) {
            std::size_t piv = m.size();
            for (std::size_t r = rank; r < m.size(); ++r)
                if (m[r][col] != 0) {
                    piv = r;
                    break;
                }
            if (piv == m.size()) continue;
            std::swap(m[rank], m[piv]);
            Elem iv = inv_mod(m[rank][col], p);
            for (auto& x : m[rank]) x = mul_mod(x, iv, p);
            for (std::size_t r = 0; r < m.size(); ++r) {
                if (r == rank || m[r][col] == 0) continue;
                Elem f = m[r][col];
                for (std::size_t c = 0; c < cols; ++c)
                    m[r][c] = sub_mod(m[r][c], mul_mod(f, m[rank][c], p), p);
            }
            ++rank;
        }
        std::ostringstream os;
        for (std::size_t i = 0; i < rank; ++i) {
            os << (i ? ";" : "");
            for (std::size_t c = 0; c < cols; ++c) os << (c ? "," : "") << m[i][c];
        }
        return os.str();
    }
};

template <class Ring>
using MatrixOf = std::vector<std::vector<typename Ring::Elem>>;

// Fraction-free (Bareiss) row echelon form. Every intermediate entry is a
// minor of the input, so the divisions are exact over Z as well as over F_p.
// Pivot rows are frozen once placed, which lets extra vectors be reduced
// against the chain later as if they had been appended as final rows.
template <class Ring>
struct BareissEchelon {
    MatrixOf<Ring> rows;
    std::vector<std::size_t> pivot_cols;
    std::vector<typename Ring::Elem> pivots;
    std::vector<typename Ring::Div> dividers;  // dividers[i] divides at step i (prev pivot)
    int swaps = 0;

    std::size_t rank() const { return pivot_cols.size(); }
};

template <class Ring>
BareissEchelon<Ring> bareiss_echelon(const Ring& R, MatrixOf<Ring> m) {
    BareissEchelon<Ring> e;
    const std::size_t nr = m.size();
    const std::size_t nc = nr == 0 ? 0 : m[0].size();
    typename Ring::Elem prev = R.one();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < nc && rank < nr; ++col) {
        std::size_t piv = nr;
        for (std::size_t r = rank; r < nr; ++r)
            if (!R.is_zero(m[r][col])) {
                piv = r;
                break;
            }
        if (piv == nr) continue;
        if (piv != rank) {
            std::swap(m[rank], m[piv]);
            ++e.swaps;
        }
        typename Ring::Div dv = R.prepare_div(prev);
        for (std::size_t r = rank + 1; r < nr; ++r) {
            for (std::size_t c = col + 1; c < nc; ++c)
                m[r][c] = R.div(R.sub(R.mul(m[rank][col], m[r][c]), R.mul(m[r][col], m[rank][c])), dv);
            m[r][col] = R.zero();
        }
        e.dividers.push_back(dv);
        e.pivots.push_back(m[rank][col]);
        e.pivot_cols.push_back(col);
        prev = m[rank][col];
        ++rank;
    }
    e.rows = std::move(m);
    return e;
}

// Reusable scratch for span-membership reduction; keeps element storage
// alive so the hot loops stay allocation-free.
template <class Ring>
struct ReduceWorkspace {
    std::vector<typename Ring::Elem> v;
    typename Ring::Elem vc;
};

// Reduces v through the echelon chain, in place in the workspace. The result
// is v as it would have appeared after full elimination with v appended as a
// last row: the zero vector exactly when v lies in the row span (over the
// fraction field).
template <class Ring>
bool span_contains(const Ring& R, const BareissEchelon<Ring>& e,
                   const std::vector<typename Ring::Elem>& v, ReduceWorkspace<Ring>& ws) {
    ws.v = v;
    for (std::size_t i = 0; i < e.rank(); ++i) {
        const std::size_t pc = e.pivot_cols[i];
        ws.vc = ws.v[pc];
        for (std::size_t c = 0; c < ws.v.size(); ++c)
            R.fused_update(ws.v[c], e.pivots[i], ws.vc, e.rows[i][c], e.dividers[i]);
    }
    for (const auto& x : ws.v)
        if (!R.is_zero(x)) return false;
    return true;
}

template <class Ring>
std::vector<typename Ring::Elem> bareiss_reduce(const Ring& R, const BareissEchelon<Ring>& e,
                                                std::vector<typename Ring::Elem> v) {
    for (std::size_t i = 0; i < e.rank(); ++i) {
        const std::size_t pc = e.pivot_cols[i];
        typename Ring::Elem vc = v[pc];
        for (std::size_t c = 0; c < v.size(); ++c)
            v[c] = R.div(R.sub(R.mul(e.pivots[i], v[c]), R.mul(vc, e.rows[i][c])), e.dividers[i]);
    }
    return v;
}

template <class Ring>
bool in_row_span(const Ring& R, const BareissEchelon<Ring>& e,
                 const std::vector<typename Ring::Elem>& v) {
    ReduceWorkspace<Ring> ws;
    return span_contains(R, e, v, ws);
}

// Exact determinant of a square matrix via Bareiss elimination.
template <class Ring>
typename Ring::Elem determinant(const Ring& R, MatrixOf<Ring> m) {
    const std::size_t n = m.size();
    if (n == 0) return R.one();
    for (const auto& row : m)
        if (row.size() != n) throw PreconditionViolated("determinant needs a square matrix");
    BareissEchelon<Ring> e = bareiss_echelon(R, std::move(m));
    if (e.rank() < n) return R.zero();
    typename Ring::Elem det = e.pivots.back();
    return (e.swaps % 2 == 0) ? det : R.neg(det);
}

// Right null vector of a full-rank (k x k+1) matrix, as signed maximal
// minors; unique up to scale. Orthogonal to every row.
template <class Ring>
std::vector<typename Ring::Elem> hyperplane_normal(const Ring& R, const MatrixOf<Ring>& m) {
    const std::size_t k = m.size();
    const std::size_t nc = k + 1;
    std::vector<typename Ring::Elem> normal;
    normal.reserve(nc);
    for (std::size_t drop = 0; drop < nc; ++drop) {
        MatrixOf<Ring> minor(k, std::vector<typename Ring::Elem>());
        for (std::size_t r = 0; r < k; ++r) {
            minor[r].reserve(k);
            for (std::size_t c = 0; c < nc; ++c)
                if (c != drop) minor[r].push_back(m[r][c]);
        }
        typename Ring::Elem det = determinant(R, std::move(minor));
        normal.push_back(drop % 2 == 0 ? det : R.neg(det));
    }
    return normal;
}

template <class Ring>
std::string vector_key(const Ring& R, const std::vector<typename Ring::Elem>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << R.str(v[i]);
    return os.str();
}

}  // namespace gridcurve

#endif
