#ifndef GRIDCURVE_POLY_HPP
#define GRIDCURVE_POLY_HPP

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gridcurve/errors.hpp"
#include "gridcurve/field.hpp"

namespace gridcurve {

// Dense univariate polynomial over F_p. Coefficient i is the coefficient of
// t^i; trailing zeros are always trimmed, so the zero polynomial has an empty
// coefficient vector. Value semantics throughout; every operation returns a
// fresh polynomial.
class Polynomial {
  public:
    // Degree of the zero polynomial. Chosen very negative so that degree
    // sums of zero operands stay out of the valid range instead of wrapping
    // into it.
    static constexpr int kZeroDegree = std::numeric_limits<int>::min() / 2;

    Polynomial() = default;

    Polynomial(FieldContext ctx, std::vector<std::uint64_t> coeffs)
        : ctx_(ctx), c_(std::move(coeffs)) {
        for (auto& x : c_) x %= ctx_.p;
        trim();
    }

    static Polynomial zero(const FieldContext& ctx) { return Polynomial(ctx, {}); }
    static Polynomial constant(const FieldContext& ctx, std::uint64_t c) {
        return Polynomial(ctx, {c});
    }
    // c * t^k
    static Polynomial monomial(const FieldContext& ctx, std::uint64_t c, std::size_t k) {
        std::vector<std::uint64_t> v(k + 1, 0);
        v[k] = c;
        return Polynomial(ctx, std::move(v));
    }

    const FieldContext& context() const { return ctx_; }
    const std::vector<std::uint64_t>& coeffs() const { return c_; }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? kZeroDegree : static_cast<int>(c_.size()) - 1; }

    std::uint64_t coeff(std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
    std::uint64_t leading_coefficient() const { return c_.empty() ? 0 : c_.back(); }
    std::uint64_t linear_coefficient() const { return coeff(1); }
    bool is_nice() const { return linear_coefficient() == 0; }

    std::uint64_t eval(std::uint64_t t) const {
        std::uint64_t r = 0;
        for (std::size_t i = c_.size(); i-- > 0;) r = (mul_mod(r, t % ctx_.p, ctx_.p) + c_[i]) % ctx_.p;
        return r;
    }

    Polynomial operator+(const Polynomial& o) const {
        check_context(o);
        std::vector<std::uint64_t> r(std::max(c_.size(), o.c_.size()), 0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = add_mod(coeff(i), o.coeff(i), ctx_.p);
        return Polynomial(ctx_, std::move(r));
    }

    Polynomial operator-(const Polynomial& o) const {
        check_context(o);
        std::vector<std::uint64_t> r(std::max(c_.size(), o.c_.size()), 0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = sub_mod(coeff(i), o.coeff(i), ctx_.p);
        return Polynomial(ctx_, std::move(r));
    }

    // Schoolbook product; every polynomial in this pipeline has degree at
    // most d+1 <= 12, so anything fancier would be wasted.
    Polynomial operator*(const Polynomial& o) const {
        check_context(o);
        if (is_zero() || o.is_zero()) return zero(ctx_);
        std::vector<std::uint64_t> r(c_.size() + o.c_.size() - 1, 0);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j)
                r[i + j] = (r[i + j] + c_[i] * o.c_[j]) % ctx_.p;
        return Polynomial(ctx_, std::move(r));
    }

    Polynomial scale(std::uint64_t s) const {
        std::vector<std::uint64_t> r(c_);
        for (auto& x : r) x = mul_mod(x, s % ctx_.p, ctx_.p);
        return Polynomial(ctx_, std::move(r));
    }

    bool operator==(const Polynomial& o) const { return ctx_.p == o.ctx_.p && c_ == o.c_; }

    // "c0 + c1*t + c2*t^2 + ... (mod p)", dense over all coefficients.
    std::string to_string() const {
        std::ostringstream os;
        if (c_.empty()) {
            os << "0";
        } else {
            for (std::size_t i = 0; i < c_.size(); ++i) {
                if (i > 0) os << " + ";
                os << c_[i];
                if (i == 1) os << "*t";
                if (i > 1) os << "*t^" << i;
            }
        }
        os << " (mod " << ctx_.p << ")";
        return os.str();
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    void check_context(const Polynomial& o) const {
        if (ctx_.p != o.ctx_.p)
            throw ContextMismatch("polynomial moduli differ: " + std::to_string(ctx_.p) + " vs " +
                                  std::to_string(o.ctx_.p));
    }

    FieldContext ctx_;
    std::vector<std::uint64_t> c_;
};

struct DivisionResult {
    Polynomial quotient;
    Polynomial remainder;
};

inline DivisionResult euclidean_div(const Polynomial& num, const Polynomial& den) {
    if (den.is_zero()) throw PreconditionViolated("division by the zero polynomial");
    if (num.context().p != den.context().p)
        throw ContextMismatch("polynomial moduli differ in division");
    const FieldContext& ctx = num.context();
    std::vector<std::uint64_t> rem(num.coeffs());
    const auto& dc = den.coeffs();
    if (rem.size() < dc.size()) return {Polynomial::zero(ctx), num};
    std::vector<std::uint64_t> quot(rem.size() - dc.size() + 1, 0);
    std::uint64_t lead_inv = inv_mod(den.leading_coefficient(), ctx.p);
    for (std::size_t k = quot.size(); k-- > 0;) {
        std::uint64_t c = mul_mod(rem[k + dc.size() - 1], lead_inv, ctx.p);
        quot[k] = c;
        if (c == 0) continue;
        for (std::size_t j = 0; j < dc.size(); ++j)
            rem[k + j] = sub_mod(rem[k + j], mul_mod(c, dc[j], ctx.p), ctx.p);
    }
    return {Polynomial(ctx, std::move(quot)), Polynomial(ctx, std::move(rem))};
}

// Exact quotient num/den. A nonzero remainder signals a broken construction,
// so it aborts the pipeline by throwing; the remainder rides along for
// diagnostics.
struct InexactDivision : Error {
    InexactDivision(const std::string& what, Polynomial rem)
        : Error(what + "; remainder " + rem.to_string()), remainder(std::move(rem)) {}
    Polynomial remainder;
};

inline Polynomial exact_div(const Polynomial& num, const Polynomial& den) {
    DivisionResult r = euclidean_div(num, den);
    if (!r.remainder.is_zero())
        throw InexactDivision("polynomial division is not exact", r.remainder);
    return r.quotient;
}

// Product of (t - lambda_k) over k != skip; the full product when skip is
// absent. skip is a 0-based index into the node list.
inline Polynomial node_product(const FieldContext& ctx, const std::vector<std::uint64_t>& lambdas,
                               std::optional<std::size_t> skip = std::nullopt) {
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        for (std::size_t j = i + 1; j < lambdas.size(); ++j)
            if (lambdas[i] % ctx.p == lambdas[j] % ctx.p)
                throw DuplicateNodes("node_product requires distinct nodes");
    Polynomial r = Polynomial::constant(ctx, 1);
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (skip && *skip == k) continue;
        r = r * Polynomial(ctx, {neg_mod(lambdas[k] % ctx.p, ctx.p), 1});
    }
    return r;
}

// Rank over F_p of the span of the given polynomials, all of degree <= D,
// via Gaussian elimination on the (polys x D+1) coefficient matrix.
inline int rank_of_span(const std::vector<Polynomial>& polys, int degree_bound) {
    if (polys.empty()) return 0;
    const std::uint64_t p = polys.front().context().p;
    for (const auto& f : polys) {
        if (f.context().p != p) throw ContextMismatch("rank_of_span operands differ in modulus");
        if (f.degree() > degree_bound)
            throw DegreeBoundExceeded("degree " + std::to_string(f.degree()) + " exceeds bound " +
                                      std::to_string(degree_bound));
    }
    const std::size_t cols = static_cast<std::size_t>(degree_bound) + 1;
    std::vector<std::vector<std::uint64_t>> rows;
    rows.reserve(polys.size());
    for (const auto& f : polys) {
        std::vector<std::uint64_t> row(cols, 0);
        for (std::size_t i = 0; i < cols; ++i) row[i] = f.coeff(i);
        rows.push_back(std::move(row));
    }
    int rank = 0;
    for (std::size_t col = 0; col < cols && rank < static_cast<int>(rows.size()); ++col) {
        std::size_t piv = rows.size();
        for (std::size_t r = rank; r < rows.size(); ++r)
            if (rows[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv == rows.size()) continue;
        std::swap(rows[rank], rows[piv]);
        std::uint64_t iv = inv_mod(rows[rank][col], p);
        for (auto& x : rows[rank]) x = mul_mod(x, iv, p);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<int>(r) == rank || rows[r][col] == 0) continue;
            std::uint64_t f = rows[r][col];
            for (std::size_t cidx = 0; cidx < cols; ++cidx)
                rows[r][cidx] = sub_mod(rows[r][cidx], mul_mod(f, rows[rank][cidx], p), p);
        }
        ++rank;
    }
    return rank;
}

}  // namespace gridcurve

#endif
