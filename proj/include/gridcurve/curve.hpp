#ifndef GRIDCURVE_CURVE_HPP
#define GRIDCURVE_CURVE_HPP

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gridcurve/errors.hpp"
#include "gridcurve/field.hpp"
#include "gridcurve/poly.hpp"

namespace gridcurve {

enum class Mode { full, strict };

inline const char* to_string(Mode m) { return m == Mode::full ? "full" : "strict"; }

// The banded d x d matrix driving the interpolation step: ones on the
// diagonal, alpha on the subdiagonal, +-alpha in the (1, d) corner, zero
// elsewhere. Stored row-major. For d = 2 the corner rule wins the pattern
// overlap at (1, 2).
struct ConstructionMatrix {
    int d = 0;
    std::vector<std::uint64_t> entries;  // row-major, d*d
    int sign_choice = 0;                 // +1 or -1 for the corner entry
    std::uint64_t det = 0;

    std::uint64_t at(int i, int j) const { return entries[static_cast<std::size_t>(i) * d + j]; }
};

// Chooses the corner sign so that det = 1 + (-1)^(d-1) * sign * alpha^d is
// nonzero; both branches cannot vanish since their sum is 2.
inline ConstructionMatrix build_matrix(const FieldContext& ctx) {
    const std::uint64_t p = ctx.p;
    const int d = ctx.d;
    ConstructionMatrix m;
    m.d = d;
    m.entries.assign(static_cast<std::size_t>(d) * d, 0);
    std::uint64_t alpha_d = pow_mod(ctx.alpha, static_cast<std::uint64_t>(d), p);
    for (int sign : {+1, -1}) {
        std::uint64_t term = (d % 2 == 1) == (sign == 1)
                                 ? alpha_d              // (-1)^(d-1) * sign == +1
                                 : neg_mod(alpha_d, p);  // (-1)^(d-1) * sign == -1
        std::uint64_t det = add_mod(1, term, p);
        if (det == 0) continue;
        m.sign_choice = sign;
        m.det = det;
        break;
    }
    if (m.sign_choice == 0) throw Error("both corner signs give a singular matrix");
    for (int i = 0; i < d; ++i) {
        m.entries[static_cast<std::size_t>(i) * d + i] = 1;
        if (i >= 1) m.entries[static_cast<std::size_t>(i) * d + (i - 1)] = ctx.alpha;
    }
    m.entries[static_cast<std::size_t>(d - 1)] =
        m.sign_choice == 1 ? ctx.alpha : neg_mod(ctx.alpha, p);
    // sum of squares of entries in each column must vanish
    for (int j = 0; j < d; ++j) {
        std::uint64_t s = 0;
        for (int i = 0; i < d; ++i) s = add_mod(s, mul_mod(m.at(i, j), m.at(i, j), p), p);
        if (s != 0) throw Error("construction matrix column square-sum is nonzero");
    }
    return m;
}

inline std::vector<std::uint64_t> construction_nodes(int d) {
    std::vector<std::uint64_t> lambdas(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) lambdas[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
    return lambdas;
}

// f_i = sum_j a_ij / g_j(lambda_j) * g_j + prod_j (t - lambda_j), checked
// against the interpolation identity f_i(lambda_j) = a_ij.
inline std::vector<Polynomial> build_f_family(const ConstructionMatrix& a, const FieldContext& ctx) {
    const int d = ctx.d;
    const auto lambdas = construction_nodes(d);
    const Polynomial full = node_product(ctx, lambdas);
    std::vector<Polynomial> basis;
    std::vector<std::uint64_t> basis_value_inv;
    for (int j = 0; j < d; ++j) {
        basis.push_back(node_product(ctx, lambdas, static_cast<std::size_t>(j)));
        basis_value_inv.push_back(inv_mod(basis.back().eval(lambdas[static_cast<std::size_t>(j)]), ctx.p));
    }
    std::vector<Polynomial> f;
    for (int i = 0; i < d; ++i) {
        Polynomial fi = full;
        for (int j = 0; j < d; ++j) {
            std::uint64_t c = mul_mod(a.at(i, j), basis_value_inv[static_cast<std::size_t>(j)], ctx.p);
            fi = fi + basis[static_cast<std::size_t>(j)].scale(c);
        }
        f.push_back(std::move(fi));
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (f[static_cast<std::size_t>(i)].eval(lambdas[static_cast<std::size_t>(j)]) != a.at(i, j))
                throw InterpolationCheckFailed("f_" + std::to_string(i + 1) + "(lambda_" +
                                               std::to_string(j + 1) + ") != a_ij");
    return f;
}

// Picks g = g_j for the smallest j >= 2 with g_j outside the span of the
// f-family. Existence is guaranteed, so a miss is a fatal bug, not bad input.
inline std::pair<Polynomial, int> select_g(const std::vector<Polynomial>& f,
                                           const std::vector<Polynomial>& basis,
                                           const FieldContext& ctx) {
    const int d = ctx.d;
    for (int j = 2; j <= d; ++j) {
        std::vector<Polynomial> span = f;
        span.push_back(basis[static_cast<std::size_t>(j - 1)]);
        if (rank_of_span(span, d) == d + 1) {
            const Polynomial& g = basis[static_cast<std::size_t>(j - 1)];
            if (g.eval(0) != 0) throw Error("selected g does not vanish at 0");
            if (g.is_nice()) throw Error("selected g is nice; construction broken");
            return {g, j};
        }
    }
    throw NoValidG("no g_j outside the span of f_1..f_d");
}

inline Polynomial sum_of_squares(const std::vector<Polynomial>& f, const FieldContext& ctx) {
    Polynomial s = Polynomial::zero(ctx);
    for (const auto& fi : f) s = s + fi * fi;
    return s;
}

// h = (f_1^2 + ... + f_d^2) / g, exact by construction.
inline Polynomial compute_h(const std::vector<Polynomial>& f, const Polynomial& g,
                            const FieldContext& ctx) {
    Polynomial ssq = sum_of_squares(f, ctx);
    if (ssq.degree() != 2 * ctx.d ||
        ssq.leading_coefficient() != static_cast<std::uint64_t>(ctx.d) % ctx.p)
        throw Error("sum of squares has wrong degree or leading coefficient");
    Polynomial h = exact_div(ssq, g);
    if (h.degree() != ctx.d + 1) throw Error("h has degree != d+1");
    return h;
}

struct TweakParams {
    std::vector<std::uint64_t> mu;
    std::uint64_t nu = 0;
};

// The full certified tuple (f_1..f_d, g, h) plus construction provenance.
struct CurveSystem {
    FieldContext ctx;
    Mode mode = Mode::full;
    std::vector<Polynomial> f;
    Polynomial g;
    Polynomial h;
    std::vector<std::uint64_t> lambda;
    int g_index = 0;  // 1-based j with g = g_j
    int sign_choice = 0;
    std::optional<TweakParams> tweak;
};

// Recomputed-from-scratch check of every CurveSystem invariant.
struct SystemValidation {
    bool identity = false;
    Polynomial identity_residual;
    bool degree = false;
    std::vector<int> degrees;  // deg f_1..f_d, deg g, deg h
    bool independence = false;
    int rank = 0;
    bool vanish = false;
    std::vector<bool> nice_flags;  // f_1..f_d, h
    bool g_not_nice = false;

    bool pass(Mode mode) const {
        bool core = identity && degree && independence;
        return mode == Mode::full ? core : core && vanish;
    }

    std::string to_string(Mode mode) const {
        std::ostringstream os;
        os << "identity:     " << (identity ? "pass" : "FAIL") << "\n"
           << "degree:       " << (degree ? "pass" : "FAIL") << " (";
        for (std::size_t i = 0; i < degrees.size(); ++i)
            os << (i ? ", " : "") << (degrees[i] == Polynomial::kZeroDegree ? -1 : degrees[i]);
        os << ")\n"
           << "independence: " << (independence ? "pass" : "FAIL") << " (rank " << rank << ")\n";
        if (mode == Mode::strict) os << "vanish:       " << (vanish ? "pass" : "FAIL") << "\n";
        return os.str();
    }
};

inline SystemValidation validate_system(const CurveSystem& sys) {
    const FieldContext& ctx = sys.ctx;
    const int d = ctx.d;
    SystemValidation v;
    Polynomial ssq = sum_of_squares(sys.f, ctx);
    v.identity_residual = ssq - sys.g * sys.h;
    v.identity = v.identity_residual.is_zero();
    for (const auto& fi : sys.f) v.degrees.push_back(fi.degree());
    v.degrees.push_back(sys.g.degree());
    v.degrees.push_back(sys.h.degree());
    v.degree = true;
    for (int i = 0; i < d; ++i) v.degree = v.degree && v.degrees[static_cast<std::size_t>(i)] == d;
    v.degree = v.degree && v.degrees[static_cast<std::size_t>(d)] == d - 1 &&
               v.degrees[static_cast<std::size_t>(d) + 1] == d + 1;
    std::vector<Polynomial> span = sys.f;
    span.push_back(sys.g);
    span.push_back(sys.h);
    int bound = 0;
    for (const auto& q : span) bound = std::max(bound, q.is_zero() ? 0 : q.degree());
    v.rank = rank_of_span(span, std::max(bound, d + 1));
    v.independence = v.rank == d + 2;
    for (const auto& fi : sys.f) v.nice_flags.push_back(fi.is_nice());
    v.nice_flags.push_back(sys.h.is_nice());
    v.g_not_nice = !sys.g.is_nice();
    v.vanish = v.g_not_nice;
    for (bool b : v.nice_flags) v.vanish = v.vanish && b;
    return v;
}

inline CurveSystem build_full_system(const FieldContext& ctx) {
    ConstructionMatrix a = build_matrix(ctx);
    std::vector<Polynomial> f = build_f_family(a, ctx);
    const auto lambdas = construction_nodes(ctx.d);
    std::vector<Polynomial> basis;
    for (int j = 0; j < ctx.d; ++j)
        basis.push_back(node_product(ctx, lambdas, static_cast<std::size_t>(j)));
    auto [g, g_index] = select_g(f, basis, ctx);
    Polynomial h = compute_h(f, g, ctx);
    CurveSystem sys{ctx, Mode::full, std::move(f), std::move(g), std::move(h),
                    lambdas, g_index, a.sign_choice, std::nullopt};
    SystemValidation v = validate_system(sys);
    if (!v.pass(Mode::full))
        throw Error("full-mode system failed validation at p = " + std::to_string(ctx.p) + "\n" +
                    v.to_string(Mode::full));
    return sys;
}

// A field coincidence where the niceness adjustment destroys degree or
// independence. Carries the attempted parameters and the failed report;
// callers retry with the next admissible prime.
struct DegenerateTweak : Error {
    DegenerateTweak(std::uint64_t p_, TweakParams params_, std::string report_)
        : Error("degenerate niceness tweak at p = " + std::to_string(p_) + "\n" + report_),
          p(p_),
          params(std::move(params_)),
          report(std::move(report_)) {}
    std::uint64_t p;
    TweakParams params;
    std::string report;
};

// Unique mu with [t](f + mu*g) = 0; g must not be nice.
inline std::uint64_t niceness_shift(const Polynomial& f, const Polynomial& g) {
    const std::uint64_t p = f.context().p;
    std::uint64_t gl = g.linear_coefficient();
    if (gl == 0) throw PreconditionViolated("niceness shift requires g with nonzero linear term");
    return mul_mod(neg_mod(f.linear_coefficient(), p), inv_mod(gl, p), p);
}

// Replaces f_i by f_i + mu_i g (and f_1 additionally by + nu*t*g), then
// recomputes h by exact division and re-validates everything including
// vanish. nu solves [t]h~ = 2*nu + [t](h + sum mu_i (2 f_i + mu_i g)) = 0.
inline CurveSystem apply_nice_tweak(const CurveSystem& sys) {
    const FieldContext& ctx = sys.ctx;
    const std::uint64_t p = ctx.p;
    if (sys.mode != Mode::full) throw PreconditionViolated("tweak expects a full-mode system");
    if (sys.g.is_nice() || sys.g.eval(0) != 0)
        throw PreconditionViolated("tweak requires g not nice with g(0) = 0");

    TweakParams params;
    for (const auto& fi : sys.f) params.mu.push_back(niceness_shift(fi, sys.g));

    Polynomial x = sys.h;
    for (std::size_t i = 0; i < sys.f.size(); ++i) {
        Polynomial inner = sys.f[i].scale(2) + sys.g.scale(params.mu[i]);
        x = x + inner.scale(params.mu[i]);
    }
    params.nu = mul_mod(neg_mod(x.linear_coefficient(), p), inv_mod(2, p), p);

    std::vector<Polynomial> f_new;
    for (std::size_t i = 0; i < sys.f.size(); ++i)
        f_new.push_back(sys.f[i] + sys.g.scale(params.mu[i]));
    f_new[0] = f_new[0] + sys.g.scale(params.nu) * Polynomial::monomial(ctx, 1, 1);

    Polynomial h_new = exact_div(sum_of_squares(f_new, ctx), sys.g);

    CurveSystem out{ctx, Mode::strict, std::move(f_new), sys.g, std::move(h_new),
                    sys.lambda, sys.g_index, sys.sign_choice, params};
    SystemValidation v = validate_system(out);
    if (!v.pass(Mode::strict)) throw DegenerateTweak(p, params, v.to_string(Mode::strict));
    return out;
}

inline nlohmann::ordered_json manifest_fragment(const CurveSystem& sys) {
    nlohmann::ordered_json j;
    j["p"] = sys.ctx.p;
    j["alpha"] = sys.ctx.alpha;
    j["d"] = sys.ctx.d;
    j["mode"] = to_string(sys.mode);
    j["lambda"] = sys.lambda;
    j["g_index"] = sys.g_index;
    j["sign_choice"] = sys.sign_choice;
    nlohmann::ordered_json fs = nlohmann::ordered_json::array();
    for (const auto& fi : sys.f) fs.push_back(fi.coeffs());
    j["f"] = std::move(fs);
    j["g"] = sys.g.coeffs();
    j["h"] = sys.h.coeffs();
    if (sys.tweak) {
        j["mu"] = sys.tweak->mu;
        j["nu"] = sys.tweak->nu;
    }
    return j;
}

}  // namespace gridcurve

#endif
