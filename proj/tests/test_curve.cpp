#include <catch2/catch_amalgamated.hpp>

#include "gridcurve/curve.hpp"
#include "gridcurve/linalg.hpp"

using namespace gridcurve;

namespace {

std::vector<std::uint64_t> first_admissible_primes(int d, int count) {
    std::vector<std::uint64_t> out;
    std::uint64_t q = construction_factorial(d);
    while (static_cast<int>(out.size()) < count) {
        ++q;
        if (q % 4 == 1 && is_prime(q)) out.push_back(q);
    }
    return out;
}

}  // namespace

TEST_CASE("matrix for d=2, p=13") {
    FieldContext ctx(13, 2);
    ConstructionMatrix a = build_matrix(ctx);
    REQUIRE(a.at(0, 0) == 1);
    REQUIRE(a.at(0, 1) == 5);
    REQUIRE(a.at(1, 0) == 5);
    REQUIRE(a.at(1, 1) == 1);
    REQUIRE(a.sign_choice == 1);
    REQUIRE(a.det == 2);  // 1 - 25 mod 13
}

TEST_CASE("matrix pattern for d=6 matches the banded shape with corner +alpha") {
    FieldContext ctx(5077, 6);
    ConstructionMatrix a = build_matrix(ctx);
    REQUIRE(a.sign_choice == 1);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            std::uint64_t want = 0;
            if (i == j) want = 1;
            else if (i == j + 1) want = ctx.alpha;
            else if (i == 0 && j == 5) want = ctx.alpha;
            REQUIRE(a.at(i, j) == want);
        }
}

TEST_CASE("matrix determinant and column square-sums across dimensions") {
    for (int d = 2; d <= 8; ++d) {
        std::uint64_t p = first_admissible_primes(d, 1)[0];
        FieldContext ctx(p, d);
        ConstructionMatrix a = build_matrix(ctx);
        // exact determinant agrees with the closed form and is nonzero
        ZpRing R(p);
        MatrixOf<ZpRing> m(d, std::vector<std::uint64_t>(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m[i][j] = a.at(i, j);
        REQUIRE(determinant(R, m) == a.det);
        REQUIRE(a.det != 0);
        for (int j = 0; j < d; ++j) {
            std::uint64_t s = 0;
            for (int i = 0; i < d; ++i) s = add_mod(s, mul_mod(a.at(i, j), a.at(i, j), p), p);
            REQUIRE(s == 0);
        }
        // d = 0 mod 4 forces the corner to -alpha, everything else takes +alpha
        REQUIRE(a.sign_choice == (d % 4 == 0 ? -1 : 1));
    }
}

TEST_CASE("f-family for d=2, p=13") {
    FieldContext ctx(13, 2);
    auto f = build_f_family(build_matrix(ctx), ctx);
    REQUIRE(f[0] == Polynomial(ctx, {1, 3, 1}));
    REQUIRE(f[1] == Polynomial(ctx, {5, 8, 1}));
}

TEST_CASE("f-family is monic of degree d with f_1(0) = 1") {
    for (int d = 2; d <= 6; ++d) {
        for (std::uint64_t p : first_admissible_primes(d, 2)) {
            FieldContext ctx(p, d);
            ConstructionMatrix a = build_matrix(ctx);
            auto f = build_f_family(a, ctx);
            for (const auto& fi : f) {
                REQUIRE(fi.degree() == d);
                REQUIRE(fi.leading_coefficient() == 1);
            }
            REQUIRE(f[0].eval(0) == 1);
            // evaluations at the nodes reproduce A, which must be invertible
            ZpRing R(p);
            MatrixOf<ZpRing> values(d, std::vector<std::uint64_t>(d));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    values[i][j] = f[i].eval(static_cast<std::uint64_t>(j));
                    REQUIRE(values[i][j] == a.at(i, j));
                }
            REQUIRE(determinant(R, values) != 0);
        }
    }
}

TEST_CASE("g selection for d=2, p=13") {
    FieldContext ctx(13, 2);
    CurveSystem sys = build_full_system(ctx);
    REQUIRE(sys.g == Polynomial(ctx, {0, 1}));
    REQUIRE(sys.g_index == 2);
}

TEST_CASE("selected g vanishes at zero and is not nice") {
    for (int d = 2; d <= 6; ++d) {
        std::uint64_t p = first_admissible_primes(d, 1)[0];
        FieldContext ctx(p, d);
        CurveSystem sys = build_full_system(ctx);
        REQUIRE(sys.g.eval(0) == 0);
        REQUIRE_FALSE(sys.g.is_nice());
        REQUIRE(sys.g_index >= 2);
        REQUIRE(sys.g_index <= d);
    }
}

TEST_CASE("h for d=2, p=13") {
    FieldContext ctx(13, 2);
    CurveSystem sys = build_full_system(ctx);
    REQUIRE(sys.h == Polynomial(ctx, {8, 7, 9, 2}));
    // leading coefficient of h is d for monic g
    REQUIRE(sys.h.leading_coefficient() == 2);
    // the squared sum vanishes at every node
    Polynomial ssq = sum_of_squares(sys.f, ctx);
    for (auto lam : sys.lambda) REQUIRE(ssq.eval(lam) == 0);
}

TEST_CASE("validate_system passes for d=2, p=13 and flags tampering") {
    FieldContext ctx(13, 2);
    CurveSystem sys = build_full_system(ctx);
    SystemValidation v = validate_system(sys);
    REQUIRE(v.identity);
    REQUIRE(v.degree);
    REQUIRE(v.independence);
    REQUIRE(v.pass(Mode::full));

    CurveSystem bad = sys;
    bad.h = bad.h.scale(2);
    SystemValidation vb = validate_system(bad);
    REQUIRE_FALSE(vb.identity);
    REQUIRE_FALSE(vb.identity_residual.is_zero());
    REQUIRE_FALSE(vb.pass(Mode::full));
}

TEST_CASE("golden coefficients for d=3, p=53") {
    FieldContext ctx(53, 3);
    REQUIRE(ctx.alpha == 23);
    CurveSystem sys = build_full_system(ctx);
    REQUIRE(sys.f[0] == Polynomial(ctx, {1, 42, 9, 1}));
    REQUIRE(sys.f[1] == Polynomial(ctx, {23, 49, 34, 1}));
    REQUIRE(sys.f[2] == Polynomial(ctx, {0, 21, 1, 1}));
    REQUIRE(sys.g == Polynomial(ctx, {0, 51, 1}));
    REQUIRE(sys.g_index == 2);
    REQUIRE(sys.h == Polynomial(ctx, {50, 5, 7, 41, 3}));
    REQUIRE(validate_system(sys).pass(Mode::full));
}

TEST_CASE("niceness shift is zero for already-nice polynomials") {
    FieldContext ctx(13, 2);
    Polynomial nice(ctx, {4, 0, 2});
    Polynomial g(ctx, {0, 1});
    REQUIRE(niceness_shift(nice, g) == 0);
    REQUIRE(nice + g.scale(niceness_shift(nice, g)) == nice);
    REQUIRE_THROWS_AS(niceness_shift(nice, Polynomial(ctx, {4, 0, 2})), PreconditionViolated);
}

TEST_CASE("the d=2, p=13 tweak collapses exactly as computed by hand") {
    FieldContext ctx(13, 2);
    CurveSystem sys = build_full_system(ctx);
    try {
        apply_nice_tweak(sys);
        FAIL("expected DegenerateTweak");
    } catch (const DegenerateTweak& e) {
        REQUIRE(e.p == 13);
        REQUIRE(e.params.mu == std::vector<std::uint64_t>{10, 5});  // -3 and 5
        REQUIRE(e.params.nu == 7);
    }
}

TEST_CASE("strict golden system for d=3, p=29") {
    FieldContext ctx(29, 3);
    CurveSystem sys = apply_nice_tweak(build_full_system(ctx));
    REQUIRE(sys.mode == Mode::strict);
    REQUIRE(sys.tweak.has_value());
    REQUIRE(sys.tweak->mu == std::vector<std::uint64_t>{19, 22, 20});
    REQUIRE(sys.tweak->nu == 3);
    REQUIRE(sys.f[0] == Polynomial(ctx, {1, 0, 2, 4}));
    REQUIRE(sys.f[1] == Polynomial(ctx, {12, 0, 24, 1}));
    REQUIRE(sys.f[2] == Polynomial(ctx, {0, 0, 20, 1}));
    REQUIRE(sys.h == Polynomial(ctx, {0, 0, 13, 24, 18}));
    SystemValidation v = validate_system(sys);
    REQUIRE(v.pass(Mode::strict));
    REQUIRE(v.vanish);
}

TEST_CASE("construction sweep: full mode validates for d = 2..6, first five primes") {
    for (int d = 2; d <= 6; ++d) {
        for (std::uint64_t p : first_admissible_primes(d, 5)) {
            FieldContext ctx(p, d);
            CurveSystem sys = build_full_system(ctx);
            SystemValidation v = validate_system(sys);
            INFO("d=" << d << " p=" << p);
            REQUIRE(v.pass(Mode::full));
        }
    }
}

TEST_CASE("construction sweep: strict mode for d >= 3, and d = 2 always degenerates") {
    for (int d = 3; d <= 6; ++d) {
        for (std::uint64_t p : first_admissible_primes(d, 5)) {
            FieldContext ctx(p, d);
            CurveSystem sys = apply_nice_tweak(build_full_system(ctx));
            SystemValidation v = validate_system(sys);
            INFO("d=" << d << " p=" << p);
            REQUIRE(v.pass(Mode::strict));
        }
    }
    // at d = 2 the pinned nu forces the leading coefficient of h~ to vanish,
    // so every admissible prime collapses
    for (std::uint64_t p : first_admissible_primes(2, 20)) {
        FieldContext ctx(p, 2);
        INFO("p=" << p);
        REQUIRE_THROWS_AS(apply_nice_tweak(build_full_system(ctx)), DegenerateTweak);
    }
}

TEST_CASE("construction still validates at d = 7 and 8") {
    for (int d : {7, 8}) {
        std::uint64_t p = first_admissible_primes(d, 1)[0];
        FieldContext ctx(p, d);
        CurveSystem sys = build_full_system(ctx);
        REQUIRE(validate_system(sys).pass(Mode::full));
        CurveSystem strict = apply_nice_tweak(sys);
        REQUIRE(validate_system(strict).pass(Mode::strict));
    }
}

TEST_CASE("manifest fragment carries the whole construction") {
    FieldContext ctx(29, 3);
    CurveSystem sys = apply_nice_tweak(build_full_system(ctx));
    auto j = manifest_fragment(sys);
    REQUIRE(j["p"] == 29);
    REQUIRE(j["alpha"] == 12);
    REQUIRE(j["mode"] == "strict");
    REQUIRE(j["g_index"] == 2);
    REQUIRE(j["f"].size() == 3);
    REQUIRE(j["mu"].size() == 3);
    REQUIRE(j["nu"] == 3);
}
