#ifndef GRIDCURVE_FIELD_HPP
#define GRIDCURVE_FIELD_HPP

#include <cstdint>
#include <string>

#include "gridcurve/errors.hpp"

namespace gridcurve {

// All moduli are capped at 2^31 so that a product of two canonical residues
// fits in a uint64_t without overflow.
inline constexpr std::uint64_t kModulusBudget = std::uint64_t{1} << 31;

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    std::uint64_t s = a + b;
    return s >= p ? s - p : s;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return a >= b ? a - b : a + p - b;
}

inline std::uint64_t neg_mod(std::uint64_t a, std::uint64_t p) {
    return a == 0 ? 0 : p - a;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return (a * b) % p;  // a, b < 2^31
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    base %= p;
    while (exp != 0) {
        if (exp & 1) r = mul_mod(r, base, p);
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    return r;
}

inline std::uint64_t inv_mod(std::uint64_t x, std::uint64_t p) {
    x %= p;
    if (x == 0) throw ZeroInverse("inverse of 0 mod " + std::to_string(p));
    return pow_mod(x, p - 2, p);
}

// Deterministic Miller-Rabin. The bases {2, 3, 5, 7} have no composite strong
// pseudoprime below 3'215'031'751, so the test is exact for the whole
// modulus budget (< 2^31).
inline bool is_prime(std::uint64_t m) {
    if (m < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull}) {
        if (m == q) return true;
        if (m % q == 0) return false;
    }
    std::uint64_t d = m - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull}) {
        std::uint64_t x = pow_mod(a, d, m);
        if (x == 1 || x == m - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mul_mod(x, x, m);
            if (x == m - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

// (d+1)!, rejecting dimensions whose factorial exceeds the modulus budget.
inline std::uint64_t construction_factorial(int d) {
    if (d < 2) throw PreconditionViolated("dimension must be >= 2, got " + std::to_string(d));
    std::uint64_t f = 1;
    for (int i = 2; i <= d + 1; ++i) {
        f *= static_cast<std::uint64_t>(i);
        if (f >= kModulusBudget)
            throw DimensionTooLarge("(d+1)! exceeds the 2^31 modulus budget for d = " +
                                    std::to_string(d));
    }
    return f;
}

// Smallest prime p >= max(n, threshold+1) with p == 1 (mod 4). The default
// threshold is (d+1)!. The tenfold variant raises it to 10*(d+1)!.
inline std::uint64_t find_construction_prime(std::uint64_t n, int d, bool tenfold_threshold = false) {
    if (n < 1) throw PreconditionViolated("n must be >= 1");
    std::uint64_t threshold = construction_factorial(d);
    if (tenfold_threshold) {
        threshold *= 10;
        if (threshold >= kModulusBudget)
            throw DimensionTooLarge("10*(d+1)! exceeds the 2^31 modulus budget for d = " +
                                    std::to_string(d));
    }
    std::uint64_t p = std::max(n, threshold + 1);
    for (;; ++p) {
        if (p >= kModulusBudget)
            throw DimensionTooLarge("no admissible prime below the 2^31 modulus budget");
        if (p % 4 == 1 && is_prime(p)) return p;
    }
}

// Square root of -1 mod p, computed as a^((p-1)/4) for the least
// quadratic non-residue a and verified by squaring. Returns the smaller of
// the two roots so that manifests are byte-stable.
inline std::uint64_t sqrt_minus_one(std::uint64_t p) {
    if (p % 4 != 1 || !is_prime(p))
        throw NotOneModFour("p = " + std::to_string(p) + " is not a prime == 1 (mod 4)");
    std::uint64_t a = 2;
    while (pow_mod(a, (p - 1) / 2, p) != p - 1) ++a;
    std::uint64_t r = pow_mod(a, (p - 1) / 4, p);
    if (mul_mod(r, r, p) != p - 1)
        throw Error("square-root-of--1 verification failed at p = " + std::to_string(p));
    return std::min(r, p - r);
}

// Prime modulus p == 1 (mod 4) with p > (d+1)!, together with a square root
// of -1. Immutable after construction and safe to share across threads.
struct FieldContext {
    std::uint64_t p = 0;
    std::uint64_t alpha = 0;
    int d = 0;

    FieldContext() = default;

    FieldContext(std::uint64_t p_, int d_) : p(p_), alpha(sqrt_minus_one(p_)), d(d_) {
        if (p >= kModulusBudget) throw DimensionTooLarge("modulus exceeds 2^31 budget");
        if (p <= construction_factorial(d))
            throw PreconditionViolated("p = " + std::to_string(p) + " is not > (d+1)! for d = " +
                                       std::to_string(d));
        if (mul_mod(alpha, alpha, p) != p - 1)
            throw Error("FieldContext invariant alpha^2 == -1 failed");
    }

    bool operator==(const FieldContext& o) const { return p == o.p && alpha == o.alpha && d == o.d; }
};

}  // namespace gridcurve

#endif
