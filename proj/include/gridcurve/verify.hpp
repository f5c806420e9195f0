#ifndef GRIDCURVE_VERIFY_HPP
#define GRIDCURVE_VERIFY_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <exception>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gridcurve/errors.hpp"
#include "gridcurve/linalg.hpp"
#include "gridcurve/poly.hpp"

namespace gridcurve {

using PointList = std::vector<std::vector<std::int64_t>>;

enum class SurfaceFamily { sphere_or_plane, plane_only };
enum class VerifyMode { oracle, fast };
enum class RingKind { integers, modp };

inline const char* to_string(SurfaceFamily f) {
    return f == SurfaceFamily::sphere_or_plane ? "sphere_or_plane" : "plane_only";
}
inline const char* to_string(VerifyMode m) { return m == VerifyMode::oracle ? "oracle" : "fast"; }
inline const char* to_string(RingKind r) { return r == RingKind::integers ? "int" : "modp"; }

// Paraboloid lift: appends the sum of squared coordinates.
inline std::vector<std::int64_t> lift(const std::vector<std::int64_t>& pt) {
    unsigned __int128 acc = 0;
    for (std::int64_t x : pt) {
        if (x <= -(std::int64_t{1} << 31) || x >= (std::int64_t{1} << 31))
            throw PreconditionViolated("integer lift requires |coordinate| < 2^31");
        acc += static_cast<unsigned __int128>(static_cast<std::uint64_t>(x < 0 ? -x : x)) *
               static_cast<std::uint64_t>(x < 0 ? -x : x);
    }
    if (acc > static_cast<unsigned __int128>(std::int64_t{1} << 62))
        throw PreconditionViolated("integer lift overflows");
    std::vector<std::int64_t> out = pt;
    out.push_back(static_cast<std::int64_t>(acc));
    return out;
}

inline std::vector<std::uint64_t> lift_mod(const std::vector<std::int64_t>& pt, std::uint64_t p) {
    ZpRing R(p);
    std::vector<std::uint64_t> out;
    out.reserve(pt.size() + 1);
    std::uint64_t s = 0;
    for (std::int64_t x : pt) {
        std::uint64_t r = R.from_i64(x);
        out.push_back(r);
        s = add_mod(s, mul_mod(r, r, p), p);
    }
    out.push_back(s);
    return out;
}

// Homogeneous row of one point: [x_1..x_d, sum x_i^2, 1] for the
// sphere-or-plane family, [x_1..x_d, 1] for planes. A set of points lies on
// a common sphere/plane exactly when these rows are rank deficient.
template <class Ring>
std::vector<typename Ring::Elem> homogeneous_row(const Ring& R, const std::vector<std::int64_t>& pt,
                                                 SurfaceFamily family) {
    std::vector<typename Ring::Elem> row;
    row.reserve(pt.size() + 2);
    typename Ring::Elem s = R.zero();
    for (std::int64_t x : pt) {
        typename Ring::Elem e = R.from_i64(x);
        if (family == SurfaceFamily::sphere_or_plane) s = R.add(s, R.mul(e, e));
        row.push_back(std::move(e));
    }
    if (family == SurfaceFamily::sphere_or_plane) row.push_back(std::move(s));
    row.push_back(R.one());
    return row;
}

template <class Ring>
MatrixOf<Ring> homogeneous_rows(const Ring& R, const PointList& pts, SurfaceFamily family) {
    MatrixOf<Ring> rows;
    rows.reserve(pts.size());
    for (const auto& pt : pts) rows.push_back(homogeneous_row(R, pt, family));
    return rows;
}

namespace detail {

template <class Ring>
bool incidence_det_zero(const Ring& R, const PointList& pts, SurfaceFamily family) {
    return R.is_zero(determinant(R, homogeneous_rows(R, pts, family)));
}

inline void check_widths(const PointList& pts) {
    if (pts.empty()) throw TooFewPoints("empty point set");
    for (const auto& pt : pts)
        if (pt.size() != pts.front().size())
            throw PreconditionViolated("points have inconsistent dimensions");
}

}  // namespace detail

// True iff the d+2 points lie on one common sphere or hyperplane (planes
// count as infinite-radius spheres): the (d+2)x(d+2) determinant of the
// lifted homogeneous rows vanishes.
inline bool cospherical_or_coplanar(const PointList& pts, RingKind ring, std::uint64_t p = 0) {
    detail::check_widths(pts);
    const std::size_t d = pts.front().size();
    if (pts.size() != d + 2)
        throw WrongArity("cospherical_or_coplanar expects exactly d+2 = " + std::to_string(d + 2) +
                         " points, got " + std::to_string(pts.size()));
    if (ring == RingKind::integers)
        return detail::incidence_det_zero(IntRing{}, pts, SurfaceFamily::sphere_or_plane);
    return detail::incidence_det_zero(ZpRing(p), pts, SurfaceFamily::sphere_or_plane);
}

// Companion (d+1)-point hyperplane predicate.
inline bool coplanar(const PointList& pts, RingKind ring, std::uint64_t p = 0) {
    detail::check_widths(pts);
    const std::size_t d = pts.front().size();
    if (pts.size() != d + 1)
        throw WrongArity("coplanar expects exactly d+1 = " + std::to_string(d + 1) +
                         " points, got " + std::to_string(pts.size()));
    if (ring == RingKind::integers)
        return detail::incidence_det_zero(IntRing{}, pts, SurfaceFamily::plane_only);
    return detail::incidence_det_zero(ZpRing(p), pts, SurfaceFamily::plane_only);
}

struct VerifyOptions {
    VerifyMode mode = VerifyMode::oracle;
    RingKind ring = RingKind::integers;
    std::uint64_t p = 0;  // required for RingKind::modp
    int threads = 1;
    std::uint64_t ops_budget = 4'000'000'000ULL;
};

struct VerificationReport {
    SurfaceFamily family = SurfaceFamily::sphere_or_plane;
    VerifyMode mode = VerifyMode::oracle;
    RingKind ring = RingKind::integers;
    std::size_t point_count = 0;
    int dimension = 0;
    int max_count = 0;
    std::vector<std::size_t> witness;  // indices into the input point list
    std::string surface;               // canonical key of the best surface
    bool witness_verified = false;
    std::uint64_t subsets_examined = 0;
    double elapsed_seconds = 0.0;

    int bound() const {
        return family == SurfaceFamily::sphere_or_plane ? dimension + 1 : dimension;
    }
    bool within_bound() const { return max_count <= bound(); }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["family"] = to_string(family);
        j["mode"] = to_string(mode);
        j["ring"] = to_string(ring);
        j["points"] = point_count;
        j["dimension"] = dimension;
        j["max_points_on_one_surface"] = max_count;
        j["bound"] = bound();
        j["within_bound"] = within_bound();
        j["witness"] = witness;
        j["surface"] = surface;
        j["witness_verified"] = witness_verified;
        j["subsets_examined"] = subsets_examined;
        j["elapsed_seconds"] = elapsed_seconds;
        return j;
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "family: " << to_string(family) << "  mode: " << to_string(mode)
           << "  ring: " << to_string(ring) << "\n"
           << "points: " << point_count << "  dimension: " << dimension << "\n"
           << "max points on one " << (family == SurfaceFamily::sphere_or_plane
                                           ? "sphere-or-plane"
                                           : "plane")
           << ": " << max_count << " (bound " << bound() << ") -> "
           << (within_bound() ? "OK" : "VIOLATED") << "\n";
        if (!witness.empty()) {
            os << "witness (" << witness.size() << " points, "
               << (witness_verified ? "re-checked" : "NOT re-checked") << "):";
            for (std::size_t i : witness) os << " " << i;
            os << "\n";
        }
        os << "subsets examined: " << subsets_examined << "  elapsed: " << elapsed_seconds
           << " s\n";
        return os.str();
    }
};

namespace detail {

inline std::uint64_t binomial_clamped(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > static_cast<unsigned __int128>(1) << 62) return std::uint64_t{1} << 62;
    }
    return static_cast<std::uint64_t>(r);
}

// Lexicographic enumeration of (size)-subsets of [0, n) whose first element
// is fixed; visit() returns false to stop early.
template <class Visit>
void for_each_subset_with_first(std::size_t first, std::size_t n, std::size_t size, Visit visit) {
    if (size == 0 || first + size > n) return;
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = first + i;
    for (;;) {
        if (!visit(idx)) return;
        // advance positions 1..size-1; position i tops out at n - size + i
        std::size_t i = size;
        bool advanced = false;
        while (i-- > 1) {
            if (idx[i] < n - size + i) {
                ++idx[i];
                for (std::size_t j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) return;
    }
}

template <class Ring>
struct Bucket {
    std::vector<std::uint32_t> ids;
    bool exact = false;  // span buckets carry the full incidence list already
};

template <class Ring>
struct EngineResult {
    std::unordered_map<std::string, Bucket<Ring>> buckets;  // fast mode
    int best_count = 0;                                     // oracle mode
    std::vector<std::size_t> best_subset;
    std::uint64_t examined = 0;
};

template <class Ring>
std::vector<std::uint32_t> span_members(const Ring& R, const BareissEchelon<Ring>& ech,
                                        const MatrixOf<Ring>& rows) {
    ReduceWorkspace<Ring> ws;
    std::vector<std::uint32_t> out;
    for (std::size_t q = 0; q < rows.size(); ++q)
        if (span_contains(R, ech, rows[q], ws)) out.push_back(static_cast<std::uint32_t>(q));
    return out;
}

template <class Elem>
std::vector<std::vector<Elem>> gather_rows(const std::vector<std::vector<Elem>>& rows,
                                           const std::vector<std::size_t>& idx) {
    std::vector<std::vector<Elem>> m;
    m.reserve(idx.size());
    for (std::size_t i : idx) m.push_back(rows[i]);
    return m;
}

}  // namespace detail

// Exact maximum number of input points lying on one common surface of the
// family, with a witness. Oracle mode re-counts span membership for every
// (K-1)-subset; fast mode hashes canonical surface keys and unions subset
// members per key. Both return the same maximum; they only differ in how
// much work they re-do.
inline VerificationReport max_incidence(const PointList& pts, SurfaceFamily family,
                                        const VerifyOptions& opts) {
    detail::check_widths(pts);
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t d = pts.front().size();
    const std::size_t K = family == SurfaceFamily::sphere_or_plane ? d + 2 : d + 1;
    if (pts.size() < K)
        throw TooFewPoints("need at least " + std::to_string(K) + " points, got " +
                           std::to_string(pts.size()));
    if (opts.ring == RingKind::modp && opts.p == 0)
        throw PreconditionViolated("modp verification requires a modulus");

    const std::uint64_t subsets = detail::binomial_clamped(pts.size(), K - 1);
    const std::uint64_t per_subset = opts.mode == VerifyMode::oracle ? pts.size() : K;
    if (subsets > opts.ops_budget / std::max<std::uint64_t>(per_subset, 1))
        throw BudgetExceeded("incidence search needs ~" + std::to_string(subsets) +
                             " subsets over " + std::to_string(pts.size()) + " points" +
                             (opts.mode == VerifyMode::oracle ? "; try fast mode" : ""));

    VerificationReport rep;
    rep.family = family;
    rep.mode = opts.mode;
    rep.ring = opts.ring;
    rep.point_count = pts.size();
    rep.dimension = static_cast<int>(d);

    auto run = [&](const auto& R) {
        using Ring = std::decay_t<decltype(R)>;
        const MatrixOf<Ring> rows = homogeneous_rows(R, pts, family);
        const std::size_t n = rows.size();
        const std::size_t sz = K - 1;
        const int threads = std::max(1, opts.threads);

        std::vector<detail::EngineResult<Ring>> results(static_cast<std::size_t>(threads));
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));

        auto body = [&](int tid) {
            detail::EngineResult<Ring>& res = results[static_cast<std::size_t>(tid)];
            ReduceWorkspace<Ring> ws;
            for (std::size_t first = static_cast<std::size_t>(tid); first < n;
                 first += static_cast<std::size_t>(threads)) {
                detail::for_each_subset_with_first(first, n, sz, [&](const std::vector<std::size_t>& idx) {
                    ++res.examined;
                    BareissEchelon<Ring> ech = bareiss_echelon(R, detail::gather_rows(rows, idx));
                    if (opts.mode == VerifyMode::oracle) {
                        int cnt = 0;
                        for (std::size_t q = 0; q < n; ++q)
                            if (span_contains(R, ech, rows[q], ws)) ++cnt;
                        if (cnt > res.best_count) {
                            res.best_count = cnt;
                            res.best_subset = idx;
                        }
                    } else if (ech.rank() == sz) {
                        auto normal = hyperplane_normal(R, detail::gather_rows(rows, idx));
                        R.canonicalize(normal);
                        std::string key = "H|" + vector_key(R, normal);
                        auto& b = res.buckets[key];
                        for (std::size_t i : idx) b.ids.push_back(static_cast<std::uint32_t>(i));
                    } else {
                        std::string key = "S|" + R.span_key(detail::gather_rows(rows, idx));
                        auto& b = res.buckets[key];
                        if (!b.exact) {
                            b.ids = detail::span_members(R, ech, rows);
                            b.exact = true;
                        }
                    }
                    return true;
                });
            }
        };

        if (threads == 1) {
            body(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t)
                pool.emplace_back([&, t] {
                    try {
                        body(t);
                    } catch (...) {
                        errors[static_cast<std::size_t>(t)] = std::current_exception();
                    }
                });
            for (auto& th : pool) th.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }

        for (const auto& r : results) rep.subsets_examined += r.examined;

        std::vector<std::uint32_t> witness_ids;
        if (opts.mode == VerifyMode::oracle) {
            int best = 0;
            const std::vector<std::size_t>* best_subset = nullptr;
            for (const auto& r : results) {
                if (r.best_count > best ||
                    (r.best_count == best && best_subset && !r.best_subset.empty() &&
                     r.best_subset < *best_subset)) {
                    best = r.best_count;
                    best_subset = &r.best_subset;
                }
            }
            if (!best_subset || best_subset->empty()) throw Error("incidence search found no subset");
            rep.max_count = best;
            MatrixOf<Ring> sub = detail::gather_rows(rows, *best_subset);
            BareissEchelon<Ring> ech = bareiss_echelon(R, sub);
            witness_ids = detail::span_members(R, ech, rows);
            if (ech.rank() == sz) {
                auto normal = hyperplane_normal(R, detail::gather_rows(rows, *best_subset));
                R.canonicalize(normal);
                rep.surface = "H|" + vector_key(R, normal);
            } else {
                rep.surface = "S|" + R.span_key(detail::gather_rows(rows, *best_subset));
            }
        } else {
            // merge per-key id lists, then take the largest bucket
            std::unordered_map<std::string, detail::Bucket<Ring>> merged;
            for (auto& r : results)
                for (auto& [key, b] : r.buckets) {
                    auto& dst = merged[key];
                    if (b.exact) {
                        if (!dst.exact) dst = std::move(b);
                    } else if (!dst.exact) {
                        dst.ids.insert(dst.ids.end(), b.ids.begin(), b.ids.end());
                    }
                }
            const std::string* best_key = nullptr;
            std::size_t best_size = 0;
            for (auto& [key, b] : merged) {
                std::sort(b.ids.begin(), b.ids.end());
                b.ids.erase(std::unique(b.ids.begin(), b.ids.end()), b.ids.end());
                if (b.ids.size() > best_size ||
                    (b.ids.size() == best_size && best_key && key < *best_key)) {
                    best_size = b.ids.size();
                    best_key = &key;
                }
            }
            rep.max_count = static_cast<int>(best_size);
            witness_ids = merged[*best_key].ids;
            rep.surface = *best_key;
        }

        rep.witness.assign(witness_ids.begin(), witness_ids.end());
        // witness re-check: the witness rows must be rank deficient, i.e.
        // genuinely on one common surface
        BareissEchelon<Ring> wit = bareiss_echelon(
            R, detail::gather_rows(rows, std::vector<std::size_t>(rep.witness.begin(), rep.witness.end())));
        rep.witness_verified = wit.rank() <= sz && static_cast<int>(rep.witness.size()) == rep.max_count;
    };

    if (opts.ring == RingKind::integers)
        run(IntRing{});
    else
        run(ZpRing(opts.p));

    rep.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// Test utility for the strict-mode mechanism: a nice polynomial that splits
// completely over distinct nonzero roots has inverse roots summing to zero.
inline bool vieta_check(const Polynomial& poly, const std::vector<std::uint64_t>& roots) {
    const std::uint64_t p = poly.context().p;
    if (!poly.is_nice()) throw PreconditionViolated("vieta_check: polynomial is not nice");
    if (poly.is_zero() || poly.degree() != static_cast<int>(roots.size()))
        throw PreconditionViolated("vieta_check: degree differs from the number of roots");
    for (std::size_t i = 0; i < roots.size(); ++i) {
        std::uint64_t r = roots[i] % p;
        if (r == 0) throw PreconditionViolated("vieta_check: root is zero");
        if (poly.eval(r) != 0) throw PreconditionViolated("vieta_check: claimed root is not a root");
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (r == roots[j] % p) throw PreconditionViolated("vieta_check: roots are not distinct");
    }
    std::uint64_t s = 0;
    for (std::uint64_t r : roots) s = add_mod(s, inv_mod(r, p), p);
    return s == 0;
}

}  // namespace gridcurve

#endif
