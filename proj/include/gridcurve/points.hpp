#ifndef GRIDCURVE_POINTS_HPP
#define GRIDCURVE_POINTS_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "gridcurve/curve.hpp"
#include "gridcurve/errors.hpp"
#include "gridcurve/field.hpp"

namespace gridcurve {

// Image of the rational curve t -> (f_1(t)/h(t), ..., f_d(t)/h(t)) over its
// parameter domain, deduplicated, with the colliding parameter pair recorded
// when the curve self-intersects.
struct ModularPointSet {
    std::uint64_t p = 0;
    int d = 0;
    Mode mode = Mode::full;
    std::vector<std::vector<std::uint64_t>> points;  // in domain order, first hit kept
    std::vector<std::uint64_t> source_params;        // accepted t values, pre-dedup
    std::optional<std::pair<std::uint64_t, std::uint64_t>> collision;  // (t_first, t_later)

    std::size_t domain_size() const { return source_params.size(); }
    std::size_t self_intersections() const { return collision ? 1 : 0; }
};

namespace detail {

struct VecHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (std::uint64_t x : v) {
            h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace detail

// Full mode walks every t with h(t) != 0; strict mode walks t = u^{-1} for
// u = 1..floor((p-1)/(d+1)), skipping roots of h. More than one repeated
// image point contradicts the at-most-one-self-intersection guarantee and
// aborts.
inline ModularPointSet eval_curve(const CurveSystem& sys, Mode mode) {
    const FieldContext& ctx = sys.ctx;
    const std::uint64_t p = ctx.p;
    const int d = ctx.d;
    if (mode == Mode::strict && sys.mode != Mode::strict)
        throw PreconditionViolated("strict evaluation requires a strict-mode (tweaked) system");

    std::vector<std::uint64_t> domain;
    if (mode == Mode::full) {
        domain.reserve(p);
        for (std::uint64_t t = 0; t < p; ++t)
            if (sys.h.eval(t) != 0) domain.push_back(t);
    } else {
        const std::uint64_t limit = (p - 1) / static_cast<std::uint64_t>(d + 1);
        domain.reserve(limit);
        for (std::uint64_t u = 1; u <= limit; ++u) {
            std::uint64_t t = inv_mod(u, p);
            if (sys.h.eval(t) != 0) domain.push_back(t);
        }
    }

    ModularPointSet out;
    out.p = p;
    out.d = d;
    out.mode = mode;
    out.source_params = domain;
    out.points.reserve(domain.size());

    std::unordered_map<std::vector<std::uint64_t>, std::uint64_t, detail::VecHash> seen;
    seen.reserve(domain.size() * 2);
    std::size_t collisions = 0;
    for (std::uint64_t t : domain) {
        std::uint64_t hinv = inv_mod(sys.h.eval(t), p);
        std::vector<std::uint64_t> pt(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            pt[static_cast<std::size_t>(i)] = mul_mod(sys.f[static_cast<std::size_t>(i)].eval(t), hinv, p);
        auto [it, inserted] = seen.emplace(pt, t);
        if (inserted) {
            out.points.push_back(std::move(pt));
        } else {
            ++collisions;
            if (collisions > 1)
                throw TooManySelfIntersections("curve image has more than one repeated point at p = " +
                                               std::to_string(p));
            out.collision = {it->second, t};
        }
    }

    const std::size_t floor_size =
        mode == Mode::full
            ? static_cast<std::size_t>(p) - static_cast<std::size_t>(d + 1)
            : static_cast<std::size_t>((p - 1) / static_cast<std::uint64_t>(d + 1)) -
                  std::min<std::size_t>((p - 1) / static_cast<std::uint64_t>(d + 1),
                                        static_cast<std::size_t>(d + 1));
    if (out.domain_size() < floor_size)
        throw Error("curve domain smaller than the degree bound allows");
    return out;
}

// Integer points of (S + v) clipped to {1..n}^d, plus provenance.
struct GridPointSet {
    int d = 0;
    std::uint64_t n = 0;
    std::uint64_t p = 0;
    std::vector<std::uint64_t> translation;
    std::vector<std::vector<std::int64_t>> points;  // sorted lexicographically
};

enum class TranslationStrategy { auto_select, exhaustive, sample };

inline const char* to_string(TranslationStrategy s) {
    switch (s) {
        case TranslationStrategy::exhaustive: return "exhaustive";
        case TranslationStrategy::sample: return "sample";
        default: return "auto";
    }
}

struct TranslationOptions {
    TranslationStrategy strategy = TranslationStrategy::auto_select;
    std::uint64_t budget = 10'000'000;  // exhaustive when p^d <= budget
    std::uint64_t samples = 100'000;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct TranslationResult {
    std::vector<std::uint64_t> translation;
    GridPointSet grid;
    std::size_t achieved = 0;
    std::optional<std::size_t> mean_floor;  // ceil(|S| n^d / p^d); exhaustive only
    bool exhaustive = false;
    std::uint64_t candidates = 0;
};

namespace detail {

inline std::size_t clip_count(const std::vector<std::vector<std::uint64_t>>& pts,
                              const std::vector<std::uint64_t>& v, std::uint64_t p, std::uint64_t n) {
    std::size_t cnt = 0;
    for (const auto& pt : pts) {
        bool in = true;
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::uint64_t r = add_mod(pt[i], v[i], p);
            if (r < 1 || r > n) {
                in = false;
                break;
            }
        }
        cnt += in;
    }
    return cnt;
}

inline std::vector<std::uint64_t> index_to_translation(std::uint64_t linear, std::uint64_t p, int d) {
    std::vector<std::uint64_t> v(static_cast<std::size_t>(d));
    for (int i = d; i-- > 0;) {
        v[static_cast<std::size_t>(i)] = linear % p;
        linear /= p;
    }
    return v;
}

// Unbiased residue draw; mt19937_64 is fully specified, so runs reproduce
// across platforms.
inline std::uint64_t draw_mod(std::mt19937_64& gen, std::uint64_t p) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % p);
    for (;;) {
        std::uint64_t x = gen();
        if (x < limit) return x % p;
    }
}

struct TranslationCandidate {
    std::size_t count = 0;
    std::vector<std::uint64_t> v;

    bool better_than(const TranslationCandidate& o) const {
        if (count != o.count) return count > o.count;
        if (o.v.empty()) return !v.empty();
        return !v.empty() && v < o.v;
    }
};

}  // namespace detail

// Searches for the translation maximizing the grid overlap. Exhaustive
// search walks all p^d candidates in lexicographic order (guaranteeing the
// first-moment floor ceil(|S| n^d / p^d)); otherwise a seeded uniform sample
// reports the best candidate observed. Ties resolve to the lexicographically
// smallest translation, so threaded and serial runs agree.
inline TranslationResult best_translation(const ModularPointSet& s, std::uint64_t n,
                                          const TranslationOptions& opts = {}) {
    const std::uint64_t p = s.p;
    const int d = s.d;
    if (n > p) throw GridLargerThanField("grid size n = " + std::to_string(n) +
                                         " exceeds the field size p = " + std::to_string(p));
    if (n < 1) throw PreconditionViolated("grid size must be positive");

    // p^d, clamped once it exceeds any level this search cares about
    unsigned __int128 space = 1;
    for (int i = 0; i < d; ++i) {
        space *= p;
        if (space > (static_cast<unsigned __int128>(1) << 100)) break;
    }

    bool exhaustive;
    switch (opts.strategy) {
        case TranslationStrategy::exhaustive:
            if (space > opts.budget) {
                std::string count =
                    space > (static_cast<unsigned __int128>(1) << 63)
                        ? "more than 2^63"
                        : std::to_string(static_cast<std::uint64_t>(space));
                throw BudgetExceeded("exhaustive translation search needs p^d = " + count +
                                     " candidates; raise --budget or use sampling");
            }
            exhaustive = true;
            break;
        case TranslationStrategy::sample:
            exhaustive = false;
            break;
        default:
            exhaustive = space <= opts.budget;
    }

    const int threads = std::max(1, opts.threads);
    std::vector<detail::TranslationCandidate> best(static_cast<std::size_t>(threads));
    std::uint64_t candidates = 0;

    if (exhaustive) {
        const std::uint64_t total = static_cast<std::uint64_t>(space);
        candidates = total;
        auto body = [&](int tid) {
            const std::uint64_t chunk = (total + threads - 1) / threads;
            const std::uint64_t lo = chunk * static_cast<std::uint64_t>(tid);
            const std::uint64_t hi = std::min(total, lo + chunk);
            detail::TranslationCandidate local;
            for (std::uint64_t linear = lo; linear < hi; ++linear) {
                std::vector<std::uint64_t> v = detail::index_to_translation(linear, p, d);
                std::size_t cnt = detail::clip_count(s.points, v, p, n);
                if (cnt > local.count) {
                    local.count = cnt;
                    local.v = std::move(v);
                }
            }
            best[static_cast<std::size_t>(tid)] = std::move(local);
        };
        if (threads == 1) {
            body(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(body, t);
            for (auto& th : pool) th.join();
        }
    } else {
        // draw the sample list serially so the result is independent of the
        // thread count
        std::mt19937_64 gen(opts.seed);
        std::vector<std::vector<std::uint64_t>> sample;
        sample.reserve(opts.samples);
        for (std::uint64_t k = 0; k < opts.samples; ++k) {
            std::vector<std::uint64_t> v(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] = detail::draw_mod(gen, p);
            sample.push_back(std::move(v));
        }
        candidates = sample.size();
        auto body = [&](int tid) {
            detail::TranslationCandidate local;
            for (std::size_t k = static_cast<std::size_t>(tid); k < sample.size();
                 k += static_cast<std::size_t>(threads)) {
                std::size_t cnt = detail::clip_count(s.points, sample[k], p, n);
                detail::TranslationCandidate cand{cnt, sample[k]};
                if (cand.better_than(local)) local = std::move(cand);
            }
            best[static_cast<std::size_t>(tid)] = std::move(local);
        };
        if (threads == 1) {
            body(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(body, t);
            for (auto& th : pool) th.join();
        }
    }

    detail::TranslationCandidate winner;
    for (auto& cand : best)
        if (cand.better_than(winner)) winner = std::move(cand);

    TranslationResult res;
    res.translation = winner.v;
    res.achieved = winner.count;
    res.exhaustive = exhaustive;
    res.candidates = candidates;

    if (exhaustive) {
        // max >= mean = |S| n^d / p^d, and the max is an integer
        mpz_class num(static_cast<unsigned long>(s.points.size()));
        mpz_class nd(1), pd(1);
        for (int i = 0; i < d; ++i) {
            nd *= static_cast<unsigned long>(n);
            pd *= static_cast<unsigned long>(p);
        }
        mpz_class floor_q;
        mpz_cdiv_q(floor_q.get_mpz_t(), mpz_class(num * nd).get_mpz_t(), pd.get_mpz_t());
        res.mean_floor = static_cast<std::size_t>(floor_q.get_ui());
        if (res.achieved < *res.mean_floor)
            throw Error("exhaustive translation search fell below the first-moment floor");
    }

    res.grid.d = d;
    res.grid.n = n;
    res.grid.p = p;
    res.grid.translation = winner.v;
    res.grid.points.reserve(winner.count);
    for (const auto& pt : s.points) {
        std::vector<std::int64_t> q(static_cast<std::size_t>(d));
        bool in = true;
        for (int i = 0; i < d; ++i) {
            std::uint64_t r = add_mod(pt[static_cast<std::size_t>(i)],
                                      winner.v[static_cast<std::size_t>(i)], p);
            if (r < 1 || r > n) {
                in = false;
                break;
            }
            q[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(r);
        }
        if (in) res.grid.points.push_back(std::move(q));
    }
    std::sort(res.grid.points.begin(), res.grid.points.end());
    if (std::adjacent_find(res.grid.points.begin(), res.grid.points.end()) != res.grid.points.end())
        throw Error("clipped grid set contains duplicates");
    if (res.grid.points.size() != res.achieved)
        throw Error("clipped grid size disagrees with the search count");
    return res;
}

// One point per line, comma-separated coordinates.
inline std::string to_csv(const std::vector<std::vector<std::int64_t>>& points) {
    std::ostringstream os;
    for (const auto& pt : points) {
        for (std::size_t i = 0; i < pt.size(); ++i) os << (i ? "," : "") << pt[i];
        os << "\n";
    }
    return os.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << bytes;
    if (!f) throw Error("write failed for " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline std::vector<std::vector<std::int64_t>> parse_csv_points(const std::string& text) {
    std::vector<std::vector<std::int64_t>> pts;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::int64_t> pt;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) {
            try {
                std::size_t used = 0;
                pt.push_back(std::stoll(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError("bad coordinate '" + tok + "'", lineno);
            }
        }
        if (!pts.empty() && pt.size() != pts.front().size())
            throw ParseError("inconsistent coordinate count", lineno);
        pts.push_back(std::move(pt));
    }
    return pts;
}

struct ParsedPointFile {
    std::vector<std::vector<std::int64_t>> points;
    std::optional<std::uint64_t> p;
    std::optional<int> d;
    std::optional<std::uint64_t> n;
    std::optional<std::string> mode;
};

inline ParsedPointFile parse_point_file(const std::string& path) {
    ParsedPointFile out;
    const std::string text = read_file(path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("JSON parse error: ") + e.what(), 0);
        }
        if (!j.contains("points")) throw ParseError("manifest has no 'points' array", 0);
        try {
            for (const auto& row : j["points"]) {
                std::vector<std::int64_t> pt;
                for (const auto& x : row) pt.push_back(x.get<std::int64_t>());
                out.points.push_back(std::move(pt));
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad points array: ") + e.what(), 0);
        }
        if (j.contains("field") && j["field"].contains("p"))
            out.p = j["field"]["p"].get<std::uint64_t>();
        if (j.contains("params")) {
            const auto& prm = j["params"];
            if (prm.contains("d")) out.d = prm["d"].get<int>();
            if (prm.contains("n")) out.n = prm["n"].get<std::uint64_t>();
            if (prm.contains("mode")) out.mode = prm["mode"].get<std::string>();
        }
    } else {
        out.points = parse_csv_points(text);
        if (!out.points.empty()) out.d = static_cast<int>(out.points.front().size());
    }
    if (!out.points.empty()) {
        for (const auto& pt : out.points)
            if (pt.size() != out.points.front().size())
                throw ParseError("inconsistent coordinate count", 0);
        out.d = static_cast<int>(out.points.front().size());
    }
    return out;
}

}  // namespace gridcurve

#endif
