#ifndef GRIDCURVE_PIPELINE_HPP
#define GRIDCURVE_PIPELINE_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gridcurve/curve.hpp"
#include "gridcurve/errors.hpp"
#include "gridcurve/field.hpp"
#include "gridcurve/points.hpp"
#include "gridcurve/verify.hpp"
#include "gridcurve/version.hpp"

namespace gridcurve {

struct ConstructOptions {
    int d = 2;
    std::uint64_t n = 100;
    Mode mode = Mode::full;
    std::uint64_t seed = 0;
    TranslationStrategy translation = TranslationStrategy::auto_select;
    std::uint64_t budget = 10'000'000;
    std::uint64_t samples = 100'000;
    bool tenfold_threshold = false;  // require p > 10*(d+1)! instead of (d+1)!
    bool skip_verify = false;
    int threads = 1;
    int max_retries = 20;
    std::string command_echo;  // recorded verbatim in the manifest
};

struct ConstructOutcome {
    CurveSystem system;
    ModularPointSet modular;
    TranslationResult translation;
    std::vector<std::uint64_t> rejected_primes;
    std::optional<VerificationReport> verify_spheres;  // mod-p fast self-check
    std::optional<VerificationReport> verify_planes;   // strict mode only
    bool verify_trivial = false;                       // too few points to need a check
    nlohmann::ordered_json manifest;
    std::string csv;
    double construct_seconds = 0.0;
    double verify_seconds = 0.0;

    // lower bound on distinct image points: p - d - 2 in full mode,
    // floor((p-1)/(d+1)) - d - 2 in strict mode
    std::size_t modular_floor() const {
        const std::uint64_t base =
            modular.mode == Mode::full
                ? modular.p
                : (modular.p - 1) / static_cast<std::uint64_t>(modular.d + 1);
        const std::uint64_t sub = static_cast<std::uint64_t>(modular.d) + 2;
        return base > sub ? static_cast<std::size_t>(base - sub) : 0;
    }
};

namespace detail {

inline std::uint64_t next_admissible_prime(std::uint64_t after) {
    for (std::uint64_t q = after + 1;; ++q) {
        if (q >= kModulusBudget)
            throw DimensionTooLarge("no admissible prime below the 2^31 modulus budget");
        if (q % 4 == 1 && is_prime(q)) return q;
    }
}

}  // namespace detail

// find prime -> build system (retrying past degenerate strict tweaks) ->
// evaluate curve -> best translation -> self-check -> assemble outputs.
inline ConstructOutcome run_construct(const ConstructOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    if (opts.d < 2 || opts.d > 11)
        throw DimensionTooLarge("d must be between 2 and 11, got " + std::to_string(opts.d));
    if (opts.n < 2) throw PreconditionViolated("n must be at least 2");

    std::uint64_t p = find_construction_prime(opts.n, opts.d, opts.tenfold_threshold);
    std::vector<std::uint64_t> rejected;
    CurveSystem sys;
    for (;;) {
        FieldContext ctx(p, opts.d);
        CurveSystem full = build_full_system(ctx);
        if (opts.mode == Mode::full) {
            sys = std::move(full);
            break;
        }
        try {
            sys = apply_nice_tweak(full);
            break;
        } catch (const DegenerateTweak&) {
            rejected.push_back(p);
            if (static_cast<int>(rejected.size()) >= opts.max_retries)
                throw RetriesExhausted("strict construction hit " + std::to_string(rejected.size()) +
                                       " degenerate primes starting at p = " +
                                       std::to_string(rejected.front()));
            p = detail::next_admissible_prime(p);
        }
    }

    ConstructOutcome out;
    out.rejected_primes = rejected;
    out.modular = eval_curve(sys, opts.mode);

    TranslationOptions topts;
    topts.strategy = opts.translation;
    topts.budget = opts.budget;
    topts.samples = opts.samples;
    topts.seed = opts.seed;
    topts.threads = opts.threads;
    out.translation = best_translation(out.modular, opts.n, topts);
    out.system = std::move(sys);
    out.construct_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!opts.skip_verify) {
        const auto tv = std::chrono::steady_clock::now();
        const auto& pts = out.translation.grid.points;
        const std::size_t need = static_cast<std::size_t>(opts.d) + 2;
        if (pts.size() < need) {
            out.verify_trivial = true;  // fewer than d+2 points cannot violate anything
        } else {
            VerifyOptions vo;
            vo.mode = VerifyMode::fast;
            vo.ring = RingKind::modp;
            vo.p = out.modular.p;
            vo.threads = opts.threads;
            out.verify_spheres = max_incidence(pts, SurfaceFamily::sphere_or_plane, vo);
            if (!out.verify_spheres->within_bound())
                throw Error("self-check failed: " + std::to_string(out.verify_spheres->max_count) +
                            " points on one sphere-or-plane (bound " +
                            std::to_string(out.verify_spheres->bound()) + ")");
            if (opts.mode == Mode::strict) {
                out.verify_planes = max_incidence(pts, SurfaceFamily::plane_only, vo);
                if (!out.verify_planes->within_bound())
                    throw Error("self-check failed: " + std::to_string(out.verify_planes->max_count) +
                                " points on one plane (bound " +
                                std::to_string(out.verify_planes->bound()) + ")");
            }
        }
        out.verify_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - tv).count();
    }

    nlohmann::ordered_json m;
    m["format"] = "gridcurve-manifest/1";
    m["version"] = kVersion;
    m["command"] = opts.command_echo;
    nlohmann::ordered_json params;
    params["d"] = opts.d;
    params["n"] = opts.n;
    params["mode"] = to_string(opts.mode);
    params["seed"] = opts.seed;
    params["translation"] = to_string(opts.translation);
    params["budget"] = opts.budget;
    params["samples"] = opts.samples;
    params["tenfold_threshold"] = opts.tenfold_threshold;
    params["threads"] = opts.threads;
    m["params"] = std::move(params);
    nlohmann::ordered_json field;
    field["p"] = out.modular.p;
    field["alpha"] = out.system.ctx.alpha;
    m["field"] = std::move(field);
    m["rejected_primes"] = out.rejected_primes;
    m["curve"] = manifest_fragment(out.system);
    nlohmann::ordered_json modular;
    modular["domain_size"] = out.modular.domain_size();
    modular["distinct_points"] = out.modular.points.size();
    modular["self_intersections"] = out.modular.self_intersections();
    if (out.modular.collision) modular["collision"] = {out.modular.collision->first, out.modular.collision->second};
    m["modular"] = std::move(modular);
    nlohmann::ordered_json trans;
    trans["strategy"] = out.translation.exhaustive ? "exhaustive" : "sample";
    trans["candidates"] = out.translation.candidates;
    trans["v"] = out.translation.translation;
    trans["achieved"] = out.translation.achieved;
    if (out.translation.mean_floor)
        trans["first_moment_floor"] = *out.translation.mean_floor;
    m["translation"] = std::move(trans);
    if (opts.skip_verify) {
        m["verification"] = "skipped";
    } else if (out.verify_trivial) {
        m["verification"] = "trivial (fewer than d+2 points)";
    } else {
        nlohmann::ordered_json ver;
        ver["max_on_sphere_or_plane"] = out.verify_spheres->max_count;
        ver["sphere_or_plane_bound"] = out.verify_spheres->bound();
        if (out.verify_planes) {
            ver["max_on_plane"] = out.verify_planes->max_count;
            ver["plane_bound"] = out.verify_planes->bound();
        }
        ver["ring"] = "modp";
        ver["mode"] = "fast";
        m["verification"] = std::move(ver);
    }
    m["points"] = out.translation.grid.points;
    out.manifest = std::move(m);
    out.csv = to_csv(out.translation.grid.points);
    return out;
}

inline void write_outputs(const ConstructOutcome& out, const std::string& base) {
    write_file(base + ".csv", out.csv);
    write_file(base + ".json", out.manifest.dump(2) + "\n");
}

struct VerifyCommandOptions {
    std::string input;
    std::optional<int> d;
    RingKind ring = RingKind::integers;
    VerifyMode mode = VerifyMode::oracle;
    bool plane_only = false;
    std::optional<std::uint64_t> p;
    int threads = 1;
    std::uint64_t ops_budget = 4'000'000'000ULL;
    std::string report_path;  // JSON report location, empty = none
};

struct VerifyCommandResult {
    VerificationReport report;
    bool ok = false;
};

inline VerifyCommandResult run_verify(const VerifyCommandOptions& opts) {
    ParsedPointFile in = parse_point_file(opts.input);
    if (in.points.empty()) throw TooFewPoints("no points in " + opts.input);
    if (opts.d && in.d && *opts.d != *in.d)
        throw PreconditionViolated("--d " + std::to_string(*opts.d) + " disagrees with input width " +
                                   std::to_string(*in.d));
    VerifyOptions vo;
    vo.mode = opts.mode;
    vo.ring = opts.ring;
    vo.threads = opts.threads;
    vo.ops_budget = opts.ops_budget;
    if (opts.ring == RingKind::modp) {
        if (opts.p)
            vo.p = *opts.p;
        else if (in.p)
            vo.p = *in.p;
        else
            throw PreconditionViolated("modp verification needs --p (CSV input carries no modulus)");
    }
    const SurfaceFamily family =
        opts.plane_only ? SurfaceFamily::plane_only : SurfaceFamily::sphere_or_plane;
    VerifyCommandResult res;
    res.report = max_incidence(in.points, family, vo);
    res.ok = res.report.within_bound() && res.report.witness_verified;
    if (!opts.report_path.empty())
        write_file(opts.report_path, res.report.to_json().dump(2) + "\n");
    return res;
}

struct InspectOptions {
    int d = 2;
    std::optional<std::uint64_t> p;
    std::optional<std::uint64_t> n;
    Mode mode = Mode::full;
};

struct InspectResult {
    std::string text;
    bool ok = false;
};

inline InspectResult run_inspect(const InspectOptions& opts) {
    std::ostringstream os;
    std::uint64_t p;
    if (opts.p)
        p = *opts.p;
    else if (opts.n)
        p = find_construction_prime(*opts.n, opts.d);
    else
        throw PreconditionViolated("inspect needs --p or --n");
    FieldContext ctx(p, opts.d);
    os << "p = " << ctx.p << ", alpha = " << ctx.alpha << ", d = " << ctx.d
       << ", mode = " << to_string(opts.mode) << "\n";
    ConstructionMatrix a = build_matrix(ctx);
    os << "matrix A (corner sign " << (a.sign_choice > 0 ? "+" : "-") << "alpha, det " << a.det
       << "):\n";
    for (int i = 0; i < ctx.d; ++i) {
        os << " ";
        for (int j = 0; j < ctx.d; ++j) os << " " << a.at(i, j);
        os << "\n";
    }
    CurveSystem sys = build_full_system(ctx);
    InspectResult res;
    if (opts.mode == Mode::strict) {
        try {
            sys = apply_nice_tweak(sys);
        } catch (const DegenerateTweak& e) {
            os << "degenerate niceness tweak at p = " << e.p << ":\n  mu =";
            for (auto m : e.params.mu) os << " " << m;
            os << ", nu = " << e.params.nu << "\n" << e.report
               << "retry with the next admissible prime\n";
            res.text = os.str();
            res.ok = false;
            return res;
        }
    }
    for (std::size_t i = 0; i < sys.f.size(); ++i)
        os << "f_" << (i + 1) << " = " << sys.f[i].to_string() << "\n";
    os << "g   = " << sys.g.to_string() << "   (g_index " << sys.g_index << ")\n";
    os << "h   = " << sys.h.to_string() << "\n";
    if (sys.tweak) {
        os << "mu  =";
        for (auto m : sys.tweak->mu) os << " " << m;
        os << "\nnu  = " << sys.tweak->nu << "\n";
    }
    SystemValidation v = validate_system(sys);
    os << v.to_string(opts.mode);
    res.ok = v.pass(opts.mode);
    res.text = os.str();
    return res;
}

}  // namespace gridcurve

#endif
