#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gridcurve/pipeline.hpp"
#include "gridcurve/version.hpp"

namespace {

int default_threads() {
    if (const char* env = std::getenv("GRIDCURVE_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return 1;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("GRIDCURVE_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += " ";
        s += argv[i];
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace gridcurve;

    CLI::App app{"sphere- and hyperplane-avoiding grid point sets over prime fields"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // ---- construct ----
    ConstructOptions copts;
    copts.threads = default_threads();
    copts.seed = default_seed();
    std::string c_mode = "full";
    std::string c_translation = "auto";
    std::string c_out;
    auto* construct = app.add_subcommand("construct", "build a grid point set and its manifest");
    construct->add_option("--d", copts.d, "ambient dimension (2..11)")->required();
    construct->add_option("--n", copts.n, "grid side length")->required();
    construct->add_option("--mode", c_mode, "full | strict")
        ->check(CLI::IsMember({"full", "strict"}));
    construct->add_option("--out", c_out, "output base path (writes BASE.csv and BASE.json)");
    construct->add_option("--seed", copts.seed,
                          "seed for sampled translation search (or env GRIDCURVE_SEED)");
    construct->add_option("--translation", c_translation, "auto | exhaustive | sample")
        ->check(CLI::IsMember({"auto", "exhaustive", "sample"}));
    construct->add_option("--budget", copts.budget, "translation candidates for exhaustive search");
    construct->add_option("--samples", copts.samples, "sample count for sampled search");
    construct->add_flag("--tenfold-threshold", copts.tenfold_threshold,
                        "require p > 10*(d+1)! instead of p > (d+1)!");
    construct->add_flag("--skip-verify", copts.skip_verify, "skip the mod-p self-check");
    construct->add_option("--threads", copts.threads, "worker threads");

    // ---- verify ----
    VerifyCommandOptions vopts;
    vopts.threads = default_threads();
    std::string v_ring = "int";
    std::string v_mode = "oracle";
    int v_d = 0;
    std::uint64_t v_p = 0;
    auto* verify = app.add_subcommand("verify", "check incidence bounds of a point file");
    verify->add_option("--in", vopts.input, "points file (.csv or .json manifest)")->required();
    verify->add_option("--d", v_d, "expected dimension (cross-checked against the input)");
    verify->add_option("--ring", v_ring, "int | modp")->check(CLI::IsMember({"int", "modp"}));
    verify->add_option("--mode", v_mode, "oracle | fast")->check(CLI::IsMember({"oracle", "fast"}));
    verify->add_flag("--plane-only", vopts.plane_only,
                     "check the d-point plane bound instead of spheres");
    verify->add_option("--p", v_p, "modulus for --ring modp when the input is CSV");
    verify->add_option("--threads", vopts.threads, "worker threads");
    verify->add_option("--ops-budget", vopts.ops_budget, "abort above this much estimated work");
    verify->add_option("--report", vopts.report_path, "write the JSON report here");

    // ---- inspect ----
    InspectOptions iopts;
    std::string i_mode = "full";
    std::uint64_t i_p = 0, i_n = 0;
    auto* inspect = app.add_subcommand("inspect", "print the curve system and validation report");
    inspect->add_option("--d", iopts.d, "ambient dimension (2..11)")->required();
    inspect->add_option("--p", i_p, "use this admissible prime");
    inspect->add_option("--n", i_n, "derive the prime from this grid size");
    inspect->add_option("--mode", i_mode, "full | strict")->check(CLI::IsMember({"full", "strict"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (construct->parsed()) {
            copts.mode = c_mode == "strict" ? Mode::strict : Mode::full;
            if (c_translation == "exhaustive") copts.translation = TranslationStrategy::exhaustive;
            if (c_translation == "sample") copts.translation = TranslationStrategy::sample;
            copts.command_echo = join_args(argc, argv);
            ConstructOutcome out = run_construct(copts);
            std::cout << "p = " << out.modular.p;
            if (!out.rejected_primes.empty()) {
                std::cout << " (rejected:";
                for (auto q : out.rejected_primes) std::cout << " " << q;
                std::cout << ")";
            }
            std::cout << "\nmodular points: " << out.modular.points.size() << " (floor "
                      << out.modular_floor() << ", self-intersections "
                      << out.modular.self_intersections() << ")\n";
            std::cout << "grid points:    " << out.translation.achieved;
            if (out.translation.mean_floor)
                std::cout << " (floor " << *out.translation.mean_floor << ", exhaustive over "
                          << out.translation.candidates << " translations)";
            else
                std::cout << " (best of " << out.translation.candidates << " sampled translations)";
            std::cout << "\n";
            if (out.verify_spheres)
                std::cout << "self-check:     max on sphere-or-plane " << out.verify_spheres->max_count
                          << " <= " << out.verify_spheres->bound()
                          << (out.verify_planes
                                  ? ", max on plane " + std::to_string(out.verify_planes->max_count) +
                                        " <= " + std::to_string(out.verify_planes->bound())
                                  : std::string())
                          << "\n";
            else if (out.verify_trivial)
                std::cout << "self-check:     trivial (fewer than d+2 points)\n";
            else
                std::cout << "self-check:     skipped\n";
            std::cout << "elapsed:        " << out.construct_seconds << " s construct, "
                      << out.verify_seconds << " s verify\n";
            if (!c_out.empty()) {
                write_outputs(out, c_out);
                std::cout << "wrote " << c_out << ".csv and " << c_out << ".json\n";
            }
            return 0;
        }
        if (verify->parsed()) {
            vopts.ring = v_ring == "modp" ? RingKind::modp : RingKind::integers;
            vopts.mode = v_mode == "fast" ? VerifyMode::fast : VerifyMode::oracle;
            if (v_d > 0) vopts.d = v_d;
            if (v_p > 0) vopts.p = v_p;
            VerifyCommandResult res = run_verify(vopts);
            std::cout << res.report.to_text();
            std::cout << (res.ok ? "VERIFIED" : "VIOLATION") << "\n";
            return res.ok ? 0 : 1;
        }
        if (inspect->parsed()) {
            iopts.mode = i_mode == "strict" ? Mode::strict : Mode::full;
            if (i_p > 0) iopts.p = i_p;
            if (i_n > 0) iopts.n = i_n;
            InspectResult res = run_inspect(iopts);
            std::cout << res.text;
            std::cout << (res.ok ? "all checks pass" : "validation FAILED") << "\n";
            return res.ok ? 0 : 1;
        }
    } catch (const gridcurve::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
