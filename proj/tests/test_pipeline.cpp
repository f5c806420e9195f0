#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "gridcurve/pipeline.hpp"

using namespace gridcurve;

TEST_CASE("construct d=2 n=10 full uses p = 13") {
    ConstructOptions opts;
    opts.d = 2;
    opts.n = 10;
    ConstructOutcome out = run_construct(opts);
    REQUIRE(out.modular.p == 13);
    REQUIRE(out.modular.points.size() == 10);
    REQUIRE(out.translation.achieved >= *out.translation.mean_floor);
    REQUIRE(out.verify_spheres.has_value());
    REQUIRE(out.verify_spheres->within_bound());
}

TEST_CASE("construct d=2 n=100 full meets the expected bounds") {
    ConstructOptions opts;
    opts.d = 2;
    opts.n = 100;
    ConstructOutcome out = run_construct(opts);
    REQUIRE(out.modular.p == 101);
    REQUIRE(out.modular.points.size() >= 97);
    REQUIRE(out.translation.achieved >= 96);
    REQUIRE(out.manifest["field"]["p"] == 101);
    REQUIRE(out.manifest["points"].size() == out.translation.achieved);
}

TEST_CASE("strict d=2 exhausts its retries across degenerate primes") {
    ConstructOptions opts;
    opts.d = 2;
    opts.n = 10;
    opts.mode = Mode::strict;
    REQUIRE_THROWS_AS(run_construct(opts), RetriesExhausted);
}

TEST_CASE("strict d=3 n=25 succeeds on the first admissible prime") {
    ConstructOptions opts;
    opts.d = 3;
    opts.n = 25;
    opts.mode = Mode::strict;
    ConstructOutcome out = run_construct(opts);
    REQUIRE(out.modular.p == 29);
    REQUIRE(out.rejected_primes.empty());
    REQUIRE(out.system.mode == Mode::strict);
    REQUIRE(out.modular.points.size() == 7);
    // the strict self-check covers both families
    if (out.verify_spheres) {
        REQUIRE(out.verify_spheres->within_bound());
        REQUIRE(out.verify_planes.has_value());
        REQUIRE(out.verify_planes->within_bound());
    }
}

TEST_CASE("identical options produce byte-identical outputs") {
    ConstructOptions opts;
    opts.d = 2;
    opts.n = 40;
    opts.seed = 9;
    opts.command_echo = "construct --d 2 --n 40 --seed 9";
    ConstructOutcome a = run_construct(opts);
    ConstructOutcome b = run_construct(opts);
    REQUIRE(a.csv == b.csv);
    REQUIRE(a.manifest.dump(2) == b.manifest.dump(2));
}

TEST_CASE("manifest records the provenance needed to reproduce a run") {
    ConstructOptions opts;
    opts.d = 3;
    opts.n = 25;
    opts.mode = Mode::strict;
    opts.seed = 4;
    opts.command_echo = "construct --d 3 --n 25 --mode strict --seed 4";
    ConstructOutcome out = run_construct(opts);
    const auto& m = out.manifest;
    REQUIRE(m["command"] == opts.command_echo);
    REQUIRE(m["params"]["seed"] == 4);
    REQUIRE(m["params"]["mode"] == "strict");
    REQUIRE(m["field"]["p"] == 29);
    REQUIRE(m["field"]["alpha"] == 12);
    REQUIRE(m["curve"]["mu"].size() == 3);
    REQUIRE(m["translation"]["v"].size() == 3);
    REQUIRE(m["verification"].contains("max_on_plane"));
}

TEST_CASE("construct then verify through files") {
    ConstructOptions opts;
    opts.d = 2;
    opts.n = 30;
    ConstructOutcome out = run_construct(opts);
    write_outputs(out, "pipeline_test_out");

    VerifyCommandOptions vc;
    vc.input = "pipeline_test_out.csv";
    vc.ring = RingKind::integers;
    vc.mode = VerifyMode::oracle;
    VerifyCommandResult res = run_verify(vc);
    REQUIRE(res.ok);
    REQUIRE(res.report.max_count <= 3);

    // the emitted files parse back to exactly the grid points
    ParsedPointFile csv_in = parse_point_file("pipeline_test_out.csv");
    ParsedPointFile json_in = parse_point_file("pipeline_test_out.json");
    REQUIRE(csv_in.points == out.translation.grid.points);
    REQUIRE(json_in.points == out.translation.grid.points);
    REQUIRE(json_in.p == out.modular.p);

    // the JSON manifest carries p for mod-p verification
    VerifyCommandOptions vj;
    vj.input = "pipeline_test_out.json";
    vj.ring = RingKind::modp;
    vj.mode = VerifyMode::fast;
    VerifyCommandResult rj = run_verify(vj);
    REQUIRE(rj.ok);

    // integer maxima never exceed mod-p maxima of the modular preimage:
    // every integer sphere/plane reduces to one over F_p
    PointList preimage;
    for (const auto& pt : out.modular.points) preimage.emplace_back(pt.begin(), pt.end());
    VerifyOptions vo;
    vo.mode = VerifyMode::fast;
    vo.ring = RingKind::modp;
    vo.p = out.modular.p;
    VerificationReport pre = max_incidence(preimage, SurfaceFamily::sphere_or_plane, vo);
    REQUIRE(res.report.max_count <= pre.max_count);
    REQUIRE(rj.report.max_count <= pre.max_count);

    std::remove("pipeline_test_out.csv");
    std::remove("pipeline_test_out.json");
}

TEST_CASE("verify flags a planted violation with a witness") {
    write_file("violation_test.csv", to_csv({{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {7, 3}, {2, 9}}));
    VerifyCommandOptions vc;
    vc.input = "violation_test.csv";
    VerifyCommandResult res = run_verify(vc);
    REQUIRE_FALSE(res.ok);
    REQUIRE(res.report.max_count == 4);
    REQUIRE(res.report.witness == std::vector<std::size_t>{0, 1, 2, 3});
    std::remove("violation_test.csv");
}

TEST_CASE("verify rejects dimension mismatches and missing moduli") {
    write_file("dim_test.csv", to_csv({{1, 2}, {3, 4}, {5, 6}, {7, 9}}));
    VerifyCommandOptions vc;
    vc.input = "dim_test.csv";
    vc.d = 3;
    REQUIRE_THROWS_AS(run_verify(vc), PreconditionViolated);
    VerifyCommandOptions vp;
    vp.input = "dim_test.csv";
    vp.ring = RingKind::modp;
    REQUIRE_THROWS_AS(run_verify(vp), PreconditionViolated);
    std::remove("dim_test.csv");
}

TEST_CASE("inspect prints the worked example and validates") {
    InspectOptions opts;
    opts.d = 2;
    opts.p = 13;
    InspectResult res = run_inspect(opts);
    REQUIRE(res.ok);
    REQUIRE(res.text.find("1 + 3*t + 1*t^2 (mod 13)") != std::string::npos);
    REQUIRE(res.text.find("5 + 8*t + 1*t^2 (mod 13)") != std::string::npos);
    REQUIRE(res.text.find("8 + 7*t + 9*t^2 + 2*t^3 (mod 13)") != std::string::npos);
}

TEST_CASE("inspect reports the d=2 strict collapse") {
    InspectOptions opts;
    opts.d = 2;
    opts.p = 13;
    opts.mode = Mode::strict;
    InspectResult res = run_inspect(opts);
    REQUIRE_FALSE(res.ok);
    REQUIRE(res.text.find("degenerate niceness tweak at p = 13") != std::string::npos);
    REQUIRE(res.text.find("nu = 7") != std::string::npos);
}

TEST_CASE("construct d=4 falls back to sampled translations") {
    ConstructOptions opts;
    opts.d = 4;
    opts.n = 30;
    opts.seed = 5;
    opts.samples = 20000;
    ConstructOutcome out = run_construct(opts);
    REQUIRE(out.modular.p == 137);  // first prime == 1 (mod 4) above 5! = 120
    REQUIRE_FALSE(out.translation.exhaustive);
    REQUIRE_FALSE(out.translation.mean_floor.has_value());
    REQUIRE(out.manifest["translation"]["strategy"] == "sample");
    ConstructOutcome again = run_construct(opts);
    REQUIRE(again.translation.translation == out.translation.translation);
    REQUIRE(again.csv == out.csv);
}

TEST_CASE("strict d=3 grid output meets the plane bound over the integers") {
    ConstructOptions opts;
    opts.d = 3;
    opts.n = 25;
    opts.mode = Mode::strict;
    ConstructOutcome out = run_construct(opts);
    if (out.translation.grid.points.size() >= 4) {
        VerifyOptions vo;
        vo.mode = VerifyMode::oracle;
        vo.ring = RingKind::integers;
        VerificationReport planes =
            max_incidence(out.translation.grid.points, SurfaceFamily::plane_only, vo);
        REQUIRE(planes.max_count <= 3);
        REQUIRE(planes.witness_verified);
    }
    if (out.translation.grid.points.size() >= 5) {
        VerifyOptions vo;
        vo.mode = VerifyMode::oracle;
        vo.ring = RingKind::integers;
        VerificationReport spheres =
            max_incidence(out.translation.grid.points, SurfaceFamily::sphere_or_plane, vo);
        REQUIRE(spheres.max_count <= 4);
    }
}

TEST_CASE("construct validates its arguments") {
    ConstructOptions bad;
    bad.d = 1;
    REQUIRE_THROWS_AS(run_construct(bad), DimensionTooLarge);
    bad.d = 12;
    REQUIRE_THROWS_AS(run_construct(bad), DimensionTooLarge);
    bad.d = 2;
    bad.n = 1;
    REQUIRE_THROWS_AS(run_construct(bad), PreconditionViolated);
}
