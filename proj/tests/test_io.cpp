#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pulsq/dataset.hpp"
#include "pulsq/run_config.hpp"

using namespace pulsq;

TEST_CASE("doubles serialize shortest-round-trip and parse back exactly") {
    for (double v : {0.0, 1.0, -1.0, 0.1, 1e-8, 1e300, -2.5e-12, 3.141592653589793,
                     0.14630657584035073, 1e8}) {
        const std::string s = format_double(v);
        CHECK(parse_double(s) == v);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(std::isnan(parse_double("nan")));
    CHECK_THROWS_AS(parse_double("12abc"), ConfigError);
    CHECK_THROWS_AS(parse_double(""), ConfigError);
}

TEST_CASE("csv layout: meta lines then columns then rows") {
    Dataset d;
    d.set_meta("tool", "demo");
    d.set_meta("epsilon", 1e-8);
    d.add_column("t", {0.0, 0.5, 1.0});
    d.add_column("v", {1.0, 2.0, 3.0});
    const std::string csv = d.to_csv();

    CHECK(csv.find("# tool=demo\n") != std::string::npos);
    CHECK(csv.find("# epsilon=1e-08\n") != std::string::npos);
    CHECK(csv.find("# columns=t,v\n") != std::string::npos);
    CHECK(csv.find("0,1\n") != std::string::npos);
    CHECK(csv.find("0.5,2\n") != std::string::npos);
    // meta precedes the columns line, which precedes the data
    CHECK(csv.find("# tool=") < csv.find("# columns="));
    CHECK(csv.find("# columns=") < csv.find("0,1"));
}

TEST_CASE("csv round-trips numbers, text and NaN gaps") {
    Dataset d;
    d.set_meta("command", "minima");
    d.set_meta("rel_tol", 1e-9);
    d.add_column("x", {1.5, std::numeric_limits<double>::quiet_NaN(), -3.0});
    d.add_text_column("status", {"ok", "non_convergent", "ok"});

    Dataset back = Dataset::from_csv(d.to_csv());
    REQUIRE(back.columns().size() == 2);
    CHECK(*back.find_meta("command") == "minima");
    CHECK(parse_double(*back.find_meta("rel_tol")) == 1e-9);

    const auto* x = back.find_column("x");
    REQUIRE(x != nullptr);
    CHECK(!x->is_text);
    CHECK(x->numbers[0] == 1.5);
    CHECK(std::isnan(x->numbers[1]));
    CHECK(x->numbers[2] == -3.0);

    const auto* status = back.find_column("status");
    REQUIRE(status != nullptr);
    CHECK(status->is_text);
    CHECK(status->texts[1] == "non_convergent");

    // serialization is a fixed point after one round trip
    CHECK(back.to_csv() == d.to_csv());
}

TEST_CASE("json round-trips with null for NaN") {
    Dataset d;
    d.set_meta("tool", "demo");
    d.set_meta("F0", 2.0);
    d.add_column("t", {0.0, 1.0});
    d.add_column("n", {1e8, std::numeric_limits<double>::quiet_NaN()});
    d.add_text_column("mode", {"literal", "vacuum"});

    const std::string js = d.to_json();
    CHECK(js.find("\"meta\"") != std::string::npos);
    CHECK(js.find("\"columns\"") != std::string::npos);
    CHECK(js.find("null") != std::string::npos);

    Dataset back = Dataset::from_json(js);
    CHECK(*back.find_meta("F0") == "2");
    const auto* n = back.find_column("n");
    REQUIRE(n != nullptr);
    CHECK(n->numbers[0] == 1e8);
    CHECK(std::isnan(n->numbers[1]));
    CHECK(back.find_column("mode")->texts[0] == "literal");
    CHECK(back.to_json() == js);
}

TEST_CASE("serialize dispatches on format name") {
    Dataset d;
    d.add_column("a", {1.0});
    CHECK(d.serialize("csv") == d.to_csv());
    CHECK(d.serialize("json") == d.to_json());
    CHECK_THROWS_AS(d.serialize("xml"), ConfigError);
}

TEST_CASE("dataset shape violations are rejected") {
    Dataset d;
    d.add_column("a", {1.0, 2.0});
    CHECK_THROWS_AS(d.add_column("b", {1.0}), ConfigError);          // ragged
    CHECK_THROWS_AS(d.add_column("a", {3.0, 4.0}), ConfigError);     // duplicate name
    CHECK_THROWS_AS(d.add_text_column("c", {"x,y", "z"}), ConfigError);  // comma in cell
    CHECK_THROWS_AS(d.set_meta("bad=key", "v"), ConfigError);
    CHECK_THROWS_AS(d.set_meta("k", "line\nbreak"), ConfigError);
}

TEST_CASE("meta keys keep insertion order and overwrite in place") {
    Dataset d;
    d.set_meta("first", "1");
    d.set_meta("second", "2");
    d.set_meta("first", "updated");
    REQUIRE(d.meta().size() == 2);
    CHECK(d.meta()[0].first == "first");
    CHECK(d.meta()[0].second == "updated");
    CHECK(d.meta()[1].first == "second");
}

TEST_CASE("number lists round-trip through their string form") {
    const std::vector<double> g = {0.1, 1.0, 10.0, 100.0};
    CHECK(parse_number_list(join_number_list(g)) == g);
    CHECK(parse_number_list("0.5, 1.5 ,2.5") == std::vector<double>{0.5, 1.5, 2.5});
    CHECK_THROWS_AS(parse_number_list(""), ConfigError);
    CHECK_THROWS_AS(parse_number_list("1,,2"), ConfigError);
    CHECK_THROWS_AS(parse_number_list("1,abc"), ConfigError);
}

TEST_CASE("source mode parsing") {
    CHECK(parse_source_mode("literal") == SourceMode::Literal);
    CHECK(parse_source_mode("vacuum") == SourceMode::VacuumSource);
    CHECK_THROWS_AS(parse_source_mode("classical"), ConfigError);
}

TEST_CASE("resolve applies dimensionless defaults per command") {
    RunConfig c;
    ResolvedRun run = resolve(c, CommandDefaults{2.0, 1.5, true});
    CHECK(run.model.drive_mean == 2.0);
    CHECK(run.model.drive_mod == 1.5);
    CHECK(run.model.mod_freq == 2.0);
    CHECK(run.model.epsilon == 1e-8);
    CHECK(run.regime.kind == RegimeKind::Above);
    // default window: two periods of the modulated drive
    CHECK(run.t_start == 0.0);
    CHECK(run.t_end == doctest::Approx(2.0 * run.model.period()).epsilon(1e-15));
    CHECK(run.samples == 256);

    RunConfig flat;
    flat.F1 = 0.0;
    ResolvedRun frun = resolve(flat, CommandDefaults{2.0, 1.5, true});
    CHECK(!frun.model.is_modulated());
    CHECK(frun.t_end == 5.0);  // unmodulated fallback window
}

TEST_CASE("resolve honors explicit dimensionless parameters") {
    RunConfig c;
    c.F0 = 0.5;
    c.F1 = 0.375;
    c.Delta = 4.0;
    c.phi = 0.7;
    c.epsilon = 1e-6;
    c.t_end = 9.0;
    c.samples = 31;
    ResolvedRun run = resolve(c, CommandDefaults{2.0, 1.5, true});
    CHECK(run.model.drive_mean == 0.5);
    CHECK(run.model.drive_mod == 0.375);
    CHECK(run.model.mod_freq == 4.0);
    CHECK(run.model.mod_phase == 0.7);
    CHECK(run.model.epsilon == 1e-6);
    CHECK(run.regime.kind == RegimeKind::Below);
    CHECK(run.t_end == 9.0);
    CHECK(run.samples == 31);
    CHECK(!run.physical.has_value());
}

TEST_CASE("resolve maps physical parameters through the threshold") {
    RunConfig c;
    c.gamma = 2.0;
    c.gamma_l = 50.0;
    c.k = 0.1;  // f_th = 1000, epsilon = 1e-4
    c.f0 = 2000.0;
    c.f1 = 1500.0;
    c.delta = 4.0;
    ResolvedRun run = resolve(c, CommandDefaults{2.0, 1.5, true});
    REQUIRE(run.physical.has_value());
    CHECK(run.model.drive_mean == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(run.model.drive_mod == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(run.model.mod_freq == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(run.model.epsilon == doctest::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("resolve rejects mixed and incomplete parameter styles") {
    RunConfig mixed;
    mixed.gamma = 1.0;
    mixed.F0 = 2.0;
    CHECK_THROWS_AS(resolve(mixed, CommandDefaults{}), ConfigError);

    RunConfig incomplete;
    incomplete.gamma = 1.0;
    incomplete.gamma_l = 1.0;  // k missing
    incomplete.f0 = 0.5;
    CHECK_THROWS_AS(resolve(incomplete, CommandDefaults{}), ConfigError);

    RunConfig modulated_without_freq;
    modulated_without_freq.gamma = 1.0;
    modulated_without_freq.gamma_l = 1.0;
    modulated_without_freq.k = 0.01;
    modulated_without_freq.f0 = 50.0;
    modulated_without_freq.f1 = 25.0;  // delta missing
    CHECK_THROWS_AS(resolve(modulated_without_freq, CommandDefaults{}), ConfigError);
}

TEST_CASE("resolve validates window, tolerance and format") {
    RunConfig bad_window;
    bad_window.t_end = -1.0;
    CHECK_THROWS_AS(resolve(bad_window, CommandDefaults{2.0, 1.5, true}), ConfigError);

    RunConfig bad_samples;
    bad_samples.samples = 1;
    CHECK_THROWS_AS(resolve(bad_samples, CommandDefaults{2.0, 1.5, true}), ConfigError);

    RunConfig bad_tol;
    bad_tol.rel_tol = 1e-2;
    CHECK_THROWS_AS(resolve(bad_tol, CommandDefaults{}), ConfigError);

    RunConfig bad_fmt;
    bad_fmt.format = "yaml";
    CHECK_THROWS_AS(resolve(bad_fmt, CommandDefaults{}), ConfigError);
}

TEST_CASE("epsilon validity warning surfaces through resolve") {
    RunConfig c;
    c.epsilon = 0.5;
    ResolvedRun run = resolve(c, CommandDefaults{2.0, 0.0, false});
    REQUIRE(run.warnings.size() == 1);
    CHECK(run.warnings[0].find("epsilon") != std::string::npos);
}

TEST_CASE("emitted meta describes the run and parses back into a config") {
    RunConfig c;
    c.F0 = 1.0;
    c.F1 = 1.5;
    c.Delta = 2.0;
    c.epsilon = 1e-8;
    c.rel_tol = 1e-10;
    c.m0 = 0.25;
    ResolvedRun run = resolve(c, CommandDefaults{2.0, 1.5, true});

    Dataset d;
    emit_run_meta(d, run, "variance");
    CHECK(*d.find_meta("tool") == "pulsed-squeeze");
    CHECK(*d.find_meta("command") == "variance");
    CHECK(parse_double(*d.find_meta("epsilon")) == 1e-8);
    CHECK(parse_double(*d.find_meta("F0")) == 1.0);
    CHECK(parse_double(*d.find_meta("F1")) == 1.5);
    CHECK(parse_double(*d.find_meta("Delta")) == 2.0);
    CHECK(*d.find_meta("regime") == "at-threshold");
    CHECK(parse_double(*d.find_meta("m0")) == 0.25);

    auto [command, back] = config_from_meta(d);
    CHECK(command == "variance");
    REQUIRE(back.F0.has_value());
    CHECK(*back.F0 == 1.0);
    CHECK(*back.F1 == 1.5);
    CHECK(*back.Delta == 2.0);
    CHECK(*back.epsilon == 1e-8);
    CHECK(back.m0 == 0.25);
    CHECK(back.rel_tol == 1e-10);

    // resolving the recovered config reproduces the same model
    ResolvedRun again = resolve(back, CommandDefaults{2.0, 1.5, true});
    CHECK(again.model.drive_mean == run.model.drive_mean);
    CHECK(again.model.drive_mod == run.model.drive_mod);
    CHECK(again.model.mod_freq == run.model.mod_freq);
    CHECK(again.model.epsilon == run.model.epsilon);
}

TEST_CASE("physical meta keys appear only for physical-style runs") {
    RunConfig c;
    c.gamma = 2.0;
    c.gamma_l = 50.0;
    c.k = 0.1;
    c.f0 = 2000.0;
    ResolvedRun run = resolve(c, CommandDefaults{2.0, 1.5, true});
    Dataset d;
    emit_run_meta(d, run, "photon");
    CHECK(d.find_meta("gamma") != nullptr);
    CHECK(d.find_meta("f_th") != nullptr);
    CHECK(parse_double(*d.find_meta("f_th")) == doctest::Approx(1000.0).epsilon(1e-12));

    RunConfig dimless;
    ResolvedRun run2 = resolve(dimless, CommandDefaults{2.0, 1.5, true});
    Dataset d2;
    emit_run_meta(d2, run2, "photon");
    CHECK(d2.find_meta("gamma") == nullptr);
}
