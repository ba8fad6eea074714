#include <doctest.h>

#include <fstream>

#include "spectra/config.hpp"

using namespace spectra;

namespace {
using cplx = std::complex<double>;
ExperimentConfig make(std::map<std::string, std::string> kv) { return ExperimentConfig::from_map(kv); }
}  // namespace

TEST_SUITE("config") {
TEST_CASE("defaults are filled in and typed getters work") {
    ExperimentConfig c = make({{"kind", "solve"}, {"seed", "17"}, {"solve.alphas", "0.5, 1.5"}});
    CHECK(c.kind() == "solve");
    CHECK(c.seed() == 17);
    CHECK(c.real_list("solve.alphas") == std::vector<double>{0.5, 1.5});
    CHECK(c.real("solve.x_step") == 0.5);
    CHECK(c.boolean("solve.grid"));
    CHECK(c.text("format") == "both");
    CHECK(c.integer("threads") == 0);
    CHECK_FALSE(c.has("assert.min_converged_fraction"));
    CHECK(c.complex_list("solve.points").empty());
}

TEST_CASE("seed is mandatory and must be an unsigned integer") {
    CHECK_THROWS_AS(make({{"kind", "solve"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "solve"}, {"seed", "-1"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "solve"}, {"seed", "1.5"}}), ConfigError);
    CHECK(make({{"kind", "solve"}, {"seed", "0x10"}}).seed() == 16);
    CHECK(make({{"kind", "solve"}, {"seed", "18446744073709551615"}}).seed() == 18446744073709551615ULL);
}

TEST_CASE("unknown keys and kinds are rejected") {
    CHECK_THROWS_AS(make({{"kind", "solve"}, {"seed", "1"}, {"solve.alpha", "1"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "solve"}, {"seed", "1"}, {"density.alphas", "1"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "plot"}, {"seed", "1"}}), ConfigError);
    CHECK_THROWS_AS(make({{"seed", "1"}}), ConfigError);
    try {
        make({{"kind", "cb-check"}, {"seed", "1"}, {"cb.xs", "1"}});
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("cb.xs") != std::string::npos);
    }
}

TEST_CASE("values are type and range checked") {
    CHECK_THROWS_AS(make({{"kind", "solve"}, {"seed", "1"}, {"solve.alphas", "2.5"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "solve"}, {"seed", "1"}, {"solve.grid", "yes"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "solve"}, {"seed", "1"}, {"solve.x_step", "abc"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "solve"}, {"seed", "1"}, {"solve.points", "1+i+"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "compare"}, {"seed", "1"}, {"compare.N", "20.5"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "stable-check"}, {"seed", "1"}, {"stable.reps", "10"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "stable-check"}, {"seed", "1"}, {"stable.alpha", "1.2"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "solve"}, {"seed", "1"}, {"format", "xml"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "solve"}, {"seed", "1"}, {"conventions.phase", "other"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "sample"}, {"seed", "1"}, {"sample.truncation", "hard"}}), ConfigError);
    CHECK_THROWS_AS(make({{"kind", "moments"}, {"seed", "1"}, {"moments.k_max", "7"}}), ConfigError);
}

TEST_CASE("complex numbers") {
    CHECK(parse_complex("1+2i") == cplx(1, 2));
    CHECK(parse_complex(" -0.5 - 3e-1i ") == cplx(-0.5, -0.3));
    CHECK(parse_complex("i") == cplx(0, 1));
    CHECK(parse_complex("-i") == cplx(0, -1));
    CHECK(parse_complex("2.5") == cplx(2.5, 0));
    CHECK(parse_complex("4i") == cplx(0, 4));
    CHECK(parse_complex("1-i") == cplx(1, -1));
    CHECK_THROWS_AS(parse_complex("1+2j"), ConfigError);
    CHECK_THROWS_AS(parse_complex(""), ConfigError);
}

TEST_CASE("INI files with sections and comments") {
    ExperimentConfig c = ExperimentConfig::load(SPECTRA_TEST_DATA "/sections.cfg");
    CHECK(c.kind() == "sample");
    CHECK(c.seed() == 42);
    CHECK(c.real("law.alpha") == 1.5);
    CHECK(c.real("law.theta") == 1.0);
    CHECK(c.integer("sample.N") == 20);
    CHECK(c.text("sample.truncation") == "kappa");
    CHECK_THROWS_AS(ExperimentConfig::load(SPECTRA_TEST_DATA "/does_not_exist.cfg"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::load(SPECTRA_TEST_DATA "/unknown_key.cfg"), ConfigError);
}

TEST_CASE("overrides are revalidated") {
    ExperimentConfig c = make({{"kind", "cb-check"}, {"seed", "1"}});
    c.set("seed", "99");
    c.validate();
    CHECK(c.seed() == 99);
    c.set("cb.alphas", "3");
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("every kind has a schema") {
    for (const auto& k : kExperimentKinds) {
        CHECK_FALSE(schema_for(k).empty());
        CHECK_NOTHROW(make({{"kind", k}, {"seed", "3"}}));
    }
}
}
