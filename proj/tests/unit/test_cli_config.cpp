#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cli/cli.hpp"
#include "cli/output.hpp"
#include "nuhlab/errors.hpp"

using namespace nuhlab;
using namespace nuhlab::cli;

namespace {

Config parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test");
}

const std::string kConfigs = std::string(NUHLAB_SOURCE_DIR) + "/configs/";

}  // namespace

TEST_CASE("config syntax") {
    const auto cfg = parse(
        "# header\n"
        "kind = \"sheared\"   # trailing comment\n"
        "E = [[2, -1],\n"
        "     [1, 2]]\n"
        "\n"
        "name = \"a # not a comment\"\n"
        "t = 3\n");
    CHECK(cfg.string("kind") == "sheared");
    CHECK(cfg.int_matrix("E") == IntMatrix2{2, -1, 1, 2});
    CHECK(cfg.string("name") == "a # not a comment");
    CHECK(cfg.number("t") == 3.0);
    CHECK(cfg.integer("t") == 3);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse("a = [1, 2,]\n"), ConfigError);
    CHECK_THROWS_AS(parse("a = [1, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse("just words\n"), ConfigError);
    CHECK_THROWS_AS(parse("bad key = 1\n"), ConfigError);

    const auto cfg = parse("x = 1.5\ns = \"word\"\nv = [1, 2, 3]\n");
    CHECK_THROWS_AS(cfg.integer("x"), ConfigError);
    CHECK_THROWS_AS(cfg.number("s"), ConfigError);
    CHECK_THROWS_AS(cfg.vec2("v"), ConfigError);
    CHECK_THROWS_AS(cfg.number("missing"), ConfigError);
    CHECK_THROWS_AS(cfg.require_known({"x", "s"}), ConfigError);
    CHECK_NOTHROW(cfg.require_known({"x", "s", "v"}));
    try {
        cfg.number("missing");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("missing") != std::string::npos);
    }
}

TEST_CASE("command-line assignments") {
    Config cfg;
    cfg.set_from_text("N=5");
    cfg.set_from_text("x = [0.25, 0.5]");
    cfg.set_from_text("ladder=renewal");
    CHECK(cfg.integer("N") == 5);
    CHECK(cfg.vec2("x").y == 0.5);
    CHECK(cfg.string("ladder") == "renewal");
    CHECK_THROWS_AS(cfg.set_from_text("novalue"), ConfigError);
    cfg.set_default("N", 9);
    CHECK(cfg.integer("N") == 5);
}

TEST_CASE("map builders") {
    const auto lin = make_torus_map(parse("kind = \"linear\"\nE = [[6, 1], [1, 1]]\n"));
    CHECK(lin.degree() == 5);
    CHECK_THROWS_AS(make_torus_map(parse("kind = \"linear\"\nE = [[6, 1], [1, 1]]\nfoo = 1\n")), ConfigError);
    CHECK_THROWS_AS(make_torus_map(parse("kind = \"linear\"\nE = [[1, 1], [1, 1]]\n")), ConfigError);
    CHECK_THROWS_AS(make_torus_map(parse("kind = \"moebius\"\n")), ConfigError);
    CHECK_THROWS_AS(make_torus_map(parse("kind = \"product\"\ng1 = [2, 3.0]\ng2 = [2, 0]\n")), ConfigError);
    CHECK_THROWS_AS(make_torus_map(parse("kind = \"viana\"\n")), ConfigError);
    const auto v = make_viana_map(parse("kind = \"viana\"\nd = 4\n"));
    CHECK(v.d() == 4);
    CHECK(v.alpha() == 1e-2);
}

TEST_CASE("shipped configs load") {
    const auto acs = load_config(kConfigs + "acs.toml");
    const auto f = make_torus_map(acs);
    CHECK(f.degree() == 5);
    CHECK(f.family_name() == "sheared");
    CHECK(make_torus_map(load_config(kConfigs + "linear.toml")).linear_part() == IntMatrix2{6, 1, 1, 1});
    CHECK(make_torus_map(load_config(kConfigs + "product.toml")).degree() == 3);
    CHECK(make_viana_map(load_config(kConfigs + "viana.toml")).d() == 16);

    const auto two = make_table(load_config(kConfigs + "two-disc.toml"));
    CHECK(two.size() == 2);
    CHECK_FALSE(two.finite_horizon_validated());

    const auto three = make_table(load_config(kConfigs + "three-disc.toml"));
    CHECK(three.size() == 3);
    CHECK(three.finite_horizon_validated());
    CHECK(three.tau_min() == doctest::Approx(0.0204032).epsilon(1e-5));

    CHECK_THROWS_AS(load_config(kConfigs + "does-not-exist.toml"), ConfigError);
}

TEST_CASE("table builder errors") {
    CHECK_THROWS_AS(make_table(parse("discs = [[0.5, 0.5, 0.6]]\ntau_max = 1\n")), ConfigError);
    CHECK_THROWS_AS(make_table(parse("lattice = \"cubic\"\ndiscs = [[0.5, 0.5, 0.1]]\ntau_max = 1\n")), ConfigError);
    CHECK_THROWS_AS(make_table(parse("discs = [[0.5, 0.5]]\ntau_max = 1\n")), ConfigError);
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0, 0.0}) CHECK(std::stod(fmt(v)) == v);
    CHECK(fmt(std::nan("")) == "nan");
    CHECK(fmt(-INFINITY) == "-inf");
    CHECK(fmt(42L) == "42");
}
