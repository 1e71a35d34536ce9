#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "specshape/config.hpp"
#include "specshape/errors.hpp"

using namespace specshape;

namespace {

std::string reference_text() {
    std::ifstream in(SPECSHAPE_REPRO_CONFIG);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("value parsing") {
    CHECK(parse_value("4.5e11", "x").as_number("x") == 4.5e11);
    CHECK(parse_value("1_000_000", "x").as_integer("x") == 1000000);
    CHECK(parse_value("-3", "x").as_integer("x") == -3);
    CHECK(parse_value("\"time-domain\"", "x").as_string("x") == "time-domain");
    CHECK(parse_value("true", "x").as_bool("x"));
    CHECK(parse_value("[0.5, 1, 2]", "x").as_numbers("x") == std::vector<double>{0.5, 1, 2});
    CHECK(parse_value("18446744073709551615", "x").as_unsigned("x") == 18446744073709551615ULL);

    CHECK_THROWS_AS(parse_value("", "x"), ValidationError);
    CHECK_THROWS_AS(parse_value("\"open", "x"), ValidationError);
    CHECK_THROWS_AS(parse_value("[1, 2", "x"), ValidationError);
    CHECK_THROWS_AS(parse_value("[[1]]", "x"), ValidationError);
    CHECK_THROWS_AS(parse_value("12abc", "x"), ValidationError);
    CHECK_THROWS_AS(parse_value("1.5", "x").as_integer("x"), ValidationError);
    CHECK_THROWS_AS(parse_value("-1", "x").as_unsigned("x"), ValidationError);
    CHECK_THROWS_AS(parse_value("\"a\"", "x").as_number("x"), ValidationError);
}

TEST_CASE("document parsing") {
    const auto doc = parse_document("# comment\n[grid]\nn_subcarriers = 64 # trailing\n\n[interferers.a]\nkind = \"dme\"\n");
    CHECK(doc.at("grid").at("n_subcarriers").as_integer("") == 64);
    CHECK(doc.at("interferers.a").at("kind").as_string("") == "dme");
    CHECK(parse_document("[s]\nname = \"a # b\"\n").at("s").at("name").as_string("") == "a # b");

    CHECK_THROWS_AS(parse_document("[grid]\nn = 1\nn = 2\n"), ValidationError);
    CHECK_THROWS_AS(parse_document("[grid]\n[grid]\n"), ValidationError);
    CHECK_THROWS_AS(parse_document("n = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_document("[grid\n"), ValidationError);
    CHECK_THROWS_AS(parse_document("[grid]\njust words\n"), ValidationError);
}

TEST_CASE("reference config") {
    const auto cfg = load_config(SPECSHAPE_REPRO_CONFIG);
    CHECK(cfg.grid.n_subcarriers == 128);
    CHECK(cfg.interferers.size() == 4);
    CHECK(cfg.groups() == std::vector<std::string>{"dme", "rect"});
    CHECK(cfg.scenario("dme").interferers.size() == 2);
    CHECK(cfg.scenario("").interferers.size() == 4);
    CHECK_THROWS_AS(cfg.scenario("tacan"), ValidationError);
    CHECK(cfg.allocator.k_values == std::vector<double>{0.5, 1, 2, 3, 5});
    CHECK(cfg.ber.rule.min_bits == 1'000'000);
    CHECK(cfg.ber.rule.max_bits == 100'000'000);
    CHECK(cfg.ber.mode == InterferenceMode::TimeDomain);
    CHECK(cfg.capacity.flat_reference == 6.04);
    CHECK(cfg.make_grid().usable_indices().size() == 62);
    const auto left = cfg.scenario("dme").interferers[0];
    CHECK(left.kind == PulseKind::DmePair);
    CHECK(left.center_offset_hz == -500e3);
    CHECK(left.beta == 4.5e11);
}

TEST_CASE("overrides") {
    const auto base = load_config(SPECSHAPE_REPRO_CONFIG);
    const auto cfg = load_config(SPECSHAPE_REPRO_CONFIG,
                                 {"link.d_tx_rx_m=60e3", "interferers.1.peak_power_w=2000", "ber.mode=\"gaussian-surrogate\"",
                                  "allocator.k_values=[1, 3]"});
    CHECK(cfg.link.d_tx_rx_m == 60e3);
    CHECK(cfg.interferers[0].spec.peak_power_w == 2000);
    CHECK(cfg.ber.mode == InterferenceMode::GaussianSurrogate);
    CHECK(cfg.allocator.k_values == std::vector<double>{1, 3});
    CHECK(cfg.hash() != base.hash());

    CHECK_THROWS_AS(load_config(SPECSHAPE_REPRO_CONFIG, {"link.no_such_key=1"}), ValidationError);
    CHECK_THROWS_AS(load_config(SPECSHAPE_REPRO_CONFIG, {"nosection.key=1"}), ValidationError);
    CHECK_THROWS_AS(load_config(SPECSHAPE_REPRO_CONFIG, {"link.d_tx_rx_m"}), ValidationError);
    CHECK_THROWS_AS(load_config(SPECSHAPE_REPRO_CONFIG, {"d_tx_rx_m=3"}), ValidationError);
    CHECK_THROWS_AS(load_config(SPECSHAPE_REPRO_CONFIG, {"link.d_tx_rx_m=-3"}), ValidationError);
    CHECK_THROWS_AS(load_config(SPECSHAPE_REPRO_CONFIG, {"grid.n_subcarriers=100"}), ValidationError);
    CHECK_THROWS_AS(load_config(SPECSHAPE_REPRO_CONFIG, {"allocator.k_threshold=0"}), ValidationError);
    CHECK_THROWS_AS(load_config(SPECSHAPE_REPRO_CONFIG, {"interferers.1.kind=\"tacan\""}), ValidationError);
}

TEST_CASE("unknown sections and keys are rejected") {
    auto text = reference_text();
    CHECK_THROWS_AS(config_from_document(parse_document(text + "\n[extras]\nx = 1\n")), ValidationError);
    CHECK_THROWS_AS(config_from_document(parse_document(text + "\n[interferers.9]\nkind = \"dme\"\nbogus = 1\n")),
                    ValidationError);
}

TEST_CASE("missing file names the path") {
    try {
        load_config("/nonexistent/dir/cfg.toml");
        FAIL("expected an exception");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/cfg.toml") != std::string::npos);
    }
}

TEST_CASE("JSON round trip and hashing") {
    const auto cfg = load_config(SPECSHAPE_REPRO_CONFIG);
    const auto back = ReproConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
    CHECK(back.hash() == cfg.hash());
    CHECK(back.interferers == cfg.interferers);
    CHECK(cfg.hash().size() == 16);
    CHECK_THROWS_AS(ReproConfig::from_json(nlohmann::json{{"grid", 3}}), ValidationError);

    // Published FNV-1a 64-bit test vectors.
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}
