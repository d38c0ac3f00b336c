#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "manufactured.hpp"
#include "mgt/config.hpp"

using namespace mgt;
using nlohmann::json;

namespace {

std::string source_path(const std::string& rel) { return std::string(MGT_SOURCE_DIR) + "/" + rel; }

json read_json(const std::string& rel) {
    std::ifstream in(source_path(rel));
    return json::parse(in);
}

std::string field_of(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("embedded schemas match the published files") {
    CHECK(config_schema() == read_json("schema/config.schema.json"));
    CHECK(report_schema() == read_json("schema/report.schema.json"));
}

TEST_CASE("every shipped config validates and parses") {
    for (const auto& entry : std::filesystem::directory_iterator(source_path("configs"))) {
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_config(entry.path().string()));
    }
}

TEST_CASE("canonical config maps onto the reconstruction settings") {
    const auto rc = load_config(source_path("configs/canonical.json"));
    CHECK(rc.recon.grid.nx == 101);
    CHECK(rc.recon.grid.nt == 251);
    CHECK(rc.recon.grid.final_time == 1.25);
    CHECK(rc.recon.geometry.final_time == 1.25);
    CHECK(rc.recon.scales.s == 2.0);
    CHECK(rc.recon.boundary == BoundaryMode::compatible);
    CHECK(rc.recon.minimizer.solver == LinearSolver::direct);
    CHECK(rc.recon.data_factor == 2);
    CHECK(rc.recon.data.eta == 1.0);
    REQUIRE(rc.gamma_true.has_value());
    CHECK((*rc.gamma_true)(0.5) == doctest::Approx(0.7));
    CHECK(rc.gamma_forward(0.5) == doctest::Approx(0.7));
    CHECK(rc.seed == 2024);
    CHECK(rc.recon.seed == 2024);
    CHECK(rc.recon.s_sweep == std::vector<double>{0.5, 1.0, 2.0, 4.0});
    CHECK_NOTHROW(rc.recon.validate());
}

TEST_CASE("schema violations name the offending field") {
    const json base = read_json("configs/small.json");
    CHECK(field_of(base) == "<accepted>");

    json missing = base;
    missing["grid"].erase("Nx");
    CHECK(field_of(missing) == "grid.Nx");

    json unknown = base;
    unknown["grid"]["spacing"] = 0.1;
    CHECK(field_of(unknown) == "grid.spacing");

    json top = base;
    top["colour"] = "blue";
    CHECK(field_of(top) == "colour");

    json wrong_type = base;
    wrong_type["grid"]["Nx"] = "many";
    CHECK(field_of(wrong_type) == "grid.Nx");

    json fractional = base;
    fractional["grid"]["Nx"] = 30.5;
    CHECK(field_of(fractional) == "grid.Nx");

    json too_small = base;
    too_small["grid"]["Nt"] = 3;
    CHECK(field_of(too_small) == "grid.Nt");

    json bad_enum = base;
    bad_enum["reconstruction"]["solver"] = "gmres";
    CHECK(field_of(bad_enum) == "reconstruction.solver");

    json bad_item = base;
    bad_item["verify"]["s_values"] = json::array({1.0, -2.0});
    CHECK(field_of(bad_item) == "verify.s_values[1]");

    json bad_ref = base;
    bad_ref["gamma_true"]["kind"] = "spline";
    CHECK(field_of(bad_ref) == "gamma_true.kind");

    json positive = base;
    positive["coefficients"]["b"] = 0.0;
    CHECK(field_of(positive) == "coefficients.b");

    json domain = base;
    domain["grid"]["x_left"] = 2.0;
    CHECK(field_of(domain) == "grid");

    json even = base;
    even["reconstruction"]["smoothing_window"] = 4;
    CHECK(field_of(even) == "reconstruction.smoothing_window");
}

TEST_CASE("syntax errors report the position") {
    const auto path = std::filesystem::temp_directory_path() / "mgt_bad_config.json";
    {
        std::ofstream out(path);
        out << "{\n  \"grid\": {\n    \"Nx\": 5,,\n  }\n}\n";
    }
    try {
        load_config(path.string());
        FAIL("accepted malformed JSON");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("function specs") {
    const auto c = space_function(json{{"kind", "constant"}, {"value", 0.25}}, 0.0, 1.0);
    CHECK(c(0.3) == 0.25);
    const auto f = space_function(json{{"kind", "fourier"}, {"offset", 0.1}, {"sin", {0.2}}, {"cos", {0.0, 0.3}}},
                                  0.0, 2.0);
    const double x = 0.7;
    const double z = std::numbers::pi * x / 2.0;
    CHECK(f(x) == doctest::Approx(0.1 + 0.2 * std::sin(z) + 0.3 * std::cos(2.0 * z)));
    CHECK_THROWS_AS(space_function(json{{"kind", "constant"}}, 0.0, 1.0), ConfigError);
}

TEST_CASE("manufactured source agrees with the independent derivation") {
    const test::CubicManufactured m{1.3, 0.7, 0.4};
    const auto f = manufactured_cubic_source([](double) { return 0.4; }, 1.3, 0.7, 0.0, 1.0);
    for (double x : {0.1, 0.5, 0.8})
        for (double t : {0.0, 0.3, 1.1}) CHECK(f(x, t) == doctest::Approx(m.f(x, t)).epsilon(1e-13));
}

TEST_CASE("seed override reaches the reconstruction settings") {
    auto rc = load_config(source_path("configs/small.json"));
    override_seed(rc, 99);
    CHECK(rc.seed == 99);
    CHECK(rc.recon.seed == 99);
}

TEST_CASE("JSON text uses 17 significant digits and round-trips") {
    const json doc{{"a", 0.1}, {"b", 3}, {"c", json::array({1.0 / 3.0, -2.5e-300})}, {"d", "text"}, {"e", true}};
    const std::string text = to_json_text(doc);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    CHECK(text.find("\"b\": 3,") != std::string::npos);
    CHECK(json::parse(text) == doc);
    CHECK(to_json_text(doc) == text);
    CHECK(to_json_text(json{{"x", 2.0}}).find("2.0") != std::string::npos);

    const json special{{"nan", std::numeric_limits<double>::quiet_NaN()}, {"inf", INFINITY}};
    const json back = json::parse(to_json_text(special));
    CHECK(back["nan"].is_null());
    CHECK(back["inf"].is_null());
    CHECK(to_json_text(json::object()) == "{}\n");
}

TEST_CASE("report schema accepts well-formed reports and rejects stray keys") {
    const json ok{{"command", "verify"}, {"suite", "weights"}, {"seed", 1}, {"report", json::object()}};
    CHECK_NOTHROW(validate_against_schema(ok, report_schema()));
    json bad = ok;
    bad["suite"] = "colour";
    CHECK_THROWS_AS(validate_against_schema(bad, report_schema()), ConfigError);
    bad = ok;
    bad["extra"] = 1;
    CHECK_THROWS_AS(validate_against_schema(bad, report_schema()), ConfigError);
}
