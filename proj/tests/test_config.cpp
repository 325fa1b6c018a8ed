#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "inertia/config.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace inertia;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(INERTIA_SOURCE_DIR) / "configs";

const char* kMinimal = R"([system]
rocof_max = 0.5

[generator.ccgt]
unit_count = 10
p_max = 500
p_min_stable = 200
no_load_cost = 7809
marginal_cost = 51
inertia_constant = 5
max_response = 50
response_slope = 0.5
)";

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text, "cfg");
    } catch (const Error& e) {
        return std::string(e.what()) + " |" + e.field();
    }
    return "no error";
}

bool same_class(const GeneratorClass& a, const GeneratorClass& b) {
    return a.name == b.name && a.unit_count == b.unit_count && a.p_max == b.p_max &&
           a.p_min_stable == b.p_min_stable && a.no_load_cost == b.no_load_cost &&
           a.marginal_cost == b.marginal_cost && a.startup_cost == b.startup_cost &&
           a.startup_time == b.startup_time && a.min_up_time == b.min_up_time &&
           a.min_down_time == b.min_down_time && a.inertia_constant == b.inertia_constant &&
           a.max_response == b.max_response && a.response_slope == b.response_slope &&
           a.emissions_rate == b.emissions_rate && a.must_run == b.must_run;
}

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name, const std::string& body)
        : path(fs::temp_directory_path() / name) {
        std::ofstream(path) << body;
    }
    ~TempFile() { fs::remove(path); }
};

}  // namespace

TEST_CASE("bundled full-size config matches the fleet row for row") {
    const auto parsed = parse_config(kConfigs / "gb_tableI.ini");
    const auto table = table_one_fleet();
    REQUIRE(parsed.config.fleet.size() == table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        CAPTURE(table[i].name);
        CHECK(same_class(parsed.config.fleet[i], table[i]));
    }
    CHECK(parsed.config.params.damping == 0.005);
    CHECK(parsed.config.params.p_loss_max == 1800.0);
    CHECK(parsed.config.fleet_scale == 1.0);
}

TEST_CASE("desk config scales the fleet") {
    const auto parsed = parse_config(kConfigs / "desk.ini");
    const auto suc = parsed.config.suc_config();
    CHECK(suc.system.classes[1].p_max == doctest::Approx(50.0));
    CHECK(suc.system.classes[1].marginal_cost == 51.0);
    CHECK(suc.system.params.p_loss_max == 180.0);
    CHECK(suc.horizon == 5);
    CHECK_FALSE(suc.integer_recourse);
    CHECK(suc.quantiles.quantiles.size() == 3);
    CHECK(suc.wind.seed == 11);
    // one scaled CCGT carries 5 MW·s²
    CHECK(suc.system.classes[1].stored_energy() / suc.system.params.f0 == doctest::Approx(5.0));
}

TEST_CASE("omitted keys take defaults and are logged") {
    const auto parsed = parse_config_text(kMinimal);
    CHECK(parsed.config.params.damping == 0.005);
    const auto has = [&](const std::string& key, const std::string& value) {
        for (const auto& d : parsed.defaults) {
            if (d.key == key) return d.value == value;
        }
        return false;
    };
    CHECK(has("system.damping", "0.005"));
    CHECK(has("generator.ccgt.must_run", "false"));
    CHECK(has("scheduler.horizon", "24"));
    CHECK_FALSE(has("system.rocof_max", "0.5"));  // given explicitly
}

TEST_CASE("invalid values name the field") {
    std::string text = kMinimal;
    text.replace(text.find("marginal_cost = 51"), 18, "marginal_cost = -1");
    const auto msg = error_of(text);
    CHECK(msg.find("|generator.ccgt.marginal_cost") != std::string::npos);

    CHECK(error_of(std::string(kMinimal) + "[system]\n").find("duplicate section") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "[study]\nextra_grid = 1, 2\n").find("|study.extra_grid") !=
          std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "[scheduler]\nnadir_cuts = 1\n").find("|scheduler.nadir_cuts") !=
          std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "[scenario]\nquantiles = 0.9, 0.1\n").find("|scenario.quantiles") !=
          std::string::npos);
}

TEST_CASE("syntax errors carry the line number") {
    CHECK(error_of("[system]\nf0 = fifty\n").find("cfg:2:") == 0);
    CHECK(error_of("[system]\nf0 = fifty\n").find("|system.f0") != std::string::npos);
    CHECK(error_of("\n\n[nope]\n").find("cfg:3: unknown section") == 0);
    CHECK(error_of("[system]\nfrequency = 50\n").find("cfg:2: unknown key 'system.frequency'") == 0);
    CHECK(error_of("[system]\nf0 = 50\nf0 = 60\n").find("cfg:3: duplicate key") == 0);
    CHECK(error_of("[system]\nf0 50\n").find("cfg:2: expected key = value") == 0);
    CHECK(error_of("[system\n").find("cfg:1: unterminated") == 0);
    CHECK(error_of("f0 = 50\n").find("cfg:1: key 'f0' outside") == 0);
    CHECK(error_of("[scheduler]\nintegger_recourse = true\n").find("cfg:2:") == 0);
    CHECK(error_of("[scheduler]\nqss_constraint = maybe\n").find("cfg:2:") == 0);
    CHECK(error_of("[scheduler]\nhorizon = 2.5\n").find("cfg:2:") == 0);
    CHECK(error_of("[generator.a]\nunit_count = 1\n").find("missing required key 'generator.a.p_max'") !=
          std::string::npos);
    CHECK(error_of("[system]\n").find("at least one [generator") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "[generator.ccgt]\n").find("duplicate generator") != std::string::npos);
}

TEST_CASE("comments and whitespace") {
    const std::string text = "# header\n  [system]  \n rocof_max = 0.25   # tighter\n\n" +
                             std::string(kMinimal).substr(std::string(kMinimal).find("[generator"));
    CHECK(parse_config_text(text).config.params.rocof_max == 0.25);
}

TEST_CASE("parse, serialise, parse is the identity") {
    for (const auto* name : {"gb_tableI.ini", "desk.ini"}) {
        CAPTURE(name);
        const auto a = parse_config(kConfigs / name).config;
        const auto text = serialize_config(a);
        const auto b = parse_config_text(text).config;
        CHECK(serialize_config(b) == text);
        CHECK(config_hash(a) == config_hash(b));
        CHECK(parse_config_text(text).defaults.empty());
    }

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        auto c = parse_config_text(kMinimal).config;
        c.params.damping = u(rng) / 37.0;
        c.params.voll = 1000.0 + 1e4 * u(rng);
        c.fleet[0].p_min_stable = 100.0 + 100.0 * u(rng);
        c.study.extra_grid = {0.0, u(rng), 1.0 + u(rng)};
        c.study.seed = rng();
        c.study.demand_csv = "some dir/demand.csv";
        const auto back = parse_config_text(serialize_config(c)).config;
        CHECK(back.params.damping == c.params.damping);
        CHECK(back.params.voll == c.params.voll);
        CHECK(back.fleet[0].p_min_stable == c.fleet[0].p_min_stable);
        CHECK(back.study.extra_grid == c.study.extra_grid);
        CHECK(back.study.seed == c.study.seed);
        CHECK(back.study.demand_csv == c.study.demand_csv);
    }
}

TEST_CASE("config hash") {
    auto c = parse_config_text(kMinimal).config;
    const auto h = config_hash(c);
    CHECK(h.size() == 16);
    CHECK(config_hash(c) == h);
    c.params.voll += 1.0;
    CHECK(config_hash(c) != h);
}

TEST_CASE("series csv") {
    {
        TempFile f("inertia_series_ok.csv", "hour,MW\n0,10\n1, 12.5\n2,0\n");
        CHECK(read_series_csv(f.path) == std::vector<double>{10.0, 12.5, 0.0});
    }
    {
        TempFile f("inertia_series_gap.csv", "hour,MW\n0,10\n2,12\n");
        CHECK_THROWS_WITH_AS(read_series_csv(f.path), doctest::Contains(":3:"), Error);
    }
    {
        TempFile f("inertia_series_neg.csv", "hour,MW\n0,-1\n");
        CHECK_THROWS_AS(read_series_csv(f.path), Error);
    }
    {
        TempFile f("inertia_series_empty.csv", "hour,MW\n");
        CHECK_THROWS_AS(read_series_csv(f.path), Error);
    }
    CHECK_THROWS_AS(read_series_csv("/nonexistent/series.csv"), Error);
}

TEST_CASE("study traces") {
    auto c = parse_config(kConfigs / "desk.ini").config;
    const auto a = study_traces(c, 30);
    const auto b = study_traces(c, 30);
    REQUIRE(a.demand.size() == 30);
    REQUIRE(a.wind_cf.size() == 30);
    CHECK(a.wind_cf == b.wind_cf);
    for (double cf : a.wind_cf) CHECK((cf >= 0.0 && cf <= 1.0));
    CHECK(*std::min_element(a.demand.begin(), a.demand.end()) >= 3500.0 - 900.0 - 1e-9);
    c.study.seed += 1;
    CHECK(study_traces(c, 30).wind_cf != a.wind_cf);

    TempFile wind("inertia_wind.csv", "hour,MW\n0,1500\n1,6000\n2,0\n");
    c.study.wind_csv = wind.path.string();
    const auto w = study_traces(c, 3);
    CHECK(w.wind_cf == std::vector<double>{0.5, 1.0, 0.0});  // capacity 3000, clipped at 1
    CHECK_THROWS_AS(study_traces(c, 4), Error);
}
