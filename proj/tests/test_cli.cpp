#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfspec/cli.hpp"
#include "support/generators.hpp"

using namespace mfspec;
using namespace mfspec::cli;
using mfspec::testing::Gen;

namespace {

const std::string kData = MFSPEC_TEST_DATA;

std::string data(const std::string& name) { return kData + "/" + name; }

struct Run {
    int status = 0;
    std::string out;
    std::string err;
};

Run run_config(const RunConfig& c) {
    std::ostringstream out, err;
    Run r;
    r.status = run(c, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

RunConfig config(const std::string& command, const std::string& model) {
    RunConfig c;
    c.command = command;
    c.model_path = data(model);
    return c;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

bool same_bits(double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return true;
    return std::memcmp(&a, &b, sizeof a) == 0;
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("model files") {
    const ModelSpec fair = parse_model(data("uniform.json"));
    CHECK(fair.label == "fair-coin");
    CHECK(fair.alphabet_size == 2);
    const ModelSpec golden = parse_model(data("golden.json"));
    CHECK(golden.ratios == std::vector<double>{0.5, 0.25});
    const ModelSpec deep = parse_model(data("depth2.json"));
    REQUIRE(deep.scaling_table);
    CHECK(deep.scaling_table->depth() == 2);

    const std::string ratio = error_of([] { parse_model(data("bad_ratio.json")); });
    CHECK(ratio.find("ratio out of (0,1)") != std::string::npos);
    CHECK(ratio.find("bad_ratio.json:3:") != std::string::npos);
    CHECK_THROWS_AS(parse_model(data("bad_ratio.json")), ValidationError);

    const std::string syntax = error_of([] { parse_model(data("bad_syntax.json")); });
    CHECK(syntax.find("bad_syntax.json:4:") != std::string::npos);
    CHECK_THROWS_AS(parse_model(data("bad_syntax.json")), ParseError);

    CHECK_THROWS_AS(parse_model_text(R"({"ratios":[0.5,0.5],"measures":[[0.5,0.5]]})"), ParseError);
    CHECK_THROWS_AS(parse_model_text(R"({"N":"two","ratios":[0.5,0.5],"measures":[[0.5,0.5]]})"), ParseError);
    const std::string prob = error_of(
        [] { parse_model_text("{\"N\":2,\n\"ratios\":[0.5,0.5],\n\"measures\":[[0.0,1.0]]}", "m"); });
    CHECK(prob.find("m:3: probability must be strictly positive") != std::string::npos);
    CHECK_THROWS_AS(parse_model("/nonexistent/model.json"), ParseError);
}

TEST_CASE("observable files") {
    const ObservableTable f = parse_observable(data("indicator.json"), 2);
    CHECK(f.depth() == 1);
    CHECK(f.lip_bound == 1.0);
    CHECK_THROWS_AS(parse_observable_text(R"({"depth":1,"values":[1,0,0]})", 2), ValidationError);
    CHECK_THROWS_AS(parse_observable_text(R"({"depth":1,"values":[1,0],"lip_bound":0.1})", 2), ValidationError);
}

TEST_CASE("targets, grids and numbers") {
    const TargetBox a = parse_target("0.5");
    CHECK(a.is_singleton());
    const TargetBox b = parse_target("0.7:0.9,1:2");
    CHECK(b.dimension() == 2);
    CHECK(b.hi(1) == 2.0);
    CHECK_THROWS_AS(parse_target("1:2:3"), ParseError);
    CHECK_THROWS_AS(parse_target("x"), ParseError);
    CHECK_THROWS_AS(parse_target("2:1"), ValidationError);
    const auto g = parse_grid("0.5:2.0:16");
    REQUIRE(g.size() == 16);
    CHECK(g.front() == 0.5);
    CHECK(g.back() == 2.0);
    CHECK(parse_grid("3:9:1") == std::vector<double>{3.0});
    CHECK_THROWS_AS(parse_grid("0:1:0"), ValidationError);
    CHECK_THROWS_AS(parse_grid("0:1"), ParseError);
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(NAN) == "nan");
    CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("dimension command") {
    const Run r = run_config(config("dimension", "golden.json"));
    CHECK(r.status == kExitOk);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "dimension");
    CHECK(std::abs(std::stod(rows[1][0]) - 0.6942419136306174) < 1e-9);
}

TEST_CASE("spectrum command") {
    RunConfig c = config("spectrum", "quarter.json");
    c.alpha_grid = "0.5:2.0:16";
    const Run r = run_config(c);
    CHECK(r.status == kExitOk);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 17);
    CHECK(rows[0] == std::vector<std::string>{"alpha_1", "f", "q_star_1", "status"});
    std::size_t best = 1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][1] != "-inf" && std::stod(rows[i][1]) > std::stod(rows[best][1])) best = i;
    }
    CHECK(std::abs(std::stod(rows[best][0]) - 1.2) < 1e-12);
    CHECK(std::stod(rows[best][1]) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("exit codes") {
    RunConfig empty = config("mf-bowen", "quarter.json");
    empty.target = "0.5";
    empty.mode = "fixed";
    const Run e = run_config(empty);
    CHECK(e.status == kExitEmpty);
    CHECK(csv_rows(e.out)[1][0] == "-inf");
    CHECK_FALSE(e.err.empty());

    const Run parse = run_config(config("dimension", "bad_ratio.json"));
    CHECK(parse.status == kExitParse);
    CHECK(parse.err.find("ratio out of (0,1)") != std::string::npos);
    CHECK(parse.out.empty());

    RunConfig budget = config("mf-bowen", "depth2.json");
    budget.target = "1:2";
    budget.n_max = 40;
    CHECK(run_config(budget).status == kExitBudget);

    RunConfig bad_mode = config("mf-bowen", "quarter.json");
    bad_mode.target = "1";
    bad_mode.mode = "Q";
    CHECK(run_config(bad_mode).status == kExitParse);

    RunConfig zeta = config("zeta", "quarter.json");
    zeta.target = "0.1:0.2";
    zeta.n_max = 12;
    const Run z = run_config(zeta);
    CHECK(z.status == kExitEmpty);
    CHECK(csv_rows(z.out).size() == 13);
}

TEST_CASE("every command runs") {
    std::vector<RunConfig> configs;
    RunConfig p = config("pressure", "depth2.json");
    p.t_grid = "0:1:3";
    configs.push_back(p);
    RunConfig b = config("beta", "two_measures.json");
    b.q_point = "1,0.5";
    configs.push_back(b);
    RunConfig s = config("sup-spectrum", "two_measures.json");
    s.target = "1:1.5,1:1.3";
    configs.push_back(s);
    RunConfig h = config("birkhoff", "uniform.json");
    h.observable_path = data("indicator.json");
    h.target = "0.3";
    h.n_max = 120;
    configs.push_back(h);
    RunConfig o = config("oracle", "quarter.json");
    o.target = "0.8:1.0";
    o.n_max = 8;
    configs.push_back(o);
    RunConfig m = config("mf-bowen", "quarter.json");
    m.target = "0.811278";
    m.mode = "M,shrinking";
    m.n_max = 120;
    configs.push_back(m);
    for (const auto& c : configs) {
        const Run r = run_config(c);
        INFO(c.command << ": " << r.err);
        CHECK(r.status == kExitOk);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() >= 2);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].size() == rows[0].size());
    }
}

TEST_CASE("property: JSON round trip is bit-exact") {
    Gen g(91);
    Table t;
    t.columns = {"a", "b", "label"};
    for (int i = 0; i < 50; ++i) {
        const double x = std::ldexp(g.uniform(-1.0, 1.0), g.integer(-40, 40));
        const double y = i % 7 == 0 ? -INFINITY : i % 11 == 0 ? NAN : i % 13 == 0 ? INFINITY : g.uniform(-1e6, 1e6);
        t.rows.push_back({x, y, std::string("row") + std::to_string(i)});
    }
    RunConfig c;
    c.command = "spectrum";
    c.deterministic = true;
    std::ostringstream out;
    write_json(out, t, c, "label", 0);
    const Table back = read_json_table(out.str());
    REQUIRE(back.columns == t.columns);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(same_bits(std::get<double>(back.rows[i][0]), std::get<double>(t.rows[i][0])));
        CHECK(same_bits(std::get<double>(back.rows[i][1]), std::get<double>(t.rows[i][1])));
        CHECK(std::get<std::string>(back.rows[i][2]) == std::get<std::string>(t.rows[i][2]));
    }
    CHECK(out.str().find("\"unattainable\": true") != std::string::npos);
    CHECK(out.str().find("generated_at") == std::string::npos);
}

TEST_CASE("JSON output of a command round-trips against its CSV") {
    RunConfig c = config("spectrum", "quarter.json");
    c.alpha_grid = "0.3:2.1:10";
    const Run csv = run_config(c);
    c.format = "json";
    c.deterministic = true;
    const Run json = run_config(c);
    CHECK(json.status == kExitOk);
    const Table back = read_json_table(json.out);
    const auto rows = csv_rows(csv.out);
    REQUIRE(back.rows.size() + 1 == rows.size());
    for (std::size_t i = 0; i < back.rows.size(); ++i) {
        for (std::size_t j = 0; j < back.columns.size(); ++j) {
            if (const double* d = std::get_if<double>(&back.rows[i][j])) {
                CHECK(same_bits(*d, rows[i + 1][j] == "-inf" ? -INFINITY : std::strtod(rows[i + 1][j].c_str(), nullptr)));
            } else {
                CHECK(std::get<std::string>(back.rows[i][j]) == rows[i + 1][j]);
            }
        }
    }
    CHECK(json.out.find("\"schema_version\": 1") != std::string::npos);
    CHECK(json.out.find("\"flags\"") != std::string::npos);
}

TEST_CASE("determinism across worker counts") {
    RunConfig c = config("spectrum", "two_measures.json");
    c.alpha_grid = "0.5:2.4:5,0.7:1.5:5";
    c.format = "json";
    c.deterministic = true;
    c.seed = 7;
    const Run one = run_config(c);
    c.jobs = 4;
    const Run four = run_config(c);
    const Run again = run_config(c);
    CHECK(one.status == kExitOk);
    CHECK(one.out == four.out);
    CHECK(four.out == again.out);
    CHECK(one.out.find("\"seed\": 7") != std::string::npos);
    c.deterministic = false;
    CHECK(run_config(c).out.find("generated_at") != std::string::npos);
}

TEST_CASE("output file") {
    const auto path = std::filesystem::temp_directory_path() / "mfspec_cli_output.csv";
    RunConfig c = config("dimension", "golden.json");
    c.output_path = path.string();
    const Run r = run_config(c);
    CHECK(r.status == kExitOk);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "dimension,method,n");
}
