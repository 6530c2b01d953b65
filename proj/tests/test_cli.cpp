#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ggm/error.hpp"
#include "ggm/session.hpp"

using namespace ggm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSessions = GGM_SESSIONS_DIR;
const fs::path kData = GGM_TEST_DATA_DIR;

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json load(const fs::path& p) { return parse_session(slurp(p)); }

fs::path fresh_dir(const std::string& name)
{
    fs::path d = fs::temp_directory_path() / ("ggm_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// relative path -> contents of every file below dir
std::map<std::string, std::string> snapshot(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

std::string drop_timestamp(const std::string& s)
{
    std::istringstream in(s);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("# generated ", 0) != 0 && line.find("\"_generated\"") == std::string::npos)
            out += line + "\n";
    return out;
}

std::vector<fs::path> shipped_sessions()
{
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(kSessions))
        if (e.path().extension() == ".json")
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::string expect_parse_error(const std::string& text)
{
    try {
        validate_session(parse_session(text), text);
    } catch (const ParseError& e) {
        return e.what();
    }
    FAIL("no parse error for: " << text);
    return {};
}

}  // namespace

TEST_CASE("op aliases map to canonical operations")
{
    CHECK(canonical_op("cohomology") == "sheaf_cohomology_table");
    CHECK(canonical_op("local-cohomology") == "local_cohomology_table");
    CHECK(canonical_op("saturate") == "saturate");
    CHECK(canonical_op("torsion") == "torsion_test");
    CHECK(canonical_op("cartier") == "cartier_certificate");
    CHECK(canonical_op("gm-check") == "ggm_duality_check");
    CHECK(canonical_op("completion") == "graded_completion");
    CHECK(canonical_op("veronese") == "veronese");
    CHECK(canonical_op("triangle_check") == "triangle_check");
    CHECK(canonical_op("nonsense").empty());
}

TEST_CASE("parse errors name the field and line")
{
    const std::string arity = slurp(kData / "bad_arity.json");
    const std::string msg = expect_parse_error(arity);
    CHECK(msg.find("/ring/weights") != std::string::npos);
    CHECK(msg.find("line 4") != std::string::npos);

    try {
        parse_session("{\n \"ring\": {\n \"vars\": [\"x\" \"y\"]}}");
        FAIL("malformed JSON accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }

    const std::string head = R"({"ring": {"vars": ["x"], "weights": [1]}, )";
    CHECK(expect_parse_error(head + R"("commands": [{"op": "frobnicate", "output": "a"}]})").find("unknown op") !=
          std::string::npos);
    CHECK(expect_parse_error(head + R"("commands": [{"op": "saturate", "module": "M", "output": "a"}]})")
              .find("not a declared module") != std::string::npos);
    CHECK(expect_parse_error(head + R"("commands": [{"op": "saturate"}]})").find("/commands/0/output") !=
          std::string::npos);
    CHECK(expect_parse_error(head + R"("params": {"window": [3, 1]}, "commands": []})").find("/params/window") !=
          std::string::npos);
    CHECK(expect_parse_error(head + R"("commands": [{"op": "cartier", "output": "a"}]})").find("/commands/0/d") !=
          std::string::npos);
    CHECK(expect_parse_error(head + R"("modules": {"M": {"twists": [0, 1], "relations": [["x"]]}}, "commands": []})")
              .find("expected 2") != std::string::npos);
    CHECK(expect_parse_error(head + R"("commands": [], "extra": 1})").find("unknown key") != std::string::npos);
    CHECK_THROWS_AS(Field::parse("Fp:100"), Error);

    auto res = run_session_file(kData / "bad_arity.json");
    CHECK(res.status() == ExitStatus::Error);
    CHECK(res.commands.empty());
}

TEST_CASE("P^1 session writes the classical sheaf cohomology table")
{
    const auto dir = fresh_dir("p1");
    auto res = run_session(load(kSessions / "p1.json"), dir, Overrides{std::nullopt, std::nullopt, 1, false});
    for (const auto& c : res.commands)
        CHECK_MESSAGE(c.ok, c.op << ": " << c.error);
    CHECK(res.status() == ExitStatus::Success);
    CHECK(slurp(dir / "p1/sheaf_A.tsv") == slurp(kData / "p1_sheaf_A.tsv"));
    // the Koszul colimit and the truncated Čech oracle write the same RΓ table
    CHECK(slurp(dir / "p1/rgamma_A.tsv") == slurp(dir / "p1/rgamma_A_oracle.tsv"));

    auto duality = json::parse(slurp(dir / "p1/duality.json"));
    CHECK(duality["twist"] == -2);
    CHECK(duality["pass"] == true);
    auto cartier = json::parse(slurp(dir / "p1/cartier_1.json"));
    CHECK(cartier["verdict"] == "Certified");
    for (const auto& [path, content] : snapshot(dir))
        CHECK_MESSAGE(fs::path(path).extension() != ".tmp", path);
}

TEST_CASE("timestamps appear once per file and are suppressible")
{
    const auto dir = fresh_dir("stamp");
    json s = load(kSessions / "p2.json");
    run_session(s, dir);
    const std::string tsv = slurp(dir / "p2/sheaf_A.tsv");
    CHECK(tsv.rfind("# generated ", 0) == 0);
    const auto json_text = slurp(dir / "p2/duality.json");
    CHECK(json::parse(json_text).contains("_generated"));

    const auto quiet = fresh_dir("stamp_quiet");
    run_session(s, quiet, Overrides{std::nullopt, std::nullopt, 1, false});
    CHECK(slurp(quiet / "p2/sheaf_A.tsv") == drop_timestamp(tsv));
    CHECK(slurp(quiet / "p2/duality.json") == drop_timestamp(json_text));
}

TEST_CASE("F_101 override gives identical dimension tables for every shipped session")
{
    for (const auto& path : shipped_sessions()) {
        CAPTURE(path.filename().string());
        const auto q = fresh_dir("q_" + path.stem().string());
        const auto p = fresh_dir("f101_" + path.stem().string());
        auto rq = run_session(load(path), q, Overrides{std::nullopt, std::nullopt, 1, false});
        auto rp = run_session(load(path), p, Overrides{Field::parse("Fp:101"), std::nullopt, 1, false});
        CHECK(rq.status() == ExitStatus::Success);
        CHECK(rp.status() == ExitStatus::Success);
        const auto a = snapshot(q), b = snapshot(p);
        REQUIRE(a.size() == b.size());
        std::size_t tables = 0;
        for (const auto& [name, content] : a)
            if (fs::path(name).extension() == ".tsv") {
                CHECK_MESSAGE(content == b.at(name), name);
                ++tables;
            }
        CHECK(tables > 0);
    }
}

TEST_CASE("outputs are byte-identical across runs and worker counts")
{
    for (const auto& path : shipped_sessions()) {
        CAPTURE(path.filename().string());
        const auto one = fresh_dir("jobs1_" + path.stem().string());
        const auto again = fresh_dir("jobs1b_" + path.stem().string());
        const auto four = fresh_dir("jobs4_" + path.stem().string());
        run_session(load(path), one, Overrides{std::nullopt, std::nullopt, 1, false});
        run_session(load(path), again, Overrides{std::nullopt, std::nullopt, 1, false});
        run_session(load(path), four, Overrides{std::nullopt, std::nullopt, 4, false});
        const auto a = snapshot(one);
        CHECK(!a.empty());
        CHECK(a == snapshot(again));
        CHECK(a == snapshot(four));
    }
}

TEST_CASE("window override replaces every command window")
{
    const auto dir = fresh_dir("window");
    auto res = run_session(load(kSessions / "p1.json"), dir, Overrides{std::nullopt, std::pair{-1, 1}, 1, false});
    CHECK(res.status() == ExitStatus::Success);
    const std::string tsv = slurp(dir / "p1/sheaf_A.tsv");
    CHECK(tsv.rfind("j\t-1\t0\t1\n", 0) == 0);
}

TEST_CASE("inconclusive cells give partial status and '?' entries")
{
    const auto dir = fresh_dir("partial");
    auto res = run_session(load(kData / "partial.json"), dir, Overrides{std::nullopt, std::nullopt, 1, false});
    REQUIRE(res.commands.size() == 1);
    CHECK(res.commands[0].ok);
    CHECK(res.commands[0].partial);
    CHECK(res.status() == ExitStatus::Partial);
    CHECK(slurp(dir / "partial/rgamma.tsv").find('?') != std::string::npos);
}

TEST_CASE("command failures are scoped and later commands still run")
{
    const auto dir = fresh_dir("scoped");
    json s = json::parse(R"({
        "ring": {"vars": ["x", "y"], "weights": [1, 1]},
        "modules": {"Bad": {"twists": [0], "relations": [["x + y^2"]]}},
        "params": {"window": [-1, 1]},
        "commands": [
            {"op": "cohomology", "module": "Bad", "output": "bad.tsv"},
            {"op": "cartier", "d": 1, "output": "cartier.tsv"},
            {"op": "cohomology", "module": "A", "output": "good.tsv"}
        ]})");
    std::vector<std::string> log;
    auto res = run_session(s, dir, Overrides{std::nullopt, std::nullopt, 1, false},
                           [&](const std::string& line) { log.push_back(line); });
    REQUIRE(res.commands.size() == 3);
    CHECK(!res.commands[0].ok);
    CHECK(!res.commands[1].ok);
    CHECK(res.commands[1].error.find("no tabular form") != std::string::npos);
    CHECK(res.commands[2].ok);
    CHECK(res.status() == ExitStatus::Error);
    CHECK(!fs::exists(dir / "bad.tsv"));
    CHECK(fs::exists(dir / "good.tsv"));
    CHECK(log.size() == 4);
    CHECK(log.back().find(" s") != std::string::npos);
}

TEST_CASE("torsion and completion ops report verdicts")
{
    const auto dir = fresh_dir("verdicts");
    json s = json::parse(R"({
        "ring": {"vars": ["x", "y"], "weights": [1, 1]},
        "modules": {"T": {"twists": [0], "relations": [["x^2"], ["y"]]},
                    "I": {"twists": [1, 1], "relations": [["y", "-x"]]}},
        "params": {"window": [-1, 3]},
        "commands": [
            {"op": "torsion", "module": "T", "element": ["x"], "output": "t.json"},
            {"op": "torsion", "module": "I", "element": ["x", "0"], "output": "i.json"},
            {"op": "quotient_iso_check", "source": "I", "target": "A", "images": [["x"], ["y"]], "output": "q.json"}
        ]})");
    auto res = run_session(s, dir, Overrides{std::nullopt, std::nullopt, 1, false});
    CHECK(res.status() == ExitStatus::Success);
    auto t = json::parse(slurp(dir / "t.json"));
    CHECK(t["verdict"] == "Torsion");
    CHECK(t["conditions_agree"] == true);
    auto i = json::parse(slurp(dir / "i.json"));
    CHECK(i["verdict"] == "NotTorsionWitness");
    CHECK(json::parse(slurp(dir / "q.json"))["iso"] == true);
}
