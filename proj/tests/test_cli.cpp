#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stripes/cli.hpp"
#include "support.hpp"

using namespace stripes;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_args(std::vector<std::string> args) {
    ::setenv("STRIPES_NO_COLOR", "1", 1);
    args.insert(args.begin(), "stripes");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return test::data_path(name); }

std::filesystem::path scratch(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("stripes-test-" + std::to_string(::getpid()) + "-" + name);
}

}  // namespace

TEST_CASE("exit codes over the corpus") {
    for (const char* f : {"atlas-xy.stripe", "atlas-plane.stripe", "atlas-annulus.stripe", "atlas-mobius.stripe",
                          "atlas-ladder.stripe"}) {
        CAPTURE(f);
        CHECK(run_args({"validate", data(f)}).code == exit_code::ok);
        CHECK(run_args({"invariants", data(f)}).code == exit_code::ok);
        CHECK(run_args({"verify", data(f), "--window", "2"}).code == exit_code::ok);
        CHECK(run_args({"leaves", data(f)}).code == exit_code::ok);
    }
    CHECK(run_args({"validate", data("broken.stripe")}).code == exit_code::failure);
    CHECK(run_args({"leaves", data("geometric-accumulation.stripe"), "--window", "2"}).code == exit_code::failure);
}

TEST_CASE("validate reports windows, dropped members and violations") {
    const Run ok = run_args({"validate", data("atlas-ladder.stripe"), "--window", "1"});
    CHECK(ok.out == data("atlas-ladder.stripe") + ": valid (2 strips, 2 gluings, window 1)\n");

    const Run bad = run_args({"validate", data("broken.stripe")});
    CHECK(bad.err.find(data("broken.stripe") + ":1:16: error: overlap:") != std::string::npos);
    CHECK(bad.err.find("\x1b[") == std::string::npos);
}

TEST_CASE("invariants as json") {
    const auto plane = nlohmann::json::parse(run_args({"invariants", data("atlas-plane.stripe"), "--format", "json"}).out);
    CHECK(plane["ranks"] == nlohmann::json::array({0}));
    CHECK(plane["components"] == 1);
    CHECK(plane["orientable"] == true);

    const auto mobius = nlohmann::json::parse(run_args({"invariants", data("atlas-mobius.stripe"), "--format", "json"}).out);
    CHECK(mobius["ranks"] == nlohmann::json::array({1}));
    CHECK(mobius["orientable"] == false);
    CHECK(mobius["euler"] == 0);

    const auto ladder =
        nlohmann::json::parse(run_args({"invariants", data("atlas-ladder.stripe"), "--window", "4", "--format", "json"}).out);
    CHECK(ladder["edges"] == 8);
    CHECK(ladder["total_rank"] == 7);
}

TEST_CASE("verify as json") {
    const Run r = run_args({"verify", data("atlas-xy.stripe"), "--format", "json"});
    REQUIRE(r.code == exit_code::ok);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["confirmed"] == true);
    CHECK(j["ranks"]["graph"] == nlohmann::json::array({1}));
    CHECK(j["ranks"]["surface"] == nlohmann::json::array({1}));
    CHECK(j["objects"]["surface"] == 8);
    CHECK(j["max_word_length"] == 8);

    const auto short_words =
        nlohmann::json::parse(run_args({"verify", data("atlas-xy.stripe"), "--max-word-len", "3", "--format", "json"}).out);
    CHECK(short_words["max_word_length"] == 3);
}

TEST_CASE("json output is deterministic") {
    for (const char* cmd : {"invariants", "graph", "verify", "leaves"}) {
        const Run a = run_args({cmd, data("atlas-ladder.stripe"), "--format", "json"});
        const Run b = run_args({cmd, data("atlas-ladder.stripe"), "--format", "json"});
        CAPTURE(cmd);
        CHECK(a.out == b.out);
        CHECK_NOTHROW((void)nlohmann::json::parse(a.out));
    }
}

TEST_CASE("graph writes dot") {
    const Run inline_dot = run_args({"graph", data("atlas-annulus.stripe")});
    CHECK(inline_dot.out == "graph G {\n  A;\n  A -- A [label=s];\n}\n");

    const auto path = scratch("xy.dot");
    const Run r = run_args({"graph", data("atlas-xy.stripe"), "--dot", path.string()});
    CHECK(r.code == exit_code::ok);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string dot = buf.str();
    CHECK(dot.rfind("graph G {", 0) == 0);
    for (const char* e : {"s1", "s2", "s3", "s4"}) CHECK(dot.find(std::string("label=") + e) != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("input errors exit with code 2") {
    const auto path = scratch("bad.stripe");
    std::ofstream(path) << "strip A { top: (0, 1; }";
    const Run parse = run_args({"validate", path.string()});
    CHECK(parse.code == exit_code::input);
    CHECK(parse.err.find(path.string() + ":1:") != std::string::npos);
    std::filesystem::remove(path);

    CHECK(run_args({"validate", "/nonexistent/atlas.stripe"}).code == exit_code::input);
    CHECK(run_args({"validate", data("atlas-xy.stripe"), "--window", "-1"}).code == exit_code::input);
    CHECK(run_args({"verify", data("atlas-xy.stripe"), "--max-word-len", "0"}).code == exit_code::input);
    CHECK(run_args({"invariants", data("atlas-xy.stripe"), "--format", "yaml"}).code == exit_code::input);
    CHECK(run_args({"frobnicate", data("atlas-xy.stripe")}).code == exit_code::input);
    CHECK(run_args({}).code == exit_code::input);
    CHECK(run_args({"--help"}).code == exit_code::ok);
}
