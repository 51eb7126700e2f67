#include "fitt/report.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sys/wait.h>

using namespace fitt;

namespace {

const char* two_places = R"({
  "p": 3, "coeff_precision": 2, "t_precision": 6, "group_orders": [3, 3],
  "places": [
    {"label": "v1", "inertia_generators": [[1, 0]]},
    {"label": "v2", "inertia_generators": [[0, 1]]}
  ],
  "tasks": [%TASKS%]
})";

std::string config_with(const std::string& tasks) {
    std::string s = two_places;
    s.replace(s.find("%TASKS%"), 7, tasks);
    return s;
}

const std::string pass_task = R"({"id": "ok", "kind": "minors", "matrix": "A", "sizes": [0], "expect": "unit"})";
const std::string fail_task = R"({"id": "bad", "kind": "minors", "matrix": "A", "sizes": [0], "expect": "zero"})";
const std::string error_task = R"({"id": "err", "kind": "thm46", "v_star": 0})";

std::string write_temp(const std::string& name, const std::string& text) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(FITTCALC_PATH) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Config, MalformedJsonReportsLocation) {
    try {
        parse_config_text("{\n  \"p\": 3,\n  \"tasks\": [ }\n");
        FAIL() << "expected a config error";
    } catch (const ConfigError& e) {
        EXPECT_NE(e.where().find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Config, ValidationReportsPointer) {
    auto where = [](const std::string& text) {
        try {
            parse_config_text(text);
        } catch (const ConfigError& e) {
            return e.where();
        }
        return std::string("none");
    };
    EXPECT_EQ(where(config_with(R"({"kind": "nope"})")), "/tasks/0/kind");
    EXPECT_EQ(where(config_with(pass_task + "," + R"({"kind": "reproduce", "example": "ex-9"})")), "/tasks/1/example");
    EXPECT_EQ(where(config_with(pass_task + "," + pass_task)), "/tasks/1/id");
    EXPECT_EQ(where(R"({"group_orders": [3, 3], "places": [{"inertia_generators": [[1]]}], "tasks": []})"),
              "/places/0/inertia_generators/0");
    EXPECT_EQ(where(R"({"group_orders": [6], "tasks": []})"), "/");
    EXPECT_EQ(where(R"({"p": 2, "group_orders": [2], "tasks": []})"), "/");
    EXPECT_EQ(where(R"({"p": 3})"), "/tasks");
}

TEST(Config, FlagsOverrideConfigValues) {
    Overrides o;
    o.t_precision = 9;
    o.jobs = 4;
    auto c = parse_config_text(config_with(pass_task), o);
    EXPECT_EQ(c.settings.t_precision, 9);
    EXPECT_EQ(c.settings.coeff_precision, 2);
    EXPECT_EQ(c.settings.jobs, 4u);
    auto d = parse_config_text(R"({"tasks": []})");
    EXPECT_EQ(d.settings.t_precision, 6);
    Overrides even;
    even.p = 2;
    even.group_orders = std::vector<std::uint64_t>{2};
    even.allow_even_p = true;
    EXPECT_NO_THROW(parse_config_text(R"({"tasks": []})", even));
}

TEST(Report, ExitCodes) {
    auto code = [](const std::string& tasks) { return exit_code(run(parse_config_text(config_with(tasks)))); };
    EXPECT_EQ(code(pass_task), 0);
    EXPECT_EQ(code(fail_task), 1);
    EXPECT_EQ(code(error_task), 3);
    EXPECT_EQ(code(pass_task + "," + fail_task), 1);
    // ERROR outranks FAIL
    EXPECT_EQ(code(fail_task + "," + error_task), 3);
}

TEST(Report, ExitCodesRandomized) {
    std::mt19937 rng(5);
    const std::vector<std::string> pool{pass_task, fail_task, error_task};
    for (int trial = 0; trial < 100; ++trial) {
        Report r;
        std::size_t n = 1 + rng() % 4;
        bool fail = false, err = false;
        for (std::size_t k = 0; k < n; ++k) {
            TaskResult t;
            t.status = static_cast<Status>(rng() % 3);
            fail |= t.status == Status::Fail;
            err |= t.status == Status::Error;
            r.tasks.push_back(t);
        }
        EXPECT_EQ(exit_code(r), err ? 3 : fail ? 1 : 0);
    }
    // the same contract through real tasks
    for (int trial = 0; trial < 6; ++trial) {
        std::string tasks;
        bool fail = false, err = false;
        for (int k = 0; k < 3; ++k) {
            auto pick = rng() % 3;
            fail |= pick == 1;
            err |= pick == 2;
            auto t = pool[pick];
            t.replace(t.find("\"id\": \"") + 7, 0, std::to_string(k));
            tasks += (k ? "," : "") + t;
        }
        EXPECT_EQ(exit_code(run(parse_config_text(config_with(tasks)))), err ? 3 : fail ? 1 : 0);
    }
}

TEST(Report, FailingTaskCarriesWitness) {
    auto r = run(parse_config_text(config_with(fail_task + "," + error_task)));
    EXPECT_EQ(r.tasks[0].status, Status::Fail);
    EXPECT_EQ(r.tasks[0].witness, "Min_0 is not zero");
    EXPECT_EQ(r.tasks[1].status, Status::Error);
    EXPECT_NE(r.tasks[1].witness.find("not totally ramified"), std::string::npos);
}

TEST(Report, TextIsDeterministicAcrossJobs) {
    auto text = config_with(R"({"kind": "fitt1", "methods": ["tensor", "direct"]},
                               {"kind": "minors", "matrix": "A"},
                               {"kind": "exactness", "complex": "cyclic"},)" + fail_task);
    Overrides one, many;
    one.jobs = 1;
    many.jobs = 3;
    auto a = text_report(run(parse_config_text(text, one)));
    auto b = text_report(run(parse_config_text(text, many)));
    auto c = text_report(run(parse_config_text(text, one)));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    EXPECT_EQ(a.find("millis"), std::string::npos);
}

TEST(Report, GeneratorsAreSorted) {
    auto r = run(parse_config_text(config_with(R"({"kind": "fitt1", "method": "direct"})")));
    ASSERT_EQ(r.tasks[0].status, Status::Pass);
    const auto& gens = r.tasks[0].ideals.at(0).generators;
    EXPECT_EQ(gens.back(), "T");
    EXPECT_EQ(r.tasks[0].ideals[0].denominator, "T");
}

TEST(Report, JsonSchema) {
    auto r = run(parse_config_text(config_with(pass_task)));
    auto j = json_report(r);
    EXPECT_EQ(j["version"], tool_version);
    ASSERT_TRUE(j["config"].is_object());
    const auto& t = j["tasks"].at(0);
    for (auto key : {"id", "kind", "status", "precision", "ideals", "witness", "millis"}) EXPECT_TRUE(t.contains(key)) << key;
    EXPECT_EQ(t["precision"]["N"], 2);
    EXPECT_EQ(t["ideals"][0]["role"], "Min_0");
    EXPECT_EQ(t["ideals"][0]["generators"][0], "1");
}

TEST(Reproduce, RegisteredExamplesPass) {
    for (const auto& id : example_ids()) {
        auto r = reproduce::by_id(id);
        EXPECT_EQ(r.status, Status::Pass) << id << ": " << r.witness;
    }
    auto s2 = reproduce::s2_5minors();
    EXPECT_EQ(s2.notes.at(0), "all 21 5-minors vanish");
}

TEST(Cli, ExitStatusAndJson) {
    EXPECT_EQ(run_cli(write_temp("fitt_pass.json", config_with(pass_task))), 0);
    EXPECT_EQ(run_cli(write_temp("fitt_fail.json", config_with(fail_task))), 1);
    EXPECT_EQ(run_cli(write_temp("fitt_err.json", config_with(error_task + "," + fail_task))), 3);
    EXPECT_EQ(run_cli(write_temp("fitt_bad.json", "{ \"tasks\": [ ")), 2);
    EXPECT_EQ(run_cli("/nonexistent/config.json"), 2);
    EXPECT_EQ(run_cli(write_temp("fitt_pass2.json", config_with(pass_task)) + " --t-precision 0"), 2);
    auto out = (std::filesystem::temp_directory_path() / "fitt_report.json").string();
    EXPECT_EQ(run_cli(std::string(CONFIG_DIR) + "/two_factors.json --jobs 2 --json " + out), 0);
    std::ifstream in(out);
    auto j = json::parse(in);
    EXPECT_EQ(j["tasks"].size(), 4u);
    for (const auto& t : j["tasks"]) EXPECT_EQ(t["status"], "PASS") << t["id"];
}

TEST(Cli, SampleConfigsPass) {
    for (auto name : {"two_factors.json", "cyclic_places.json", "conjectures.json", "reproduce.json"})
        EXPECT_EQ(run_cli(std::string(CONFIG_DIR) + "/" + name), 0) << name;
}
