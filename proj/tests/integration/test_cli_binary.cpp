#include <doctest.h>

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>
#include <vector>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "emfa/core/io.hpp"
#include "emfa/core/series.hpp"
#include "../support/fixtures.hpp"

extern char** environ;

using namespace emfa;
namespace fs = std::filesystem;

namespace {

const std::string kCli = EMFA_CLI_PATH;

fs::path data(const std::string& rel) { return test::source_dir() / "data" / rel; }

/// Runs a shell command line and returns its exit status.
int run(const std::string& command) {
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

/// Background `emfa simulate` with its stdout on a pipe.
class Simulator {
public:
    explicit Simulator(const std::vector<std::string>& extra) {
        int fds[2];
        REQUIRE(::pipe(fds) == 0);
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
        posix_spawn_file_actions_addclose(&actions, fds[0]);
        std::vector<std::string> args{kCli, "simulate"};
        args.insert(args.end(), extra.begin(), extra.end());
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        REQUIRE(posix_spawn(&pid_, kCli.c_str(), &actions, nullptr, argv.data(), environ) == 0);
        posix_spawn_file_actions_destroy(&actions);
        ::close(fds[1]);
        out_ = ::fdopen(fds[0], "r");
    }
    ~Simulator() {
        if (pid_ > 0) finish();
        if (out_) std::fclose(out_);
    }

    std::string read_line() {
        char buf[512];
        if (!std::fgets(buf, sizeof buf, out_)) return {};
        std::string s(buf);
        if (!s.empty() && s.back() == '\n') s.pop_back();
        return s;
    }

    /// SIGTERM, then the exit code.
    int finish() {
        ::kill(pid_, SIGTERM);
        int status = 0;
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

private:
    pid_t pid_ = -1;
    std::FILE* out_ = nullptr;
};

std::string port_of(const std::string& line) {
    std::smatch m;
    REQUIRE(std::regex_search(line, m, std::regex(R"(:(\d+)$)")));
    return m[1];
}

}  // namespace

TEST_SUITE("integration") {

TEST_CASE("binary: scripted measurement, analysis and export") {
    const auto dir = test::temp_dir("bin_pipeline");
    CHECK(run(kCli + " measure --script " + quote(data("scripts/los.json")) + " --seed 3 --out " +
              quote(dir / "los.json") + " > /dev/null") == 0);
    CHECK(run(kCli + " measure --script " + quote(data("scripts/nlos.json")) + " --seed 3 --out " +
              quote(dir / "nlos.json") + " > /dev/null") == 0);
    CHECK(fs::exists(dir / "los.json.scpi.txt"));
    CHECK(run(kCli + " analyze " + quote(dir / "los.json") + " " + quote(dir / "nlos.json") + " --out " +
              quote(dir / "report.json") + " --csv " + quote(dir / "report.csv") + " > /dev/null") == 0);
    const auto report = read_json_file(dir / "report.json");
    CHECK(report["sessions"].size() == 2);
    CHECK(run(kCli + " export " + quote(dir / "los.json") + " --out " + quote(dir / "los.csv") + " > /dev/null") == 0);
    CHECK(read_text_file(dir / "los.csv").starts_with("timestamp_s,band_id,unit,value,source\n"));
    fs::remove_all(dir);
}

TEST_CASE("binary: exit codes") {
    const auto dir = test::temp_dir("bin_codes");
    CHECK(run(kCli + " > /dev/null 2>&1") == 2);
    CHECK(run(kCli + " measure --scene " + quote(dir / "none.json") + " --out " + quote(dir / "s.json") +
              " 2> /dev/null") == 2);
    CHECK(run(kCli + " measure --instrument 127.0.0.1:1 --out " + quote(dir / "s.json") + " 2> /dev/null") == 3);
    CHECK_FALSE(fs::exists(dir / "s.json"));
    std::ofstream(dir / "bad.json") << "[";
    CHECK(run(kCli + " analyze " + quote(dir / "bad.json") + " --out " + quote(dir / "r.json") + " 2> /dev/null") ==
          5);
    fs::remove_all(dir);
}

TEST_CASE("binary: measure against a separate simulator process") {
    const auto dir = test::temp_dir("bin_remote");
    Simulator sim({"--scene", data("scenes/los.json").string(), "--instrument", "127.0.0.1:0", "--control",
                   "127.0.0.1:0", "--transcript", (dir / "server.log").string(), "--seed", "4"});
    const std::string instrument = sim.read_line();
    const std::string control = sim.read_line();
    REQUIRE(instrument.starts_with("instrument listening on"));
    REQUIRE(control.starts_with("control listening on"));

    // Short timings so the real-time run finishes quickly.
    std::ofstream(dir / "params.json")
        << R"({"max_time_search_s": 0.05, "int_sample_time_s": 0.01, "n_samples": 2, "adjust_iterations": 1})";
    const int code = run("printf 'ok\\nno\\n' | " + kCli + " measure --instrument 127.0.0.1:" + port_of(instrument) +
                         " --control 127.0.0.1:" + port_of(control) + " --params " + quote(dir / "params.json") +
                         " --location roof --los --distance 80 --out " + quote(dir / "s.json") + " > /dev/null");
    CHECK(code == 0);
    const Session s = load_session(dir / "s.json");
    CHECK(s.location_label == "roof");
    CHECK(s.phase1.size() == 9);
    CHECK(s.phase1.front().samples.size() == 2);
    CHECK(s.phase2.empty());
    CHECK(sim.finish() == 0);
    CHECK(sim.read_line() == "served 1 clients");
    const std::string log = read_text_file(dir / "server.log");
    CHECK(log.find(" < *IDN?\n") != std::string::npos);
    CHECK(log.find(" < CALC:CHP? ") != std::string::npos);
    fs::remove_all(dir);
}

}
