#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    std::string out_file = "cli_test_stdout.tmp";
    std::string cmd = std::string(DICE_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    int status = std::system(cmd.c_str());
    std::ifstream f(out_file, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    std::remove(out_file.c_str());
    int code = -1;
    if (status != -1) code = WEXITSTATUS(status);
    return {code, ss.str()};
}

const std::string kToy =
    "--f \"sqrt(2)*p^3/((sqrt(2)-5)*p^3+11*p^2-9*p+3)\" --m 1 --v 1 --synthesize-last";

}  // namespace

TEST_CASE("build prints the five-state plan") {
    CliResult r = run_cli("build " + kToy + " --auto-logconcave off");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"d\": 4") != std::string::npos);
    CHECK(r.out.find("\"fine\": true") != std::string::npos);
    CHECK(r.out.find("\"connected\": true") != std::string::npos);
    // five states
    std::size_t count = 0, pos = 0;
    while ((pos = r.out.find("\"R\":", pos)) != std::string::npos) ++count, ++pos;
    CHECK(count == 5);
}

TEST_CASE("malformed expression exits with the parse code") {
    CliResult r = run_cli("build --f \"p0^2/\" --m 1 --v 0");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("offset") != std::string::npos);
}

TEST_CASE("missing configuration exits with the config code") {
    CliResult r = run_cli("sample --die sim:0.5,0.5");
    CHECK(r.exit_code == 2);
}

TEST_CASE("sample output is byte-identical for a fixed seed") {
    std::string args = "sample " + kToy + " --die sim:0.5,0.5 --seed 42 --n 500";
    CliResult a = run_cli(args);
    CliResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CliResult c = run_cli("sample " + kToy + " --die sim:0.5,0.5 --seed 43 --n 500");
    CHECK(c.out != a.out);
}

TEST_CASE("validate reports the truth column and a chi-square") {
    CliResult r =
        run_cli("validate " + kToy + " --die sim:0.5,0.5 --seed 7 --n 2000");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"true\"") != std::string::npos);
    CHECK(r.out.find("\"in_ci\": true") != std::string::npos);
    CHECK(r.out.find("\"p_value\"") != std::string::npos);
}

TEST_CASE("validate refuses an external die") {
    CliResult r = run_cli("validate --ladder \"1:1,0;1:0,1\" --die \"cmd:yes 0\" --n 10");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("simulated die") != std::string::npos);
}

TEST_CASE("sample accepts an external command die") {
    CliResult r =
        run_cli("sample --ladder \"1:1,0;1:0,1\" --m 1 --die \"cmd:yes 0\" --n 5");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"counts\"") != std::string::npos);
}

TEST_CASE("ladder entry accepts constant expressions") {
    CliResult r = run_cli(
        "build --ladder \"sqrt(2):3,0,0;1:2,0,1;0.25:1,2,0;2:1,1,1;0.5:1,0,2;0.75:0,2,1\" "
        "--format table");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("0.727273 p2") != std::string::npos);
    CHECK(r.out.find("0.909091 p0") != std::string::npos);
}

TEST_CASE("bench emits the frozen CSV schema") {
    CliResult r = run_cli("bench " + kToy +
                          " --die sim:0.5,0.5 --seed 3 --adds 0,2 --runs 20 --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("config_hash,augmentations,runs,mean_N,sd_N,mean_uniforms", 0) == 0);
    // one line per cell plus the header
    int lines = 0;
    for (char c : r.out) lines += c == '\n';
    CHECK(lines == 3);
    CliResult again = run_cli("bench " + kToy +
                              " --die sim:0.5,0.5 --seed 3 --adds 0,2 --runs 20 --format csv");
    CHECK(again.out == r.out);
}

TEST_CASE("bounds renders the symmetric-ladder numbers") {
    CliResult r = run_cli("bounds --ladder \"1:2,0;2:1,1;1:0,2\" --at 0.5 --format table");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("rho: 0.5") != std::string::npos);
    CHECK(r.out.find("mean bound: 2") != std::string::npos);
    CHECK(r.out.find("exact E[N] at p=1: 3") != std::string::npos);
}

TEST_CASE("bounds reports inapplicable rho explicitly") {
    CliResult r = run_cli(
        "bounds --ladder \"1:4,0;1000:3,1;1:2,2;500:1,3;1:0,4\" --auto-logconcave off "
        "--at 0.5 --format table");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("not strictly log-concave") != std::string::npos);
}

TEST_CASE("pipeline failures exit with the numeric code") {
    CliResult r = run_cli("build --f \"2*p\" --m 1 --v 1 --synthesize-last");
    CHECK(r.exit_code == 3);
    CHECK(r.out.find("simplex") != std::string::npos);
}

TEST_CASE("build dumps the kernel triplets") {
    CliResult r = run_cli("build --ladder \"1:2,0;2:1,1;1:0,2\"");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"V\"") != std::string::npos);
    CHECK(r.out.find("\"neighbors\"") != std::string::npos);
}

TEST_CASE("nontermination surfaces as the cap exit code") {
    CliResult r = run_cli(
        "sample --ladder \"1:1,0;1:0,1\" --m 1 --die sim:1,0 --strict-randomness --n 1");
    CHECK(r.exit_code == 4);
}

TEST_CASE("trace flag writes a per-iteration CSV") {
    std::string trace = "cli_trace.tmp";
    CliResult r = run_cli("sample " + kToy + " --die sim:0.5,0.5 --seed 5 --n 3 --trace " + trace);
    CHECK(r.exit_code == 0);
    std::ifstream f(trace);
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,B,U,states");
    std::remove(trace.c_str());
}
