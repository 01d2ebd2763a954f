#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <doctest.h>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    auto p = fs::temp_directory_path() / "nf2-test-cli";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const auto out_path = scratch_dir() / ("out" + std::to_string(counter) + ".txt");
    const auto err_path = scratch_dir() / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string("\"") + NF2_CLI_PATH + "\" " + args + " >" +
                            out_path.string() + " 2>" + err_path.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

std::string path_of(const std::string& name) { return (scratch_dir() / name).string(); }

// One shared pipeline fixture: 1000 generated events ingested at 400/group.
const std::string& fixture_jsonl() {
    static const std::string path = [] {
        const auto p = path_of("events.jsonl");
        auto r = run_cli("gen --events 1000 --seed 5 --out " + p);
        REQUIRE(r.exit_code == 0);
        return p;
    }();
    return path;
}

const std::string& fixture_dataset() {
    static const std::string path = [] {
        const auto p = path_of("events.nf2");
        auto r = run_cli("ingest --in " + fixture_jsonl() + " --out " + p +
                         " --row-group-size 400");
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.out.find("3 row groups") != std::string::npos);
        return p;
    }();
    return path;
}

}  // namespace

TEST_CASE("gen writes the requested number of events") {
    const auto out = path_of("gen0.jsonl");
    auto r = run_cli("gen --events 0 --out " + out);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("0 events") != std::string::npos);
    CHECK(fs::exists(out));
    CHECK(fs::file_size(out) == 0);
}

TEST_CASE("gen is deterministic for a fixed seed") {
    const auto a = path_of("gen_a.jsonl");
    const auto b = path_of("gen_b.jsonl");
    CHECK(run_cli("gen --events 50 --seed 7 --out " + a).exit_code == 0);
    CHECK(run_cli("gen --events 50 --seed 7 --out " + b).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    const auto c = path_of("gen_c.jsonl");
    CHECK(run_cli("gen --events 50 --seed 8 --out " + c).exit_code == 0);
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("help documents the generator defaults") {
    auto r = run_cli("gen --help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("--lambda-jets") != std::string::npos);
    CHECK(r.out.find("6") != std::string::npos);
    CHECK(r.out.find("--seed") != std::string::npos);
}

TEST_CASE("validate accepts the ingested dataset") {
    auto r = run_cli("validate --input " + fixture_dataset());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("ok") != std::string::npos);
}

TEST_CASE("validate rejects a tampered dataset") {
    const auto bad = path_of("tampered.nf2");
    std::string bytes = slurp(fixture_dataset());
    bytes[bytes.size() / 2] = static_cast<char>(bytes[bytes.size() / 2] ^ 0x40);
    {
        std::ofstream out(bad, std::ios::binary);
        out << bytes;
    }
    auto r = run_cli("validate --input " + bad);
    CHECK(r.exit_code == 2);
    CHECK(!r.err.empty());
}

TEST_CASE("run writes a histogram csv and metrics") {
    const auto csv = path_of("q1.csv");
    auto r = run_cli("run --query q1 --input " + fixture_dataset() + " --out " + csv);
    CHECK(r.exit_code == 0);
    const auto text = slurp(csv);
    CHECK(text.rfind("bin_lo,bin_hi,count\n", 0) == 0);
    // Header + underflow + 100 bins + overflow + nan.
    CHECK(std::count(text.begin(), text.end(), '\n') == 104);
    CHECK(r.err.find("wall_s=") != std::string::npos);
    CHECK(r.err.find("events=1000") != std::string::npos);
}

TEST_CASE("run without --out streams the csv to stdout") {
    auto r = run_cli("run --query q2 --input " + fixture_dataset());
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("bin_lo,bin_hi,count\n", 0) == 0);
}

TEST_CASE("thread count does not change the csv") {
    const auto a = path_of("q5_t1.csv");
    const auto b = path_of("q5_t8.csv");
    CHECK(run_cli("run --query q5 --threads 1 --input " + fixture_dataset() + " --out " + a)
              .exit_code == 0);
    CHECK(run_cli("run --query q5 --threads 8 --input " + fixture_dataset() + " --out " + b)
              .exit_code == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("q6 writes both sinks") {
    const auto base = path_of("q6.csv");
    auto r = run_cli("run --query q6 --input " + fixture_dataset() + " --out " + base);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(path_of("q6.q6a.csv")));
    CHECK(fs::exists(path_of("q6.q6b.csv")));
    CHECK(slurp(path_of("q6.q6a.csv")) != slurp(path_of("q6.q6b.csv")));
}

TEST_CASE("histogram flags override the defaults") {
    const auto csv = path_of("q2_custom.csv");
    auto r = run_cli("run --query q2 --lo 0 --hi 100 --bins 10 --input " + fixture_dataset() +
                     " --out " + csv);
    CHECK(r.exit_code == 0);
    const auto text = slurp(csv);
    CHECK(std::count(text.begin(), text.end(), '\n') == 14);

    auto bad = run_cli("run --query q2 --lo 5 --hi 5 --input " + fixture_dataset());
    CHECK(bad.exit_code == 1);
}

TEST_CASE("the oracle agrees on seeded data") {
    auto r = run_cli("run --query q8 --oracle --input " + fixture_dataset());
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("oracle match") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(run_cli("run --query q9 --input " + fixture_dataset()).exit_code == 1);
    CHECK(run_cli("run --input " + fixture_dataset()).exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("bench --input x.nf2 --sf-min -42 --sf-max 0 --report r.csv").exit_code == 1);
}

TEST_CASE("data errors exit with 2") {
    CHECK(run_cli("run --query q1 --input " + path_of("nope.nf2")).exit_code == 2);
    const auto broken = path_of("broken.jsonl");
    {
        std::ofstream out(broken, std::ios::binary);
        out << "{not json\n";
    }
    auto r = run_cli("ingest --in " + broken + " --out " + path_of("broken.nf2"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("line 1") != std::string::npos);
}

TEST_CASE("bench writes the report and prints medians") {
    const auto report = path_of("bench.csv");
    auto r = run_cli("bench --queries q1,q3 --input " + fixture_dataset() +
                     " --sf-min -1 --sf-max 0 --repeats 3 --report " + report);
    CHECK(r.exit_code == 0);
    const auto text = slurp(report);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "query,sf,threads,repeat,wall_s,cpu_s,bytes_scanned,events,events_per_s");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2 * 2 * 3);
    CHECK(r.out.find("median_wall_s=") != std::string::npos);
    CHECK(r.out.find("q3") != std::string::npos);

    CHECK(run_cli("bench --queries q1,qx --input " + fixture_dataset() +
                  " --report " + report)
              .exit_code == 1);
}
