#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli/cli.hpp"

namespace fs = std::filesystem;
using nuhlab::cli::dispatch;

namespace {

const std::string kConfigs = std::string(NUHLAB_SOURCE_DIR) + "/configs/";

struct Outcome {
    int code = 0;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "nuhlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nuhlab-it-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
    return out;
}

// Small three-disc table without the horizon probe so the runs stay quick.
fs::path small_table() {
    const fs::path dir = scratch("tables");
    std::ofstream(dir / "three.toml") << "lattice = \"hexagonal-three-site\"\n"
                                         "coordinates = \"lattice\"\n"
                                         "discs = [[0, 0, 0.3], [0.6666666666666666, -0.3333333333333333, 0.3],\n"
                                         "         [0.3333333333333333, 0.3333333333333333, 0.3]]\n"
                                         "tau_max = 0.55\n"
                                         "seed = 3\n";
    return dir / "three.toml";
}

std::vector<std::vector<std::string>> all_subcommands(const std::string& table) {
    const std::string acs = kConfigs + "acs.toml";
    return {
        {"lyapunov", "--map", kConfigs + "linear.toml", "--steps", "2000"},
        {"lyapunov", "--table", table, "--steps", "3000"},
        {"lyapunov", "--map", kConfigs + "viana.toml", "--steps", "3000"},
        {"preimage-condition", "--map", acs, "--N", "2", "--grid", "4", "--directions", "4"},
        {"angle-tail", "--map", acs, "--samples", "800", "--depth", "25", "--set", "bootstrap=50"},
        {"moment-check", "--map", acs, "--set", "N_list=[2, 3]"},
        {"hyperbolic-times", "--map", acs, "--samples", "400", "--depth", "20"},
        {"billiard-run", "--table", table, "--steps", "2000"},
        {"billiard-orbits", "--table", table, "--max-period", "3"},
        {"mme-report", "--table", table, "--max-period", "3"},
        {"pressure-check", "--table", table, "--steps", "100000"},
        {"pliss", "--map", acs, "--set", "length=40", "--set", "samples=200"},
        {"tms", "--ladder", "renewal", "--levels", "6"},
        {"tms", "--graph", kConfigs + "golden.edges"},
        {"validate-acs", "--map", acs, "--N", "2", "--grid", "4", "--set", "steps=20000"},
    };
}

std::vector<std::string> with_out(std::vector<std::string> args, const fs::path& dir, int workers) {
    args.insert(args.begin(), {"--out-dir", dir.string(), "--workers", std::to_string(workers)});
    return args;
}

}  // namespace

TEST_CASE("every subcommand is byte-identical across reruns and worker counts") {
    const auto table = small_table().string();
    int idx = 0;
    for (const auto& args : all_subcommands(table)) {
        CAPTURE(args[0]);
        const auto a = scratch("a" + std::to_string(idx)), b = scratch("b" + std::to_string(idx)),
                   c = scratch("c" + std::to_string(idx));
        ++idx;
        const auto ra = run(with_out(args, a, 1));
        REQUIRE_MESSAGE(ra.code == 0, ra.err);
        REQUIRE(run(with_out(args, b, 1)).code == 0);
        REQUIRE(run(with_out(args, c, 8)).code == 0);
        const auto da = directory_bytes(a);
        CHECK(da.size() >= 2);
        CHECK(da == directory_bytes(b));
        CHECK(da == directory_bytes(c));
    }
}

TEST_CASE("seed flag changes sampled output and is echoed") {
    const std::string acs = kConfigs + "acs.toml";
    const auto a = scratch("seed-a"), b = scratch("seed-b");
    const std::vector<std::string> args{"hyperbolic-times", "--map", acs, "--samples", "300", "--depth", "15"};
    auto aa = args, bb = args;
    aa.insert(aa.begin(), {"--out-dir", a.string(), "--seed", "5"});
    bb.insert(bb.begin(), {"--out-dir", b.string(), "--seed", "6"});
    REQUIRE(run(aa).code == 0);
    REQUIRE(run(bb).code == 0);
    const auto ja = nuhlab::cli::Json::parse(slurp(a / "hyperbolic-times.json"));
    CHECK(ja["seed"] == 5);
    CHECK(ja["config"]["seed"] == 5);
    CHECK(slurp(a / "hyperbolic-times.csv") != slurp(b / "hyperbolic-times.csv"));
}

TEST_CASE("exit codes") {
    const auto dir = scratch("codes");
    const std::string out = dir.string();
    CHECK(run({"--out-dir", out, "lyapunov", "--map", kConfigs + "missing.toml"}).code == 2);
    CHECK(run({"--out-dir", out, "no-such-command"}).code == 2);
    CHECK(run({"--out-dir", out, "tms"}).code == 2);
    CHECK(run({"--out-dir", out, "--workers", "0", "tms", "--ladder", "full"}).code == 2);
    CHECK(run({"--out-dir", out, "lyapunov", "--map", kConfigs + "linear.toml", "--set", "bogus=1"}).code == 2);
    CHECK(run({"--out-dir", out, "lyapunov", "--map", kConfigs + "linear.toml", "--steps", "10"}).code == 2);
    CHECK(run({"--out-dir", out, "tms", "--ladder", "zigzag"}).code == 2);
    CHECK(run({"--out-dir", out, "billiard-orbits", "--table", kConfigs + "two-disc.toml", "--max-period", "9"}).code == 2);

    const auto fail = run({"--out-dir", out, "billiard-run", "--table", kConfigs + "two-disc.toml", "--steps", "1000"});
    CHECK(fail.code == 1);
    CHECK(fail.err.find("HorizonExceeded") != std::string::npos);

    const auto ok = run({"--out-dir", out, "tms", "--ladder", "full", "--levels", "3"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("tms") != std::string::npos);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("plot data") {
    const std::string acs = kConfigs + "acs.toml";
    const auto dir = scratch("plots");
    REQUIRE(run({"--out-dir", dir.string(), "angle-tail", "--map", acs, "--samples", "800", "--depth", "25"}).code == 0);
    {
        std::ifstream in(dir / "angle-tail.dat");
        std::string header;
        std::getline(in, header);
        CHECK(header.rfind("#", 0) == 0);
        double x, y, prev_x = -1e300, prev_y = -1e300;
        int n = 0;
        while (in >> x >> y) {
            CHECK(x > prev_x);
            CHECK(y >= prev_y);
            prev_x = x;
            prev_y = y;
            ++n;
        }
        CHECK(n >= 5);  // eta values with an empty CDF are omitted
        CHECK(prev_y == doctest::Approx(0.0));  // log CDF at pi/2
    }

    REQUIRE(run({"--out-dir", dir.string(), "tms", "--ladder", "renewal", "--levels", "8"}).code == 0);
    {
        std::ifstream in(dir / "tms-ladder.dat");
        std::string header;
        std::getline(in, header);
        double level, h, prev = -1.0;
        int n = 0;
        while (in >> level >> h) {
            CHECK(h >= prev);
            prev = h;
            ++n;
        }
        CHECK(n == 8);
    }

    // a graph without cycles: header only
    std::ofstream(dir / "dag.edges") << "0 1\n1 2\n";
    const auto r = run({"--out-dir", dir.string(), "tms", "--graph", (dir / "dag.edges").string()});
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "tms.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].rfind("# ", 0) == 0);
    CHECK(lines[1] == "component,vertex,cyclic_class,stationary,right_vector");
}

TEST_CASE("timing is opt-in") {
    const auto a = scratch("timing");
    REQUIRE(run({"--out-dir", a.string(), "tms", "--ladder", "full", "--levels", "2"}).code == 0);
    CHECK(slurp(a / "tms.json").find("wall_time") == std::string::npos);
    REQUIRE(run({"--out-dir", a.string(), "--record-timing", "tms", "--ladder", "full", "--levels", "2"}).code == 0);
    CHECK(slurp(a / "tms.json").find("wall_time") != std::string::npos);
}
