#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("NCHMM_CLI");
    REQUIRE_MESSAGE(env != nullptr, "NCHMM_CLI must point at the CLI binary");
    return env;
}

struct CommandResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args, const fs::path& workdir) {
    const fs::path log = workdir / "cmd.log";
    const std::string cmd = cli_path() + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    int code = -1;
    if (status != -1 && WIFEXITED(status)) code = WEXITSTATUS(status);
    return {code, ss.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nchmm_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

TEST_CASE("run: produces report, tensors, and solution artifacts") {
    const fs::path dir = fresh_dir("run");
    const auto res = run_cli(
        "run --example peri-diag --H 1/4 --micro-n 4 --memoize --out " + dir.string(), dir);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("err_h1_broken=") != std::string::npos);
    REQUIRE(fs::exists(dir / "report.csv"));
    REQUIRE(fs::exists(dir / "tensors.csv"));
    CHECK(fs::exists(dir / "solution.svg"));

    std::ifstream report(dir / "report.csv");
    std::string header, row;
    REQUIRE(std::getline(report, header));
    CHECK(header ==
          "H,h_over_eps,delta,coupling,err_h1_broken,err_l2,tensor_err_fro,"
          "micro_cg_iters_total,macro_cg_iters");
    REQUIRE(std::getline(report, row));
    const auto fields = split(row, ',');
    REQUIRE(fields.size() == 9);
    CHECK(std::stod(fields[0]) == doctest::Approx(0.25));
    CHECK(fields[3] == "periodic");
    CHECK(std::stod(fields[4]) > 0.0);

    // tensors.csv: 4 quadrature rows per element, 16 elements
    std::ifstream tensors(dir / "tensors.csv");
    std::string line;
    int rows = -1;  // header
    while (std::getline(tensors, line)) ++rows;
    CHECK(rows == 64);
}

TEST_CASE("run: numbers round-trip bit-exactly through the CSV") {
    const fs::path dir = fresh_dir("roundtrip");
    REQUIRE(run_cli("run --example peri-diag --H 1/4 --micro-n 4 --memoize --no-svg --out " +
                        dir.string(),
                    dir)
                .exit_code == 0);
    std::ifstream report(dir / "report.csv");
    std::string header, row;
    REQUIRE(std::getline(report, header));
    REQUIRE(std::getline(report, row));
    for (const std::string& cell : split(row, ',')) {
        if (cell == "periodic" || cell == "dirichlet") continue;
        if (cell.find('.') == std::string::npos && cell.find('e') == std::string::npos)
            continue;  // integer counters
        const double v = std::stod(cell);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        CHECK(cell == buf);
    }
}

TEST_CASE("run: repeated invocations are byte-identical") {
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    const std::string args = "run --example peri-offdiag --H 1/4 --micro-n 4 --memoize --out ";
    REQUIRE(run_cli(args + a.string(), a).exit_code == 0);
    REQUIRE(run_cli(args + b.string(), b).exit_code == 0);
    CHECK(read_file(a / "report.csv") == read_file(b / "report.csv"));
    CHECK(read_file(a / "tensors.csv") == read_file(b / "tensors.csv"));
    CHECK(read_file(a / "solution.svg") == read_file(b / "solution.svg"));
}

TEST_CASE("run: works on the degenerate 1x1 micro mesh") {
    const fs::path dir = fresh_dir("n1");
    const auto res = run_cli(
        "run --example peri-diag --H 1/2 --micro-n 1 --no-svg --out " + dir.string(), dir);
    CHECK(res.exit_code == 0);
}

TEST_CASE("usage errors exit with code 2") {
    const fs::path dir = fresh_dir("usage");
    CHECK(run_cli("run --example peri-diag --micro-n 4", dir).exit_code == 2);  // missing --H
    CHECK(run_cli("run --example nope --H 1/4 --micro-n 4", dir).exit_code == 2);
    CHECK(run_cli("run --example peri-diag --H 0.3 --micro-n 4", dir).exit_code == 2);
    CHECK(run_cli("run --example peri-diag --H 1/4 --micro-n 4 --delta banana", dir).exit_code ==
          2);
    CHECK(run_cli("run --example peri-diag --H 1/4 --H 1/8 --micro-n 4 --out " + dir.string(),
                  dir)
              .exit_code == 2);  // run takes exactly one H
    CHECK(run_cli("micro --example peri-diag --micro-n 64", dir).exit_code == 2);
    CHECK(run_cli("", dir).exit_code == 2);  // subcommand required
}

TEST_CASE("sweep: writes report and rates; partial failure keeps exit 0") {
    const fs::path dir = fresh_dir("sweep");
    const auto res = run_cli("sweep --example peri-diag --H 1/2 --H 1/4 --micro-n 4 --memoize "
                             "--no-svg --out " +
                                 dir.string(),
                             dir);
    CHECK(res.exit_code == 0);
    REQUIRE(fs::exists(dir / "report.csv"));
    REQUIRE(fs::exists(dir / "rates.csv"));
    std::ifstream rates(dir / "rates.csv");
    std::string header, row;
    REQUIRE(std::getline(rates, header));
    CHECK(header == "quantity,delta,micro_n,H_den,from,to,rate");
    REQUIRE(std::getline(rates, row));  // one H-doubling pair exists
    CHECK(row.rfind("err_h1_broken,", 0) == 0);
}

TEST_CASE("micro: prints both solver paths and their difference") {
    const fs::path dir = fresh_dir("micro");
    const auto res = run_cli("micro --example peri-diag --micro-n 4 --out " + dir.string(), dir);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("iterative system: dimension 16") != std::string::npos);
    CHECK(res.output.find("iterative tensor:") != std::string::npos);
    CHECK(res.output.find("dense tensor:") != std::string::npos);
    CHECK(res.output.find("frobenius difference:") != std::string::npos);
}

TEST_CASE("config file: values are read, command-line flags win") {
    const fs::path dir = fresh_dir("config");
    {
        std::ofstream cfg(dir / "nchmm.ini");
        cfg << "[run]\n"
            << "example=peri-diag\n"
            << "H=1/2\n"
            << "micro-n=4\n"
            << "memoize=true\n"
            << "no-svg=true\n"
            << "out=" << (dir / "from_config").string() << "\n";
    }
    const auto res = run_cli("--config " + (dir / "nchmm.ini").string() + " run", dir);
    CHECK(res.exit_code == 0);
    REQUIRE(fs::exists(dir / "from_config" / "report.csv"));

    // the same config with --H on the command line overrides H=1/2
    const auto res2 = run_cli("--config " + (dir / "nchmm.ini").string() + " run --H 1/4 --out " +
                                  (dir / "override").string(),
                              dir);
    CHECK(res2.exit_code == 0);
    std::ifstream report(dir / "override" / "report.csv");
    std::string header, row;
    REQUIRE(std::getline(report, header));
    REQUIRE(std::getline(report, row));
    CHECK(std::stod(split(row, ',')[0]) == doctest::Approx(0.25));
}
