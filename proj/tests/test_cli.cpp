#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "nrsim/io.hpp"
#include "support.hpp"

using namespace nrsim;
using namespace nrsim::testing;
namespace fs = std::filesystem;

namespace
{
int cli(std::string const& args, fs::path const& log)
{
    std::string cmd = std::string(NRSIM_CLI) + " " + args + " > " + log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string fx(std::string const& name)
{
    return fixture_path(name).string();
}

void check_same_tree(fs::path const& a, fs::path const& b)
{
    std::size_t files = 0;
    for (auto const& entry : fs::directory_iterator(a))
    {
        auto name = entry.path().filename();
        INFO(name.string());
        REQUIRE(fs::exists(b / name));
        CHECK(read_file(entry.path()) == read_file(b / name));
        ++files;
    }
    CHECK(files == static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator{})));
}
}  // namespace

TEST_CASE("validate exit codes")
{
    auto dir = scratch_dir("validate");
    CHECK(cli("validate " + fx("two_level"), dir / "a.log") == 0);
    CHECK(read_file(dir / "a.log") == "valid\n");
    CHECK(cli("validate " + fx("overlapping"), dir / "b.log") == 1);
    CHECK(read_file(dir / "b.log").find("components overlap") != std::string::npos);
    CHECK(cli("validate " + (dir / "missing.json").string(), dir / "c.log") == 2);
}

TEST_CASE("usage errors exit 2")
{
    auto dir = scratch_dir("usage");
    CHECK(cli("run", dir / "a.log") == 2);
    CHECK(cli("run --scenario " + fx("two_level") + " --suspend n3_1 --out-dir " + (dir / "o").string(),
              dir / "b.log")
          == 2);
    CHECK(cli("run --scenario " + fx("two_level") + " --dt -1 --out-dir " + (dir / "o").string(), dir / "c.log")
          == 2);
    CHECK(cli("frobnicate", dir / "d.log") == 2);
    CHECK(cli("run --scenario " + fx("overlapping") + " --out-dir " + (dir / "o").string(), dir / "e.log") == 1);
}

TEST_CASE("run twice gives byte-identical outputs")
{
    auto dir = scratch_dir("run");
    auto args = "run --scenario " + fx("three_mode") + " --seed 11 --sample-every 10 --out-dir ";
    REQUIRE(cli(args + (dir / "a").string(), dir / "a.log") == 0);
    REQUIRE(cli(args + (dir / "b").string(), dir / "b.log") == 0);
    check_same_tree(dir / "a", dir / "b");

    auto manifest = nlohmann::json::parse(read_file(dir / "a" / "manifest.json"));
    CHECK(manifest.at("scenario").at("sha256") == sha256_hex(read_file(fx("three_mode"))));
    CHECK(manifest.at("seed") == 11);
    CHECK(manifest.at("outputs").size() == 3);

    REQUIRE(cli("rerun --manifest " + (dir / "a" / "manifest.json").string() + " --out-dir "
                    + (dir / "c").string(),
                dir / "c.log")
            == 0);
    check_same_tree(dir / "a", dir / "c");
}

TEST_CASE("ensemble output is independent of the worker count")
{
    auto dir = scratch_dir("ensemble");
    auto args = "ensemble --scenario " + fx("three_mode") + " --n 400 --seed 3 --out-dir ";
    REQUIRE(cli(args + (dir / "one").string() + " --workers 1", dir / "a.log") == 0);
    REQUIRE(cli(args + (dir / "eight").string() + " --workers 8", dir / "b.log") == 0);
    check_same_tree(dir / "one", dir / "eight");
}

TEST_CASE("currents in hermitian mode follow sin(2t)")
{
    auto dir = scratch_dir("currents");
    REQUIRE(cli("currents --scenario " + fx("two_level") + " --gap-mode hermitian --t-max 3 --out-dir "
                    + dir.string(),
                dir / "a.log")
            == 0);
    std::ifstream in(dir / "currents.csv");
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "t,epoch,s,sq_C0,sq_C1,J_C1");
    std::size_t rows = 0;
    double worst = 0;
    while (std::getline(in, line))
    {
        std::istringstream row(line);
        std::vector<double> v;
        std::string cell;
        while (std::getline(row, cell, ','))
            v.push_back(std::stod(cell));
        REQUIRE(v.size() == 6);
        worst = std::max(worst, std::abs(v[5] - std::sin(2 * v[0])));
        ++rows;
    }
    CHECK(rows == 3001);
    CHECK(worst < 1e-6);
}

TEST_CASE("arrow command")
{
    auto dir = scratch_dir("arrow");
    CHECK(cli("arrow --scenario " + fx("two_level") + " --direction reverse --out-dir " + dir.string(),
              dir / "a.log")
          == 0);
    auto rep = nlohmann::json::parse(read_file(dir / "arrow_report.json"));
    REQUIRE(rep.at("checks").size() == 1);
    CHECK(rep.at("checks")[0].at("report").at("verdict") == "blocked");
    CHECK(rep.at("all_ok") == true);

    CHECK(cli("arrow --scenario " + fx("three_mode") + " --out-dir " + dir.string(), dir / "b.log") == 0);
    CHECK(cli("arrow --scenario " + fx("two_level") + " --rules nrules4 --out-dir " + dir.string(), dir / "c.log")
          == 0);
}
