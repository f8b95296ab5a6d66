// Drives the installed CLI binary itself: subcommand wiring, exit codes and
// on-disk artifacts. The binary path comes in via SFSCSF_CLI_PATH.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "sfscsf/tensor_io.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("sfscsf_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run(const std::string& args) {
    const std::string cmd =
        std::string(SFSCSF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("gen/encode/verify/simulate/sweep/decode succeed end to end") {
    TempDir tmp;
    const std::string net = (tmp.path / "net").string();
    const std::string csf = (tmp.path / "csf").string();
    const std::string manifest = net + "/manifest.json";

    CHECK(run("gen --out " + net + " --seed 11 --sparsity 0.7 --layers 2") == 0);
    CHECK(run("encode --manifest " + manifest + " --out " + csf) == 0);
    CHECK(run("verify --manifest " + manifest + " --out " + csf + " --seed 4") == 0);
    CHECK(run("verify --manifest " + manifest + " --out " + csf + " --mode real") == 0);
    CHECK(run("--format text simulate --manifest " + manifest + " --out " + csf) == 0);
    CHECK(run("sweep --manifest " + manifest + " --batch-sizes 1,2,4") == 0);
    CHECK(run("decode --manifest " + manifest + " --out " + csf) == 0);

    // decoded tensors are byte-identical to the originals
    for (const char* layer : {"layer0", "layer1"}) {
        const auto original = sfs::read_binary_file(net + "/" + layer + ".sfst");
        const auto decoded =
            sfs::read_binary_file(csf + "/" + layer + ".decoded.sfst");
        CHECK(original == decoded);
    }
}

TEST_CASE("exit code 2 on input errors") {
    TempDir tmp;
    CHECK(run("encode --manifest " + (tmp.path / "missing.json").string()) == 2);

    std::ofstream(tmp.path / "bad.json") << "{\"layers\": []}";
    CHECK(run("encode --manifest " + (tmp.path / "bad.json").string()) == 2);

    const std::string net = (tmp.path / "net").string();
    CHECK(run("gen --out " + net + " --seed 1") == 0);
    CHECK(run("sweep --manifest " + net + "/manifest.json --batch-sizes 5") == 2);
}

TEST_CASE("exit code 1 on verification failure") {
    TempDir tmp;
    const std::string net = (tmp.path / "net").string();
    const std::string csf = (tmp.path / "csf").string();
    CHECK(run("gen --out " + net + " --seed 21 --sparsity 0.6") == 0);
    CHECK(run("encode --manifest " + net + "/manifest.json --out " + csf) == 0);

    // swap the encoded weights of the two layer0 groups
    const auto g0 = fs::path(csf) / "layer0_g0.csf";
    const auto g1 = fs::path(csf) / "layer0_g1.csf";
    const auto b0 = sfs::read_binary_file(g0);
    const auto b1 = sfs::read_binary_file(g1);
    REQUIRE(b0 != b1);
    sfs::write_binary_file(g0, b1);
    sfs::write_binary_file(g1, b0);

    const int rc = run("verify --manifest " + net + "/manifest.json --out " + csf);
    CHECK((rc == 1 || rc == 2));
}
