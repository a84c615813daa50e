#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hyperion/classical.hpp"
#include "hyperion/errors.hpp"
#include "hyperion/io.hpp"

using namespace hyperion;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "hyperion-unit";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("sha256 of known inputs") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("format_double round-trips") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("CSV round-trip with metadata header") {
    const fs::path p = scratch("rt.csv");
    {
        CsvWriter w(p, "test", {"a", "b"}, {{"beta", "0.05"}});
        w.row({1.0, 0.1});
        w.row({2.0, 1.0 / 3.0});
        w.close();
    }
    const CsvTable t = read_csv(p);
    CHECK(t.kind == "test");
    CHECK(t.version == csv_format_version);
    CHECK(t.meta.at("beta") == "0.05");
    CHECK(t.values("b")[1] == 1.0 / 3.0);
    CHECK_THROWS_AS(t.column("c"), ConfigError);
    std::ofstream(p, std::ios::app) << "3\n";
    CHECK_THROWS_AS(read_csv(p), ConfigError);
}

TEST_CASE("binary snapshots round-trip exactly") {
    ClassicalEnsemble a;
    a.tau = 1.5;
    a.phi = {0.1, -7.0, 3.0};
    a.jz = {10.0, 1.0 / 3.0, -2.0};
    ClassicalEnsemble b = a;
    b.tau = 2.5;
    b.jz[0] = 11.0;
    const std::vector<ClassicalEnsemble> snaps = {a, b};
    const fs::path p = scratch("snap.bin");
    write_classical_snapshots_binary(p, snaps);
    CHECK(fs::file_size(p) == 8 + 8 + 8 + 2 * (8 + 3 * 16));
    const SnapshotFile f = read_classical_snapshots_binary(p);
    REQUIRE(f.tau.size() == 2);
    CHECK(f.tau[1] == 2.5);
    CHECK(f.jz[1][0] == 11.0);
    CHECK(f.jz[0][1] == 1.0 / 3.0);
    CHECK(f.phi[0][1] == wrap_angle(-7.0));

    const fs::path c = scratch("snap.csv");
    write_classical_snapshots_csv(c, snaps);
    const CsvTable t = read_csv(c);
    CHECK(t.rows.size() == 6);
    CHECK(t.values("phi")[1] == doctest::Approx(wrap_angle(-7.0)));
}
