#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "test_support.hpp"
#include "torsplit/reports.hpp"
#include "torsplit/snapshot.hpp"

using namespace torsplit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / fs::path("torsplit_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("snapshot write then read is lossless", "[io][snapshot]") {
    TempDir tmp;
    GridSpec g(2, 16);
    RealField u = random_band_limited_field(g, 19, 2.0);
    u.values[7] = 0.1 + 0.2;  // a value with a non-terminating binary tail
    write_snapshot(tmp.file("u.bin"), u, 0.375);
    Snapshot s = read_snapshot(tmp.file("u.bin"));
    REQUIRE(s.time == 0.375);
    REQUIRE(s.field.grid == g);
    REQUIRE(s.field.values == u.values);  // bit-exact
}

TEST_CASE("snapshot header is fixed at 32 bytes with the magic up front", "[io][snapshot]") {
    TempDir tmp;
    GridSpec g(1, 8);
    RealField u(g);
    write_snapshot(tmp.file("u.bin"), u, 1.5);
    const std::string bytes = slurp(tmp.file("u.bin"));
    REQUIRE(bytes.size() == 32 + 8 * 8);
    REQUIRE(bytes.substr(0, 8) == std::string(snapshot_magic, 8));
}

TEST_CASE("snapshot reader rejects corrupted input", "[io][snapshot]") {
    TempDir tmp;
    GridSpec g(1, 8);
    write_snapshot(tmp.file("u.bin"), RealField(g), 0.0);
    std::string bytes = slurp(tmp.file("u.bin"));

    std::ofstream(tmp.file("magic.bin"), std::ios::binary) << ("XXXXXXXX" + bytes.substr(8));
    REQUIRE_THROWS_WITH(read_snapshot(tmp.file("magic.bin")), Catch::Matchers::ContainsSubstring("magic"));

    std::ofstream(tmp.file("short.bin"), std::ios::binary) << bytes.substr(0, 40);
    REQUIRE_THROWS_WITH(read_snapshot(tmp.file("short.bin")), Catch::Matchers::ContainsSubstring("size"));
}

TEST_CASE("study csv schema and round trip", "[io][csv]") {
    TempDir tmp;
    ConvergenceReport rep;
    rep.preset = "kdv";
    rep.method = SplitMethod::strang;
    rep.norm_index = 0.0;
    rep.fitted_rate = 1.9871234567890123;
    rep.fit_residual = 0.0123456789012345678;
    rep.ref_certificate = 3.3306690738754696e-16;
    for (int j = 0; j < 3; ++j) {
        RateRow row;
        row.dt = 0.1 / std::pow(2.0, j);
        row.error = 0.017 * std::pow(row.dt, 2.0002);
        rep.rows.push_back(row);
    }
    write_study_csv(tmp.file("study.csv"), rep);

    SECTION("three rows make a four-line file with the pinned header") {
        const std::string bytes = slurp(tmp.file("study.csv"));
        REQUIRE(std::count(bytes.begin(), bytes.end(), '\n') == 4);
        REQUIRE(bytes.rfind(study_csv_header, 0) == 0);
        REQUIRE(bytes.find('\r') == std::string::npos);  // LF endings only
    }
    SECTION("re-parsing recovers every number bit-exactly via 17 digits") {
        auto rows = read_study_csv(tmp.file("study.csv"));
        REQUIRE(rows.size() == 3);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            REQUIRE(rows[i].dt == rep.rows[i].dt);
            REQUIRE(rows[i].error == rep.rows[i].error);
            REQUIRE(rows[i].fit_rate == rep.fitted_rate);
            REQUIRE(rows[i].fit_residual == rep.fit_residual);
            REQUIRE(rows[i].ref_certificate == rep.ref_certificate);
            REQUIRE(rows[i].method == "strang");
            REQUIRE(rows[i].preset == "kdv");
        }
    }
    SECTION("writing the same report twice is byte-identical") {
        write_study_csv(tmp.file("again.csv"), rep);
        REQUIRE(slurp(tmp.file("study.csv")) == slurp(tmp.file("again.csv")));
    }
}

TEST_CASE("17 significant digits round-trip random doubles", "[io][csv][property]") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        const double mantissa = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const int exp = static_cast<int>(rng() % 41) - 20;
        const double v = (mantissa - 0.5) * std::pow(10.0, exp);
        const std::string s = format_g17(v);
        REQUIRE(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("diagnostics csv mirrors the trajectory", "[io][csv]") {
    TempDir tmp;
    GridSpec g(1, 64);
    SplitConfig cfg;
    cfg.method = SplitMethod::strang;
    cfg.dt = 0.05;
    cfg.horizon = 0.2;
    Preset p = preset_viscous_burgers(2.0);
    cfg.a = p.a;
    cfg.v = p.v;
    cfg.record_every = 1;
    Trajectory traj = evolve(ts_test::spectral_sin_x(64), cfg);
    write_diagnostics_csv(tmp.file("diag.csv"), traj);
    const std::string bytes = slurp(tmp.file("diag.csv"));
    REQUIRE(std::count(bytes.begin(), bytes.end(), '\n') == 1 + static_cast<long>(traj.times.size()));
    REQUIRE(bytes.rfind("time,mass,l2,h4\n", 0) == 0);
}

TEST_CASE("admissibility csv carries the audit", "[io][csv]") {
    TempDir tmp;
    GridSpec g(1, 64);
    AdmissibilityReport rep = check_admissibility(preset_kdv().a, preset_kdv().v, g, 5, 1);
    write_admissibility_csv(tmp.file("admit.csv"), rep, "kdv", g);
    const std::string bytes = slurp(tmp.file("admit.csv"));
    REQUIRE(bytes.find("classification,dispersive") != std::string::npos);
    REQUIRE(bytes.find("energy_branch,conservative") != std::string::npos);
    REQUIRE(bytes.find("ok,true") != std::string::npos);
}
