#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "nsebox/initial_conditions.hpp"
#include "nsebox/run_config.hpp"
#include "nsebox/snapshot_io.hpp"
#include "oracle_helpers.hpp"

using namespace nsebox;
using namespace nsebox::test;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nsebox-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Snapshot random_snapshot(const Grid& g, std::uint64_t seed, double t) {
    Snapshot s;
    s.t = t;
    s.u = init_random_solenoidal(g, seed, 2.0, 2.5);
    return s;
}

}  // namespace

TEST_CASE("snapshot round trip is bit-identical and the size contract holds") {
    TempDir dir;
    const Grid g(16);
    const Snapshot s = random_snapshot(g, 99, 0.375);
    const fs::path file = dir.path / "snap.nsef";
    write_snapshot(s, file);

    CHECK(fs::file_size(file) == 32 + 24 * std::size_t(g.n) * g.n * g.n);

    const Snapshot r = read_snapshot(file);
    CHECK(r.t == s.t);
    CHECK(r.u.grid.n == g.n);
    CHECK(r.u.grid.box_length == g.box_length);
    CHECK(r.u.grid.nu == g.nu);
    for (int a = 0; a < 3; ++a)
        CHECK(std::memcmp(r.u.comp[a].data(), s.u.comp[a].data(),
                          s.u.comp[a].size() * sizeof(double)) == 0);
}

TEST_CASE("n=32 snapshot file is exactly 786,464 bytes") {
    TempDir dir;
    const Grid g(32);
    Snapshot s;
    s.t = 0.0;
    s.u = VectorField(g);
    const fs::path file = dir.path / "snap32.nsef";
    write_snapshot(s, file);
    CHECK(fs::file_size(file) == 786464);
}

TEST_CASE("snapshot reader distinguishes corruption kinds") {
    TempDir dir;
    const Grid g(8);
    const Snapshot s = random_snapshot(g, 3, 0.0);
    const fs::path file = dir.path / "snap.nsef";
    write_snapshot(s, file);

    {
        // truncate by one byte
        const fs::path trunc = dir.path / "trunc.nsef";
        fs::copy_file(file, trunc);
        fs::resize_file(trunc, fs::file_size(trunc) - 1);
        try {
            (void)read_snapshot(trunc);
            FAIL("expected truncation error");
        } catch (const SnapshotIoError& e) {
            CHECK(e.kind == SnapshotIoError::Kind::truncated);
        }
    }
    {
        const fs::path bad = dir.path / "bad.nsef";
        fs::copy_file(file, bad);
        std::fstream f(bad, std::ios::in | std::ios::out | std::ios::binary);
        f.write("XXXX", 4);
        f.close();
        try {
            (void)read_snapshot(bad);
            FAIL("expected bad-magic error");
        } catch (const SnapshotIoError& e) {
            CHECK(e.kind == SnapshotIoError::Kind::bad_magic);
        }
    }
    {
        const fs::path vers = dir.path / "vers.nsef";
        fs::copy_file(file, vers);
        std::fstream f(vers, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);
        const char v2[2] = {2, 0};
        f.write(v2, 2);
        f.close();
        try {
            (void)read_snapshot(vers);
            FAIL("expected version error");
        } catch (const SnapshotIoError& e) {
            CHECK(e.kind == SnapshotIoError::Kind::version_mismatch);
        }
    }
    CHECK_THROWS_AS((void)read_snapshot(dir.path / "missing.nsef"), SnapshotIoError);
}

TEST_CASE("manifest round trip and gap rejection") {
    TempDir dir;
    const Grid g(8);
    RunManifest m;
    m.grid = g;
    m.dt = 1e-3;
    m.snapshot_interval = 1e-2;
    for (int i = 0; i <= 4; ++i) {
        const Snapshot s = random_snapshot(g, 10 + i, 1e-2 * i);
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%06d.nsef", i);
        write_snapshot(s, dir.path / name);
        m.times.push_back(s.t);
        m.files.push_back(name);
    }
    write_manifest(m, dir.path);

    const RunDirectoryProvider provider(dir.path);
    CHECK(provider.size() == 5);
    CHECK(provider.time(3) == doctest::Approx(0.03));
    const Snapshot s2 = provider.load(2);
    CHECK(s2.t == doctest::Approx(0.02));

    // remove a middle snapshot line: spacing check must refuse the manifest
    RunManifest gap = m;
    gap.times.erase(gap.times.begin() + 2);
    gap.files.erase(gap.files.begin() + 2);
    write_manifest(gap, dir.path);
    CHECK_THROWS_AS(RunDirectoryProvider{dir.path}, SnapshotIoError);

    // missing file is refused even when the manifest is intact
    write_manifest(m, dir.path);
    fs::remove(dir.path / "snap_000002.nsef");
    CHECK_THROWS_AS(RunDirectoryProvider{dir.path}, SnapshotIoError);
}

TEST_CASE("config: minimal input fills documented defaults") {
    const RunConfig cfg = parse_config("ic.type = abc\nsolver.t_end = 0.1\n");
    CHECK(cfg.solver.grid.nu == 1.0);
    CHECK(cfg.solver.grid.box_length == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(cfg.solver.grid.n == 32);
    CHECK(cfg.delta == 0.5);
    CHECK(cfg.M == 1.0);
    CHECK(cfg.solver.scheme == TimeScheme::rk4_integrating_factor);
    CHECK(cfg.ic.type == IcType::abc);
}

TEST_CASE("config: comments, whitespace, and full key coverage") {
    const std::string text =
        "# experiment\n"
        "solver.n = 64\n"
        "solver.dt = 0.004        # step\n"
        "solver.t_end = 0.72\n"
        "solver.snapshot_interval = 0.004\n"
        "solver.scheme = rk4-plain\n"
        "solver.nu = 2.0\n"
        "solver.box_length = 6.283185307179586\n"
        "ic.type = random\n"
        "ic.seed = 7\n"
        "ic.slope = 2.0\n"
        "ic.k_peak = 2.5\n"
        "cylinder.0 = 3.14 3.14 3.14 0.72 0.4\n"
        "cylinder.1 = 2.0 2.0 2.0 0.72 0.5\n"
        "M = 0.75\n"
        "delta = 0.4\n"
        "eps_reg = 1e-13\n"
        "output_dir = /tmp/run\n";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.solver.grid.n == 64);
    CHECK(cfg.solver.grid.nu == 2.0);
    CHECK(cfg.solver.scheme == TimeScheme::rk4_plain);
    CHECK(cfg.ic.type == IcType::random);
    CHECK(cfg.ic.seed == 7);
    REQUIRE(cfg.cylinders.size() == 2);
    CHECK(cfg.cylinders[1].r == 0.5);
    CHECK(cfg.M == 0.75);
    CHECK(cfg.output_dir == "/tmp/run");
}

TEST_CASE("config: line-numbered rejection of malformed input") {
    auto expect_error_at = [](const std::string& text, int line) {
        try {
            (void)parse_config(text);
            FAIL("expected ConfigError for ", text);
        } catch (const ConfigError& e) {
            CHECK(e.line == line);
        }
    };
    expect_error_at("ic.type = abc\nsolver.t_end = 0.1\nsolver.n = 7\n", 3);
    expect_error_at("ic.type = abc\nsolver.t_end = 0.1\nwhatever = 1\n", 3);
    expect_error_at("ic.type = abc\nsolver.t_end = oops\n", 2);
    expect_error_at("ic.type = abc\nsolver.t_end = 0.1\nbroken line\n", 3);
    // cylinder too large for the box: 4r >= box_length/2
    expect_error_at(
        "ic.type = abc\nsolver.t_end = 0.1\ncylinder.0 = 3.1 3.1 3.1 0.1 0.8\n", 3);
    // missing required keys reported at end of input
    CHECK_THROWS_AS((void)parse_config("solver.t_end = 0.1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("ic.type = abc\n"), ConfigError);
    // non-contiguous cylinder indices
    CHECK_THROWS_AS(
        (void)parse_config("ic.type = abc\nsolver.t_end = 0.1\ncylinder.1 = 3 3 3 1 0.5\n"),
        ConfigError);
}

TEST_CASE("config: epsilon below zero rejected for perturbed-beltrami") {
    CHECK_THROWS_AS((void)parse_config("ic.type = perturbed-beltrami\nic.epsilon = -0.1\n"
                                       "solver.t_end = 0.1\n"),
                    ConfigError);
}
