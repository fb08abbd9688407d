#include "nsebox/snapshot_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nsebox {

namespace {

static_assert(sizeof(double) == 8);

template <typename T>
void store_le(char* dst, T value) {
    if constexpr (std::endian::native == std::endian::big) {
        char* p = reinterpret_cast<char*>(&value);
        for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = p[sizeof(T) - 1 - i];
    } else {
        std::memcpy(dst, &value, sizeof(T));
    }
}

template <typename T>
T load_le(const char* src) {
    T value;
    if constexpr (std::endian::native == std::endian::big) {
        char* p = reinterpret_cast<char*>(&value);
        for (std::size_t i = 0; i < sizeof(T); ++i) p[i] = src[sizeof(T) - 1 - i];
    } else {
        std::memcpy(&value, src, sizeof(T));
    }
    return value;
}

void swap_doubles_in_place(std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::big) {
        for (double& d : v) {
            char* p = reinterpret_cast<char*>(&d);
            std::swap(p[0], p[7]);
            std::swap(p[1], p[6]);
            std::swap(p[2], p[5]);
            std::swap(p[3], p[4]);
        }
    } else {
        (void)v;
    }
}

constexpr std::size_t kHeaderBytes = 32;

}  // namespace

void write_snapshot(const Snapshot& snap, const std::filesystem::path& path) {
    const Grid& g = snap.u.grid;
    if (g.n > 0xFFFF)
        throw SnapshotIoError(SnapshotIoError::Kind::io, "write_snapshot: n exceeds u16 range");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw SnapshotIoError(SnapshotIoError::Kind::io,
                              "write_snapshot: cannot open " + path.string());
    char header[kHeaderBytes];
    std::memcpy(header, "NSEF", 4);
    store_le<std::uint16_t>(header + 4, kSnapshotFormatVersion);
    store_le<std::uint16_t>(header + 6, std::uint16_t(g.n));
    store_le<double>(header + 8, g.box_length);
    store_le<double>(header + 16, g.nu);
    store_le<double>(header + 24, snap.t);
    out.write(header, kHeaderBytes);
    for (int a = 0; a < 3; ++a) {
        std::vector<double> buf = snap.u.comp[a];
        swap_doubles_in_place(buf);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  std::streamsize(buf.size() * sizeof(double)));
    }
    if (!out)
        throw SnapshotIoError(SnapshotIoError::Kind::io,
                              "write_snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SnapshotIoError(SnapshotIoError::Kind::io,
                              "read_snapshot: cannot open " + path.string());
    char header[kHeaderBytes];
    in.read(header, kHeaderBytes);
    if (in.gcount() != std::streamsize(kHeaderBytes))
        throw SnapshotIoError(SnapshotIoError::Kind::truncated,
                              "read_snapshot: file shorter than the 32-byte header");
    if (std::memcmp(header, "NSEF", 4) != 0)
        throw SnapshotIoError(SnapshotIoError::Kind::bad_magic,
                              "read_snapshot: bad magic (not an NSEF snapshot)");
    const auto version = load_le<std::uint16_t>(header + 4);
    if (version != kSnapshotFormatVersion)
        throw SnapshotIoError(SnapshotIoError::Kind::version_mismatch,
                              "read_snapshot: unsupported format version " +
                                  std::to_string(version));
    const int n = load_le<std::uint16_t>(header + 6);
    Grid g;
    g.n = n;
    g.box_length = load_le<double>(header + 8);
    g.nu = load_le<double>(header + 16);
    g.validate();

    Snapshot snap;
    snap.t = load_le<double>(header + 24);
    snap.u = VectorField(g);
    for (int a = 0; a < 3; ++a) {
        auto& buf = snap.u.comp[a];
        in.read(reinterpret_cast<char*>(buf.data()),
                std::streamsize(buf.size() * sizeof(double)));
        if (in.gcount() != std::streamsize(buf.size() * sizeof(double)))
            throw SnapshotIoError(SnapshotIoError::Kind::truncated,
                                  "read_snapshot: truncated payload in " + path.string());
        swap_doubles_in_place(buf);
    }
    // exact size contract: 32 + 24 n^3 bytes, nothing trailing
    in.peek();
    if (!in.eof())
        throw SnapshotIoError(SnapshotIoError::Kind::truncated,
                              "read_snapshot: trailing bytes after payload in " + path.string());
    return snap;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
    std::ofstream out(dir / "manifest.txt", std::ios::trunc);
    if (!out)
        throw SnapshotIoError(SnapshotIoError::Kind::io,
                              "write_manifest: cannot open " + (dir / "manifest.txt").string());
    char buf[512];
    out << "# nsebox run manifest\n";
    out << "version 1\n";
    std::snprintf(buf, sizeof(buf), "n %d\nbox_length %.17g\nnu %.17g\n", m.grid.n,
                  m.grid.box_length, m.grid.nu);
    out << buf;
    std::snprintf(buf, sizeof(buf), "dt %.17g\nsnapshot_interval %.17g\n", m.dt,
                  m.snapshot_interval);
    out << buf;
    out << "status " << m.status << "\n";
    out << "count " << m.times.size() << "\n";
    for (std::size_t i = 0; i < m.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "snapshot %zu %.17g %s\n", i, m.times[i],
                      m.files[i].c_str());
        out << buf;
    }
    if (!out)
        throw SnapshotIoError(SnapshotIoError::Kind::io, "write_manifest: write failed");
}

RunManifest read_manifest(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.txt");
    if (!in)
        throw SnapshotIoError(SnapshotIoError::Kind::io,
                              "read_manifest: cannot open " + (dir / "manifest.txt").string());
    RunManifest m;
    std::size_t count = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "version") {
            int v = 0;
            ss >> v;
            if (v != 1)
                throw SnapshotIoError(SnapshotIoError::Kind::version_mismatch,
                                      "read_manifest: unsupported manifest version");
        } else if (key == "n") {
            ss >> m.grid.n;
        } else if (key == "box_length") {
            ss >> m.grid.box_length;
        } else if (key == "nu") {
            ss >> m.grid.nu;
        } else if (key == "dt") {
            ss >> m.dt;
        } else if (key == "snapshot_interval") {
            ss >> m.snapshot_interval;
        } else if (key == "status") {
            ss >> m.status;
        } else if (key == "count") {
            ss >> count;
        } else if (key == "snapshot") {
            std::size_t idx = 0;
            double t = 0.0;
            std::string file;
            ss >> idx >> t >> file;
            if (!ss || idx != m.times.size())
                throw SnapshotIoError(SnapshotIoError::Kind::io,
                                      "read_manifest: snapshot entries out of order");
            m.times.push_back(t);
            m.files.push_back(file);
        } else {
            throw SnapshotIoError(SnapshotIoError::Kind::io,
                                  "read_manifest: unknown key '" + key + "'");
        }
    }
    m.grid.validate();
    if (m.times.size() != count)
        throw SnapshotIoError(SnapshotIoError::Kind::io,
                              "read_manifest: count does not match snapshot entries");
    if (m.times.empty())
        throw SnapshotIoError(SnapshotIoError::Kind::io, "read_manifest: no snapshots listed");
    // refuse gaps: times must be uniformly spaced at snapshot_interval
    for (std::size_t i = 0; i + 1 < m.times.size(); ++i) {
        const double gap = m.times[i + 1] - m.times[i];
        if (std::abs(gap - m.snapshot_interval) > 1e-9 * std::max(1.0, m.snapshot_interval))
            throw SnapshotIoError(SnapshotIoError::Kind::io,
                                  "read_manifest: non-uniform snapshot spacing (gap in run?)");
    }
    return m;
}

RunDirectoryProvider::RunDirectoryProvider(const std::filesystem::path& dir)
    : dir_(dir), manifest_(read_manifest(dir)) {
    for (const auto& f : manifest_.files)
        if (!std::filesystem::exists(dir_ / f))
            throw SnapshotIoError(SnapshotIoError::Kind::io,
                                  "run directory: missing snapshot file " + f);
}

Snapshot RunDirectoryProvider::load(std::size_t i) const {
    Snapshot s = read_snapshot(dir_ / manifest_.files[i]);
    if (!s.u.grid.compatible(manifest_.grid))
        throw SnapshotIoError(SnapshotIoError::Kind::io,
                              "run directory: snapshot grid does not match manifest");
    if (std::abs(s.t - manifest_.times[i]) > 1e-9 * std::max(1.0, std::abs(manifest_.times[i])))
        throw SnapshotIoError(SnapshotIoError::Kind::io,
                              "run directory: snapshot time does not match manifest");
    return s;
}

}  // namespace nsebox
