#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsebox/solver.hpp"

namespace nsebox {

/// @file snapshot_io.hpp
/// Binary snapshot persistence. Fixed little-endian layout, 32-byte header:
///   bytes  0..3   magic "NSEF"
///   bytes  4..5   format version (u16, currently 1)
///   bytes  6..7   n, points per axis (u16)
///   bytes  8..15  box_length (f64)
///   bytes 16..23  nu (f64)
///   bytes 24..31  t (f64)
/// followed by 3*n^3 f64 samples (components u1, u2, u3 sequentially,
/// x-fastest within each). Total size is exactly 32 + 24*n^3 bytes.

struct SnapshotIoError : std::runtime_error {
    enum class Kind { bad_magic, truncated, version_mismatch, io };
    Kind kind;
    SnapshotIoError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

constexpr std::uint16_t kSnapshotFormatVersion = 1;

void write_snapshot(const Snapshot& snap, const std::filesystem::path& path);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Plain-text run manifest: grid metadata plus one line per snapshot with its
/// index, time, and file name. Readers refuse manifests whose entries are
/// missing, out of order, or not uniformly spaced.
struct RunManifest {
    Grid grid;
    double dt = 0.0;
    double snapshot_interval = 0.0;
    std::string status = "completed";
    std::vector<double> times;
    std::vector<std::string> files;
};

void write_manifest(const RunManifest& m, const std::filesystem::path& dir);
RunManifest read_manifest(const std::filesystem::path& dir);

/// Uniform access to a time-ordered snapshot series; the ledger and the
/// diagnostics pipeline stream through this interface so a trajectory can
/// live in memory or on disk.
class SnapshotProvider {
  public:
    virtual ~SnapshotProvider() = default;
    virtual const Grid& grid() const = 0;
    virtual std::size_t size() const = 0;
    virtual double time(std::size_t i) const = 0;
    virtual Snapshot load(std::size_t i) const = 0;
};

class TrajectoryProvider final : public SnapshotProvider {
  public:
    explicit TrajectoryProvider(const Trajectory& traj) : traj_(&traj) {}
    const Grid& grid() const override { return traj_->config.grid; }
    std::size_t size() const override { return traj_->snapshots.size(); }
    double time(std::size_t i) const override { return traj_->snapshots[i].t; }
    Snapshot load(std::size_t i) const override { return traj_->snapshots[i]; }

  private:
    const Trajectory* traj_;
};

/// Reads snapshots lazily from a run directory written by write_manifest /
/// write_snapshot; validates the manifest against the files on open.
class RunDirectoryProvider final : public SnapshotProvider {
  public:
    explicit RunDirectoryProvider(const std::filesystem::path& dir);
    const Grid& grid() const override { return manifest_.grid; }
    std::size_t size() const override { return manifest_.times.size(); }
    double time(std::size_t i) const override { return manifest_.times[i]; }
    Snapshot load(std::size_t i) const override;
    const RunManifest& manifest() const { return manifest_; }

  private:
    std::filesystem::path dir_;
    RunManifest manifest_;
};

}  // namespace nsebox
