// Run configuration, initial-condition library, and on-disk formats:
// JSON configs/manifests, CSV invariant traces (17 significant digits),
// and flat little-endian binary snapshots.

#pragma once

#include "gdnls/integrator.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gdnls {

struct InitialSpec {
    enum class Kind { plane_wave, mode_list, smooth_preset, file };
    Kind kind = Kind::plane_wave;

    // plane_wave
    cplx amplitude = 0.5;
    int wavenumber = 1;
    // mode_list
    std::vector<std::pair<int, cplx>> modes;
    // smooth_preset
    std::string preset_name = "bump";
    double preset_amplitude = 1.0;
    // file
    std::filesystem::path path;
    uint64_t checksum = 0;  // expected FNV-1a of the payload, 0 = unchecked

    SpectralField realize(int num_modes) const;
};

struct RunConfig {
    int num_modes = 64;
    ModelParams model;
    SolverConfig solver;
    InitialSpec initial;
    std::filesystem::path out_dir = "out";
    uint64_t seed = 0;

    void validate() const;  // cross-field constraints, throws with field names
};

/// "bump": A (1 + 0.3 cos x) e^{i sin x}, truncated to the grid. The one
/// fully nonlinear stock datum used throughout the experiment suite.
SpectralField smooth_preset(const std::string& name, double amplitude, int num_modes);

uint64_t fnv1a64(const void* data, size_t len);

std::string format_double(double v);  // 17 significant digits
double parse_double(const std::string& s);

nlohmann::json field_to_json(const SpectralField& f);
SpectralField field_from_json(const nlohmann::json& j);

/// coeffs k = -N..N as little-endian f64 (re, im) pairs, preceded by N as
/// a little-endian int64.
std::vector<std::byte> field_to_binary(const SpectralField& f);
SpectralField field_from_binary(std::span<const std::byte> bytes);

void write_invariants_csv(const std::filesystem::path& path,
                          const std::vector<InvariantRecord>& trace);
std::vector<InvariantRecord> read_invariants_csv(const std::filesystem::path& path);

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);  // unknown keys rejected

RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& cfg, const std::filesystem::path& path);

/// key=value override with dotted paths, e.g. "solver.dt=1e-4".
void apply_override(nlohmann::json& config, const std::string& assignment);

void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir);
Trajectory load_trajectory(const std::filesystem::path& dir);

}  // namespace gdnls
