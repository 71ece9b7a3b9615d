#pragma once

// Configuration parsing, field persistence, CSV emission and run manifests.
//
// Field binary format (shared across modules):
//   magic "PCGLFLD1" (8 bytes), u32 n (little-endian), u8 domain tag
//   (0 = physical, 1 = spectral), then n^3 complex values as (re, im) f64
//   pairs in the documented flat order (physical: row-major grid index;
//   spectral: row-major over k + n/2 per axis).

#include <string>
#include <vector>

#include "pcgl/grid.hpp"
#include "pcgl/solver.hpp"

namespace pcgl {

inline constexpr const char* kVersion = "pcgl 0.1.0";

// SolverConfig plus output/runtime plumbing. All randomness flows from the
// single master seed; threads only affects bookkeeping (results are
// bit-identical for any thread count).
struct RunConfig {
    SolverConfig solver;
    std::string out_dir = ".";
    int csv_precision = 17;
    int threads = 1;

    void validate() const;
};

// Flat TOML-style file: `key = value` lines, '#' comments. Unknown keys are
// rejected. Defaults: kappa=0.02, kappa_prime=0.05, burn_in=5, chi=smooth,
// partition=smooth, scheme=etd1, c_convention=statement.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Serializes the effective configuration in the same key = value format;
// re-parsing reproduces the config exactly.
std::string config_to_text(const RunConfig& config);

void save_field(const std::string& path, const Field& field);
void save_field(const std::string& path, const SpectralField& field);
Field load_field(const std::string& path);
SpectralField load_spectral(const std::string& path);

// RFC-4180-style CSV with headers; floats formatted with `precision`
// significant digits; rows emitted in the given order.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string format_double(double x, int precision = 17);
void emit_csv(const CsvTable& table, const std::string& path);

// JSON run manifest, written atomically (temp file + rename).
struct RunManifest {
    RunConfig config;
    RenormConstants constants;
    bool has_constants = false;
    std::string command;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> extra;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

// parsing helpers shared with the CLI
cplx parse_complex(const std::string& text);  // "1", "1+1i", "0.5-2i"
std::vector<double> parse_double_list(const std::string& text);  // comma-separated

}  // namespace pcgl
