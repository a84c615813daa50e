#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperion {

class NoiseRealization;
struct ClassicalEnsemble;
struct QuantumState;

inline constexpr int csv_format_version = 1;

/// Shortest decimal that round-trips the double exactly.
std::string format_double(double x);

/// CSV writer with one metadata line
///   # hyperion-csv v1 kind=<kind> key=value ...
/// followed by the column-name row. Values are written with format_double,
/// so files are byte-identical for bit-identical data.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view kind,
              std::vector<std::string> columns,
              const std::vector<std::pair<std::string, std::string>>& meta = {});

    void row(std::span<const double> values);
    void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_;
    std::string line_;
};

struct CsvTable {
    std::string kind;
    int version = 0;
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Index of a named column; throws ConfigError when absent.
    std::size_t column(std::string_view name) const;
    std::vector<double> values(std::string_view name) const;
};

/// Parses a file written by CsvWriter. Throws ConfigError on a missing or
/// malformed header, a version mismatch or a ragged row.
CsvTable read_csv(const std::filesystem::path& path);

/// trajectory_id, tau, phi, jz (phi reduced to [0, 2 pi)).
void write_classical_snapshots_csv(const std::filesystem::path& path,
                                   std::span<const ClassicalEnsemble> snapshots);

/// Little-endian binary layout:
///   char[8] "HYPSNAP1"; uint64 n_snapshots; uint64 n_trajectories;
///   per snapshot: float64 tau, then n_trajectories (phi, jz) float64 pairs.
void write_classical_snapshots_binary(const std::filesystem::path& path,
                                      std::span<const ClassicalEnsemble> snapshots);

struct SnapshotFile {
    std::vector<double> tau;
    std::vector<std::vector<double>> phi;
    std::vector<std::vector<double>> jz;
};
SnapshotFile read_classical_snapshots_binary(const std::filesystem::path& path);

/// m, jz, re_c, im_c, prob.
void write_quantum_state_csv(const std::filesystem::path& path, const QuantumState& state);

/// tau, R over the stored values (tau is the start of each interval).
void write_noise_csv(const std::filesystem::path& path, const NoiseRealization& noise);

/// Lowercase hex SHA-256 of a byte string or a file.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace hyperion
