#include "hyperion/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <memory>
#include <sstream>

#include "hyperion/classical.hpp"
#include "hyperion/environment.hpp"
#include "hyperion/errors.hpp"
#include "hyperion/quantum.hpp"

namespace hyperion {

namespace {

constexpr std::string_view header_tag = "# hyperion-csv";
constexpr char snapshot_magic[8] = {'H', 'Y', 'P', 'S', 'N', 'A', 'P', '1'};

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view s, const std::filesystem::path& path, std::size_t line) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(path.string() + ":" + std::to_string(line) + ": bad number '" +
                          std::string(s) + "'");
    }
    return x;
}

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) {
        b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffU);
    }
    out.write(b.data(), 8);
}

void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), 8);
    if (!in) {
        throw ConfigError("snapshot file truncated");
    }
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | b[static_cast<std::size_t>(i)];
    }
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) {
        throw NumericalError("format_double failed");
    }
    return std::string(buf.data(), ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view kind,
                     std::vector<std::string> columns,
                     const std::vector<std::pair<std::string, std::string>>& meta)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), width_(columns.size()) {
    if (!out_) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    out_ << header_tag << " v" << csv_format_version << " kind=" << kind;
    for (const auto& [k, v] : meta) {
        if (k.find_first_of(" =\n") != std::string::npos || v.find_first_of(" \n") != std::string::npos) {
            throw ConfigError("csv metadata '" + k + "' must not contain spaces");
        }
        out_ << ' ' << k << '=' << v;
    }
    out_ << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out_ << (i ? "," : "") << columns[i];
    }
    out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != width_) {
        throw ConfigError(path_.string() + ": row has " + std::to_string(values.size()) +
                          " values, expected " + std::to_string(width_));
    }
    line_.clear();
    std::array<char, 32> buf{};
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            line_.push_back(',');
        }
        const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), values[i]);
        line_.append(buf.data(), ptr);
    }
    line_.push_back('\n');
    out_ << line_;
}

void CsvWriter::close() {
    out_.close();
    if (!out_) {
        throw ConfigError("error writing " + path_.string());
    }
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return i;
        }
    }
    throw ConfigError("csv has no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::values(std::string_view name) const {
    const std::size_t k = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back(r[k]);
    }
    return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    CsvTable t;
    std::string line;
    if (!std::getline(in, line) || !line.starts_with(header_tag)) {
        throw ConfigError(path.string() + ": missing hyperion-csv header");
    }
    const auto fields = split(std::string_view(line).substr(header_tag.size() + 1), ' ');
    if (fields.empty() || fields[0].size() < 2 || fields[0][0] != 'v') {
        throw ConfigError(path.string() + ": malformed header");
    }
    t.version = std::stoi(fields[0].substr(1));
    if (t.version != csv_format_version) {
        throw ConfigError(path.string() + ": unsupported csv version " + std::to_string(t.version));
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto eq = fields[i].find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ": malformed metadata '" + fields[i] + "'");
        }
        t.meta[fields[i].substr(0, eq)] = fields[i].substr(eq + 1);
    }
    t.kind = t.meta.count("kind") ? t.meta.at("kind") : "";
    if (!std::getline(in, line)) {
        throw ConfigError(path.string() + ": missing column row");
    }
    t.columns = split(line, ',');
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != t.columns.size()) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(t.columns.size()) + " fields");
        }
        std::vector<double> r;
        r.reserve(cells.size());
        for (const auto& c : cells) {
            r.push_back(parse_double(c, path, lineno));
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

void write_classical_snapshots_csv(const std::filesystem::path& path,
                                   std::span<const ClassicalEnsemble> snapshots) {
    CsvWriter w(path, "classical_snapshots", {"trajectory_id", "tau", "phi", "jz"});
    for (const auto& s : snapshots) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            w.row({static_cast<double>(i), s.tau, wrap_angle(s.phi[i]), s.jz[i]});
        }
    }
    w.close();
}

void write_classical_snapshots_binary(const std::filesystem::path& path,
                                      std::span<const ClassicalEnsemble> snapshots) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    const std::size_t n = snapshots.empty() ? 0 : snapshots.front().size();
    out.write(snapshot_magic, sizeof snapshot_magic);
    put_u64(out, snapshots.size());
    put_u64(out, n);
    for (const auto& s : snapshots) {
        if (s.size() != n) {
            throw ConfigError("snapshots differ in ensemble size");
        }
        put_f64(out, s.tau);
        for (std::size_t i = 0; i < n; ++i) {
            put_f64(out, wrap_angle(s.phi[i]));
            put_f64(out, s.jz[i]);
        }
    }
    out.close();
    if (!out) {
        throw ConfigError("error writing " + path.string());
    }
}

SnapshotFile read_classical_snapshots_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    char magic[8] = {};
    in.read(magic, 8);
    if (!in || !std::equal(magic, magic + 8, snapshot_magic)) {
        throw ConfigError(path.string() + ": not a snapshot file");
    }
    const std::uint64_t count = get_u64(in);
    const std::uint64_t n = get_u64(in);
    SnapshotFile f;
    for (std::uint64_t k = 0; k < count; ++k) {
        f.tau.push_back(get_f64(in));
        auto& phi = f.phi.emplace_back(n);
        auto& jz = f.jz.emplace_back(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            phi[i] = get_f64(in);
            jz[i] = get_f64(in);
        }
    }
    return f;
}

void write_quantum_state_csv(const std::filesystem::path& path, const QuantumState& state) {
    CsvWriter w(path, "quantum_state", {"m", "jz", "re_c", "im_c", "prob"},
                {{"tau", format_double(state.tau)},
                 {"beta", format_double(state.beta)},
                 {"K", std::to_string(state.K)}});
    for (int m = -state.K; m <= state.K; ++m) {
        const cplx c = state.at(m);
        w.row({static_cast<double>(m), state.beta * m, c.real(), c.imag(), std::norm(c)});
    }
    w.close();
}

void write_noise_csv(const std::filesystem::path& path, const NoiseRealization& noise) {
    const auto& p = noise.params();
    CsvWriter w(path, "noise", {"tau", "R"},
                {{"sigma", format_double(p.sigma)},
                 {"tau_c", format_double(p.tau_c)},
                 {"c", format_double(p.c)},
                 {"seed", std::to_string(p.seed)},
                 {"update_interval", format_double(noise.update_interval())}});
    const auto v = noise.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        w.row({static_cast<double>(i) * noise.update_interval(), v[i]});
    }
    w.close();
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw NumericalError("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

}  // namespace hyperion
