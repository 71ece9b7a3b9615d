#include "pcgl/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pcgl/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "field format is little-endian; big-endian hosts unsupported");

namespace pcgl {

void RunConfig::validate() const {
    solver.validate();
    if (csv_precision < 1 || csv_precision > 17)
        throw std::invalid_argument("config: csv_precision must lie in [1,17]");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw parse_error("config line " + std::to_string(line) + ": key '" + key +
                          "': not a number: '" + v + "'");
    }
}

long long to_int(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw parse_error("config line " + std::to_string(line) + ": key '" + key +
                          "': not an integer: '" + v + "'");
    }
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    return v;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error(origin + " line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        SolverConfig& s = cfg.solver;
        if (key == "mu") s.mu = to_double(value, key, lineno);
        else if (key == "nu_re") s.nu.real(to_double(value, key, lineno));
        else if (key == "nu_im") s.nu.imag(to_double(value, key, lineno));
        else if (key == "eps") s.eps = to_double(value, key, lineno);
        else if (key == "n") s.n = int(to_int(value, key, lineno));
        else if (key == "dt") s.dt = to_double(value, key, lineno);
        else if (key == "t_end") s.t_end = to_double(value, key, lineno);
        else if (key == "burn_in") s.burn_in = to_double(value, key, lineno);
        else if (key == "kappa") s.kappa = to_double(value, key, lineno);
        else if (key == "kappa_prime") s.kappa_prime = to_double(value, key, lineno);
        else if (key == "seed") s.seed = std::uint64_t(to_int(value, key, lineno));
        else if (key == "u0_re") s.u0.real(to_double(value, key, lineno));
        else if (key == "u0_im") s.u0.imag(to_double(value, key, lineno));
        else if (key == "out_stride") s.out_stride = int(to_int(value, key, lineno));
        else if (key == "c2_budget") s.c2_budget = std::size_t(to_int(value, key, lineno));
        else if (key == "paper_literal_c1") s.paper_literal_c1 = (value == "true" || value == "1");
        else if (key == "chi") {
            if (value == "smooth") s.chi = MollifierProfile::smooth;
            else if (value == "sharp") s.chi = MollifierProfile::sharp;
            else throw parse_error(origin + " line " + std::to_string(lineno) +
                                   ": chi must be smooth or sharp");
        } else if (key == "partition") {
            if (value == "smooth") s.partition = PartitionProfile::smooth;
            else if (value == "sharp") s.partition = PartitionProfile::sharp;
            else throw parse_error(origin + " line " + std::to_string(lineno) +
                                   ": partition must be smooth or sharp");
        } else if (key == "scheme") {
            if (value == "etd1") s.scheme = Scheme::etd1;
            else if (value == "etd2") s.scheme = Scheme::etd2;
            else throw parse_error(origin + " line " + std::to_string(lineno) +
                                   ": scheme must be etd1 or etd2");
        } else if (key == "c_convention") {
            if (value == "statement") s.c_convention = CConvention::statement;
            else if (value == "proof_line") s.c_convention = CConvention::proof_line;
            else throw parse_error(origin + " line " + std::to_string(lineno) +
                                   ": c_convention must be statement or proof_line");
        } else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "csv_precision") cfg.csv_precision = int(to_int(value, key, lineno));
        else if (key == "threads") cfg.threads = int(to_int(value, key, lineno));
        else
            throw parse_error(origin + " line " + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string config_to_text(const RunConfig& cfg) {
    const SolverConfig& s = cfg.solver;
    std::ostringstream out;
    out << "mu = " << format_double(s.mu) << "\n";
    out << "nu_re = " << format_double(s.nu.real()) << "\n";
    out << "nu_im = " << format_double(s.nu.imag()) << "\n";
    out << "eps = " << format_double(s.eps) << "\n";
    out << "n = " << s.n << "\n";
    out << "dt = " << format_double(s.dt) << "\n";
    out << "t_end = " << format_double(s.t_end) << "\n";
    out << "burn_in = " << format_double(s.burn_in) << "\n";
    out << "kappa = " << format_double(s.kappa) << "\n";
    out << "kappa_prime = " << format_double(s.kappa_prime) << "\n";
    out << "seed = " << s.seed << "\n";
    out << "u0_re = " << format_double(s.u0.real()) << "\n";
    out << "u0_im = " << format_double(s.u0.imag()) << "\n";
    out << "out_stride = " << s.out_stride << "\n";
    out << "c2_budget = " << s.c2_budget << "\n";
    out << "paper_literal_c1 = " << (s.paper_literal_c1 ? "true" : "false") << "\n";
    out << "chi = " << (s.chi == MollifierProfile::smooth ? "smooth" : "sharp") << "\n";
    out << "partition = "
        << (s.partition == PartitionProfile::smooth ? "smooth" : "sharp") << "\n";
    out << "scheme = " << (s.scheme == Scheme::etd1 ? "etd1" : "etd2") << "\n";
    out << "c_convention = "
        << (s.c_convention == CConvention::statement ? "statement" : "proof_line")
        << "\n";
    out << "out_dir = \"" << cfg.out_dir << "\"\n";
    out << "csv_precision = " << cfg.csv_precision << "\n";
    out << "threads = " << cfg.threads << "\n";
    return out.str();
}

namespace {

constexpr char kMagic[8] = {'P', 'C', 'G', 'L', 'F', 'L', 'D', '1'};

void write_field_raw(const std::string& path, const GridSpec& grid,
                     const std::vector<cplx>& data, std::uint8_t domain) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_field: cannot open " + path);
    out.write(kMagic, 8);
    const std::uint32_t n = std::uint32_t(grid.n);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&domain), 1);
    out.write(reinterpret_cast<const char*>(data.data()),
              std::streamsize(data.size() * sizeof(cplx)));
    if (!out) throw std::runtime_error("save_field: write failed for " + path);
}

std::vector<cplx> read_field_raw(const std::string& path, GridSpec& grid,
                                 std::uint8_t expect_domain) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_field: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw parse_error("load_field: bad magic in " + path);
    std::uint32_t n = 0;
    std::uint8_t domain = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&domain), 1);
    if (!in) throw parse_error("load_field: truncated header in " + path);
    if (domain != expect_domain)
        throw parse_error("load_field: wrong domain tag in " + path);
    grid = GridSpec(int(n));
    std::vector<cplx> data(grid.size());
    in.read(reinterpret_cast<char*>(data.data()),
            std::streamsize(data.size() * sizeof(cplx)));
    if (!in || in.gcount() != std::streamsize(data.size() * sizeof(cplx)))
        throw parse_error("load_field: truncated data in " + path);
    return data;
}

}  // namespace

void save_field(const std::string& path, const Field& field) {
    write_field_raw(path, field.grid, field.values, 0);
}

void save_field(const std::string& path, const SpectralField& field) {
    write_field_raw(path, field.grid, field.coeffs, 1);
}

Field load_field(const std::string& path) {
    Field f;
    f.values = read_field_raw(path, f.grid, 0);
    return f;
}

SpectralField load_spectral(const std::string& path) {
    SpectralField f;
    f.coeffs = read_field_raw(path, f.grid, 1);
    return f;
}

std::string format_double(double x, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
    return buf;
}

void emit_csv(const CsvTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        q += '"';
        return q;
    };
    auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << quote(row[i]);
        }
        out << "\r\n";
    };
    write_row(table.header);
    for (const auto& row : table.rows) write_row(row);
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["command"] = manifest.command;
    j["wall_seconds"] = manifest.wall_seconds;
    j["config"] = nlohmann::json::object();
    {
        // key = value echo, machine-reparsable
        std::istringstream text(config_to_text(manifest.config));
        std::string line;
        while (std::getline(text, line)) {
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string k = trim(line.substr(0, eq));
            std::string v = unquote(trim(line.substr(eq + 1)));
            j["config"][k] = v;
        }
    }
    if (manifest.has_constants) {
        const RenormConstants& c = manifest.constants;
        j["constants"] = {
            {"eps", c.eps},
            {"mu", c.mu},
            {"nu_re", c.nu.real()},
            {"nu_im", c.nu.imag()},
            {"c1_re", c.c1.real()},
            {"c1_im", c.c1.imag()},
            {"c21_re", c.c21.real()},
            {"c21_im", c.c21.imag()},
            {"c22_re", c.c22.real()},
            {"c22_im", c.c22.imag()},
            {"c_combined_re", c.c_combined.real()},
            {"c_combined_im", c.c_combined.imag()},
            {"paper_literal_c1", c.paper_literal_c1},
            {"convention",
             c.convention == CConvention::statement ? "statement" : "proof_line"},
        };
    }
    for (const auto& [k, v] : manifest.extra) j[k] = v;

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("write_manifest: cannot open " + tmp);
        out << j.dump(2) << "\n";
        if (!out) throw std::runtime_error("write_manifest: write failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("write_manifest: rename failed for " + path);
}

cplx parse_complex(const std::string& text) {
    // forms: "a", "a+bi", "a-bi", "bi"
    std::string s = trim(text);
    if (s.empty()) throw parse_error("complex: empty string");
    if (s.back() == 'i' || s.back() == 'I') {
        s.pop_back();
        // split at the last +/- that is not an exponent sign or leading
        std::size_t split = std::string::npos;
        for (std::size_t i = s.size(); i-- > 1;) {
            if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
                split = i;
                break;
            }
        }
        if (split == std::string::npos)
            return cplx(0.0, s.empty() || s == "+" ? 1.0
                             : s == "-"            ? -1.0
                                                   : std::stod(s));
        const std::string re = s.substr(0, split);
        std::string im = s.substr(split);
        if (im == "+" ) im = "1";
        else if (im == "-") im = "-1";
        return cplx(std::stod(re), std::stod(im));
    }
    return cplx(std::stod(s), 0.0);
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw parse_error("list: no values in '" + text + "'");
    return out;
}

}  // namespace pcgl
