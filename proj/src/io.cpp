#include "acl/io.hpp"

#include "acl/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace acl {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

struct CsvBody {
    std::string config_hash;
    std::string header;
    std::vector<std::vector<double>> rows;
};

CsvBody read_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    CsvBody body;
    std::string line;
    auto malformed = [&](const std::string& why) {
        return Error(ErrorKind::Config, path.string() + ": " + why);
    };
    if (!std::getline(in, line) || !line.starts_with(kHashPrefix)) throw malformed("missing config hash row");
    body.config_hash = line.substr(kHashPrefix.size());
    if (!std::getline(in, body.header)) throw malformed("missing header row");
    const std::size_t width = split(body.header, ',').size();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != width) throw malformed("row has " + std::to_string(fields.size()) + " fields");
        std::vector<double> row;
        row.reserve(width);
        for (auto f : fields) row.push_back(parse_double(f));
        body.rows.push_back(std::move(row));
    }
    return body;
}

void require_header(const CsvBody& body, std::string_view expected, const std::filesystem::path& path) {
    if (body.header != expected) {
        throw Error(ErrorKind::Config, path.string() + ": unexpected header '" + body.header + "'");
    }
}

std::string hash_row(std::string_view config_hash) {
    return std::string(kHashPrefix) + std::string(config_hash) + "\n";
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw Error(ErrorKind::Config, "cannot parse number '" + std::string(text) + "'");
    }
    return v;
}

void write_timeseries(const std::filesystem::path& path, std::string_view config_hash,
                      std::span<const TimeSeriesRecord> records) {
    std::string out = hash_row(config_hash);
    out += kTimeSeriesHeader;
    out += '\n';
    for (const auto& r : records) {
        out += format_double(r.time) + ',' + format_double(r.entropy) + ',' + format_double(r.e_sys) + ',' +
               format_double(r.e_env) + ',' + format_double(r.e_int) + '\n';
    }
    write_text_file(path, out);
}

TimeSeriesFile read_timeseries(const std::filesystem::path& path) {
    const CsvBody body = read_csv(path);
    require_header(body, kTimeSeriesHeader, path);
    TimeSeriesFile out{body.config_hash, {}};
    for (const auto& r : body.rows) out.records.push_back({r[0], r[1], r[2], r[3], r[4]});
    return out;
}

void write_distribution(const std::filesystem::path& path, std::string_view config_hash,
                        const EnergyDistribution& dist) {
    std::string out = hash_row(config_hash);
    if (dist.binned()) {
        out += kBinnedHeader;
        out += '\n';
        for (std::size_t b = 0; b < dist.probabilities.size(); ++b) {
            out += format_double(dist.bin_edges[b]) + ',' + format_double(dist.bin_edges[b + 1]) + ',' +
                   format_double(dist.probabilities[b]) + '\n';
        }
    } else {
        out += kUnbinnedHeader;
        out += '\n';
        for (std::size_t k = 0; k < dist.probabilities.size(); ++k) {
            out += format_double(dist.energies[k]) + ',' + format_double(dist.probabilities[k]) + '\n';
        }
    }
    write_text_file(path, out);
}

DistributionFile read_distribution(const std::filesystem::path& path) {
    const CsvBody body = read_csv(path);
    DistributionFile out{body.config_hash, {}};
    EnergyDistribution& d = out.distribution;
    if (body.header == kBinnedHeader) {
        for (const auto& r : body.rows) {
            if (d.bin_edges.empty()) d.bin_edges.push_back(r[0]);
            d.bin_edges.push_back(r[1]);
            d.energies.push_back(0.5 * (r[0] + r[1]));
            d.probabilities.push_back(r[2]);
        }
    } else {
        require_header(body, kUnbinnedHeader, path);
        for (const auto& r : body.rows) {
            d.energies.push_back(r[0]);
            d.probabilities.push_back(r[1]);
        }
    }
    return out;
}

void write_deff_table(const std::filesystem::path& path, std::string_view config_hash, std::span<const DeffRow> rows) {
    std::string out = hash_row(config_hash);
    out += kDeffHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += format_double(r.coupling) + ',' + format_double(r.mean_deff_over_nw) + ',' + format_double(r.delta_pct) +
               ',' + format_double(r.pct_of_reference) + '\n';
    }
    write_text_file(path, out);
}

DeffFile read_deff_table(const std::filesystem::path& path) {
    const CsvBody body = read_csv(path);
    require_header(body, kDeffHeader, path);
    DeffFile out{body.config_hash, {}};
    for (const auto& r : body.rows) {
        DeffRow row;
        row.coupling = r[0];
        row.mean_deff_over_nw = r[1];
        row.delta_pct = r[2];
        row.pct_of_reference = r[3];
        out.rows.push_back(std::move(row));
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error(ErrorKind::Resource, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::Resource, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Dependency, "missing input file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace acl
