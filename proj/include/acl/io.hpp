#pragma once

#include "acl/experiments.hpp"
#include "acl/reduced.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace acl {

// Every CSV begins with the comment row "# config_hash=<hex>".
inline constexpr std::string_view kHashPrefix = "# config_hash=";
inline constexpr std::string_view kTimeSeriesHeader = "t,entropy,E_s,E_e,E_int";
inline constexpr std::string_view kUnbinnedHeader = "energy,probability";
inline constexpr std::string_view kBinnedHeader = "bin_left,bin_right,probability";
inline constexpr std::string_view kDeffHeader = "E_I,mean_deff_over_Nw,delta_pct,pct_of_reference";

// 17 significant digits; parse_double(format_double(x)) == x.
std::string format_double(double value);
double parse_double(std::string_view text);

struct TimeSeriesFile {
    std::string config_hash;
    std::vector<TimeSeriesRecord> records;
};

struct DistributionFile {
    std::string config_hash;
    EnergyDistribution distribution;
};

struct DeffFile {
    std::string config_hash;
    std::vector<DeffRow> rows;  // per_state left empty
};

void write_timeseries(const std::filesystem::path& path, std::string_view config_hash,
                      std::span<const TimeSeriesRecord> records);
TimeSeriesFile read_timeseries(const std::filesystem::path& path);

// Binned distributions use the three-column layout.
void write_distribution(const std::filesystem::path& path, std::string_view config_hash,
                        const EnergyDistribution& dist);
DistributionFile read_distribution(const std::filesystem::path& path);

void write_deff_table(const std::filesystem::path& path, std::string_view config_hash, std::span<const DeffRow> rows);
DeffFile read_deff_table(const std::filesystem::path& path);

// Writes via a temporary sibling and rename.
void write_text_file(const std::filesystem::path& path, std::string_view contents);
// Throws ErrorKind::Dependency when the file is missing.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace acl
