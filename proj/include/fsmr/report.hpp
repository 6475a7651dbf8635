#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsmr/error.hpp"

namespace fsmr {

struct BenchmarkRecord {
    std::string image;
    std::string method;
    std::string sequence;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double block_ms = 0.0;
};

struct BenchmarkReport {
    std::vector<BenchmarkRecord> records;
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

    /// FSMR time over this record's time for the same image and sequence; empty when
    /// there is no FSMR reference (or for the FSMR rows themselves).
    std::optional<double> speedup(const BenchmarkRecord& r) const {
        if (r.method == "fsmr" || !(r.block_ms > 0.0)) {
            return std::nullopt;
        }
        for (const auto& ref : records) {
            if (ref.method == "fsmr" && ref.image == r.image && ref.sequence == r.sequence) {
                return ref.block_ms / r.block_ms;
            }
        }
        return std::nullopt;
    }
};

inline std::string format_fixed(double v, int decimals) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// Speed-up factors are reported with one decimal.
inline std::string format_speedup(std::optional<double> s) { return s ? format_fixed(*s, 1) : std::string(); }

inline std::string report_csv(const BenchmarkReport& report) {
    std::string out = "image,method,sequence,psnr_db,ssim,block_ms,speedup\n";
    for (const auto& r : report.records) {
        out += r.image + ',' + r.method + ',' + r.sequence + ',' + format_fixed(r.psnr_db, 6) + ',' +
               format_fixed(r.ssim, 6) + ',' + format_fixed(r.block_ms, 4) + ',' + format_speedup(report.speedup(r)) +
               '\n';
    }
    return out;
}

struct MeanCell {
    double psnr_db = 0.0;
    double ssim = 0.0;
    double block_ms = 0.0;
    int count = 0;
};

/// Dataset means per method and sequence, in first-appearance order.
inline std::vector<std::pair<std::string, std::vector<std::pair<std::string, MeanCell>>>>
mean_table(const BenchmarkReport& report) {
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, MeanCell>>>> table;
    for (const auto& r : report.records) {
        auto row = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == r.method; });
        if (row == table.end()) {
            table.push_back({r.method, {}});
            row = std::prev(table.end());
        }
        auto& cells = row->second;
        auto cell = std::find_if(cells.begin(), cells.end(), [&](const auto& e) { return e.first == r.sequence; });
        if (cell == cells.end()) {
            cells.push_back({r.sequence, {}});
            cell = std::prev(cells.end());
        }
        cell->second.psnr_db += r.psnr_db;
        cell->second.ssim += r.ssim;
        cell->second.block_ms += r.block_ms;
        cell->second.count += 1;
    }
    for (auto& [method, cells] : table) {
        for (auto& [seq, c] : cells) {
            c.psnr_db /= c.count;
            c.ssim /= c.count;
            c.block_ms /= c.count;
        }
    }
    return table;
}

inline nlohmann::ordered_json json_number(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

inline nlohmann::ordered_json report_summary(const BenchmarkReport& report) {
    nlohmann::ordered_json j;
    j["metadata"] = report.metadata;
    const auto table = mean_table(report);
    double fsmr_ms = 0.0;
    int fsmr_cells = 0;
    for (const auto& [method, cells] : table) {
        if (method == "fsmr") {
            for (const auto& [seq, c] : cells) {
                fsmr_ms += c.block_ms;
                ++fsmr_cells;
            }
        }
    }
    nlohmann::ordered_json methods = nlohmann::ordered_json::object();
    for (const auto& [method, cells] : table) {
        nlohmann::ordered_json m;
        double psnr_sum = 0.0;
        double ssim_sum = 0.0;
        double ms_sum = 0.0;
        for (const auto& [seq, c] : cells) {
            m["sequences"][seq] = {{"psnr_db", json_number(c.psnr_db)},
                                   {"ssim", c.ssim},
                                   {"block_ms", c.block_ms},
                                   {"images", c.count}};
            psnr_sum += c.psnr_db;
            ssim_sum += c.ssim;
            ms_sum += c.block_ms;
        }
        const double n = static_cast<double>(cells.size());
        m["mean_psnr_db"] = json_number(psnr_sum / n);
        m["mean_ssim"] = ssim_sum / n;
        m["mean_block_ms"] = ms_sum / n;
        if (method != "fsmr" && fsmr_cells > 0 && ms_sum > 0.0) {
            m["speedup_vs_fsmr"] = (fsmr_ms / fsmr_cells) / (ms_sum / n);
        } else {
            m["speedup_vs_fsmr"] = nullptr;
        }
        methods[method] = m;
    }
    j["methods"] = methods;
    return j;
}

/// Writes `<prefix>.csv` (one row per method x sequence x image) and `<prefix>.json`
/// (dataset means per method and sequence).
inline void emit_report(const BenchmarkReport& report, const std::filesystem::path& prefix) {
    std::filesystem::path csv = prefix;
    csv += ".csv";
    std::filesystem::path json = prefix;
    json += ".json";
    {
        std::ofstream out(csv, std::ios::binary);
        if (!out) {
            throw IoError("cannot open " + csv.string() + " for writing");
        }
        out << report_csv(report);
        if (!out) {
            throw IoError("failed writing " + csv.string());
        }
    }
    std::ofstream out(json, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + json.string() + " for writing");
    }
    out << report_summary(report).dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing " + json.string());
    }
}

} // namespace fsmr
