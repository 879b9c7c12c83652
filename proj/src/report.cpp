#include "esr/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "esr/config.hpp"

namespace esr {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
}

void write_report(const RunReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + out_dir);

    auto write_file = [&](const std::string& name, auto&& emit) {
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path);
        if (!out) throw io_error("cannot write " + path.string());
        emit(out);
        if (!out.good()) throw io_error("write failed: " + path.string());
    };

    write_file("report.txt", [&](std::ofstream& out) { out << report.text; });
    for (const CsvTable& table : report.tables)
        write_file(table.name + ".csv", [&](std::ofstream& out) {
            out << table.header << "\n";
            for (const std::string& row : table.rows) out << row << "\n";
        });
    if (!report.record_lines.empty())
        write_file("records.jsonl", [&](std::ofstream& out) {
            for (const std::string& line : report.record_lines) out << line << "\n";
        });
}

} // namespace esr
