#pragma once

#include <string>
#include <vector>

namespace esr {

// "%.12g" with the C locale: deterministic, '.' decimal point.
std::string fmt_double(double v);

struct CsvTable {
    std::string name;   // file stem, e.g. "sweep" -> sweep.csv
    std::string header; // frozen column list
    std::vector<std::string> rows;
};

// A finished run: a human-readable text body plus machine-readable side
// tables. Reports carry no timestamps or machine identifiers, so identical
// (config, seed) pairs produce byte-identical output.
struct RunReport {
    std::string text;
    std::vector<CsvTable> tables;
    std::vector<std::string> record_lines; // measurement records, one JSON object per line
    bool numerical_failure = false;        // tolerance breach somewhere -> exit 3
};

// Writes report.txt, every table as <name>.csv, and records.jsonl (when
// records exist) under out_dir. Throws io_error on filesystem failures.
void write_report(const RunReport& report, const std::string& out_dir);

} // namespace esr
