#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "spectra/config.hpp"

namespace spectra {

inline constexpr const char* kToolVersion = "spectra 0.1.0";

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

struct Assertion {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation;  // "<=", ">=" or "=="
    bool pass = false;
    std::string detail;
};

struct RunReport {
    std::string kind;
    std::string version = kToolVersion;
    std::map<std::string, std::string> config;
    std::vector<Table> tables;
    std::vector<Assertion> assertions;
    double wall_seconds = 0.0;  // printed, never written to artifacts

    bool all_pass() const;
    const Table* table(const std::string& name) const;
    const Assertion* assertion(const std::string& name) const;
};

// Runs the experiment named by cfg.kind(). Threads = 0 falls back to
// cfg threads, then SPECTRA_THREADS.
RunReport run(const ExperimentConfig& cfg, unsigned threads = 0);

// CSV (%.12e floats) and/or JSON per table, assertions.csv, report.json and a
// whitespace-separated .dat file per table for gnuplot.
void emit(const RunReport& report, const std::string& dir, const std::string& format);

std::string format_real(double v);

}  // namespace spectra
