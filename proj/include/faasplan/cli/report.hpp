#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "faasplan/core/types.hpp"
#include "faasplan/planner/planner.hpp"

namespace faasplan::cli {

enum class Format { csv, table };

using Cell = std::variant<std::string, double, long long>;

/// Rows of heterogeneous cells rendered either as CSV (doubles at 17
/// significant digits, so they round-trip) or as an aligned text table.
class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<Cell> row);
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] const std::vector<std::string>& header() const noexcept { return header_; }

    void write_csv(std::ostream& out) const;
    void write_text(std::ostream& out) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_csv_cell(const Cell& c);

/// Minimal CSV reader for files written by Table::write_csv.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

/// Routes named tables to files under an output directory (always CSV) and
/// to a stream in the requested format.
class Emitter {
public:
    Emitter(std::ostream& out, Format format, std::optional<std::filesystem::path> dir);

    void emit(const std::string& name, const Table& table);
    /// Free text for humans; suppressed in CSV mode on stdout.
    void note(const std::string& text);
    [[nodiscard]] std::optional<std::filesystem::path> path_for(const std::string& file) const;

private:
    std::ostream& out_;
    Format format_;
    std::optional<std::filesystem::path> dir_;
    bool first_ = true;
};

Table plan_summary_table(const planner::SizingPlan& plan);
Table plan_function_table(const planner::SizingPlan& plan, const WorkloadSpec& workload);
Table branch_table(const planner::PlanResult& result);

}  // namespace faasplan::cli
