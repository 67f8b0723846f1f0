#include "faasplan/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "faasplan/core/errors.hpp"

namespace faasplan::cli {

void Table::add(std::vector<Cell> row) {
    if (row.size() != header_.size())
        throw InvalidArgument(fmt::format("table row has {} cells, header has {}", row.size(), header_.size()));
    rows_.push_back(std::move(row));
}

std::string format_csv_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return fmt::format("{:.17g}", *d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

namespace {

std::string format_text_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return fmt::format("{:.6g}", *d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

}  // namespace

void Table::write_csv(std::ostream& out) const {
    for (std::size_t j = 0; j < header_.size(); ++j) out << (j ? "," : "") << format_csv_cell(header_[j]);
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_csv_cell(row[j]);
        out << '\n';
    }
}

void Table::write_text(std::ostream& out) const {
    std::vector<std::vector<std::string>> cells;
    cells.reserve(rows_.size());
    std::vector<std::size_t> width(header_.size());
    for (std::size_t j = 0; j < header_.size(); ++j) width[j] = header_[j].size();
    for (const auto& row : rows_) {
        auto& r = cells.emplace_back();
        for (std::size_t j = 0; j < row.size(); ++j) {
            r.push_back(format_text_cell(row[j]));
            width[j] = std::max(width[j], r.back().size());
        }
    }
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "  " : "") << fmt::format("{:>{}}", r[j], width[j]);
        out << '\n';
    };
    line(header_);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out << std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') << '\n';
    for (const auto& r : cells) line(r);
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;
    char ch;
    while (in.get(ch)) {
        any = true;
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    cell += '"';
                    in.get(ch);
                } else {
                    quoted = false;
                }
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            row.push_back(std::move(cell));
            cell.clear();
        } else if (ch == '\n') {
            row.push_back(std::move(cell));
            cell.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (ch != '\r') {
            cell += ch;
        }
    }
    if (any) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

Emitter::Emitter(std::ostream& out, Format format, std::optional<std::filesystem::path> dir)
    : out_(out), format_(format), dir_(std::move(dir)) {
    if (dir_) std::filesystem::create_directories(*dir_);
}

std::optional<std::filesystem::path> Emitter::path_for(const std::string& file) const {
    if (!dir_) return std::nullopt;
    return *dir_ / file;
}

void Emitter::emit(const std::string& name, const Table& table) {
    if (dir_) {
        std::ofstream f(*dir_ / (name + ".csv"));
        if (!f) throw Error(fmt::format("cannot write {}", (*dir_ / (name + ".csv")).string()));
        table.write_csv(f);
        if (format_ == Format::csv) return;
    }
    if (!first_) out_ << '\n';
    first_ = false;
    if (format_ == Format::csv) {
        out_ << "# " << name << '\n';
        table.write_csv(out_);
    } else {
        out_ << name << '\n';
        table.write_text(out_);
    }
}

void Emitter::note(const std::string& text) {
    if (format_ == Format::csv && !dir_) return;
    out_ << text << '\n';
}

Table plan_summary_table(const planner::SizingPlan& p) {
    Table t({"key", "value"});
    t.add({std::string("feasible"), static_cast<long long>(p.feasible)});
    t.add({std::string("cores"), static_cast<long long>(p.cores)});
    t.add({std::string("t_star_s"), p.t_star});
    t.add({std::string("m_avg_gb"), p.memory.m_avg});
    t.add({std::string("e_u_gb"), p.memory.e_u});
    t.add({std::string("kappa"), p.memory.kappa});
    t.add({std::string("m_max_gb"), p.memory.m_max});
    t.add({std::string("upper_bound_gb"), p.memory.upper_bound_gb});
    t.add({std::string("capacity_gb"), p.capacity_gb});
    t.add({std::string("cost_memory"), p.cost_memory});
    t.add({std::string("cost_cpu"), p.cost_cpu});
    if (p.objective) t.add({std::string("objective"), *p.objective});
    if (!p.diagnostic.empty()) t.add({std::string("diagnostic"), p.diagnostic});
    return t;
}

Table plan_function_table(const planner::SizingPlan& p, const WorkloadSpec& wl) {
    Table t({"function", "lambda", "idle_time", "cold_prob", "hit_rate", "w_model", "rho"});
    for (std::size_t i = 0; i < wl.size(); ++i) {
        auto at = [](const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : std::nan(""); };
        t.add({static_cast<long long>(i), wl.arrival_rate(i), at(p.idle_times, i), at(p.cold_probabilities, i),
               at(p.hit_rates, i), at(p.response_times, i), at(p.utilizations, i)});
    }
    return t;
}

Table branch_table(const planner::PlanResult& r) {
    Table t({"cores", "feasible", "t_star", "worst_w", "capacity_gb", "objective", "diagnostic"});
    for (const auto& b : r.branches) {
        const double cap = b.candidate ? b.candidate->capacity_gb : std::nan("");
        const double z = b.candidate && b.candidate->objective ? *b.candidate->objective : std::nan("");
        t.add({static_cast<long long>(b.cores), static_cast<long long>(b.feasible), b.t_star, b.worst_response, cap, z,
               b.diagnostic});
    }
    return t;
}

}  // namespace faasplan::cli
