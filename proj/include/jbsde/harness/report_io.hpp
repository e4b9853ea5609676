#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "study.hpp"

namespace jbsde {

// Shortest decimal form that parses back to the same double; empty-cell
// convention maps NaN to the empty string for CSV.
inline std::string format_double(double v)
{
    if (std::isnan(v)) return "";
    char buf[32];
    const std::to_chars_result r = std::to_chars(buf, buf + sizeof(buf), v);
    if (r.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, r.ptr);
}

namespace detail {

inline nlohmann::json json_number(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline double number_from_json(const nlohmann::json& j)
{
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

inline std::string boundary_name(Boundary b)
{
    return b == Boundary::analytic ? "analytic" : "extrapolate";
}

inline Boundary boundary_from_name(const std::string& s)
{
    if (s == "analytic") return Boundary::analytic;
    if (s == "extrapolate") return Boundary::extrapolate;
    throw std::invalid_argument("unknown boundary policy '" + s + "'");
}

} // namespace detail

inline nlohmann::json to_json(const SolverConfig& c)
{
    return {{"M_y", c.M_y},
            {"M_f", c.M_f},
            {"n_gh", c.n_gh},
            {"n_gl", c.n_gl},
            {"degree", c.degree},
            {"picard_tol", c.picard_tol},
            {"picard_max_iters", c.picard_max_iters},
            {"boundary", detail::boundary_name(c.boundary)},
            {"pad", c.pad},
            {"workers", c.workers}};
}

inline SolverConfig solver_config_from_json(const nlohmann::json& j)
{
    SolverConfig c;
    c.M_y = j.at("M_y").get<int>();
    c.M_f = j.at("M_f").get<int>();
    c.n_gh = j.at("n_gh").get<int>();
    c.n_gl = j.at("n_gl").get<int>();
    c.degree = j.at("degree").get<int>();
    c.picard_tol = j.at("picard_tol").get<double>();
    c.picard_max_iters = j.at("picard_max_iters").get<int>();
    c.boundary = detail::boundary_from_name(j.at("boundary").get<std::string>());
    c.pad = j.at("pad").get<double>();
    c.workers = j.at("workers").get<int>();
    return c;
}

inline nlohmann::json to_json(const ConvergenceReport& r)
{
    nlohmann::json records = nlohmann::json::array();
    for (const StudyRecord& rec : r.records) {
        records.push_back({{"step", rec.step},
                           {"N", rec.N},
                           {"dx", rec.dx},
                           {"e_y", detail::json_number(rec.e_y)},
                           {"e_z", detail::json_number(rec.e_z)},
                           {"e_gamma", detail::json_number(rec.e_gamma)},
                           {"wall_seconds", rec.wall_seconds},
                           {"error", rec.error}});
    }
    return {{"problem", r.problem},
            {"axis", r.axis},
            {"config",
             {{"delta", r.config.delta},
              {"T", r.config.T},
              {"a", r.config.a},
              {"b", r.config.b},
              {"dx", r.config.dx},
              {"N", r.config.N},
              {"solver", to_json(r.config.solver)}}},
            {"records", records},
            {"rates",
             {{"cr_y", detail::json_number(r.cr_y)},
              {"cr_z", detail::json_number(r.cr_z)},
              {"cr_gamma", detail::json_number(r.cr_gamma)}}}};
}

inline ConvergenceReport report_from_json(const nlohmann::json& j)
{
    ConvergenceReport r;
    r.problem = j.at("problem").get<std::string>();
    r.axis = j.at("axis").get<std::string>();
    const nlohmann::json& cfg = j.at("config");
    r.config.delta = cfg.at("delta").get<double>();
    r.config.T = cfg.at("T").get<double>();
    r.config.a = cfg.at("a").get<double>();
    r.config.b = cfg.at("b").get<double>();
    r.config.dx = cfg.at("dx").get<double>();
    r.config.N = cfg.at("N").get<int>();
    r.config.solver = solver_config_from_json(cfg.at("solver"));
    for (const nlohmann::json& jr : j.at("records")) {
        StudyRecord rec;
        rec.step = jr.at("step").get<double>();
        rec.N = jr.at("N").get<int>();
        rec.dx = jr.at("dx").get<double>();
        rec.e_y = detail::number_from_json(jr.at("e_y"));
        rec.e_z = detail::number_from_json(jr.at("e_z"));
        rec.e_gamma = detail::number_from_json(jr.at("e_gamma"));
        rec.wall_seconds = jr.at("wall_seconds").get<double>();
        rec.error = jr.at("error").get<std::string>();
        r.records.push_back(rec);
    }
    const nlohmann::json& rates = j.at("rates");
    r.cr_y = detail::number_from_json(rates.at("cr_y"));
    r.cr_z = detail::number_from_json(rates.at("cr_z"));
    r.cr_gamma = detail::number_from_json(rates.at("cr_gamma"));
    return r;
}

namespace detail {

inline double pairwise_rate(double step_prev, double e_prev, double step_cur, double e_cur)
{
    if (!(e_prev > 0.0) || !(e_cur > 0.0) || !std::isfinite(e_prev) || !std::isfinite(e_cur))
        return std::numeric_limits<double>::quiet_NaN();
    return std::log2(e_prev / e_cur) / std::log2(step_prev / step_cur);
}

} // namespace detail

// Table-shaped view of a report: one row per record, consecutive-pair rates
// in the trailing columns, blanks where a value does not exist.
inline std::string to_csv(const ConvergenceReport& r)
{
    std::ostringstream out;
    out << "step,e_y,e_z,e_gamma,cr_y,cr_z,cr_gamma\n";
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        const StudyRecord& rec = r.records[i];
        double cy = std::numeric_limits<double>::quiet_NaN();
        double cz = cy, cg = cy;
        if (i > 0 && rec.ok() && r.records[i - 1].ok()) {
            const StudyRecord& prev = r.records[i - 1];
            cy = detail::pairwise_rate(prev.step, prev.e_y, rec.step, rec.e_y);
            cz = detail::pairwise_rate(prev.step, prev.e_z, rec.step, rec.e_z);
            cg = detail::pairwise_rate(prev.step, prev.e_gamma, rec.step, rec.e_gamma);
        }
        out << format_double(rec.step) << ',' << format_double(rec.e_y) << ','
            << format_double(rec.e_z) << ',' << format_double(rec.e_gamma) << ','
            << format_double(cy) << ',' << format_double(cz) << ',' << format_double(cg)
            << '\n';
    }
    return out.str();
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Minimal numeric CSV reader for emitted reports; empty cells parse as NaN.
inline CsvTable parse_csv(const std::string& text)
{
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (first) {
            table.header = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        for (const std::string& cell : cells) {
            if (cell.empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            double v = 0.0;
            const std::from_chars_result res =
                std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                throw std::invalid_argument("parse_csv: bad numeric cell '" + cell + "'");
            row.push_back(v);
        }
        table.rows.push_back(row);
    }
    return table;
}

} // namespace jbsde
