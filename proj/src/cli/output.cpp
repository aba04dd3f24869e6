#include "netacr/cli/output.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <fmt/format.h>
#include <unistd.h>

#include "json.hpp"

namespace netacr::cli {

namespace {

std::string format_cell(const Cell& c)
{
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return fmt::format("{}", *i);
    }
    if (const auto* d = std::get_if<double>(&c)) {
        return fmt::format("{:.10g}", *d);
    }
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string quoted = "\"";
    for (char ch : s) {
        quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return quoted + "\"";
}

nlohmann::ordered_json cell_json(const Cell& c)
{
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return *i;
    }
    if (const auto* d = std::get_if<double>(&c)) {
        return *d;
    }
    return std::get<std::string>(c);
}

/// Config values are kept as text; numeric ones are echoed as JSON numbers.
nlohmann::ordered_json config_value(const std::string& text)
{
    const char* end = text.data() + text.size();
    std::uint64_t u = 0;
    if (auto [p, ec] = std::from_chars(text.data(), end, u); ec == std::errc() && p == end) {
        return u;
    }
    std::int64_t i = 0;
    if (auto [p, ec] = std::from_chars(text.data(), end, i); ec == std::errc() && p == end) {
        return i;
    }
    double d = 0.0;
    if (auto [p, ec] = std::from_chars(text.data(), end, d); ec == std::errc() && p == end) {
        return d;
    }
    return text;
}

}  // namespace

std::string render_csv(const Table& table)
{
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out += (i ? "," : "") + table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i ? "," : "") + format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Document& doc, const RunConfig& cfg)
{
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    config["command"] = doc.command;
    for (const auto& key : keys()) {
        if (key.echoed) {
            config[key.name] = config_value(key.get(cfg));
        }
    }
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    for (const auto& table : doc.tables) {
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            nlohmann::ordered_json obj = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < row.size(); ++i) {
                obj[table.columns[i]] = cell_json(row[i]);
            }
            rows.push_back(std::move(obj));
        }
        results[table.name] = std::move(rows);
    }
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    out["config"] = std::move(config);
    out["results"] = std::move(results);
    out["diagnostics"] = doc.diagnostics;
    return out.dump(2) + "\n";
}

std::string side_path(const std::string& path, const std::string& name)
{
    const std::filesystem::path p(path);
    auto result = p.parent_path() / (p.stem().string() + "." + name + p.extension().string());
    return result.string();
}

void write_atomic(const std::string& path, const std::string& content)
{
    const std::string tmp = fmt::format("{}.tmp{}", path, static_cast<long>(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error(fmt::format("cannot open '{}' for writing", tmp));
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw std::runtime_error(fmt::format("failed writing '{}'", tmp));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error(fmt::format("cannot rename onto '{}': {}", path, ec.message()));
    }
}

void emit(const Document& doc, const RunConfig& cfg)
{
    if (cfg.format == Format::Json) {
        const auto text = render_json(doc, cfg);
        if (cfg.output.empty()) {
            std::cout << text;
        } else {
            write_atomic(cfg.output, text);
        }
        return;
    }
    for (const auto& d : doc.diagnostics) {
        std::cerr << "warning: " << d << '\n';
    }
    if (doc.tables.empty()) {
        return;
    }
    if (cfg.output.empty()) {
        std::cout << render_csv(doc.tables.front());
        if (doc.tables.size() > 1) {
            std::cerr << "note: side tables are written only with --output\n";
        }
        return;
    }
    write_atomic(cfg.output, render_csv(doc.tables.front()));
    for (std::size_t i = 1; i < doc.tables.size(); ++i) {
        write_atomic(side_path(cfg.output, doc.tables[i].name), render_csv(doc.tables[i]));
    }
}

}  // namespace netacr::cli
