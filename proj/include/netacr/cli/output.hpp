#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "netacr/cli/config.hpp"

namespace netacr::cli {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Result of one command: the first table is primary, the rest go to side files in CSV mode.
struct Document {
    std::string command;
    std::vector<Table> tables;
    std::vector<std::string> diagnostics;
};

std::string render_csv(const Table& table);
std::string render_json(const Document& doc, const RunConfig& cfg);

/// `<stem>.<name><ext>` next to path, e.g. out.csv -> out.pdfs.csv.
std::string side_path(const std::string& path, const std::string& name);

/// Writes to a temporary file in the same directory, then renames it over path.
void write_atomic(const std::string& path, const std::string& content);

/// Emits the document per cfg.format / cfg.output. Without an output path only the primary table
/// (CSV) or the whole object (JSON) goes to stdout.
void emit(const Document& doc, const RunConfig& cfg);

}  // namespace netacr::cli
