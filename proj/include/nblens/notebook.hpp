#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nblens {

enum class CellKind { Code, Markdown, Other };

// One entry of a code cell's "outputs" list, reduced to what the metrics
// need: the output type and the MIME keys of its data payload, if any.
struct OutputBundle {
    std::set<std::string> mime_keys;
    std::string output_type;

    bool operator==(const OutputBundle&) const = default;
};

struct Cell {
    CellKind kind = CellKind::Other;
    std::string source;  // lines joined with '\n'
    std::optional<long> execution_count;  // code cells only
    std::vector<OutputBundle> outputs;    // code cells only

    bool operator==(const Cell&) const = default;
};

struct Notebook {
    std::string notebook_id;
    int format_major = 0;
    std::vector<Cell> cells;  // file order

    bool operator==(const Notebook&) const = default;
};

// Parses the JSON notebook format, major version >= 4. Cell source is
// accepted as a single string or a list of line strings. Unknown cell types
// map to CellKind::Other.
// Errors: MalformedDocument, UnsupportedFormat, MissingCells.
Notebook parse_notebook(std::string_view raw_bytes, std::string notebook_id);

// Canonical JSON form; parse(serialize(nb)) == nb for any parsed notebook.
std::string serialize_notebook(const Notebook& nb);

// Code-cell sources in cell order with exactly one newline between
// consecutive cells; a cell's own trailing newline is never doubled.
std::string concat_code(const Notebook& nb);

// Physical lines, splitlines-style: a trailing newline terminates the last
// line instead of opening an empty one. Empty text has zero lines.
std::vector<std::string_view> physical_lines(std::string_view text);

}  // namespace nblens
