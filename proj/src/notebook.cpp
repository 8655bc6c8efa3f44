#include "nblens/notebook.hpp"

#include <json.hpp>

#include "nblens/errors.hpp"

namespace nblens {

namespace {

using nlohmann::json;

std::string join_source(const json& src) {
    if (src.is_string()) return src.get<std::string>();
    if (!src.is_array()) fail("MalformedDocument", "cell source must be a string or list of strings");
    // Line lists usually carry their own terminators; normalize either way.
    std::string out;
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (!src[i].is_string()) fail("MalformedDocument", "cell source line is not a string");
        std::string line = src[i].get<std::string>();
        if (!line.empty() && line.back() == '\n') line.pop_back();
        out += line;
        if (i + 1 < src.size()) out.push_back('\n');
    }
    return out;
}

OutputBundle parse_output(const json& out) {
    OutputBundle bundle;
    if (out.contains("output_type") && out["output_type"].is_string())
        bundle.output_type = out["output_type"].get<std::string>();
    if (out.contains("data") && out["data"].is_object()) {
        for (auto it = out["data"].begin(); it != out["data"].end(); ++it)
            bundle.mime_keys.insert(it.key());
    }
    return bundle;
}

Cell parse_cell(const json& c) {
    if (!c.is_object()) fail("MalformedDocument", "cell is not an object");
    Cell cell;
    std::string type = c.value("cell_type", std::string());
    if (type == "code")
        cell.kind = CellKind::Code;
    else if (type == "markdown")
        cell.kind = CellKind::Markdown;
    else
        cell.kind = CellKind::Other;

    if (c.contains("source")) cell.source = join_source(c["source"]);

    if (cell.kind == CellKind::Code) {
        if (c.contains("execution_count") && c["execution_count"].is_number_integer())
            cell.execution_count = c["execution_count"].get<long>();
        if (c.contains("outputs") && c["outputs"].is_array()) {
            for (const auto& out : c["outputs"])
                if (out.is_object()) cell.outputs.push_back(parse_output(out));
        }
    }
    return cell;
}

}  // namespace

Notebook parse_notebook(std::string_view raw_bytes, std::string notebook_id) {
    json doc = json::parse(raw_bytes, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        fail("MalformedDocument", "not a JSON notebook: " + notebook_id);
    if (!doc.contains("nbformat") || !doc["nbformat"].is_number_integer())
        fail("MalformedDocument", "missing nbformat: " + notebook_id);
    int major = doc["nbformat"].get<int>();
    if (major < 4)
        fail("UnsupportedFormat", "nbformat " + std::to_string(major) + " < 4: " + notebook_id);
    if (!doc.contains("cells") || !doc["cells"].is_array())
        fail("MissingCells", "no cell list: " + notebook_id);

    Notebook nb;
    nb.notebook_id = std::move(notebook_id);
    nb.format_major = major;
    nb.cells.reserve(doc["cells"].size());
    for (const auto& c : doc["cells"]) nb.cells.push_back(parse_cell(c));
    return nb;
}

std::string serialize_notebook(const Notebook& nb) {
    json cells = json::array();
    for (const auto& cell : nb.cells) {
        json c;
        switch (cell.kind) {
            case CellKind::Code: c["cell_type"] = "code"; break;
            case CellKind::Markdown: c["cell_type"] = "markdown"; break;
            case CellKind::Other: c["cell_type"] = "raw"; break;
        }
        c["source"] = cell.source;
        c["metadata"] = json::object();
        if (cell.kind == CellKind::Code) {
            c["execution_count"] = cell.execution_count ? json(*cell.execution_count) : json(nullptr);
            json outs = json::array();
            for (const auto& out : cell.outputs) {
                json o;
                o["output_type"] = out.output_type;
                if (!out.mime_keys.empty()) {
                    json data = json::object();
                    for (const auto& key : out.mime_keys) data[key] = json::object();
                    o["data"] = data;
                }
                outs.push_back(o);
            }
            c["outputs"] = outs;
        }
        cells.push_back(c);
    }
    json doc;
    doc["nbformat"] = nb.format_major;
    doc["nbformat_minor"] = 0;
    doc["cells"] = cells;
    return doc.dump(1);
}

std::string concat_code(const Notebook& nb) {
    std::string out;
    for (const auto& cell : nb.cells) {
        if (cell.kind != CellKind::Code) continue;
        if (!out.empty() && out.back() != '\n') out.push_back('\n');
        out += cell.source;
    }
    return out;
}

std::vector<std::string_view> physical_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

}  // namespace nblens
