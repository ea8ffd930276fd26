#include "ssmi/wbjson.hpp"

#include <fmt/format.h>

#include "json.hpp"

namespace ssmi {

using nlohmann::json;

SchemaError::SchemaError(std::string pointer, const std::string& message)
    : Error(fmt::format("{}: {}", pointer, message)), pointer_(std::move(pointer)) {}

std::string write_json(const Workbook& wb) {
    json root;
    root["names"] = json::array();
    for (const auto& n : wb.names) {
        json jn;
        jn["n"] = n.name;
        jn["sheet"] = n.sheet;
        jn["range"] = n.range_text();
        root["names"].push_back(std::move(jn));
    }
    root["sheets"] = json::array();
    for (const auto& s : wb.sheets) {
        json js;
        js["name"] = s.name;
        js["kind"] = std::string(sheet_kind_name(s.kind));
        js["cells"] = json::object();
        for (const auto& [pos, content] : s.cells) {
            json jc;
            switch (content.type) {
            case CellContent::Type::Literal: jc["v"] = content.value; break;
            case CellContent::Type::Formula: jc["f"] = content.text; break;
            case CellContent::Type::Label: jc["l"] = content.text; break;
            }
            if (content.bold_italic) jc["s"] = "bi";
            js["cells"][a1(pos)] = std::move(jc);
        }
        root["sheets"].push_back(std::move(js));
    }
    return root.dump(2) + "\n";
}

namespace {

// "B6" or "B7:D7" (single row)
struct RangeParts {
    CellPos first;
    int width;
};

std::optional<RangeParts> parse_range(std::string_view s) {
    auto colon = s.find(':');
    if (colon == std::string_view::npos) {
        auto p = parse_a1(s);
        if (!p) return std::nullopt;
        return RangeParts{*p, 1};
    }
    auto a = parse_a1(s.substr(0, colon));
    auto b = parse_a1(s.substr(colon + 1));
    if (!a || !b || a->row != b->row || b->col < a->col) return std::nullopt;
    return RangeParts{*a, b->col - a->col + 1};
}

const json& require(const json& j, const char* key, const std::string& ptr) {
    if (!j.contains(key)) throw SchemaError(ptr + "/" + key, "missing required key");
    return j.at(key);
}

std::string require_string(const json& j, const char* key, const std::string& ptr) {
    const json& v = require(j, key, ptr);
    if (!v.is_string()) throw SchemaError(ptr + "/" + key, "expected a string");
    return v.get<std::string>();
}

}  // namespace

Workbook read_json(std::string_view bytes) {
    json root = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (root.is_discarded()) throw SchemaError("", "invalid JSON");
    if (!root.is_object()) throw SchemaError("", "expected a JSON object");

    Workbook wb;
    const json sheets = require(root, "sheets", "");
    if (!sheets.is_array()) throw SchemaError("/sheets", "expected an array");
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        std::string ptr = fmt::format("/sheets/{}", i);
        const json& js = sheets[i];
        if (!js.is_object()) throw SchemaError(ptr, "expected an object");
        Sheet s;
        s.name = require_string(js, "name", ptr);
        std::string kind = require_string(js, "kind", ptr);
        auto k = sheet_kind_from(kind);
        if (!k) throw SchemaError(ptr + "/kind", fmt::format("unknown sheet kind '{}'", kind));
        s.kind = *k;
        const json& cells = require(js, "cells", ptr);
        if (!cells.is_object()) throw SchemaError(ptr + "/cells", "expected an object");
        for (auto it = cells.begin(); it != cells.end(); ++it) {
            std::string cptr = ptr + "/cells/" + it.key();
            auto pos = parse_a1(it.key());
            if (!pos) throw SchemaError(cptr, "bad cell address");
            const json& jc = it.value();
            if (!jc.is_object()) throw SchemaError(cptr, "expected an object");
            int payloads = jc.contains("v") + jc.contains("f") + jc.contains("l");
            if (payloads != 1)
                throw SchemaError(cptr, "cell needs exactly one of 'v', 'f', 'l'");
            CellContent content;
            if (jc.contains("v")) {
                if (!jc["v"].is_number()) throw SchemaError(cptr + "/v", "expected a number");
                content = CellContent::literal(jc["v"].get<double>());
            } else if (jc.contains("f")) {
                if (!jc["f"].is_string()) throw SchemaError(cptr + "/f", "expected a string");
                content = CellContent::formula_text(jc["f"].get<std::string>());
            } else {
                if (!jc["l"].is_string()) throw SchemaError(cptr + "/l", "expected a string");
                content = CellContent::label(jc["l"].get<std::string>());
            }
            if (jc.contains("s")) {
                if (!jc["s"].is_string() || jc["s"].get<std::string>() != "bi")
                    throw SchemaError(cptr + "/s", "unknown style");
                content.bold_italic = true;
            }
            for (auto jt = jc.begin(); jt != jc.end(); ++jt) {
                std::string key = jt.key();
                if (key != "v" && key != "f" && key != "l" && key != "s")
                    throw SchemaError(cptr + "/" + key, "unknown cell key");
            }
            s.set(*pos, std::move(content));
        }
        if (wb.find_sheet(s.name)) throw SchemaError(ptr + "/name", "duplicate sheet name");
        wb.sheets.push_back(std::move(s));
    }

    int n_params = 0, n_interface = 0;
    for (const auto& s : wb.sheets) {
        n_params += s.kind == SheetKind::Parameters;
        n_interface += s.kind == SheetKind::Interface;
    }
    if (n_params != 1) throw SchemaError("/sheets", "exactly one parameters sheet required");
    if (n_interface != 1) throw SchemaError("/sheets", "exactly one interface sheet required");

    if (root.contains("names")) {
        const json& names = root["names"];
        if (!names.is_array()) throw SchemaError("/names", "expected an array");
        for (std::size_t i = 0; i < names.size(); ++i) {
            std::string ptr = fmt::format("/names/{}", i);
            const json& jn = names[i];
            if (!jn.is_object()) throw SchemaError(ptr, "expected an object");
            DefinedName dn;
            dn.name = require_string(jn, "n", ptr);
            dn.sheet = require_string(jn, "sheet", ptr);
            auto range = parse_range(require_string(jn, "range", ptr));
            if (!range) throw SchemaError(ptr + "/range", "bad range");
            dn.first = range->first;
            dn.width = range->width;
            const Sheet* sheet = wb.find_sheet(dn.sheet);
            if (!sheet) throw SchemaError(ptr + "/sheet", "no such sheet");
            for (int c = 0; c < dn.width; ++c) {
                CellPos p{dn.first.col + c, dn.first.row};
                if (!sheet->cell(p))
                    throw SchemaError(ptr + "/range",
                                      fmt::format("name '{}' points at empty cell {}", dn.name, a1(p)));
            }
            if (wb.find_name(dn.name)) throw SchemaError(ptr + "/n", "duplicate name");
            wb.names.push_back(std::move(dn));
        }
    }

    for (auto it = root.begin(); it != root.end(); ++it) {
        if (it.key() != "sheets" && it.key() != "names")
            throw SchemaError("/" + it.key(), "unknown key");
    }
    return wb;
}

}  // namespace ssmi
