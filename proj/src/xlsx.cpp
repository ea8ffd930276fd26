#include "ssmi/xlsx.hpp"

#include <zlib.h>

#include <cstdint>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "ssmi/parser.hpp"  // format_number
#include "ssmi/recompute.hpp"

namespace ssmi {

namespace {

// Stored (uncompressed) ZIP container; enough for a .xlsx package.
class ZipWriter {
public:
    void add(const std::string& name, const std::string& data) {
        Entry e;
        e.name = name;
        e.crc = ::crc32(0, reinterpret_cast<const Bytef*>(data.data()),
                        static_cast<uInt>(data.size()));
        e.size = static_cast<std::uint32_t>(data.size());
        e.offset = static_cast<std::uint32_t>(out_.size());

        u32(0x04034b50);          // local file header
        u16(20);                  // version needed
        u16(0);                   // flags
        u16(0);                   // method: stored
        u16(0); u16(0x5021);      // fixed DOS time/date for stable bytes
        u32(e.crc);
        u32(e.size);
        u32(e.size);
        u16(static_cast<std::uint16_t>(name.size()));
        u16(0);
        out_ += name;
        out_ += data;
        entries_.push_back(std::move(e));
    }

    std::string finish() {
        std::uint32_t dir_start = static_cast<std::uint32_t>(out_.size());
        for (const auto& e : entries_) {
            u32(0x02014b50);  // central directory header
            u16(20);
            u16(20);
            u16(0);
            u16(0);
            u16(0); u16(0x5021);
            u32(e.crc);
            u32(e.size);
            u32(e.size);
            u16(static_cast<std::uint16_t>(e.name.size()));
            u16(0); u16(0); u16(0); u16(0);
            u32(0);
            u32(e.offset);
            out_ += e.name;
        }
        std::uint32_t dir_size = static_cast<std::uint32_t>(out_.size()) - dir_start;
        u32(0x06054b50);  // end of central directory
        u16(0); u16(0);
        u16(static_cast<std::uint16_t>(entries_.size()));
        u16(static_cast<std::uint16_t>(entries_.size()));
        u32(dir_size);
        u32(dir_start);
        u16(0);
        return std::move(out_);
    }

private:
    struct Entry {
        std::string name;
        std::uint32_t crc = 0;
        std::uint32_t size = 0;
        std::uint32_t offset = 0;
    };

    void u16(std::uint16_t v) {
        out_.push_back(static_cast<char>(v & 0xff));
        out_.push_back(static_cast<char>((v >> 8) & 0xff));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    std::string out_;
    std::vector<Entry> entries_;
};

// attribute values (quote-delimited with ")
std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

// element text; apostrophes stay literal ('Model Region'!$B$7)
std::string xml_text(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string quoted_sheet(const std::string& name) {
    if (name.find(' ') == std::string::npos) return name;
    return "'" + name + "'";
}

std::string content_types(std::size_t n_sheets) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
       << "<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">"
       << "<Default Extension=\"rels\" ContentType=\"application/vnd.openxmlformats-package.relationships+xml\"/>"
       << "<Default Extension=\"xml\" ContentType=\"application/xml\"/>"
       << "<Override PartName=\"/xl/workbook.xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml\"/>"
       << "<Override PartName=\"/xl/styles.xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.styles+xml\"/>";
    for (std::size_t i = 1; i <= n_sheets; ++i)
        os << "<Override PartName=\"/xl/worksheets/sheet" << i
           << ".xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.worksheet+xml\"/>";
    os << "</Types>";
    return os.str();
}

std::string root_rels() {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
           "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">"
           "<Relationship Id=\"rId1\" "
           "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument\" "
           "Target=\"xl/workbook.xml\"/>"
           "</Relationships>";
}

std::string workbook_rels(std::size_t n_sheets) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
       << "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">";
    for (std::size_t i = 1; i <= n_sheets; ++i)
        os << "<Relationship Id=\"rId" << i
           << "\" Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/worksheet\" "
           << "Target=\"worksheets/sheet" << i << ".xml\"/>";
    os << "<Relationship Id=\"rId" << n_sheets + 1
       << "\" Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/styles\" "
       << "Target=\"styles.xml\"/>";
    os << "</Relationships>";
    return os.str();
}

std::string workbook_xml(const Workbook& wb) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
       << "<workbook xmlns=\"http://schemas.openxmlformats.org/spreadsheetml/2006/main\" "
       << "xmlns:r=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships\">"
       << "<sheets>";
    for (std::size_t i = 0; i < wb.sheets.size(); ++i)
        os << "<sheet name=\"" << xml_escape(wb.sheets[i].name) << "\" sheetId=\"" << i + 1
           << "\" r:id=\"rId" << i + 1 << "\"/>";
    os << "</sheets>";
    if (!wb.names.empty()) {
        os << "<definedNames>";
        for (const auto& n : wb.names) {
            // defined-name targets use the conventional absolute form
            std::string target = quoted_sheet(n.sheet) + "!$" + col_letters(n.first.col) + "$" +
                                 std::to_string(n.first.row);
            if (n.width > 1)
                target += ":$" + col_letters(n.first.col + n.width - 1) + "$" +
                          std::to_string(n.first.row);
            os << "<definedName name=\"" << xml_escape(n.name) << "\">" << xml_text(target)
               << "</definedName>";
        }
        os << "</definedNames>";
    }
    os << "<calcPr fullCalcOnLoad=\"1\"/>"
       << "</workbook>";
    return os.str();
}

std::string styles_xml() {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
           "<styleSheet xmlns=\"http://schemas.openxmlformats.org/spreadsheetml/2006/main\">"
           "<fonts count=\"2\">"
           "<font><sz val=\"11\"/><name val=\"Calibri\"/></font>"
           "<font><b/><i/><sz val=\"11\"/><name val=\"Calibri\"/></font>"
           "</fonts>"
           "<fills count=\"1\"><fill><patternFill patternType=\"none\"/></fill></fills>"
           "<borders count=\"1\"><border/></borders>"
           "<cellStyleXfs count=\"1\"><xf/></cellStyleXfs>"
           "<cellXfs count=\"2\">"
           "<xf numFmtId=\"0\" fontId=\"0\" xfId=\"0\"/>"
           "<xf numFmtId=\"0\" fontId=\"1\" xfId=\"0\" applyFont=\"1\"/>"
           "</cellXfs>"
           "</styleSheet>";
}

std::string sheet_xml(const Sheet& sheet, const std::map<SheetCell, double>* values) {
    // group cells by row (map iteration is already row-major)
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
       << "<worksheet xmlns=\"http://schemas.openxmlformats.org/spreadsheetml/2006/main\">"
       << "<sheetData>";
    int current_row = -1;
    bool row_open = false;
    for (const auto& [pos, content] : sheet.cells) {
        if (pos.row != current_row) {
            if (row_open) os << "</row>";
            os << "<row r=\"" << pos.row << "\">";
            current_row = pos.row;
            row_open = true;
        }
        std::string style = content.bold_italic ? " s=\"1\"" : "";
        switch (content.type) {
        case CellContent::Type::Label:
            os << "<c r=\"" << a1(pos) << "\"" << style << " t=\"inlineStr\"><is><t>"
               << xml_text(content.text) << "</t></is></c>";
            break;
        case CellContent::Type::Literal:
            os << "<c r=\"" << a1(pos) << "\"" << style << "><v>" << format_number(content.value)
               << "</v></c>";
            break;
        case CellContent::Type::Formula: {
            os << "<c r=\"" << a1(pos) << "\"" << style << "><f>"
               << xml_text(content.text.substr(1)) << "</f>";
            if (values) {
                auto it = values->find({sheet.name, pos});
                if (it != values->end()) os << "<v>" << format_number(it->second) << "</v>";
            }
            os << "</c>";
            break;
        }
        }
    }
    if (row_open) os << "</row>";
    os << "</sheetData></worksheet>";
    return os.str();
}

}  // namespace

void write_xlsx(const Workbook& wb, const std::filesystem::path& path) {
    std::map<SheetCell, double> values;
    const std::map<SheetCell, double>* values_ptr = nullptr;
    try {
        values = recompute(wb);
        values_ptr = &values;
    } catch (const Error&) {
        // still export; the application recalculates on load
    }

    ZipWriter zip;
    zip.add("[Content_Types].xml", content_types(wb.sheets.size()));
    zip.add("_rels/.rels", root_rels());
    zip.add("xl/workbook.xml", workbook_xml(wb));
    zip.add("xl/_rels/workbook.xml.rels", workbook_rels(wb.sheets.size()));
    zip.add("xl/styles.xml", styles_xml());
    for (std::size_t i = 0; i < wb.sheets.size(); ++i)
        zip.add(fmt::format("xl/worksheets/sheet{}.xml", i + 1),
                sheet_xml(wb.sheets[i], values_ptr));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    std::string bytes = zip.finish();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace ssmi
