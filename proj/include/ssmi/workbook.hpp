#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssmi/model.hpp"

namespace ssmi {

// 1-based cell coordinates, row-major ordering.
struct CellPos {
    int col = 1;
    int row = 1;

    auto operator<=>(const CellPos& o) const {
        if (auto c = row <=> o.row; c != 0) return c;
        return col <=> o.col;
    }
    bool operator==(const CellPos&) const = default;
};

std::string col_letters(int col);          // 1 -> "A", 28 -> "AB"
int letters_col(std::string_view s);       // inverse; 0 on bad input
std::string a1(CellPos p);                 // "B6"
std::optional<CellPos> parse_a1(std::string_view s);

// In-formula reference; always within the containing sheet.
struct CellRef {
    int col = 1;
    int row = 1;
    bool col_abs = false;
    bool row_abs = false;
    bool operator==(const CellRef&) const = default;
};

class FormulaParseError : public Error {
public:
    using Error::Error;
};

// Workbook formula AST: cell refs, name refs, arithmetic, SUM over a name.
struct WExpr {
    enum class Kind { Number, Cell, Name, Neg, BinOp, SumName };

    Kind kind = Kind::Number;
    double number = 0.0;
    CellRef cell;        // Cell
    std::string name;    // Name / SumName
    char op = 0;         // BinOp
    std::vector<WExpr> children;

    static WExpr num(double v);
    static WExpr cellref(CellRef c);
    static WExpr nameref(std::string n);
    static WExpr neg(WExpr e);
    static WExpr bin(char op, WExpr lhs, WExpr rhs);
    static WExpr sum(std::string n);

    bool operator==(const WExpr&) const = default;
};

// "=B5*B6" forms; serialize(parse(text)) == text for canonical text.
WExpr parse_formula(std::string_view text);
std::string to_formula_text(const WExpr& e);  // includes the leading '='

struct CellContent {
    enum class Type { Literal, Formula, Label };

    Type type = Type::Literal;
    double value = 0.0;             // Literal
    std::string text;               // Formula: raw text with '='; Label: text
    std::optional<WExpr> ast;       // parsed formula, nullopt if unparsable
    bool bold_italic = false;

    static CellContent literal(double v);
    static CellContent formula(WExpr e);                // canonical text from AST
    static CellContent formula_text(std::string text);  // keeps raw text
    static CellContent label(std::string text);
};

enum class SheetKind { Interface, Parameters, Model, ModelRepeating };

std::string_view sheet_kind_name(SheetKind k);
std::optional<SheetKind> sheet_kind_from(std::string_view s);

inline bool is_model_kind(SheetKind k) {
    return k == SheetKind::Model || k == SheetKind::ModelRepeating;
}

// Single cell (width 1) or a 1xN horizontal run.
struct DefinedName {
    std::string name;
    std::string sheet;
    CellPos first;
    int width = 1;

    std::string range_text() const;  // "B6" or "B7:D7"
};

struct Sheet {
    std::string name;
    SheetKind kind = SheetKind::Model;
    std::map<CellPos, CellContent> cells;

    const CellContent* cell(CellPos p) const;
    void set(CellPos p, CellContent c);
    int max_row() const;
    int max_col() const;
};

struct Workbook {
    std::vector<Sheet> sheets;
    std::vector<DefinedName> names;

    Sheet* find_sheet(std::string_view name);
    const Sheet* find_sheet(std::string_view name) const;
    const DefinedName* find_name(std::string_view name) const;
};

}  // namespace ssmi
