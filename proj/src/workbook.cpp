#include "ssmi/workbook.hpp"

#include <cctype>
#include <charconv>
#include <fmt/format.h>

#include "ssmi/parser.hpp"  // format_number

namespace ssmi {

std::string col_letters(int col) {
    std::string s;
    while (col > 0) {
        int rem = (col - 1) % 26;
        s.insert(s.begin(), static_cast<char>('A' + rem));
        col = (col - 1) / 26;
    }
    return s;
}

int letters_col(std::string_view s) {
    if (s.empty() || s.size() > 3) return 0;
    int col = 0;
    for (char c : s) {
        if (c < 'A' || c > 'Z') return 0;
        col = col * 26 + (c - 'A' + 1);
    }
    return col;
}

std::string a1(CellPos p) {
    return col_letters(p.col) + std::to_string(p.row);
}

std::optional<CellPos> parse_a1(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && s[i] >= 'A' && s[i] <= 'Z') ++i;
    if (i == 0 || i > 3 || i == s.size()) return std::nullopt;
    int col = letters_col(s.substr(0, i));
    int row = 0;
    auto [p, ec] = std::from_chars(s.data() + i, s.data() + s.size(), row);
    if (ec != std::errc() || p != s.data() + s.size() || row < 1 || col < 1) return std::nullopt;
    return CellPos{col, row};
}

WExpr WExpr::num(double v) {
    WExpr e;
    e.kind = Kind::Number;
    e.number = v;
    return e;
}
WExpr WExpr::cellref(CellRef c) {
    WExpr e;
    e.kind = Kind::Cell;
    e.cell = c;
    return e;
}
WExpr WExpr::nameref(std::string n) {
    WExpr e;
    e.kind = Kind::Name;
    e.name = std::move(n);
    return e;
}
WExpr WExpr::neg(WExpr inner) {
    WExpr e;
    e.kind = Kind::Neg;
    e.children.push_back(std::move(inner));
    return e;
}
WExpr WExpr::bin(char op, WExpr lhs, WExpr rhs) {
    WExpr e;
    e.kind = Kind::BinOp;
    e.op = op;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
}
WExpr WExpr::sum(std::string n) {
    WExpr e;
    e.kind = Kind::SumName;
    e.name = std::move(n);
    return e;
}

namespace {

bool word_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '$';
}

struct WTok {
    enum class Type { Word, Number, Symbol, End };
    Type type = Type::End;
    std::string text;
    double value = 0.0;
};

class WLexer {
public:
    explicit WLexer(std::string_view src) : src_(src) {}

    WTok next() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
        WTok t;
        if (pos_ >= src_.size()) return t;
        char c = src_[pos_];
        if (word_char(c) && !(c >= '0' && c <= '9')) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && word_char(src_[pos_])) ++pos_;
            t.type = WTok::Type::Word;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if ((c >= '0' && c <= '9') || c == '.') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   ((src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '.'))
                ++pos_;
            // exponent tail
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t mark = pos_++;
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
                if (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
                    while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
                } else {
                    pos_ = mark;
                }
            }
            std::string digits(src_.substr(start, pos_ - start));
            double v = 0;
            auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
            if (ec != std::errc() || p != digits.data() + digits.size())
                throw FormulaParseError(fmt::format("malformed number '{}'", digits));
            t.type = WTok::Type::Number;
            t.value = v;
            return t;
        }
        static const std::string symbols = "+-*/^()";
        if (symbols.find(c) != std::string::npos) {
            ++pos_;
            t.type = WTok::Type::Symbol;
            t.text = std::string(1, c);
            return t;
        }
        throw FormulaParseError(fmt::format("unexpected character '{}' in formula", c));
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
};

// "$B$6" / "B6" -> CellRef; words with '_' or >3 letters are names.
std::optional<CellRef> classify_cell(std::string_view w) {
    CellRef r;
    std::size_t i = 0;
    if (i < w.size() && w[i] == '$') {
        r.col_abs = true;
        ++i;
    }
    std::size_t letters = i;
    while (i < w.size() && w[i] >= 'A' && w[i] <= 'Z') ++i;
    std::size_t nletters = i - letters;
    if (nletters == 0 || nletters > 3) return std::nullopt;
    r.col = letters_col(w.substr(letters, nletters));
    if (i < w.size() && w[i] == '$') {
        r.row_abs = true;
        ++i;
    }
    if (i == w.size()) return std::nullopt;
    int row = 0;
    auto [p, ec] = std::from_chars(w.data() + i, w.data() + w.size(), row);
    if (ec != std::errc() || p != w.data() + w.size() || row < 1) return std::nullopt;
    r.row = row;
    return r;
}

class WParser {
public:
    explicit WParser(std::string_view src) : lexer_(src) { advance(); }

    WExpr parse() {
        WExpr e = parse_expr(0);
        if (tok_.type != WTok::Type::End)
            throw FormulaParseError("unexpected trailing tokens in formula");
        return e;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    bool at_symbol(char c) const {
        return tok_.type == WTok::Type::Symbol && tok_.text[0] == c;
    }

    WExpr parse_expr(int min_bp) {
        WExpr lhs = parse_prefix();
        while (tok_.type == WTok::Type::Symbol) {
            char op = tok_.text[0];
            int lbp;
            switch (op) {
            case '+': case '-': lbp = 10; break;
            case '*': case '/': lbp = 20; break;
            case '^': lbp = 40; break;
            default: return lhs;
            }
            if (lbp <= min_bp) return lhs;
            advance();
            WExpr rhs = parse_expr(op == '^' ? 30 : lbp);
            lhs = WExpr::bin(op, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    WExpr parse_prefix() {
        if (at_symbol('-')) {
            advance();
            return WExpr::neg(parse_expr(30));
        }
        if (at_symbol('(')) {
            advance();
            WExpr e = parse_expr(0);
            if (!at_symbol(')')) throw FormulaParseError("expected ')'");
            advance();
            return e;
        }
        if (tok_.type == WTok::Type::Number) {
            WExpr e = WExpr::num(tok_.value);
            advance();
            return e;
        }
        if (tok_.type == WTok::Type::Word) {
            std::string w = tok_.text;
            advance();
            if (w == "SUM" && at_symbol('(')) {
                advance();
                if (tok_.type != WTok::Type::Word)
                    throw FormulaParseError("SUM argument must be a defined name");
                std::string arg = tok_.text;
                if (classify_cell(arg))
                    throw FormulaParseError("SUM argument must be a defined name");
                advance();
                if (!at_symbol(')')) throw FormulaParseError("expected ')'");
                advance();
                return WExpr::sum(std::move(arg));
            }
            if (auto cell = classify_cell(w)) return WExpr::cellref(*cell);
            if (w.find('$') != std::string::npos)
                throw FormulaParseError(fmt::format("malformed reference '{}'", w));
            return WExpr::nameref(std::move(w));
        }
        throw FormulaParseError("expected an expression");
    }

    WLexer lexer_;
    WTok tok_;
};

int wprec(const WExpr& e) {
    switch (e.kind) {
    case WExpr::Kind::BinOp:
        switch (e.op) {
        case '+': case '-': return 1;
        case '*': case '/': return 2;
        case '^': return 4;
        }
        return 0;
    case WExpr::Kind::Neg: return 3;
    default: return 100;
    }
}

std::string cell_text(const CellRef& c) {
    std::string s;
    if (c.col_abs) s += "$";
    s += col_letters(c.col);
    if (c.row_abs) s += "$";
    s += std::to_string(c.row);
    return s;
}

void wrender(const WExpr& e, std::string& out) {
    switch (e.kind) {
    case WExpr::Kind::Number:
        out += format_number(e.number);
        break;
    case WExpr::Kind::Cell:
        out += cell_text(e.cell);
        break;
    case WExpr::Kind::Name:
        out += e.name;
        break;
    case WExpr::Kind::SumName:
        out += "SUM(" + e.name + ")";
        break;
    case WExpr::Kind::Neg: {
        out += "-";
        const WExpr& c = e.children[0];
        // parenthesized so '-' never rebinds under Excel's unary-minus rules
        if (wprec(c) < 100) {
            out += "(";
            wrender(c, out);
            out += ")";
        } else {
            wrender(c, out);
        }
        break;
    }
    case WExpr::Kind::BinOp: {
        int p = wprec(e);
        const WExpr& l = e.children[0];
        const WExpr& r = e.children[1];
        bool lp = wprec(l) < p || (wprec(l) == p && e.op == '^');
        bool rp = (wprec(r) < p || (wprec(r) == p && e.op != '^')) &&
                  !(e.op == '^' && r.kind == WExpr::Kind::Neg);
        if (lp) out += "(";
        wrender(l, out);
        if (lp) out += ")";
        out.push_back(e.op);
        if (rp) out += "(";
        wrender(r, out);
        if (rp) out += ")";
        break;
    }
    }
}

}  // namespace

WExpr parse_formula(std::string_view text) {
    if (text.empty() || text[0] != '=')
        throw FormulaParseError("formula must start with '='");
    return WParser(text.substr(1)).parse();
}

std::string to_formula_text(const WExpr& e) {
    std::string out = "=";
    wrender(e, out);
    return out;
}

CellContent CellContent::literal(double v) {
    CellContent c;
    c.type = Type::Literal;
    c.value = v;
    return c;
}

CellContent CellContent::formula(WExpr e) {
    CellContent c;
    c.type = Type::Formula;
    c.text = to_formula_text(e);
    c.ast = std::move(e);
    return c;
}

CellContent CellContent::formula_text(std::string text) {
    CellContent c;
    c.type = Type::Formula;
    c.text = std::move(text);
    try {
        c.ast = parse_formula(c.text);
    } catch (const FormulaParseError&) {
        c.ast = std::nullopt;
    }
    return c;
}

CellContent CellContent::label(std::string text) {
    CellContent c;
    c.type = Type::Label;
    c.text = std::move(text);
    return c;
}

std::string_view sheet_kind_name(SheetKind k) {
    switch (k) {
    case SheetKind::Interface: return "interface";
    case SheetKind::Parameters: return "parameters";
    case SheetKind::Model: return "model";
    case SheetKind::ModelRepeating: return "model_repeating";
    }
    return "";
}

std::optional<SheetKind> sheet_kind_from(std::string_view s) {
    if (s == "interface") return SheetKind::Interface;
    if (s == "parameters") return SheetKind::Parameters;
    if (s == "model") return SheetKind::Model;
    if (s == "model_repeating") return SheetKind::ModelRepeating;
    return std::nullopt;
}

std::string DefinedName::range_text() const {
    if (width <= 1) return a1(first);
    return a1(first) + ":" + a1(CellPos{first.col + width - 1, first.row});
}

const CellContent* Sheet::cell(CellPos p) const {
    auto it = cells.find(p);
    return it == cells.end() ? nullptr : &it->second;
}

void Sheet::set(CellPos p, CellContent c) {
    cells[p] = std::move(c);
}

int Sheet::max_row() const {
    int r = 0;
    for (const auto& [pos, _] : cells) r = std::max(r, pos.row);
    return r;
}

int Sheet::max_col() const {
    int c = 0;
    for (const auto& [pos, _] : cells) c = std::max(c, pos.col);
    return c;
}

Sheet* Workbook::find_sheet(std::string_view name) {
    for (auto& s : sheets)
        if (s.name == name) return &s;
    return nullptr;
}

const Sheet* Workbook::find_sheet(std::string_view name) const {
    for (const auto& s : sheets)
        if (s.name == name) return &s;
    return nullptr;
}

const DefinedName* Workbook::find_name(std::string_view name) const {
    for (const auto& n : names)
        if (n.name == name) return &n;
    return nullptr;
}

}  // namespace ssmi
