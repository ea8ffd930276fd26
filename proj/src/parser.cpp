#include "ssmi/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace ssmi {

ParseError::ParseError(SourceSpan span, const std::string& message)
    : Error(fmt::format("{}:{}: {}", span.line, span.column, message)), span_(span) {}

std::string format_number(double v) {
    return fmt::format("{}", v);
}

namespace {

bool is_ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct Token {
    enum class Type { Ident, String, Number, Symbol, End };
    Type type = Type::End;
    std::string text;    // Ident/String content, Symbol spelling
    double value = 0.0;  // Number
    SourceSpan span;
};

// Tokenizes one logical line (statements never span lines).
class LineLexer {
public:
    LineLexer(std::string_view line, int line_no) : line_(line), line_no_(line_no) {}

    Token next() {
        skip_ws();
        Token t;
        t.span = {line_no_, static_cast<int>(pos_) + 1, 1};
        if (pos_ >= line_.size()) return t;  // End

        char c = line_[pos_];
        if (is_ident_start(c)) return lex_ident();
        if (c == '"') return lex_string();
        if (is_digit(c) || c == '$' || (c == '.' && pos_ + 1 < line_.size() && is_digit(line_[pos_ + 1])))
            return lex_number();
        static const std::string symbols = "=[](),+-*/^";
        if (symbols.find(c) != std::string::npos) {
            ++pos_;
            t.type = Token::Type::Symbol;
            t.text = std::string(1, c);
            return t;
        }
        throw ParseError(t.span, fmt::format("unexpected character '{}'", c));
    }

private:
    void skip_ws() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }

    Token lex_ident() {
        Token t;
        std::size_t start = pos_;
        while (pos_ < line_.size() && is_ident_char(line_[pos_])) ++pos_;
        t.type = Token::Type::Ident;
        t.text = std::string(line_.substr(start, pos_ - start));
        t.span = {line_no_, static_cast<int>(start) + 1, static_cast<int>(pos_ - start)};
        return t;
    }

    Token lex_string() {
        Token t;
        std::size_t start = pos_;
        ++pos_;  // opening quote
        std::string content;
        while (pos_ < line_.size() && line_[pos_] != '"') content.push_back(line_[pos_++]);
        if (pos_ >= line_.size())
            throw ParseError({line_no_, static_cast<int>(start) + 1, 1}, "unterminated string");
        ++pos_;  // closing quote
        t.type = Token::Type::String;
        t.text = std::move(content);
        t.span = {line_no_, static_cast<int>(start) + 1, static_cast<int>(pos_ - start)};
        return t;
    }

    // Numbers accept a leading '$' (presentation only), ',' and '_' digit
    // separators, a decimal part, an exponent, and a '%' suffix (value/100).
    // A ',' joins the number only when followed by a 3-digit group, so list
    // separators still work: [48%, 23%] vs 2,500,000.
    Token lex_number() {
        Token t;
        std::size_t start = pos_;
        if (line_[pos_] == '$') ++pos_;
        std::string digits;
        bool any = false;
        while (pos_ < line_.size()) {
            char c = line_[pos_];
            if (is_digit(c)) {
                digits.push_back(c);
                ++pos_;
                any = true;
            } else if (c == '_' && any && pos_ + 1 < line_.size() && is_digit(line_[pos_ + 1])) {
                ++pos_;
            } else if (c == ',' && any && group_of_three(pos_ + 1)) {
                ++pos_;
            } else {
                break;
            }
        }
        if (pos_ < line_.size() && line_[pos_] == '.') {
            digits.push_back('.');
            ++pos_;
            while (pos_ < line_.size() && is_digit(line_[pos_])) {
                digits.push_back(line_[pos_++]);
                any = true;
            }
        }
        if (pos_ < line_.size() && (line_[pos_] == 'e' || line_[pos_] == 'E')) {
            std::size_t mark = pos_;
            std::string exp;
            ++pos_;
            if (pos_ < line_.size() && (line_[pos_] == '+' || line_[pos_] == '-')) exp.push_back(line_[pos_++]);
            if (pos_ < line_.size() && is_digit(line_[pos_])) {
                while (pos_ < line_.size() && is_digit(line_[pos_])) exp.push_back(line_[pos_++]);
                digits += "e" + exp;
            } else {
                pos_ = mark;  // not an exponent, e.g. "12east" -> error later
            }
        }
        t.span = {line_no_, static_cast<int>(start) + 1, static_cast<int>(pos_ - start)};
        if (!any) throw ParseError(t.span, "malformed number");
        double v = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc() || p != digits.data() + digits.size())
            throw ParseError(t.span, "malformed number");
        if (pos_ < line_.size() && line_[pos_] == '%') {
            ++pos_;
            v /= 100.0;
            t.span.length = static_cast<int>(pos_ - start);
        }
        t.type = Token::Type::Number;
        t.value = v;
        return t;
    }

    // true when positions p..p+2 are digits and p+3 is not a digit
    bool group_of_three(std::size_t p) const {
        if (p + 3 > line_.size()) return false;
        for (std::size_t i = p; i < p + 3; ++i)
            if (!is_digit(line_[i])) return false;
        if (p + 3 < line_.size() && is_digit(line_[p + 3])) return false;
        return true;
    }

    std::string_view line_;
    int line_no_;
    std::size_t pos_ = 0;
};

struct PendingRef {
    std::string name;
    SourceSpan span;
};

class StatementParser {
public:
    StatementParser(std::string_view line, int line_no) : lexer_(line, line_no) {
        advance();
    }

    void parse_into(Model& model, std::vector<std::vector<PendingRef>>& refs_per_var,
                    std::set<std::string>& canonical_seen) {
        expect_ident("statement keyword");
        std::string kw = tok_.text;
        SourceSpan kw_span = tok_.span;
        advance();
        if (kw == "dimension") {
            parse_dimension(model, kw_span);
        } else if (kw == "input" || kw == "param" || kw == "calc") {
            parse_variable(kw, model, refs_per_var, canonical_seen);
        } else {
            throw ParseError(kw_span, fmt::format("unknown statement '{}'", kw));
        }
        if (tok_.type != Token::Type::End)
            throw ParseError(tok_.span, "unexpected trailing tokens");
    }

private:
    void advance() { tok_ = lexer_.next(); }

    void expect_ident(const std::string& what) {
        if (tok_.type != Token::Type::Ident)
            throw ParseError(tok_.span, fmt::format("expected {}", what));
    }

    void expect_symbol(char c) {
        if (tok_.type != Token::Type::Symbol || tok_.text[0] != c)
            throw ParseError(tok_.span, fmt::format("expected '{}'", c));
        advance();
    }

    bool at_symbol(char c) const {
        return tok_.type == Token::Type::Symbol && tok_.text[0] == c;
    }

    std::string parse_label() {
        if (tok_.type == Token::Type::Ident || tok_.type == Token::Type::String) {
            std::string s = tok_.text;
            if (s.empty()) throw ParseError(tok_.span, "empty label");
            advance();
            return s;
        }
        throw ParseError(tok_.span, "expected a label (identifier or quoted string)");
    }

    void parse_dimension(Model& model, SourceSpan kw_span) {
        if (model.dimension)
            throw ParseError(kw_span, "multiple dimensions are not supported");
        expect_ident("dimension name");
        Dimension dim;
        dim.name = tok_.text;
        advance();
        expect_symbol('=');
        expect_symbol('[');
        std::set<std::string> seen;
        while (true) {
            SourceSpan s = tok_.span;
            std::string label = parse_label();
            if (!seen.insert(label).second)
                throw ParseError(s, fmt::format("duplicate instance label '{}'", label));
            dim.instances.push_back(label);
            if (at_symbol(',')) {
                advance();
                continue;
            }
            break;
        }
        expect_symbol(']');
        model.dimension = std::move(dim);
    }

    void parse_variable(const std::string& kw, Model& model,
                        std::vector<std::vector<PendingRef>>& refs_per_var,
                        std::set<std::string>& canonical_seen) {
        Variable v;
        if (kw == "input") v.kind = VariableKind::Input;
        if (kw == "param") v.kind = VariableKind::Parameter;
        if (kw == "calc") {
            v.kind = VariableKind::Calculated;
            if (tok_.type == Token::Type::Ident && tok_.text == "out") {
                v.kind = VariableKind::Output;
                advance();
            }
        }

        SourceSpan label_span = tok_.span;
        v.display_label = parse_label();
        try {
            v.canonical_name = mangle(v.display_label);
        } catch (const EmptyLabelError&) {
            throw ParseError(label_span, "label is empty after trimming");
        }
        if (!canonical_seen.insert(v.canonical_name).second)
            throw ParseError(label_span,
                             fmt::format("name collision: '{}' mangles to '{}' which is already defined",
                                         v.display_label, v.canonical_name));

        if (tok_.type == Token::Type::Ident && tok_.text == "over") {
            advance();
            expect_ident("dimension name after 'over'");
            if (!model.dimension || model.dimension->name != tok_.text)
                throw ParseError(tok_.span,
                                 fmt::format("'over' names undeclared dimension '{}'", tok_.text));
            v.repeating = true;
            advance();
        }

        expect_symbol('=');

        std::vector<PendingRef> refs;
        if (is_given(v.kind)) {
            parse_literals(v, model);
        } else {
            v.formula = parse_expr(0, refs);
        }
        model.variables.push_back(std::move(v));
        refs_per_var.push_back(std::move(refs));
    }

    double parse_signed_number() {
        bool negate = false;
        if (at_symbol('-')) {
            negate = true;
            advance();
        }
        if (tok_.type != Token::Type::Number)
            throw ParseError(tok_.span, "expected a numeric literal");
        double v = tok_.value;
        advance();
        return negate ? -v : v;
    }

    void parse_literals(Variable& v, const Model& model) {
        if (at_symbol('[')) {
            advance();
            while (true) {
                v.literals.push_back(parse_signed_number());
                if (at_symbol(',')) {
                    advance();
                    continue;
                }
                break;
            }
            expect_symbol(']');
        } else {
            SourceSpan s = tok_.span;
            v.literals.push_back(parse_signed_number());
            if (v.repeating && model.dimension && model.dimension->instances.size() != 1)
                throw ParseError(s, "repeating variable needs a bracketed literal list");
        }
        std::size_t want = v.repeating ? model.dimension->instances.size() : 1;
        if (v.literals.size() != want)
            throw ParseError(tok_.span,
                             fmt::format("expected {} literal(s), got {}", want, v.literals.size()));
    }

    // Pratt parser. Binding powers: + - 10; * / 20; unary minus 30; ^ 40
    // (right-assoc, rhs parsed at 30 so '^ -x' nests the minus underneath).
    Expr parse_expr(int min_bp, std::vector<PendingRef>& refs) {
        Expr lhs = parse_prefix(refs);
        while (tok_.type == Token::Type::Symbol) {
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
            int rbp = (op == '^') ? 30 : lbp;
            Expr rhs = parse_expr(rbp, refs);
            lhs = Expr::bin(op, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr parse_prefix(std::vector<PendingRef>& refs) {
        if (at_symbol('-')) {
            advance();
            return Expr::neg(parse_expr(30, refs));
        }
        if (at_symbol('(')) {
            advance();
            Expr e = parse_expr(0, refs);
            expect_symbol(')');
            return e;
        }
        if (tok_.type == Token::Type::Number) {
            Expr e = Expr::num(tok_.value);
            advance();
            return e;
        }
        if (tok_.type == Token::Type::Ident) {
            if (tok_.text == "SUM") {
                advance();
                expect_symbol('(');
                expect_ident("a variable name as the aggregate argument");
                PendingRef r{tok_.text, tok_.span};
                Expr e = Expr::sum(tok_.text);
                refs.push_back(std::move(r));
                advance();
                expect_symbol(')');
                return e;
            }
            PendingRef r{tok_.text, tok_.span};
            Expr e = Expr::ref(tok_.text);
            refs.push_back(std::move(r));
            advance();
            return e;
        }
        throw ParseError(tok_.span, "expected an expression");
    }

    LineLexer lexer_;
    Token tok_;
};

}  // namespace

Model parse_model(std::string_view source) {
    Model model;
    std::vector<std::vector<PendingRef>> refs_per_var;
    std::set<std::string> canonical_seen;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        std::size_t eol = source.find('\n', pos);
        std::string_view line = source.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
        if (!blank) {
            StatementParser p(line, line_no);
            p.parse_into(model, refs_per_var, canonical_seen);
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }

    // second pass: every VarRef must name a declared variable
    for (std::size_t i = 0; i < refs_per_var.size(); ++i) {
        for (const auto& r : refs_per_var[i]) {
            if (!model.find(r.name))
                throw ParseError(r.span, fmt::format("reference to undeclared variable '{}'", r.name));
        }
    }
    return model;
}

namespace {

bool label_needs_quotes(const std::string& label) {
    if (label.empty()) return true;
    if (!is_ident_start(label[0])) return true;
    for (char c : label)
        if (!is_ident_char(c)) return true;
    static const std::set<std::string> keywords = {"dimension", "input", "param",
                                                   "calc", "out", "over", "SUM"};
    return keywords.contains(label);
}

std::string emit_label(const std::string& label) {
    if (!label_needs_quotes(label)) return label;
    return "\"" + label + "\"";
}

int prec_of(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::BinOp:
        switch (e.op) {
        case '+': case '-': return 1;
        case '*': case '/': return 2;
        case '^': return 4;
        }
        return 0;
    case Expr::Kind::Neg: return 3;
    default: return 100;  // leaves and calls never need parens
    }
}

void render(const Expr& e, std::string& out) {
    switch (e.kind) {
    case Expr::Kind::Number:
        out += format_number(e.number);
        break;
    case Expr::Kind::VarRef:
        out += e.name;
        break;
    case Expr::Kind::Agg:
        out += "SUM(" + e.name + ")";
        break;
    case Expr::Kind::Neg: {
        out += "-";
        const Expr& c = e.children[0];
        if (prec_of(c) < 100) {
            out += "(";
            render(c, out);
            out += ")";
        } else {
            render(c, out);
        }
        break;
    }
    case Expr::Kind::BinOp: {
        int p = prec_of(e);
        const Expr& l = e.children[0];
        const Expr& r = e.children[1];
        bool lp = prec_of(l) < p || (prec_of(l) == p && e.op == '^');
        // '^ -x' stays unparenthesized: the grammar admits unary minus there
        bool rp = (prec_of(r) < p || (prec_of(r) == p && e.op != '^')) &&
                  !(e.op == '^' && r.kind == Expr::Kind::Neg);
        if (lp) out += "(";
        render(l, out);
        if (lp) out += ")";
        out += fmt::format(" {} ", e.op);
        if (rp) out += "(";
        render(r, out);
        if (rp) out += ")";
        break;
    }
    }
}

}  // namespace

std::string expr_to_string(const Expr& e) {
    std::string out;
    render(e, out);
    return out;
}

std::string emit_model(const Model& m) {
    std::ostringstream os;
    if (m.dimension) {
        os << "dimension " << m.dimension->name << " = [";
        for (std::size_t i = 0; i < m.dimension->instances.size(); ++i) {
            if (i) os << ", ";
            os << emit_label(m.dimension->instances[i]);
        }
        os << "]\n";
    }
    for (const auto& v : m.variables) {
        switch (v.kind) {
        case VariableKind::Input: os << "input "; break;
        case VariableKind::Parameter: os << "param "; break;
        case VariableKind::Calculated: os << "calc "; break;
        case VariableKind::Output: os << "calc out "; break;
        }
        os << emit_label(v.display_label);
        if (v.repeating) os << " over " << m.dimension->name;
        os << " = ";
        if (is_given(v.kind)) {
            if (v.repeating) {
                os << "[";
                for (std::size_t i = 0; i < v.literals.size(); ++i) {
                    if (i) os << ", ";
                    os << format_number(v.literals[i]);
                }
                os << "]";
            } else {
                os << format_number(v.literals.at(0));
            }
        } else {
            os << expr_to_string(*v.formula);
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace ssmi
