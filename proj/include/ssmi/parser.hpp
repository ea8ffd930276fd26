#pragma once

#include <string>
#include <string_view>

#include "ssmi/model.hpp"

namespace ssmi {

struct SourceSpan {
    int line = 1;    // 1-based
    int column = 1;  // 1-based
    int length = 0;
    bool operator==(const SourceSpan&) const = default;
};

class ParseError : public Error {
public:
    ParseError(SourceSpan span, const std::string& message);
    const SourceSpan& span() const { return span_; }

private:
    SourceSpan span_;
};

// Parses the .ssmi model DSL. Line oriented, '#' comments, LF or CRLF.
//   dimension <Name> = [<label>, ...]
//   input <Label> [over <Dim>] = <default literal(s)>
//   param <Label> [over <Dim>] = <literal(s)>
//   calc [out] <Label> [over <Dim>] = <expression>
Model parse_model(std::string_view source);

// Canonical emission; parse_model(emit_model(m)) is structurally equal to m.
std::string emit_model(const Model& m);

// Shortest round-trip decimal form used everywhere numbers are emitted.
std::string format_number(double v);

// Renders an expression in DSL syntax (canonical parenthesization).
std::string expr_to_string(const Expr& e);

}  // namespace ssmi
