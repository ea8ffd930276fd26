#include "ssmi/recompute.hpp"

#include <cmath>
#include <fmt/format.h>
#include <set>

namespace ssmi {

namespace {

class Engine {
public:
    Engine(const Workbook& wb, const std::map<std::string, double>& entries) : wb_(wb) {
        for (const auto& [key, value] : entries) {
            const DefinedName* n = wb.find_name(key + "__entry");
            if (!n) n = wb.find_name(key);
            if (!n)
                throw RecomputeError(RecomputeError::Kind::UnresolvedName,
                                     fmt::format("no entry cell for '{}'", key));
            for (int c = 0; c < n->width; ++c) {
                SheetCell sc{n->sheet, {n->first.col + c, n->first.row}};
                values_[sc] = value;
                done_.insert(sc);
            }
        }
    }

    std::map<SheetCell, double> run() {
        for (const auto& sheet : wb_.sheets) {
            for (const auto& [pos, content] : sheet.cells) {
                if (content.type == CellContent::Type::Label) continue;
                value_of({sheet.name, pos});
            }
        }
        return values_;
    }

private:
    double value_of(const SheetCell& sc) {
        if (done_.contains(sc)) return values_.at(sc);
        if (in_progress_.contains(sc))
            throw RecomputeError(RecomputeError::Kind::CellCycle,
                                 fmt::format("cell cycle through {}!{}", sc.sheet, a1(sc.pos)));

        const Sheet* sheet = wb_.find_sheet(sc.sheet);
        double v = 0.0;  // empty and label cells read as zero
        if (sheet) {
            if (const CellContent* c = sheet->cell(sc.pos)) {
                if (c->type == CellContent::Type::Literal) {
                    v = c->value;
                } else if (c->type == CellContent::Type::Formula) {
                    if (!c->ast)
                        throw RecomputeError(
                            RecomputeError::Kind::BadFormula,
                            fmt::format("unparsable formula at {}!{}: {}", sc.sheet,
                                        a1(sc.pos), c->text));
                    in_progress_.insert(sc);
                    v = eval(*c->ast, sc);
                    in_progress_.erase(sc);
                }
            }
        }
        values_[sc] = v;
        done_.insert(sc);
        return v;
    }

    double eval(const WExpr& e, const SheetCell& at) {
        switch (e.kind) {
        case WExpr::Kind::Number:
            return e.number;
        case WExpr::Kind::Cell:
            return value_of({at.sheet, {e.cell.col, e.cell.row}});
        case WExpr::Kind::Name: {
            const DefinedName* n = wb_.find_name(e.name);
            if (!n)
                throw RecomputeError(RecomputeError::Kind::UnresolvedName,
                                     fmt::format("unresolved name '{}' at {}!{}", e.name,
                                                 at.sheet, a1(at.pos)));
            if (n->width == 1) return value_of({n->sheet, n->first});
            int col = at.pos.col;
            if (col < n->first.col || col >= n->first.col + n->width)
                throw RecomputeError(
                    RecomputeError::Kind::NameIntersectionMiss,
                    fmt::format("column {} of {}!{} lies outside name '{}' ({})",
                                col_letters(col), at.sheet, a1(at.pos), e.name,
                                n->range_text()));
            return value_of({n->sheet, {col, n->first.row}});
        }
        case WExpr::Kind::SumName: {
            const DefinedName* n = wb_.find_name(e.name);
            if (!n)
                throw RecomputeError(RecomputeError::Kind::UnresolvedName,
                                     fmt::format("unresolved name '{}' at {}!{}", e.name,
                                                 at.sheet, a1(at.pos)));
            double s = 0;
            for (int c = 0; c < n->width; ++c)
                s += value_of({n->sheet, {n->first.col + c, n->first.row}});
            return s;
        }
        case WExpr::Kind::Neg:
            return -eval(e.children[0], at);
        case WExpr::Kind::BinOp: {
            double a = eval(e.children[0], at);
            double b = eval(e.children[1], at);
            switch (e.op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            case '^': return std::pow(a, b);
            }
            break;
        }
        }
        throw Error("malformed workbook formula node");
    }

    const Workbook& wb_;
    std::map<SheetCell, double> values_;
    std::set<SheetCell> done_;
    std::set<SheetCell> in_progress_;
};

}  // namespace

std::map<SheetCell, double> recompute(const Workbook& wb,
                                      const std::map<std::string, double>& entries) {
    return Engine(wb, entries).run();
}

}  // namespace ssmi
