#include "ssmi/workbook_gen.hpp"

#include <fmt/format.h>
#include <map>
#include <set>

namespace ssmi {

namespace {

constexpr int kMaxColumns = 16384;  // spreadsheet column limit (XFD)
constexpr int kFirstDataCol = 2;    // labels in A, data from B

void visit_layout(const Model& m, const std::string& name, std::set<std::string>& seen,
                  std::vector<std::string>& order) {
    if (seen.contains(name)) return;
    seen.insert(name);
    const Variable* v = m.find(name);
    if (v && v->formula) {
        for (const auto& dep : referenced_vars(*v->formula))
            visit_layout(m, dep, seen, order);
    }
    order.push_back(name);
}

}  // namespace

std::vector<std::string> layout_order(const Model& m) {
    std::set<std::string> seen;
    std::vector<std::string> order;
    for (const auto& v : m.variables) visit_layout(m, v.canonical_name, seen, order);
    return order;
}

namespace {

class Generator {
public:
    explicit Generator(const Model& m) : model_(m), n_(m.cardinality()) {}

    Workbook run() {
        if (!check_shapes(model_).empty())
            throw Error("model has shape violations; run check_shapes first");
        toposort(model_);  // throws CycleError on cycles
        if (kFirstDataCol - 1 + static_cast<int>(n_) > kMaxColumns)
            throw LayoutOverflowError(
                fmt::format("dimension cardinality {} exceeds the {}-column sheet limit",
                            n_, kMaxColumns));

        build_interface();
        build_parameters();
        build_model_sheets();

        Workbook wb;
        wb.sheets.push_back(std::move(interface_));
        wb.sheets.push_back(std::move(parameters_));
        wb.sheets.push_back(std::move(model_sheet_));
        if (repeating_sheet_) wb.sheets.push_back(std::move(*repeating_sheet_));
        wb.names = std::move(names_);
        return wb;
    }

private:
    int data_cols(bool repeating) const { return repeating ? static_cast<int>(n_) : 1; }

    void define_name(const std::string& name, const Sheet& sheet, CellPos first, int width) {
        names_.push_back({name, sheet.name, first, width});
    }

    void build_interface() {
        interface_.name = "Interface";
        interface_.kind = SheetKind::Interface;
        interface_.set({1, 1}, CellContent::label("Interface"));
        int row = 3;
        bool any_inputs = false;
        for (const auto& v : model_.variables) {
            if (v.kind != VariableKind::Input) continue;
            any_inputs = true;
            interface_.set({1, row}, CellContent::label(v.display_label));
            int cols = data_cols(v.repeating);
            for (int c = 0; c < cols; ++c) {
                double def = v.literals.empty() ? 0.0
                             : v.literals.size() == 1 ? v.literals[0]
                                                      : v.literals.at(c);
                interface_.set({kFirstDataCol + c, row}, CellContent::literal(def));
            }
            define_name(v.canonical_name + "__entry", interface_, {kFirstDataCol, row}, cols);
            ++row;
        }

        std::vector<const Variable*> outputs;
        bool any_repeating_output = false;
        for (const auto& v : model_.variables) {
            if (v.kind != VariableKind::Output) continue;
            outputs.push_back(&v);
            any_repeating_output |= v.repeating;
        }
        if (outputs.empty()) return;
        if (any_inputs) ++row;  // blank separator
        if (any_repeating_output) {
            interface_.set({1, row}, CellContent::label(model_.dimension->name));
            for (std::size_t i = 0; i < n_; ++i)
                interface_.set({kFirstDataCol + static_cast<int>(i), row},
                               CellContent::label(model_.dimension->instances[i]));
            ++row;
        }
        for (const Variable* v : outputs) {
            interface_.set({1, row}, CellContent::label(v->display_label));
            int cols = data_cols(v->repeating);
            for (int c = 0; c < cols; ++c)
                interface_.set({kFirstDataCol + c, row},
                               CellContent::formula(WExpr::nameref(v->canonical_name)));
            ++row;
        }
    }

    void build_parameters() {
        parameters_.name = "Parameters";
        parameters_.kind = SheetKind::Parameters;
        parameters_.set({1, 1}, CellContent::label("Parameters"));
        int row = 3;
        for (const auto& v : model_.variables) {
            if (!is_given(v.kind)) continue;
            parameters_.set({1, row}, CellContent::label(v.display_label));
            int cols = data_cols(v.repeating);
            for (int c = 0; c < cols; ++c) {
                CellPos pos{kFirstDataCol + c, row};
                if (v.kind == VariableKind::Input) {
                    parameters_.set(pos, CellContent::formula(
                                             WExpr::nameref(v.canonical_name + "__entry")));
                } else {
                    double lit = v.literals.size() == 1 ? v.literals[0] : v.literals.at(c);
                    parameters_.set(pos, CellContent::literal(lit));
                }
            }
            define_name(v.canonical_name, parameters_, {kFirstDataCol, row}, cols);
            ++row;
        }
    }

    void build_model_sheets() {
        model_sheet_.name = "Model";
        model_sheet_.kind = SheetKind::Model;
        model_sheet_.set({1, 1}, CellContent::label("Model"));
        int scalar_row = 3;

        bool any_repeating_calc = false;
        for (const auto& v : model_.variables)
            any_repeating_calc |= is_calculated(v.kind) && v.repeating;
        int repeating_row = 0;
        if (any_repeating_calc) {
            Sheet s;
            s.name = "Model " + model_.dimension->name;
            s.kind = SheetKind::ModelRepeating;
            s.set({1, 1}, CellContent::label(s.name));
            s.set({1, 3}, CellContent::label(model_.dimension->name));
            for (std::size_t i = 0; i < n_; ++i)
                s.set({kFirstDataCol + static_cast<int>(i), 3},
                      CellContent::label(model_.dimension->instances[i]));
            repeating_sheet_ = std::move(s);
            repeating_row = 5;  // header block above, one blank row after
        }

        for (const auto& name : layout_order(model_)) {
            const Variable& v = *model_.find(name);
            if (!is_calculated(v.kind)) continue;
            if (v.repeating)
                repeating_row = emit_block(*repeating_sheet_, v, repeating_row);
            else
                scalar_row = emit_block(model_sheet_, v, scalar_row);
        }
    }

    // Lays out one definition block starting at `row`; returns the row the
    // next block starts at (one blank row in between).
    int emit_block(Sheet& sheet, const Variable& v, int row) {
        const int cols = data_cols(v.repeating);
        std::vector<std::string> refs = referenced_vars_outside_agg(*v.formula);

        std::map<std::string, int> ref_row;
        for (const auto& ref_name : refs) {
            const Variable& ref = *model_.find(ref_name);
            sheet.set({1, row}, CellContent::label(ref.display_label));
            for (int c = 0; c < cols; ++c)
                sheet.set({kFirstDataCol + c, row},
                          CellContent::formula(WExpr::nameref(ref.canonical_name)));
            ref_row[ref_name] = row;
            ++row;
        }

        CellContent def_label = CellContent::label(v.display_label);
        def_label.bold_italic = true;
        sheet.set({1, row}, std::move(def_label));
        for (int c = 0; c < cols; ++c) {
            WExpr f = render_definition(*v.formula, kFirstDataCol + c, ref_row);
            CellContent content = CellContent::formula(std::move(f));
            content.bold_italic = true;
            sheet.set({kFirstDataCol + c, row}, std::move(content));
        }
        define_name(v.canonical_name, sheet, {kFirstDataCol, row}, cols);
        return row + 2;
    }

    // Model expression -> definition formula: VarRefs become relative local
    // refs into the block's reference rows, aggregates stay SUM(<Name>).
    WExpr render_definition(const Expr& e, int col, const std::map<std::string, int>& ref_row) const {
        switch (e.kind) {
        case Expr::Kind::Number:
            return WExpr::num(e.number);
        case Expr::Kind::VarRef:
            return WExpr::cellref({col, ref_row.at(e.name), false, false});
        case Expr::Kind::Agg:
            return WExpr::sum(e.name);
        case Expr::Kind::Neg:
            return WExpr::neg(render_definition(e.children[0], col, ref_row));
        case Expr::Kind::BinOp:
            return WExpr::bin(e.op, render_definition(e.children[0], col, ref_row),
                              render_definition(e.children[1], col, ref_row));
        }
        throw Error("malformed expression node");
    }

    const Model& model_;
    std::size_t n_;
    Sheet interface_;
    Sheet parameters_;
    Sheet model_sheet_;
    std::optional<Sheet> repeating_sheet_;
    std::vector<DefinedName> names_;
};

}  // namespace

Workbook generate(const Model& m) {
    return Generator(m).run();
}

}  // namespace ssmi
