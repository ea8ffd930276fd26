#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ssmi/auditor.hpp"
#include "ssmi/evaluator.hpp"
#include "ssmi/graph_dot.hpp"
#include "ssmi/model.hpp"
#include "ssmi/parser.hpp"
#include "ssmi/recompute.hpp"
#include "ssmi/transform.hpp"
#include "ssmi/wbjson.hpp"
#include "ssmi/workbook_gen.hpp"
#include "ssmi/xlsx.hpp"

namespace {

// exit code contract: 0 ok/pass, 1 validation or audit errors, 2 usage, 3 I/O
constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

namespace fs = std::filesystem;

struct CliError {
    int code;
    std::string message;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{kIo, fmt::format("cannot read '{}'", path.string())};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// failed commands must not leave partial output behind
void write_file_atomic(const fs::path& path, std::string_view bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CliError{kIo, fmt::format("cannot write '{}'", tmp.string())};
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw CliError{kIo, fmt::format("failed writing '{}'", tmp.string())};
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw CliError{kIo, fmt::format("cannot move '{}' into place: {}", tmp.string(),
                                            ec.message())};
}

ssmi::Model load_model(const fs::path& path) {
    std::string source = read_file(path);
    try {
        return ssmi::parse_model(source);
    } catch (const ssmi::ParseError& e) {
        throw CliError{kFailed, fmt::format("{}: {}", path.string(), e.what())};
    }
}

// parse + shape + cycle checks; prints complexity warnings to stderr
ssmi::Model compile_checks(const fs::path& path, bool strict) {
    ssmi::Model model = load_model(path);
    auto violations = ssmi::check_shapes(model);
    if (!violations.empty()) {
        std::string msg;
        for (const auto& v : violations) msg += v.message + "\n";
        msg.pop_back();
        throw CliError{kFailed, msg};
    }
    try {
        ssmi::toposort(model);
    } catch (const ssmi::CycleError& e) {
        throw CliError{kFailed, e.what()};
    }
    auto findings = ssmi::complexity_check(model, strict);
    for (const auto& f : findings) {
        std::string ops;
        for (const auto& o : f.ops) ops += (ops.empty() ? "" : ", ") + o;
        std::cerr << (strict ? "error" : "warning") << ": formula of '" << f.variable
                  << "' mixes operator kinds {" << ops << "}\n";
    }
    if (strict && !findings.empty())
        throw CliError{kFailed, "strict mode: mixed-operator formulas rejected"};
    return model;
}

std::string thousands(double v) {
    long long rounded = std::llround(v);
    std::string digits = std::to_string(rounded < 0 ? -rounded : rounded);
    std::string out;
    int count = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (count && count % 3 == 0) out.insert(out.begin(), ',');
        out.insert(out.begin(), *it);
        ++count;
    }
    if (rounded < 0) out.insert(out.begin(), '-');
    return out;
}

int cmd_compile(const fs::path& input, const fs::path& xlsx_out, const fs::path& json_out,
                bool strict) {
    ssmi::Model model = compile_checks(input, strict);
    ssmi::Workbook wb = ssmi::generate(model);
    if (!json_out.empty()) write_file_atomic(json_out, ssmi::write_json(wb));
    if (!xlsx_out.empty()) {
        // same temp-then-rename discipline as the JSON path
        fs::path tmp = xlsx_out;
        tmp += ".tmp";
        ssmi::write_xlsx(wb, tmp);
        std::error_code ec;
        fs::rename(tmp, xlsx_out, ec);
        if (ec) throw CliError{kIo, fmt::format("cannot move '{}' into place", tmp.string())};
    }
    return kOk;
}

int cmd_audit(const fs::path& input, const fs::path& model_path, const std::string& format,
              bool strict) {
    std::string bytes = read_file(input);
    ssmi::Workbook wb;
    try {
        wb = ssmi::read_json(bytes);
    } catch (const ssmi::SchemaError& e) {
        throw CliError{kFailed, fmt::format("{}: schema error at {}", input.string(), e.what())};
    }
    std::optional<ssmi::Model> model;
    if (!model_path.empty()) model = load_model(model_path);

    ssmi::AuditReport report =
        ssmi::audit(wb, model ? &*model : nullptr, {.strict = strict});
    std::cout << (format == "json" ? ssmi::report_json(report) : ssmi::report_text(report));
    return report.pass ? kOk : kFailed;
}

int cmd_eval(const fs::path& input, const std::vector<std::string>& sets,
             const std::vector<std::string>& reports) {
    ssmi::Model model = compile_checks(input, false);

    std::map<std::string, double> inputs;
    for (const auto& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw CliError{kUsage, fmt::format("--set expects Name=value, got '{}'", s)};
        std::string name = s.substr(0, eq);
        const ssmi::Variable* v = model.find(name);
        if (!v || v->kind != ssmi::VariableKind::Input)
            throw CliError{kUsage, fmt::format("'{}' is not an input variable", name)};
        try {
            inputs[name] = std::stod(s.substr(eq + 1));
        } catch (...) {
            throw CliError{kUsage, fmt::format("bad numeric value in '{}'", s)};
        }
    }

    std::vector<std::string> wanted = reports;
    if (wanted.empty()) {
        for (const auto& v : model.variables)
            if (v.kind == ssmi::VariableKind::Output) wanted.push_back(v.canonical_name);
    }
    for (const auto& name : wanted)
        if (!model.find(name))
            throw CliError{kUsage, fmt::format("unknown variable '{}' in --report", name)};

    ssmi::Valuation val;
    try {
        val = ssmi::evaluate(model, inputs);
    } catch (const ssmi::EvalError& e) {
        throw CliError{kFailed, e.what()};
    }

    for (const auto& name : wanted) {
        const auto& values = val.vector(name);
        const ssmi::Variable& v = *model.find(name);
        if (!v.repeating) {
            std::cout << fmt::format("{:<28} {:<24} {}\n", name,
                                     ssmi::format_number(values[0]), thousands(values[0]));
        } else {
            for (std::size_t i = 0; i < values.size(); ++i) {
                std::string key =
                    fmt::format("{}[{}]", name, model.dimension->instances[i]);
                std::cout << fmt::format("{:<28} {:<24} {}\n", key,
                                         ssmi::format_number(values[i]), thousands(values[i]));
            }
        }
    }
    return kOk;
}

int cmd_decompose(const fs::path& input, const fs::path& output) {
    ssmi::Model model = load_model(input);
    ssmi::Model simple;
    try {
        simple = ssmi::decompose(model);
    } catch (const ssmi::NameCollisionError& e) {
        throw CliError{kFailed, e.what()};
    }
    std::string text = ssmi::emit_model(simple);
    if (output.empty())
        std::cout << text;
    else
        write_file_atomic(output, text);
    return kOk;
}

int cmd_graph(const fs::path& input, const fs::path& output) {
    ssmi::Model model = load_model(input);
    std::string dot = ssmi::to_dot(model);
    if (output.empty())
        std::cout << dot;
    else
        write_file_atomic(output, dot);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SSMI structured-spreadsheet compiler and auditor"};
    app.require_subcommand(1);
    app.set_config("--config", "ssmi.toml", "Read defaults from a config file");

    std::string input;
    std::string xlsx_out, json_out, model_path, out_path, format = "text";
    bool strict = false;
    std::vector<std::string> sets, reports;

    CLI::App* compile = app.add_subcommand("compile", "Compile a .ssmi model to a workbook");
    compile->add_option("model", input, "input .ssmi file")->required();
    compile->add_option("--xlsx", xlsx_out, "write an .xlsx package");
    compile->add_option("--json", json_out, "write the canonical .wbjson model");
    compile->add_flag("--strict", strict, "treat mixed-operator formulas as errors");

    CLI::App* auditc = app.add_subcommand("audit", "Audit a .wbjson workbook");
    auditc->add_option("workbook", input, "input .wbjson file")->required();
    auditc->add_option("--model", model_path, "cross-check against a .ssmi model");
    auditc->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    auditc->add_flag("--strict", strict, "complexity findings become errors");

    CLI::App* evalc = app.add_subcommand("eval", "Evaluate a .ssmi model");
    evalc->add_option("model", input, "input .ssmi file")->required();
    evalc->add_option("--set", sets, "override an input, Name=value");
    evalc->add_option("--report", reports, "variables to print (default: all outputs)");

    CLI::App* decomposec = app.add_subcommand("decompose", "Split mixed-operator formulas");
    decomposec->add_option("model", input, "input .ssmi file")->required();
    decomposec->add_option("-o,--output", out_path, "output .ssmi file (default stdout)");

    CLI::App* graphc = app.add_subcommand("graph", "Emit the formula diagram as DOT");
    graphc->add_option("model", input, "input .ssmi file")->required();
    graphc->add_option("-o,--output", out_path, "output .dot file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return kUsage;
    }

    try {
        if (*compile) return cmd_compile(input, xlsx_out, json_out, strict);
        if (*auditc) return cmd_audit(input, model_path, format, strict);
        if (*evalc) return cmd_eval(input, sets, reports);
        if (*decomposec) return cmd_decompose(input, out_path);
        if (*graphc) return cmd_graph(input, out_path);
    } catch (const CliError& e) {
        std::cerr << "ssmi: " << e.message << "\n";
        return e.code;
    } catch (const ssmi::IoError& e) {
        std::cerr << "ssmi: " << e.what() << "\n";
        return kIo;
    } catch (const ssmi::Error& e) {
        std::cerr << "ssmi: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}
