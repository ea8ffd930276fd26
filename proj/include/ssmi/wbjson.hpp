#pragma once

#include <string>
#include <string_view>

#include "ssmi/workbook.hpp"

namespace ssmi {

class SchemaError : public Error {
public:
    SchemaError(std::string pointer, const std::string& message);
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;  // JSON pointer to the offending element
};

// Canonical workbook JSON: sorted keys, stable bytes.
// {"names":[{"n":..,"range":..,"sheet":..}],
//  "sheets":[{"cells":{"B6":{"f":"=B5*B6"}|{"v":13062.0}|{"l":"Price","s":"bi"}},
//             "kind":"model","name":"Model"}]}
std::string write_json(const Workbook& wb);
Workbook read_json(std::string_view bytes);

}  // namespace ssmi
