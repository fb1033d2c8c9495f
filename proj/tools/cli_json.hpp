#pragma once

// JSON output with every double printed as %.17g and infinities as strings.

#include <json.hpp>  // vendored nlohmann/json

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace tailbound::cli {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v < 0 ? "\"-inf\"" : "\"inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_json(std::ostream& out, const Json& j, int indent = 0) {
    const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
    const std::string close_pad(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ",\n";
                first = false;
                out << pad << Json(it.key()).dump() << ": ";
                write_json(out, it.value(), indent + 2);
            }
            out << "\n" << close_pad << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out << ",\n";
                first = false;
                out << pad;
                write_json(out, v, indent + 2);
            }
            out << "\n" << close_pad << "]";
            return;
        }
        case Json::value_t::number_float:
            out << format_double(j.get<double>());
            return;
        default:
            out << j.dump();
            return;
    }
}

}  // namespace tailbound::cli
