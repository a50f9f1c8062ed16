#include "ensplace/json_out.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ensplace/error.hpp"

namespace ensplace {

namespace {

void indent(std::ostream& os, int depth) {
    for (int i = 0; i < depth; ++i) os << "  ";
}

void emit(const Json& j, std::ostream& os, int depth) {
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) os << ",\n";
                first = false;
                indent(os, depth + 1);
                os << Json(key).dump() << ": ";
                emit(value, os, depth + 1);
            }
            os << "\n";
            indent(os, depth);
            os << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) os << ",\n";
                indent(os, depth + 1);
                emit(j[i], os, depth + 1);
            }
            os << "\n";
            indent(os, depth);
            os << "]";
            return;
        }
        case Json::value_t::number_float:
            os << format_double(j.get<double>());
            return;
        default:
            os << j.dump();
            return;
    }
}

}  // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_json(const Json& j, std::ostream& os) {
    emit(j, os, 0);
    os << "\n";
}

std::string dump_json(const Json& j) {
    std::ostringstream os;
    write_json(j, os);
    return os.str();
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write_json(j, os);
    if (!os) throw IoError("failed writing " + path.string());
}

Json complex_json(cplx z) {
    return Json{{"re", number_or_null(z.real())}, {"im", number_or_null(z.imag())}};
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace ensplace
