#include "core/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace sgsde {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void JsonWriter::separator() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!needs_comma_.empty()) {
        if (needs_comma_.back()) out_ += ',';
        needs_comma_.back() = true;
    }
}

void JsonWriter::raw(const std::string& s) {
    separator();
    out_ += s;
}

JsonWriter& JsonWriter::begin_object() {
    raw("{");
    needs_comma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    needs_comma_.pop_back();
    out_ += '}';
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    raw("[");
    needs_comma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    needs_comma_.pop_back();
    out_ += ']';
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
    value(k);
    out_ += ':';
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    if (!std::isfinite(v)) return null_value();
    raw(g17(v));
    return *this;
}

JsonWriter& JsonWriter::value(int v) {
    raw(std::to_string(v));
    return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
    raw(std::to_string(v));
    return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
    raw(std::to_string(v));
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    raw(v ? "true" : "false");
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    std::string s = "\"";
    for (char c : v) {
        switch (c) {
            case '"': s += "\\\""; break;
            case '\\': s += "\\\\"; break;
            case '\n': s += "\\n"; break;
            case '\t': s += "\\t"; break;
            case '\r': s += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    s += buf;
                } else {
                    s += c;
                }
        }
    }
    s += '"';
    raw(s);
    return *this;
}

JsonWriter& JsonWriter::value(const char* v) {
    return value(std::string(v));
}

JsonWriter& JsonWriter::value(const Vector& v) {
    begin_array();
    for (Eigen::Index i = 0; i < v.size(); ++i) value(v(i));
    return end_array();
}

JsonWriter& JsonWriter::value(const Matrix& m) {
    begin_array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        begin_array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) value(m(i, j));
        end_array();
    }
    return end_array();
}

JsonWriter& JsonWriter::value(const std::vector<double>& v) {
    begin_array();
    for (double x : v) value(x);
    return end_array();
}

JsonWriter& JsonWriter::null_value() {
    raw("null");
    return *this;
}

void write_text_file(const std::string& filename, const std::string& content) {
    std::ofstream out(filename, std::ios::binary);
    if (!out) throw IoError("cannot open '" + filename + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + filename + "'");
}

std::string read_text_file(const std::string& filename) {
    std::ifstream in(filename, std::ios::binary);
    if (!in) throw IoError("cannot open '" + filename + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace sgsde
