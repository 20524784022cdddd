#pragma once

#include <string>
#include <vector>

#include "core/linalg.hpp"

namespace sgsde {

// Shortest exact decimal is not enough for the artifact contract: all floats
// are serialized with 17 significant digits, which round-trips doubles.
std::string g17(double v);

// Minimal streaming JSON writer with deterministic field order (insertion
// order, keys emitted exactly once by the caller). Doubles go through g17;
// non-finite values become null.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(std::int64_t v);
    JsonWriter& value(std::uint64_t v);
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& v);
    JsonWriter& value(const char* v);
    JsonWriter& value(const Vector& v);
    JsonWriter& value(const Matrix& m);
    JsonWriter& value(const std::vector<double>& v);
    JsonWriter& null_value();

    std::string str() const { return out_; }

private:
    void separator();
    void raw(const std::string& s);

    std::string out_;
    std::vector<bool> needs_comma_;
    bool pending_key_ = false;
};

void write_text_file(const std::string& filename, const std::string& content);
std::string read_text_file(const std::string& filename);

}  // namespace sgsde
